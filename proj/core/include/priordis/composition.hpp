#pragma once

// Composite phrase vectors under each compared model.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "priordis/holistic.hpp"
#include "priordis/regression.hpp"
#include "priordis/senses.hpp"
#include "priordis/space.hpp"

namespace priordis {

enum class ModelKind { AmbiguousMatrix, DisambiguatedMatrix, Additive, Multiplicative, VerbsOnly, HolisticLookup };

std::string to_string(ModelKind kind);
// Accepts to_string() names and the short forms ambiguous, disambiguated, holistic.
ModelKind parse_model_kind(const std::string& s);
const std::vector<ModelKind>& all_model_kinds();

// Per-sense matrices; matrices[i] belongs to inventory.senses[i].
struct SenseModel {
  SenseInventory inventory;
  std::vector<VerbMatrix> matrices;
};

struct CompositionResources {
  std::shared_ptr<const SemanticSpace> words;
  std::shared_ptr<const HolisticPhraseSpace> holistic;
  std::map<std::string, VerbMatrix> ambiguous;  // by verb lemma
  std::map<std::string, SenseModel> senses;     // by verb lemma
};

class CompositionModel {
 public:
  // Throws LookupError when the resources required by `kind` are missing and
  // ShapeError when the bound spaces disagree in dimension.
  CompositionModel(ModelKind kind, std::shared_ptr<const CompositionResources> resources);

  ModelKind kind() const noexcept { return kind_; }

  // Verb and object are bare lemmas (`play`, `guitar`).
  Eigen::VectorXd compose(const std::string& verb, const std::string& object) const;

  // Sense chosen for `object` under the disambiguated model.
  Assignment sense_for(const std::string& verb, const std::string& object) const;

 private:
  Eigen::VectorXd word(const std::string& lemma, Pos pos) const;

  ModelKind kind_;
  std::shared_ptr<const CompositionResources> res_;
};

struct PairSimilarity {
  double cosine = 0.0;
  bool degenerate = false;  // a composite was the zero vector
};

PairSimilarity pair_similarity(const CompositionModel& model, const PhraseKey& first, const PhraseKey& second);

}  // namespace priordis
