#include "priordis/composition.hpp"

#include <fmt/format.h>

#include "priordis/error.hpp"
#include "priordis/metrics.hpp"

namespace priordis {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::AmbiguousMatrix: return "ambiguous_matrix";
    case ModelKind::DisambiguatedMatrix: return "disambiguated_matrix";
    case ModelKind::Additive: return "additive";
    case ModelKind::Multiplicative: return "multiplicative";
    case ModelKind::VerbsOnly: return "verbs_only";
    case ModelKind::HolisticLookup: return "holistic_lookup";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  for (auto k : all_model_kinds())
    if (to_string(k) == s) return k;
  if (s == "ambiguous") return ModelKind::AmbiguousMatrix;
  if (s == "disambiguated") return ModelKind::DisambiguatedMatrix;
  if (s == "holistic") return ModelKind::HolisticLookup;
  throw ConfigError("unknown composition model '" + s + "'");
}

const std::vector<ModelKind>& all_model_kinds() {
  static const std::vector<ModelKind> kinds{ModelKind::VerbsOnly,       ModelKind::Additive,
                                            ModelKind::Multiplicative,  ModelKind::AmbiguousMatrix,
                                            ModelKind::DisambiguatedMatrix, ModelKind::HolisticLookup};
  return kinds;
}

CompositionModel::CompositionModel(ModelKind kind, std::shared_ptr<const CompositionResources> resources)
    : kind_(kind), res_(std::move(resources)) {
  if (!res_) throw LookupError("composition model has no resources");
  const bool needs_words = kind != ModelKind::HolisticLookup;
  if (needs_words && !res_->words) throw LookupError(to_string(kind) + " needs a word space");
  if ((kind == ModelKind::HolisticLookup) && !res_->holistic)
    throw LookupError("holistic_lookup needs a holistic phrase space");
  if (kind == ModelKind::AmbiguousMatrix && res_->ambiguous.empty())
    throw LookupError("ambiguous_matrix needs trained verb matrices");
  if (kind == ModelKind::DisambiguatedMatrix && res_->senses.empty())
    throw LookupError("disambiguated_matrix needs sense inventories with per-sense matrices");

  const auto check = [&](const VerbMatrix& vm) {
    if (vm.cols() != res_->words->dim())
      throw ShapeError(fmt::format("matrix for '{}' takes {} dims but the word space has {}", vm.verb,
                                   vm.cols(), res_->words->dim()));
    if (res_->holistic && vm.rows() != res_->holistic->space.dim())
      throw ShapeError(fmt::format("matrix for '{}' emits {} dims but the holistic space has {}", vm.verb,
                                   vm.rows(), res_->holistic->space.dim()));
  };
  if (kind == ModelKind::AmbiguousMatrix)
    for (const auto& [verb, vm] : res_->ambiguous) check(vm);
  if (kind == ModelKind::DisambiguatedMatrix) {
    for (const auto& [verb, sm] : res_->senses) {
      if (sm.matrices.size() != sm.inventory.senses.size())
        throw ShapeError("verb '" + verb + "' has a different number of senses and matrices");
      for (const auto& vm : sm.matrices) check(vm);
      for (const auto& s : sm.inventory.senses)
        if (s.centroid.size() != res_->words->dim())
          throw ShapeError("sense centroids of '" + verb + "' do not live in the word space");
    }
  }
}

Eigen::VectorXd CompositionModel::word(const std::string& lemma, Pos pos) const {
  const auto key = term_key(lemma, pos);
  const auto row = res_->words->find(key);
  if (!row) throw LookupError("word '" + key + "' is not in the word space");
  return res_->words->row(*row);
}

Assignment CompositionModel::sense_for(const std::string& verb, const std::string& object) const {
  const auto it = res_->senses.find(verb);
  if (it == res_->senses.end()) throw LookupError("no sense inventory for verb '" + verb + "'");
  return assign_object(word(object, Pos::Noun), it->second.inventory);
}

Eigen::VectorXd CompositionModel::compose(const std::string& verb, const std::string& object) const {
  switch (kind_) {
    case ModelKind::AmbiguousMatrix: {
      const auto it = res_->ambiguous.find(verb);
      if (it == res_->ambiguous.end()) throw LookupError("no ambiguous matrix for verb '" + verb + "'");
      return apply_verb(it->second, word(object, Pos::Noun));
    }
    case ModelKind::DisambiguatedMatrix: {
      const auto it = res_->senses.find(verb);
      if (it == res_->senses.end()) throw LookupError("no sense inventory for verb '" + verb + "'");
      const Eigen::VectorXd noun = word(object, Pos::Noun);
      const auto a = assign_object(noun, it->second.inventory);
      return apply_verb(it->second.matrices.at(static_cast<std::size_t>(a.sense)), noun);
    }
    case ModelKind::Additive: return word(verb, Pos::Verb) + word(object, Pos::Noun);
    case ModelKind::Multiplicative: return word(verb, Pos::Verb).cwiseProduct(word(object, Pos::Noun));
    case ModelKind::VerbsOnly: return word(verb, Pos::Verb);
    case ModelKind::HolisticLookup: {
      const PhraseKey key{verb, object};
      const auto row = res_->holistic->space.find(key.str());
      if (!row) throw HolisticMissError("no holistic vector for '" + key.str() + "'");
      return res_->holistic->space.row(*row);
    }
  }
  throw Error("unhandled composition model");
}

PairSimilarity pair_similarity(const CompositionModel& model, const PhraseKey& first, const PhraseKey& second) {
  const Eigen::VectorXd a = model.compose(first.verb, first.object);
  const Eigen::VectorXd b = model.compose(second.verb, second.object);
  if (a.size() != b.size()) throw ShapeError("composites of one model live in different spaces");
  PairSimilarity out;
  out.degenerate = a.norm() == 0.0 || b.norm() == 0.0;
  out.cosine = out.degenerate ? 0.0 : cosine(a, b);
  return out;
}

}  // namespace priordis
