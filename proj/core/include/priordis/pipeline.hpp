#pragma once

// Pipeline stages over one PipelineConfig, both in memory and as persisted
// subcommands sharing an artifact directory:
//
//   artifacts/word_space.tsv, word_space.json
//   artifacts/holistic_space.tsv, holistic_space.json
//   artifacts/senses/<verb>.json
//   artifacts/matrices/<verb>.amb.tsv, <verb>.s<id>.tsv
//   artifacts/reports/{supervised,similarity}.{json,tsv}
//
// Every artifact records the config hash; loading one produced under a
// different hash throws ConfigError unless `force` is set.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "priordis/composition.hpp"
#include "priordis/config.hpp"
#include "priordis/evaluation.hpp"
#include "priordis/holistic.hpp"
#include "priordis/senses.hpp"

namespace priordis {

// ---- in-memory stages -------------------------------------------------------

struct WordSpaceResult {
  SemanticSpace space;
  Vocabulary vocabulary;
};

WordSpaceResult build_word_space(const Corpus& corpus, const StopList& stop, const PipelineConfig& cfg);

// Phrase contexts are counted over the word space's basis.
HolisticPhraseSpace build_holistic_space(const Corpus& corpus, const std::vector<RelationOccurrence>& relations,
                                         const Vocabulary& vocabulary, const PipelineConfig& cfg);

// Phrases of the similarity dataset; never used for training.
std::set<PhraseKey> held_out_phrases(const std::vector<PhraseSimEntry>& similarity);

// Sorted objects with a holistic vector for (verb, object), a word vector and
// no held-out phrase.
std::vector<std::string> training_objects(const std::string& verb, const SemanticSpace& words,
                                          const HolisticPhraseSpace& holistic,
                                          const std::set<PhraseKey>& held_out);

// Clusters the sentence contexts of the verb's occurrences with `objects`.
// Throws EmptyInputError when no occurrence yields a context vector.
SenseInventory induce_verb_senses(const std::string& verb, const std::vector<std::string>& objects,
                                  const Corpus& corpus, const std::vector<RelationOccurrence>& relations,
                                  const SemanticSpace& words, const ClusterConfig& cfg);

TrainingSet verb_training_set(const std::string& verb, const std::vector<std::string>& objects,
                              const SemanticSpace& words, const HolisticPhraseSpace& holistic);

VerbMatrix train_ambiguous(const std::string& verb, const std::vector<std::string>& objects,
                           const SemanticSpace& words, const HolisticPhraseSpace& holistic,
                           const RegressionConfig& reg);

// One matrix per sense. Objects outside the inventory join the sense their
// word vector is assigned to; a single-sense inventory trains on every object,
// which reproduces the ambiguous matrix exactly in full-batch mode.
SenseModel train_per_sense(const std::string& verb, const SenseInventory& inventory,
                           const std::vector<std::string>& objects, const SemanticSpace& words,
                           const HolisticPhraseSpace& holistic, const RegressionConfig& reg);

struct SimilarityRun {
  SimilarityReport report;
  std::map<std::string, SenseInventory> inventories;
};

// Induces senses, trains both matrix models on the non-held-out objects of
// every verb in the dataset and scores all models.
SimilarityRun run_similarity_pipeline(const Corpus& corpus, const std::vector<RelationOccurrence>& relations,
                                      const std::vector<PhraseSimEntry>& dataset,
                                      std::shared_ptr<const SemanticSpace> words,
                                      std::shared_ptr<const HolisticPhraseSpace> holistic,
                                      const PipelineConfig& cfg, unsigned jobs = 1);

SupervisedOptions supervised_options(const PipelineConfig& cfg, unsigned jobs = 1);
PermutationOptions permutation_options(const PipelineConfig& cfg);

// ---- persisted subcommands ----------------------------------------------------

struct CommandOptions {
  unsigned jobs = 1;
  bool force = false;
  std::vector<std::string> verbs;  // overrides the config's verb list
};

class ArtifactStore {
 public:
  ArtifactStore(std::filesystem::path root, std::string config_hash, bool force = false);

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::string& config_hash() const noexcept { return hash_; }

  std::filesystem::path word_space() const { return root_ / "word_space.tsv"; }
  std::filesystem::path word_manifest() const { return root_ / "word_space.json"; }
  std::filesystem::path holistic_space() const { return root_ / "holistic_space.tsv"; }
  std::filesystem::path holistic_manifest() const { return root_ / "holistic_space.json"; }
  std::filesystem::path senses(const std::string& verb) const { return root_ / "senses" / (verb + ".json"); }
  std::filesystem::path ambiguous_matrix(const std::string& verb) const;
  std::filesystem::path sense_matrix(const std::string& verb, int sense) const;
  std::filesystem::path report(const std::string& name) const { return root_ / "reports" / name; }

  // Loaders throw MissingArtifactError for absent files and ConfigError for
  // a hash mismatch.
  SemanticSpace load_word_space() const;
  HolisticPhraseSpace load_holistic_space() const;
  SenseInventory load_senses(const std::string& verb) const;
  VerbMatrix load_matrix(const std::filesystem::path& path) const;
  // Loads what `kinds` need for `verbs`; every missing file is listed in one error.
  std::shared_ptr<CompositionResources> load_resources(const std::vector<ModelKind>& kinds,
                                                       const std::vector<std::string>& verbs) const;

  void check_hash(const std::string& found, const std::filesystem::path& artifact) const;

 private:
  std::filesystem::path root_;
  std::string hash_;
  bool force_;
};

void cmd_build_space(const PipelineConfig& cfg, const CommandOptions& opts);
void cmd_build_holistic(const PipelineConfig& cfg, const CommandOptions& opts);
void cmd_induce_senses(const PipelineConfig& cfg, const CommandOptions& opts);
enum class TrainTarget { Ambiguous, PerSense };
void cmd_train(const PipelineConfig& cfg, TrainTarget target, const CommandOptions& opts);
// Phrase file: `verb<whitespace>object` per line. Output is a space TSV keyed `verb object`.
void cmd_compose(const PipelineConfig& cfg, ModelKind model, const std::filesystem::path& phrases,
                 const std::filesystem::path& out, const CommandOptions& opts);
enum class EvalTask { Supervised, Similarity };
void cmd_evaluate(const PipelineConfig& cfg, EvalTask task, const CommandOptions& opts);

}  // namespace priordis
