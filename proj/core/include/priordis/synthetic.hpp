#pragma once

// Desk-scale planted-sense corpus generator.
//
// Every object noun carries a sparse non-negative feature profile x that
// governs the feature words around it in noun sentences. Each verb sense s
// owns a block of context words and a sparse non-negative map M_s; the
// context distribution of the phrase (verb, object) is
//   h = max(0, M_s x / mean(M_s x) + noise * N(0, 1))
// over the block, and phrase sentences draw their context words from h.
// Optionally a block of general context words, shared by all verbs, takes a
// fixed share of the mass with a profile M_0 x of its own.
// Objects of one sense share a few topic features, so the object vector is
// enough to tell the senses apart.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "priordis/config.hpp"
#include "priordis/corpus.hpp"
#include "priordis/evaluation.hpp"
#include "priordis/holistic.hpp"

namespace priordis {

struct SyntheticSpec {
  static constexpr double kNoiseLow = 0.0;
  static constexpr double kNoiseMid = 0.5;
  static constexpr double kNoiseHigh = 1.0;

  int verbs = 5;
  int senses_per_verb = 2;
  int objects_per_sense = 16;      // training and supervised-task objects
  int test_objects_per_sense = 4;  // held out, used by the similarity dataset
  int shared_features = 8;        // feature words any object may use
  int topic_features = 4;          // per object class (verb sense)
  int active_features = 3;         // shared features per object
  double topic_weight = 0.5;
  int context_words = 12;          // block size per verb sense
  int map_fan_in = 2;              // nonzeros per row of M_s
  int general_words = 0;           // verb-independent context words driven by the object
  double general_share = 0.5;      // probability mass of the general words
  double disjointness = 1.0;       // 0: senses share one block, 1: disjoint blocks
  double noise = kNoiseMid;
  bool shared_map = false;         // every sense reuses the first sense's block and map
  int noun_sentences = 40;
  int noun_sentence_features = 6;
  int phrase_occurrences = 20;
  int test_phrase_occurrences = 4;  // occurrences of each held-out phrase
  int phrase_context = 5;          // context tokens before the verb
  int object_gap = 5;              // filler tokens between verb and object
  int similarity_pairs = 120;
  double cross_verb_share = 0.2;   // fraction of similarity pairs with two different verbs
  std::uint64_t seed = 1;

  // Throws ConfigError for an infeasible spec.
  void validate() const;
};

struct SyntheticLabel {
  std::string verb;
  std::string object;
  int sense = 0;  // 0-based planted sense
  bool test = false;
};

struct SyntheticData {
  Corpus corpus;
  std::vector<RelationOccurrence> relations;
  StopList stop;
  std::vector<SenseAnnotatedDataset> supervised;  // training objects, first two senses
  std::vector<PhraseSimEntry> similarity;         // pairs of test phrases
  std::vector<SyntheticLabel> labels;
  // Planted context distribution of every phrase over the global
  // context-word index; similarity gold scores are cosines of these.
  std::map<PhraseKey, Eigen::VectorXd> planted;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Pipeline settings sized for the generated corpus (paths left empty).
PipelineConfig synthetic_pipeline_config(const SyntheticSpec& spec);

// Writes corpus.txt, relations.tsv, stoplist.txt, supervised.tsv,
// similarity.tsv, labels.tsv and a pipeline.cfg pointing at them.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir,
                     const PipelineConfig& cfg);

}  // namespace priordis
