#pragma once

// The two evaluation protocols: approximating holistic vectors under
// mixed-sense cross-validation, and correlating phrase similarities with
// graded human judgements.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "priordis/composition.hpp"
#include "priordis/metrics.hpp"
#include "priordis/regression.hpp"

namespace priordis {

// One ambiguous verb with two disjoint object lists, one per sense.
struct SenseAnnotatedDataset {
  std::string verb;
  std::vector<std::string> sense1;
  std::vector<std::string> sense2;

  // Throws FormatError if an object appears under both senses.
  void validate() const;
  std::size_t size() const noexcept { return sense1.size() + sense2.size(); }
};

// TSV `verb<TAB>sense_id(1|2)<TAB>object`; verbs in order of first appearance.
std::vector<SenseAnnotatedDataset> read_sense_dataset(std::istream& in);
std::vector<SenseAnnotatedDataset> load_sense_dataset(const std::filesystem::path& path);

struct Fold {
  std::vector<std::string> train[2];
  std::vector<std::string> test[2];
};

// Each sense list is shuffled with `seed` and cut into `folds` near-equal
// parts; fold i tests on part i of both senses and trains on the rest.
// Throws Error when a sense has fewer objects than folds.
std::vector<Fold> crossval_folds(const SenseAnnotatedDataset& dataset, int folds, std::uint64_t seed);

struct MetricSet {
  double accuracy = 0.0;
  double mrr = 0.0;
  double avg_cosine = 0.0;
  std::size_t count = 0;
};

MetricSet summarize(const std::vector<std::size_t>& ranks, const std::vector<double>& cosines);

struct SupervisedVerbResult {
  std::string verb;
  MetricSet ambiguous;
  MetricSet disambiguated;
  std::optional<double> p_value;  // avg-cosine contrast, needs >= 6 test phrases
};

struct SupervisedFoldResult {
  int fold = 0;
  MetricSet ambiguous;
  MetricSet disambiguated;
};

struct SupervisedReport {
  std::vector<SupervisedVerbResult> verbs;
  std::vector<SupervisedFoldResult> folds;
  MetricSet ambiguous;
  MetricSet disambiguated;
  std::optional<double> p_value;
  std::size_t pool_size = 0;
  std::vector<double> ambiguous_cosines;      // per test phrase, aligned
  std::vector<double> disambiguated_cosines;
  std::string config_hash;
};

struct SupervisedOptions {
  int folds = 4;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  PermutationOptions permutation;
};

// Per fold: one ambiguous matrix per verb on the union of both training
// sense sets and one matrix per sense; every dataset phrase is composed with
// the fold's matrices to form the candidate pool, and each test phrase's
// holistic vector ranks its own composite within that pool.
// Throws MissingArtifactError listing phrases without holistic or word vectors.
SupervisedReport run_supervised_task(const std::vector<SenseAnnotatedDataset>& datasets,
                                     const SemanticSpace& words, const HolisticPhraseSpace& holistic,
                                     const RegressionConfig& reg, const SupervisedOptions& opts);

struct PhraseSimEntry {
  PhraseKey first;
  PhraseKey second;
  double score = 0.0;
};

// TSV `verb1<TAB>obj1<TAB>verb2<TAB>obj2<TAB>score`.
std::vector<PhraseSimEntry> read_phrase_sim_dataset(std::istream& in);
std::vector<PhraseSimEntry> load_phrase_sim_dataset(const std::filesystem::path& path);

struct SimilarityModelResult {
  ModelKind model;
  double rho = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;     // pairs the model could not compose
  std::size_t degenerate = 0;  // zero composites, scored as cosine 0
  std::vector<std::optional<double>> cosines;  // per dataset entry
};

struct SimilarityReport {
  std::vector<SimilarityModelResult> models;
  std::optional<double> p_value;  // disambiguated vs ambiguous, when both were run
  std::optional<double> human_agreement;
  std::string config_hash;

  const SimilarityModelResult* find(ModelKind kind) const;
};

// Spearman rho between each model's cosines and the gold scores. Pairs a
// model cannot compose are excluded for that model only. Throws
// UndefinedStatisticError when a model has fewer than 2 scorable pairs.
SimilarityReport run_similarity_task(const std::vector<PhraseSimEntry>& dataset,
                                     const std::vector<CompositionModel>& models,
                                     const PermutationOptions& permutation = {});

// Paired test for a difference in Spearman rho over the same pairs: each
// pair's model ranks are swapped at random between the two models.
double paired_rho_significance(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                               const std::vector<double>& gold, const PermutationOptions& opts = {});

std::string supervised_report_json(const SupervisedReport& r);
std::string supervised_report_tsv(const SupervisedReport& r);
std::string similarity_report_json(const SimilarityReport& r);
std::string similarity_report_tsv(const SimilarityReport& r);

}  // namespace priordis
