#pragma once

// Flat key-value pipeline configuration.
//
// Grammar: one `key = value` per line; `#` starts a comment; blank lines are
// ignored; keys are case-sensitive; unknown keys are an error. Relative paths
// are resolved against the directory of the config file.
//
//   corpus, stoplist, relations, artifacts              paths
//   supervised_dataset, similarity_dataset, wordsim_dataset   optional paths
//   seed                                                 integer
//   verbs                                                comma-separated, optional
//   space.{window, basis_size, top_exclusions, min_occurrences, svd_dim,
//          pmi_log_base (e|2|10), clip_negative_lmi (true|false)}
//   holistic.{window, min_phrase_count, svd_dim}
//   regression.{lambda, learning_rate (number|auto), max_iters, tol,
//               init (zero|gaussian), init_sigma, mode (full_batch|stochastic)}
//   cluster.{distance (pearson|cosine|euclidean), k_min, k_max, min_exemplars}
//   eval.{folds, permutations, human_agreement}

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "priordis/clustering.hpp"
#include "priordis/corpus.hpp"
#include "priordis/holistic.hpp"
#include "priordis/regression.hpp"

namespace priordis {

struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path stoplist;
  std::filesystem::path relations;
  std::filesystem::path supervised_dataset;
  std::filesystem::path similarity_dataset;
  std::filesystem::path wordsim_dataset;
  std::filesystem::path artifacts = "artifacts";

  std::uint64_t seed = 1;
  std::vector<std::string> verbs;

  SpaceConfig space;
  HolisticConfig holistic;
  RegressionConfig regression;
  ClusterConfig cluster;

  int folds = 4;
  std::size_t permutations = 100000;
  std::optional<double> human_agreement;

  // Throws ConfigError for malformed lines, unknown keys or bad values.
  static PipelineConfig parse(std::istream& in, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);

  void validate() const;
  void set_seed(std::uint64_t s);

  // Every result-affecting parameter in a fixed order. Paths are left out so
  // relocating inputs or outputs does not change the fingerprint.
  std::string canonical() const;
  std::string hash() const;

  // The config back in file form (paths as given, absolute after load).
  std::string to_text() const;
};

}  // namespace priordis
