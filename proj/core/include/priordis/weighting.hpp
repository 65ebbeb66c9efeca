#pragma once

// Weighting and reduction shared by the word space and the holistic phrase
// space: counts -> LMI -> unit rows -> truncated SVD.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "priordis/corpus.hpp"
#include "priordis/space.hpp"

namespace priordis {

struct WeightingOptions {
  double log_base = std::numbers::e;
  bool clip_negative = false;
};

// cell(t, c) = n(t, c) * log(n(t, c) * N / (n(t) * n(c))), zero where n(t, c) = 0.
// Marginals and N are taken from the matrix itself. Throws EmptyInputError
// when the grand total is zero.
Eigen::MatrixXd weight_lmi(const CooccurrenceMatrix& counts, const WeightingOptions& opts = {});
Eigen::MatrixXd weight_lmi(const CooccurrenceMatrix& counts, const SpaceConfig& cfg);

// Scales every nonzero row to unit L2 norm; zero rows are left alone.
void normalize_rows(Eigen::MatrixXd& m);
Eigen::MatrixXd normalized_rows(Eigen::MatrixXd m);

struct SvdReduction {
  Eigen::MatrixXd projected;        // rows x k, equal to X * V_k
  Eigen::VectorXd singular_values;  // k, non-increasing
  Eigen::MatrixXd right_vectors;    // cols x k
};

// Projects rows onto the top-k right singular directions. Each right singular
// vector is signed so that its largest-magnitude entry is positive. When k
// exceeds the rank the trailing components are zero. Throws ConfigError for k <= 0.
SvdReduction reduce_svd(const Eigen::MatrixXd& x, int k);

// counts -> weighted -> normalized -> reduced -> rows rescaled to unit length.
SemanticSpace weigh_and_reduce(const CooccurrenceMatrix& counts, std::vector<std::string> keys,
                               const WeightingOptions& opts, int svd_dim);

// End-to-end word space: vocabulary, counting, weighting, reduction.
SemanticSpace build_semantic_space(const Corpus& corpus, const SpaceConfig& cfg,
                                   const StopList& stop = {}, Vocabulary* vocab_out = nullptr);

}  // namespace priordis
