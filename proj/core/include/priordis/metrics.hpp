#pragma once

// Rank metrics, correlations and the paired permutation test.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace priordis {

// Cosine similarity; 0 when either vector is zero.
double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

struct Candidate {
  std::string key;
  Eigen::VectorXd vector;
};

// 1-based rank of `correct_key` among `candidates` ordered by descending
// cosine to `query`. A tie group occupying ranks g+1..g+t places the correct
// candidate at ceil(g + (t+1)/2). Throws LookupError if the key is absent.
std::size_t rank_of_correct(const Eigen::Ref<const Eigen::VectorXd>& query,
                            std::span<const Candidate> candidates, const std::string& correct_key);

// Same tie rule on precomputed scores.
std::size_t rank_from_scores(std::span<const double> scores, std::size_t correct);

double mrr(std::span<const std::size_t> ranks);
double accuracy(std::span<const std::size_t> ranks);

struct CosineSummary {
  double mean = 0.0;
  std::vector<double> per_pair;
};

CosineSummary avg_cosine(std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs);

// 1-based ranks, tied values share the mean of their rank range.
std::vector<double> average_ranks(std::span<const double> xs);

// Throws UndefinedStatisticError for fewer than 2 values or constant input.
double pearson_r(std::span<const double> xs, std::span<const double> ys);
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

double mean(std::span<const double> xs);
// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(std::span<const double> xs);

struct PermutationOptions {
  std::size_t resamples = 100000;
  std::uint64_t seed = 20140601;
  // Enumerate all 2^n sign patterns up to this many pairs.
  std::size_t exact_limit = 16;
};

// Two-sided paired permutation (sign-flip) test on the mean difference a - b.
// Requires equal lengths >= 6 (ShapeError / Error otherwise).
double paired_significance(std::span<const double> a, std::span<const double> b,
                           const PermutationOptions& opts = {});

}  // namespace priordis
