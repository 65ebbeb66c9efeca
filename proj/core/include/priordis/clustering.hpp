#pragma once

// Agglomerative clustering with Ward linkage computed through the
// Lance-Williams recurrence over a configurable base dissimilarity, and
// cluster-count selection by the Calinski-Harabasz variance ratio.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace priordis {

enum class Distance { Pearson, Cosine, SquaredEuclidean };

std::string to_string(Distance d);
Distance parse_distance(const std::string& s);

struct ClusterConfig {
  Distance distance = Distance::Pearson;
  int k_min = 2;
  int k_max = 10;  // effective upper bound is min(k_max, n - 1)
  int min_exemplars = 3;

  void validate() const;
  std::string canonical() const;
};

// Pearson: 1 - r (r = 0 when either vector is constant). Cosine: 1 - cos.
double base_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, Distance kind);

// Ward update of d(k, i u j) from d(k, i), d(k, j), d(i, j).
double ward_update(double dki, double dkj, double dij, std::size_t ni, std::size_t nj, std::size_t nk);

struct Merge {
  std::size_t a = 0;  // smaller cluster id
  std::size_t b = 0;
  double cost = 0.0;
  std::size_t size = 0;  // members of the new cluster
};

// Leaves are ids 0..n-1; the t-th merge creates cluster n + t.
struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;

  // Flat labels after the first n - k merges, numbered 0..k-1 in order of
  // each cluster's smallest leaf. Throws for k outside [1, n].
  std::vector<int> cut(std::size_t k) const;
};

// n < 2 yields a dendrogram without merges. Ties between equal-cost pairs go
// to the lexicographically smallest (id_a, id_b).
Dendrogram hac_cluster(std::span<const Eigen::VectorXd> vectors, const ClusterConfig& cfg);

// (B / (k - 1)) / (W / (n - k)) in Euclidean geometry; +infinity when W = 0.
// Requires 2 <= k <= n - 1 distinct labels.
double variance_ratio(std::span<const Eigen::VectorXd> vectors, std::span<const int> labels);

// Labels of the dendrogram cut maximizing the variance ratio over
// k in [k_min, min(k_max, n - 1)]; ties go to the smaller k. With n <= 2 (or
// an empty range) everything lands in cluster 0.
std::vector<int> select_partition(const Dendrogram& dendrogram, std::span<const Eigen::VectorXd> vectors,
                                  const ClusterConfig& cfg);

}  // namespace priordis
