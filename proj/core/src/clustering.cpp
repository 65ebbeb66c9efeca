#include "priordis/clustering.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "priordis/error.hpp"

namespace priordis {

std::string to_string(Distance d) {
  switch (d) {
    case Distance::Pearson: return "pearson";
    case Distance::Cosine: return "cosine";
    case Distance::SquaredEuclidean: return "euclidean";
  }
  return "?";
}

Distance parse_distance(const std::string& s) {
  if (s == "pearson") return Distance::Pearson;
  if (s == "cosine") return Distance::Cosine;
  if (s == "euclidean") return Distance::SquaredEuclidean;
  throw ConfigError("unknown cluster distance '" + s + "' (pearson|cosine|euclidean)");
}

void ClusterConfig::validate() const {
  if (k_min < 2) throw ConfigError("cluster.k_min must be >= 2");
  if (k_max < k_min) throw ConfigError("cluster.k_max must be >= cluster.k_min");
  if (min_exemplars < 1) throw ConfigError("cluster.min_exemplars must be >= 1");
}

std::string ClusterConfig::canonical() const {
  return fmt::format("distance={};linkage=ward;k_min={};k_max={};min_exemplars={}", to_string(distance),
                     k_min, k_max, min_exemplars);
}

double base_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                     Distance kind) {
  if (a.size() != b.size()) throw ShapeError("distance between vectors of different dimension");
  switch (kind) {
    case Distance::SquaredEuclidean: return (a - b).squaredNorm();
    case Distance::Cosine: {
      const double na = a.norm(), nb = b.norm();
      if (na == 0.0 || nb == 0.0) return 1.0;
      return 1.0 - std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
    }
    case Distance::Pearson: {
      const Eigen::VectorXd ca = a.array() - a.mean();
      const Eigen::VectorXd cb = b.array() - b.mean();
      const double na = ca.norm(), nb = cb.norm();
      if (na == 0.0 || nb == 0.0) return 1.0;
      return 1.0 - std::clamp(ca.dot(cb) / (na * nb), -1.0, 1.0);
    }
  }
  return 0.0;
}

double ward_update(double dki, double dkj, double dij, std::size_t ni, std::size_t nj, std::size_t nk) {
  const double fi = static_cast<double>(ni), fj = static_cast<double>(nj), fk = static_cast<double>(nk);
  return ((fi + fk) * dki + (fj + fk) * dkj - fk * dij) / (fi + fj + fk);
}

std::vector<int> Dendrogram::cut(std::size_t k) const {
  if (leaves == 0) return {};
  if (k < 1 || k > leaves) throw Error(fmt::format("cannot cut {} leaves into {} clusters", leaves, k));
  if (merges.size() + 1 < leaves && k < leaves - merges.size())
    throw Error("dendrogram is incomplete for this cut");
  // Union-find over cluster ids; cluster n + t owns its merge's members.
  std::vector<std::size_t> parent(leaves + merges.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const std::size_t applied = leaves - k;
  for (std::size_t t = 0; t < applied; ++t) {
    const std::size_t id = leaves + t;
    parent[find(merges[t].a)] = id;
    parent[find(merges[t].b)] = id;
  }
  std::vector<int> labels(leaves, -1);
  std::map<std::size_t, int> root_label;
  for (std::size_t i = 0; i < leaves; ++i) {
    const auto r = find(i);
    auto [it, fresh] = root_label.emplace(r, static_cast<int>(root_label.size()));
    labels[i] = it->second;
  }
  return labels;
}

Dendrogram hac_cluster(std::span<const Eigen::VectorXd> vectors, const ClusterConfig& cfg) {
  const std::size_t n = vectors.size();
  Dendrogram dendro;
  dendro.leaves = n;
  if (n < 2) return dendro;

  std::vector<double> dist(n * n, 0.0);
  const auto d = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = base_distance(vectors[i], vectors[j], cfg.distance);

  std::vector<std::size_t> id(n), size(n, 1), nn(n, 0);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());
  std::vector<char> active(n, 1);
  std::iota(id.begin(), id.end(), std::size_t{0});

  const auto refresh = [&](std::size_t s) {
    nnd[s] = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (k == s || !active[k]) continue;
      if (d(s, k) < nnd[s] || (d(s, k) == nnd[s] && id[k] < id[nn[s]])) {
        nnd[s] = d(s, k);
        nn[s] = k;
      }
    }
  };
  for (std::size_t s = 0; s < n; ++s) refresh(s);

  for (std::size_t t = 0; t + 1 < n; ++t) {
    std::size_t best = n;
    std::pair<std::size_t, std::size_t> best_pair{};
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      const std::pair<std::size_t, std::size_t> pair = std::minmax(id[s], id[nn[s]]);
      if (best == n || nnd[s] < nnd[best] || (nnd[s] == nnd[best] && pair < best_pair)) {
        best = s;
        best_pair = pair;
      }
    }
    const std::size_t keep = best, gone = nn[best];
    const double dij = d(keep, gone);
    dendro.merges.push_back(Merge{best_pair.first, best_pair.second, dij, size[keep] + size[gone]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == keep || k == gone) continue;
      d(k, keep) = d(keep, k) = ward_update(d(k, keep), d(k, gone), dij, size[keep], size[gone], size[k]);
    }
    size[keep] += size[gone];
    id[keep] = n + t;
    active[gone] = 0;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) continue;
      if (k == keep || nn[k] == keep || nn[k] == gone) {
        refresh(k);
      } else if (d(k, keep) < nnd[k]) {
        nnd[k] = d(k, keep);
        nn[k] = keep;
      }
    }
  }
  return dendro;
}

double variance_ratio(std::span<const Eigen::VectorXd> vectors, std::span<const int> labels) {
  if (vectors.size() != labels.size()) throw ShapeError("one label per vector required");
  const std::size_t n = vectors.size();
  if (n == 0) throw EmptyInputError("variance ratio of no vectors");
  const Eigen::Index dim = vectors[0].size();

  std::map<int, std::pair<Eigen::VectorXd, std::size_t>> groups;
  Eigen::VectorXd global = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = groups.try_emplace(labels[i], Eigen::VectorXd::Zero(dim), 0);
    it->second.first += vectors[i];
    ++it->second.second;
    global += vectors[i];
  }
  const std::size_t k = groups.size();
  if (k < 2 || k + 1 > n)
    throw UndefinedStatisticError(fmt::format("variance ratio needs 2 <= k <= n - 1 (k = {}, n = {})", k, n));
  global /= static_cast<double>(n);
  for (auto& [label, g] : groups) g.first /= static_cast<double>(g.second);

  double between = 0.0, within = 0.0;
  for (const auto& [label, g] : groups) between += static_cast<double>(g.second) * (g.first - global).squaredNorm();
  for (std::size_t i = 0; i < n; ++i) within += (vectors[i] - groups.at(labels[i]).first).squaredNorm();
  if (within == 0.0) return std::numeric_limits<double>::infinity();
  return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

std::vector<int> select_partition(const Dendrogram& dendrogram, std::span<const Eigen::VectorXd> vectors,
                                  const ClusterConfig& cfg) {
  const std::size_t n = vectors.size();
  if (dendrogram.leaves != n) throw ShapeError("dendrogram does not match the vectors");
  std::vector<int> best(n, 0);
  if (n <= 2) return best;
  const std::size_t lo = static_cast<std::size_t>(cfg.k_min);
  const std::size_t hi = std::min(static_cast<std::size_t>(cfg.k_max), n - 1);
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = lo; k <= hi; ++k) {
    auto labels = dendrogram.cut(k);
    const double score = variance_ratio(vectors, labels);
    if (score > best_score) {
      best_score = score;
      best = std::move(labels);
    }
  }
  return best;
}

}  // namespace priordis
