#include "priordis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "priordis/error.hpp"

namespace priordis {

double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw ShapeError("cosine of vectors with different dimensions");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

std::size_t rank_from_scores(std::span<const double> scores, std::size_t correct) {
  if (correct >= scores.size()) throw LookupError("correct candidate index out of range");
  const double target = scores[correct];
  std::size_t greater = 0, tied = 0;
  for (double s : scores) {
    if (s > target) ++greater;
    else if (s == target) ++tied;
  }
  // ceil(g + (t + 1) / 2) with integer arithmetic.
  return greater + (tied + 2) / 2;
}

std::size_t rank_of_correct(const Eigen::Ref<const Eigen::VectorXd>& query,
                            std::span<const Candidate> candidates, const std::string& correct_key) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  std::size_t correct = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].key == correct_key) correct = i;
    scores.push_back(cosine(query, candidates[i].vector));
  }
  if (correct == candidates.size())
    throw LookupError("correct candidate '" + correct_key + "' is not in the pool");
  return rank_from_scores(scores, correct);
}

double mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw EmptyInputError("MRR of an empty rank list");
  double sum = 0.0;
  for (auto r : ranks) {
    if (r == 0) throw Error("ranks are 1-based");
    sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(ranks.size());
}

double accuracy(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw EmptyInputError("accuracy of an empty rank list");
  const auto hits = std::count(ranks.begin(), ranks.end(), std::size_t{1});
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

CosineSummary avg_cosine(std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs) {
  if (pairs.empty()) throw EmptyInputError("average cosine of an empty pair list");
  CosineSummary out;
  out.per_pair.reserve(pairs.size());
  for (const auto& [h, c] : pairs) out.per_pair.push_back(cosine(h, c));
  out.mean = mean(out.per_pair);
  return out;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw EmptyInputError("mean of an empty list");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) throw UndefinedStatisticError("standard error needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return sd / std::sqrt(static_cast<double>(xs.size()));
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ShapeError("correlation of lists with different lengths");
  if (xs.size() < 2) throw UndefinedStatisticError("correlation needs at least 2 values");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedStatisticError("correlation of a constant list is undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ShapeError("correlation of lists with different lengths");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson_r(rx, ry);
}

double paired_significance(std::span<const double> a, std::span<const double> b,
                           const PermutationOptions& opts) {
  if (a.size() != b.size()) throw ShapeError("paired test on lists of different lengths");
  if (a.size() < 6) throw UndefinedStatisticError("paired test needs at least 6 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double observed = std::abs(std::accumulate(d.begin(), d.end(), 0.0));
  // Relative slack so sign patterns equal to the observed one up to rounding count as extreme.
  const double slack = 1e-12 * std::max(1.0, observed);

  if (n <= opts.exact_limit) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t extreme = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1U) ? -d[i] : d[i];
      if (std::abs(s) >= observed - slack) ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(patterns);
  }

  std::mt19937_64 rng(opts.seed);
  std::uint64_t extreme = 0;
  for (std::size_t r = 0; r < opts.resamples; ++r) {
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      s += (bits & 1U) ? -d[i] : d[i];
      bits >>= 1;
    }
    if (std::abs(s) >= observed - slack) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(opts.resamples + 1);
}

}  // namespace priordis
