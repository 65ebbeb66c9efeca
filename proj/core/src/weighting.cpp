#include "priordis/weighting.hpp"

#include <cmath>

#include "priordis/error.hpp"

namespace priordis {

Eigen::MatrixXd weight_lmi(const CooccurrenceMatrix& counts, const WeightingOptions& opts) {
  const auto rows = static_cast<Eigen::Index>(counts.rows());
  const auto cols = static_cast<Eigen::Index>(counts.cols());
  std::vector<double> row_sum(counts.rows(), 0.0), col_sum(counts.cols(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < counts.rows(); ++r) {
    for (const auto& [c, n] : counts.row(r)) {
      row_sum[r] += static_cast<double>(n);
      col_sum[c] += static_cast<double>(n);
      total += static_cast<double>(n);
    }
  }
  if (total == 0.0) throw EmptyInputError("co-occurrence matrix has zero grand total");

  const double log_scale = 1.0 / std::log(opts.log_base);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t r = 0; r < counts.rows(); ++r) {
    for (const auto& [c, n] : counts.row(r)) {
      const double nd = static_cast<double>(n);
      const double pmi = std::log(nd * total / (row_sum[r] * col_sum[c])) * log_scale;
      double v = nd * pmi;
      if (opts.clip_negative && v < 0.0) v = 0.0;
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return w;
}

Eigen::MatrixXd weight_lmi(const CooccurrenceMatrix& counts, const SpaceConfig& cfg) {
  return weight_lmi(counts, WeightingOptions{cfg.pmi_log_base, cfg.clip_negative_lmi});
}

void normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
}

Eigen::MatrixXd normalized_rows(Eigen::MatrixXd m) {
  normalize_rows(m);
  return m;
}

SvdReduction reduce_svd(const Eigen::MatrixXd& x, int k) {
  if (k <= 0) throw ConfigError("SVD target dimension must be positive");
  const Eigen::Index kk = k;
  SvdReduction out;
  out.projected = Eigen::MatrixXd::Zero(x.rows(), kk);
  out.singular_values = Eigen::VectorXd::Zero(kk);
  out.right_vectors = Eigen::MatrixXd::Zero(x.cols(), kk);
  if (x.rows() == 0 || x.cols() == 0) return out;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Eigen::Index keep = std::min<Eigen::Index>(kk, sv.size());
  // Components at numerical zero are not meaningful directions.
  const double floor = sv.size() ? sv(0) * 1e-13 * static_cast<double>(std::max(x.rows(), x.cols())) : 0.0;
  for (Eigen::Index j = 0; j < keep; ++j) {
    if (sv(j) <= floor) break;
    Eigen::VectorXd v = svd.matrixV().col(j);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.right_vectors.col(j) = v;
    out.singular_values(j) = sv(j);
  }
  out.projected = x * out.right_vectors;
  return out;
}

SemanticSpace weigh_and_reduce(const CooccurrenceMatrix& counts, std::vector<std::string> keys,
                               const WeightingOptions& opts, int svd_dim) {
  Eigen::MatrixXd w = weight_lmi(counts, opts);
  normalize_rows(w);
  auto reduced = reduce_svd(w, svd_dim);
  // Projection shortens rows; restore unit length so every stored row is a direction.
  normalize_rows(reduced.projected);
  SemanticSpace::Provenance prov{true, true, svd_dim};
  return SemanticSpace(std::move(keys), std::move(reduced.projected), prov);
}

SemanticSpace build_semantic_space(const Corpus& corpus, const SpaceConfig& cfg,
                                   const StopList& stop, Vocabulary* vocab_out) {
  cfg.validate();
  Vocabulary vocab = build_vocabulary(corpus, cfg, stop);
  if (vocab.targets().empty())
    throw EmptyInputError("no word reaches space.min_occurrences; the space would be empty");
  const auto counts = count_cooccurrences(corpus, vocab, cfg);
  auto space = weigh_and_reduce(counts, vocab.targets(),
                                WeightingOptions{cfg.pmi_log_base, cfg.clip_negative_lmi}, cfg.svd_dim);
  if (vocab_out) *vocab_out = std::move(vocab);
  return space;
}

}  // namespace priordis
