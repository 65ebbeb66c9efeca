// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gen.hpp"
#include "oracles.hpp"
#include "priordis/clustering.hpp"
#include "priordis/metrics.hpp"
#include "priordis/pipeline.hpp"
#include "priordis/regression.hpp"
#include "priordis/synthetic.hpp"
#include "priordis/weighting.hpp"

using namespace priordis;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = b.norm();
  return scale > 0 ? (a - b).norm() / scale : (a - b).norm();
}

// ---- 1 --------------------------------------------------------------------

Outcome regression_equivalence() {
  const double lambdas[] = {0.01, 0.1, 1.0};
  double worst = 0;
  int unconverged = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    gen::Rng r(1000 + seed);
    const int m = r.uniform_int(1, 40);
    const TrainingSet ts{gen::gaussian(r, m, r.uniform_int(1, 30)), gen::gaussian(r, m, r.uniform_int(1, 30)), {}};
    RegressionConfig cfg;
    cfg.lambda = lambdas[seed % 3];
    cfg.auto_step = true;
    cfg.tol = 1e-12;
    cfg.max_iters = 200000;
    const auto gd = train_gd(ts, cfg);
    unconverged += !gd.converged;
    worst = std::max(worst, rel_err(gd.w, closed_form(ts, cfg.lambda).w));
  }
  return {worst < 1e-3, fmt::format("max relative Frobenius error {:.2e} over 50 instances ({} hit max_iters)", worst,
                                    unconverged)};
}

// ---- 2 --------------------------------------------------------------------

Outcome gradient_check() {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    gen::Rng r(2000 + seed);
    const int m = r.uniform_int(1, 10);
    const TrainingSet ts{gen::gaussian(r, m, r.uniform_int(1, 6)), gen::gaussian(r, m, r.uniform_int(1, 6)), {}};
    const double lambda = r.uniform(0.0, 2.0);
    const Eigen::MatrixXd w = gen::gaussian(r, ts.y.cols(), ts.x.cols());
    worst = std::max(worst, rel_err(gradient(w, ts, lambda), oracle::finite_difference_gradient(w, ts, lambda)));
  }
  return {worst < 1e-5, fmt::format("max relative error {:.2e} over 20 instances", worst)};
}

// ---- 3 --------------------------------------------------------------------

Outcome metric_oracles() {
  int mismatches = 0, order_violations = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    gen::Rng r(3000 + seed);
    const auto pool = static_cast<std::size_t>(r.uniform_int(2, 12));
    const int queries = r.uniform_int(1, 15);
    const int levels = r.uniform_int(1, 5);
    std::vector<std::size_t> ranks;
    double rr = 0, hits = 0;
    for (int q = 0; q < queries; ++q) {
      // quantized unit-norm candidates so cosine ties are exact
      const Eigen::VectorXd query = Eigen::VectorXd::Unit(3, 0);
      std::vector<Candidate> cands;
      std::vector<double> scores;
      for (std::size_t c = 0; c < pool; ++c) {
        const double angle = static_cast<double>(r.uniform_int(0, levels)) * 0.3;
        Eigen::VectorXd v(3);
        v << std::cos(angle), std::sin(angle), 0.0;
        cands.push_back({"c" + std::to_string(c), v});
        scores.push_back(cosine(query, v));
      }
      const auto correct = static_cast<std::size_t>(r.uniform_int(0, static_cast<int>(pool) - 1));
      const auto rank = rank_of_correct(query, cands, cands[correct].key);
      const auto brute = oracle::rank_brute(scores, correct);
      mismatches += rank != brute || rank_from_scores(scores, correct) != brute;
      ranks.push_back(rank);
      rr += 1.0 / static_cast<double>(brute);
      hits += brute == 1;
    }
    const double n = static_cast<double>(queries);
    mismatches += std::abs(mrr(ranks) - rr / n) > 1e-12 || accuracy(ranks) != hits / n;
    order_violations += accuracy(ranks) > mrr(ranks);

    const auto len = static_cast<std::size_t>(r.uniform_int(3, 30));
    const auto a = gen::tied_values(r, len, r.uniform_int(2, 6));
    auto b = gen::tied_values(r, len, r.uniform_int(2, 6));
    if (std::all_of(b.begin(), b.end(), [&](double x) { return x == b[0]; })) b[0] += 1.0;
    if (std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; })) {
      ++mismatches;  // generator contract
      continue;
    }
    mismatches += std::abs(spearman_rho(a, b) - oracle::spearman(a, b)) > 1e-12;
  }
  return {mismatches == 0 && order_violations == 0,
          fmt::format("{} oracle mismatches, {} accuracy > MRR violations over 200 fixtures", mismatches,
                      order_violations)};
}

// ---- 4 --------------------------------------------------------------------

Outcome clustering_oracles() {
  int hac_mismatch = 0, non_monotone = 0, ch_mismatch = 0, fixtures = 0;
  for (auto kind : {Distance::Pearson, Distance::Cosine, Distance::SquaredEuclidean}) {
    ClusterConfig cfg;
    cfg.distance = kind;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      gen::Rng r(4000 + seed);
      const int n = r.uniform_int(2, 8);
      const int dim = r.uniform_int(2, 5);
      std::vector<Eigen::VectorXd> pts;
      for (int i = 0; i < n; ++i) pts.push_back(gen::gaussian_vector(r, dim));
      const auto d = hac_cluster(pts, cfg);
      ++fixtures;
      hac_mismatch += !oracle::same_merges(d, oracle::ward_table(oracle::base_distances(pts, kind), &d));
      if (kind == Distance::SquaredEuclidean) hac_mismatch += !oracle::same_merges(d, oracle::ward_euclidean(pts, &d));
      for (std::size_t t = 1; t < d.merges.size(); ++t) non_monotone += d.merges[t].cost < d.merges[t - 1].cost - 1e-12;
      if (n >= 3) {
        const auto k = static_cast<std::size_t>(r.uniform_int(2, n - 1));
        const auto labels = d.cut(k);
        const double vr = variance_ratio(pts, labels);
        ch_mismatch += std::abs(vr - oracle::calinski_harabasz(pts, labels)) > 1e-9 * std::max(1.0, vr);
      }
    }
  }
  int recovered = 0;
  ClusterConfig cfg;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    gen::Rng r(4500 + seed);
    const int k = 2 + static_cast<int>(seed % 2);
    const auto b = gen::blobs(r, k, 12, 10, 0.3, 5.0);
    recovered += gen::same_partition(select_partition(hac_cluster(b.points, cfg), b.points, cfg), b.truth);
  }
  return {hac_mismatch == 0 && non_monotone == 0 && ch_mismatch == 0 && recovered >= 95,
          fmt::format("{} HAC mismatches and {} cost inversions over {} fixtures, {} variance-ratio mismatches, "
                      "planted k recovered in {}/100 seeds",
                      hac_mismatch, non_monotone, fixtures, ch_mismatch, recovered)};
}

// ---- 5 --------------------------------------------------------------------

Outcome supervised_claim() {
  std::vector<double> amb_all, dis_all;
  MetricSet amb_mean, dis_mean;
  int seed_wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    const auto data = generate_synthetic(spec);
    const auto cfg = synthetic_pipeline_config(spec);
    const auto ws = build_word_space(data.corpus, data.stop, cfg);
    const auto hs = build_holistic_space(data.corpus, data.relations, ws.vocabulary, cfg);
    auto opts = supervised_options(cfg);
    opts.permutation.resamples = 100;  // per-seed p-values are not used here
    const auto rep = run_supervised_task(data.supervised, ws.space, hs, cfg.regression, opts);
    amb_all.insert(amb_all.end(), rep.ambiguous_cosines.begin(), rep.ambiguous_cosines.end());
    dis_all.insert(dis_all.end(), rep.disambiguated_cosines.begin(), rep.disambiguated_cosines.end());
    for (auto [sum, m] : {std::pair{&amb_mean, &rep.ambiguous}, std::pair{&dis_mean, &rep.disambiguated}}) {
      sum->accuracy += m->accuracy / 20;
      sum->mrr += m->mrr / 20;
      sum->avg_cosine += m->avg_cosine / 20;
    }
    seed_wins += rep.disambiguated.avg_cosine > rep.ambiguous.avg_cosine && rep.disambiguated.mrr > rep.ambiguous.mrr &&
                 rep.disambiguated.accuracy > rep.ambiguous.accuracy;
  }
  PermutationOptions perm;
  perm.resamples = 100000;
  perm.seed = 5;
  const double p = paired_significance(dis_all, amb_all, perm);
  const bool wins = dis_mean.avg_cosine > amb_mean.avg_cosine && dis_mean.mrr > amb_mean.mrr &&
                    dis_mean.accuracy > amb_mean.accuracy;
  return {wins && p < 0.01,
          fmt::format("ambiguous acc {:.3f} MRR {:.3f} cos {:.3f}; disambiguated acc {:.3f} MRR {:.3f} cos {:.3f}; "
                      "cosine p = {:.1e} over {} phrases; all three won in {}/20 seeds",
                      amb_mean.accuracy, amb_mean.mrr, amb_mean.avg_cosine, dis_mean.accuracy, dis_mean.mrr,
                      dis_mean.avg_cosine, p, dis_all.size(), seed_wins)};
}

// ---- 6 --------------------------------------------------------------------

Outcome similarity_ordering() {
  std::vector<double> hol, dis, amb;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticSpec spec;
    spec.disjointness = 0.5;
    spec.seed = seed;
    const auto data = generate_synthetic(spec);
    auto cfg = synthetic_pipeline_config(spec);
    cfg.permutations = 100;  // per-seed p-values are not used here
    const auto ws = build_word_space(data.corpus, data.stop, cfg);
    const auto words = std::make_shared<const SemanticSpace>(ws.space);
    const auto holistic = std::make_shared<const HolisticPhraseSpace>(
        build_holistic_space(data.corpus, data.relations, ws.vocabulary, cfg));
    const auto run = run_similarity_pipeline(data.corpus, data.relations, data.similarity, words, holistic, cfg);
    hol.push_back(run.report.find(ModelKind::HolisticLookup)->rho);
    dis.push_back(run.report.find(ModelKind::DisambiguatedMatrix)->rho);
    amb.push_back(run.report.find(ModelKind::AmbiguousMatrix)->rho);
  }
  PermutationOptions perm;
  perm.seed = 6;
  const double p_dis_amb = paired_significance(dis, amb, perm);
  const double p_hol_dis = paired_significance(hol, dis, perm);
  const double mh = mean(hol), md = mean(dis), ma = mean(amb);
  return {mh >= md && md >= ma && p_dis_amb < 0.01 && p_hol_dis >= 0.05,
          fmt::format("mean rho holistic {:.4f}, disambiguated {:.4f}, ambiguous {:.4f}; "
                      "p(dis vs amb) = {:.1e}, p(hol vs dis) = {:.3f} (not significant means >= 0.05)",
                      mh, md, ma, p_dis_amb, p_hol_dis)};
}

// ---- 7 --------------------------------------------------------------------

Outcome single_sense_identity() {
  SyntheticSpec spec;
  spec.verbs = 3;
  spec.senses_per_verb = 1;
  spec.similarity_pairs = 0;
  spec.test_objects_per_sense = 0;
  spec.seed = 7;
  const auto data = generate_synthetic(spec);
  auto cfg = synthetic_pipeline_config(spec);
  // every induced cluster is undersized, so each verb folds to one sense
  cfg.cluster.min_exemplars = spec.objects_per_sense + 1;
  const auto ws = build_word_space(data.corpus, data.stop, cfg);
  const auto hs = build_holistic_space(data.corpus, data.relations, ws.vocabulary, cfg);
  int checked = 0, identical = 0, skipped = 0;
  std::set<std::string> verbs;
  for (const auto& l : data.labels) verbs.insert(l.verb);
  for (const auto& verb : verbs) {
    const auto objects = training_objects(verb, ws.space, hs, {});
    const auto inv = induce_verb_senses(verb, objects, data.corpus, data.relations, ws.space, cfg.cluster);
    if (inv.senses.size() != 1) {
      ++skipped;
      continue;
    }
    ++checked;
    const auto amb = train_ambiguous(verb, objects, ws.space, hs, cfg.regression);
    const auto per = train_per_sense(verb, inv, objects, ws.space, hs, cfg.regression);
    identical += per.matrices.size() == 1 && per.matrices[0].w.rows() == amb.w.rows() &&
                 per.matrices[0].w.cols() == amb.w.cols() &&
                 std::memcmp(per.matrices[0].w.data(), amb.w.data(), sizeof(double) * amb.w.size()) == 0;
  }
  return {checked > 0 && identical == checked,
          fmt::format("{}/{} single-sense verbs bit-identical ({} verbs induced more than one sense)", identical, checked,
                      skipped)};
}

// ---- 8 --------------------------------------------------------------------

int run_cli(const std::string& args) {
  const auto cmd = std::string(PRIORDIS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> read_reports(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

Outcome end_to_end_determinism() {
  std::map<std::string, std::string> reports[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = fs::temp_directory_path() / fmt::format("priordis_acceptance_run{}", run);
    fs::remove_all(dir);
    if (run_cli(fmt::format("synth --out {} --seed 8", dir.string())) != 0) return {false, "synth failed"};
    const auto cfg = fmt::format(" --jobs 1 --config {}", (dir / "pipeline.cfg").string());
    for (const auto* step : {"build-space", "build-holistic", "induce-senses", "train --mode ambiguous",
                             "train --mode per_sense", "evaluate --task supervised", "evaluate --task similarity"})
      if (const int code = run_cli(step + cfg); code != 0) return {false, fmt::format("'{}' exited with {}", step, code)};
    reports[run] = read_reports(dir / "artifacts" / "reports");
  }
  std::size_t bytes = 0;
  for (const auto& [_, text] : reports[0]) bytes += text.size();
  return {reports[0].size() == 4 && reports[0] == reports[1],
          fmt::format("{} report files ({} bytes) compared across two runs", reports[0].size(), bytes)};
}

// ---- 9 --------------------------------------------------------------------

Outcome svd_contract() {
  double gram = 0, trunc = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    gen::Rng r(9000 + seed);
    const Eigen::MatrixXd x = gen::gaussian(r, 20, 30);
    const auto full = reduce_svd(x, 20);
    gram = std::max(gram, (full.projected * full.projected.transpose() - x * x.transpose()).cwiseAbs().maxCoeff());
    for (int k = 1; k <= 20; ++k) {
      const auto red = reduce_svd(x, k);
      const double err = (x - red.projected * red.right_vectors.transpose()).norm();
      trunc = std::max(trunc, std::abs(err - oracle::truncation_error(x, k)));
    }
  }
  return {gram <= 1e-8 && trunc <= 1e-8,
          fmt::format("max Gram deviation {:.1e}, max truncation error deviation {:.1e} over 20 fixtures", gram, trunc)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "regression oracle equivalence", 30, regression_equivalence},
      {2, "gradient correctness", 10, gradient_check},
      {3, "metric oracles", 10, metric_oracles},
      {4, "clustering oracles", 60, clustering_oracles},
      {5, "supervised task: disambiguated beats ambiguous", 300, supervised_claim},
      {6, "similarity task: holistic >= disambiguated >= ambiguous", 300, similarity_ordering},
      {7, "single-sense degeneracy", 10, single_sense_identity},
      {8, "end-to-end determinism", 300, end_to_end_determinism},
      {9, "SVD contract", 10, svd_contract},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    fmt::print("{} {}. {}: {} [{:.1f}s, limit {:.0f}s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs,
               c.limit_s);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
