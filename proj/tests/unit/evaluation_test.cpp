#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "gen.hpp"
#include "oracles.hpp"
#include "priordis/error.hpp"
#include "priordis/evaluation.hpp"
#include "priordis/metrics.hpp"

using namespace priordis;

namespace {

// Two-sense verbs whose holistic vectors come from sense-specific maps.
struct SupervisedFixture {
  SemanticSpace words;
  HolisticPhraseSpace holistic;
  std::vector<SenseAnnotatedDataset> datasets;

  explicit SupervisedFixture(std::uint64_t seed, int verbs = 2, int per_sense = 8) {
    gen::Rng r(seed);
    std::vector<std::string> wkeys, hkeys;
    std::vector<Eigen::VectorXd> wrows, hrows;
    for (int v = 0; v < verbs; ++v) {
      SenseAnnotatedDataset ds;
      ds.verb = "verb" + std::to_string(v);
      const Eigen::MatrixXd maps[2] = {gen::gaussian(r, 5, 6), gen::gaussian(r, 5, 6)};
      for (int s = 0; s < 2; ++s)
        for (int i = 0; i < per_sense; ++i) {
          const auto obj = fmt_obj(v, s, i);
          (s == 0 ? ds.sense1 : ds.sense2).push_back(obj);
          Eigen::VectorXd x = gen::gaussian_vector(r, 6);
          x(s) += 3.0;
          wkeys.push_back(obj + "|N");
          wrows.push_back(x);
          hkeys.push_back(ds.verb + " " + obj);
          hrows.push_back(maps[s] * x + gen::gaussian_vector(r, 5, 0.1));
        }
      datasets.push_back(ds);
    }
    words = SemanticSpace(wkeys, stack(wrows));
    holistic.space = SemanticSpace(hkeys, stack(hrows));
    holistic.frequency.assign(hkeys.size(), 10);
  }

  static std::string fmt_obj(int v, int s, int i) {
    return "o" + std::to_string(v) + "_" + std::to_string(s) + "_" + std::to_string(i);
  }
  static Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
  }
};

RegressionConfig fast_regression() {
  RegressionConfig reg;
  reg.auto_step = true;
  reg.lambda = 0.1;
  reg.max_iters = 2000;
  reg.tol = 1e-9;
  return reg;
}

}  // namespace

TEST(Metrics, RankMatchesBruteForceWithTies) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    gen::Rng r(seed);
    const auto scores = gen::tied_values(r, static_cast<std::size_t>(r.uniform_int(1, 30)), r.uniform_int(1, 6));
    const auto correct = static_cast<std::size_t>(r.uniform_int(0, static_cast<int>(scores.size()) - 1));
    EXPECT_EQ(rank_from_scores(scores, correct), oracle::rank_brute(scores, correct)) << "seed " << seed;
  }
}

TEST(Metrics, TieRuleHandWorked) {
  // two above, a tie group of three: ranks 3..5, mean 4
  EXPECT_EQ(rank_from_scores(std::vector<double>{0.9, 0.8, 0.5, 0.5, 0.5, 0.1}, 3), 4u);
  // tie group of two at ranks 1..2: mean 1.5, rounded up
  EXPECT_EQ(rank_from_scores(std::vector<double>{0.5, 0.5, 0.1}, 0), 2u);
  EXPECT_EQ(rank_from_scores(std::vector<double>{0.7}, 0), 1u);
  EXPECT_THROW(rank_from_scores(std::vector<double>{0.7}, 1), LookupError);
}

TEST(Metrics, RankOfCorrectUsesCosine) {
  gen::Rng r(3);
  const Eigen::VectorXd q = gen::gaussian_vector(r, 4);
  std::vector<Candidate> pool;
  for (int i = 0; i < 10; ++i) pool.push_back({"c" + std::to_string(i), gen::gaussian_vector(r, 4)});
  pool.push_back({"self", 7.0 * q});
  EXPECT_EQ(rank_of_correct(q, pool, "self"), 1u);
  std::vector<double> scores;
  for (const auto& c : pool) scores.push_back(cosine(q, c.vector));
  for (std::size_t i = 0; i < pool.size(); ++i) EXPECT_EQ(rank_of_correct(q, pool, pool[i].key), oracle::rank_brute(scores, i));
  EXPECT_THROW(rank_of_correct(q, pool, "absent"), LookupError);
}

TEST(Metrics, MrrAccuracyOracleAndOrdering) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    gen::Rng r(seed);
    std::vector<std::size_t> ranks(static_cast<std::size_t>(r.uniform_int(1, 25)));
    for (auto& k : ranks) k = static_cast<std::size_t>(r.uniform_int(1, 4));
    double rr = 0, hits = 0;
    for (auto k : ranks) rr += 1.0 / static_cast<double>(k), hits += k == 1;
    const double n = static_cast<double>(ranks.size());
    EXPECT_NEAR(mrr(ranks), rr / n, 1e-15);
    EXPECT_DOUBLE_EQ(accuracy(ranks), hits / n);
    EXPECT_LE(accuracy(ranks), mrr(ranks));
    EXPECT_LE(mrr(ranks), 1.0);
  }
  EXPECT_THROW(mrr(std::vector<std::size_t>{}), EmptyInputError);
  EXPECT_THROW(mrr(std::vector<std::size_t>{0}), Error);
  EXPECT_THROW(accuracy(std::vector<std::size_t>{}), EmptyInputError);
}

TEST(Metrics, SpearmanMatchesOracleWithTies) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    gen::Rng r(seed);
    const auto n = static_cast<std::size_t>(r.uniform_int(3, 40));
    const auto a = gen::tied_values(r, n, r.uniform_int(2, 8));
    const auto b = gen::tied_values(r, n, r.uniform_int(2, 8));
    if (std::set<double>(a.begin(), a.end()).size() < 2 || std::set<double>(b.begin(), b.end()).size() < 2) continue;
    EXPECT_NEAR(spearman_rho(a, b), oracle::spearman(a, b), 1e-12) << "seed " << seed;
    EXPECT_EQ(average_ranks(a), oracle::fractional_ranks(a));
  }
}

TEST(Metrics, SpearmanHandFixture) {
  // model cosines vs gold for five pairs, ranked by hand: d^2 sum = 2 -> 1 - 6*2/(5*24) = 0.9
  const std::vector<double> model{0.9, 0.2, 0.4, 0.6, 0.1}, gold{5, 1, 3, 4, 2};
  EXPECT_NEAR(spearman_rho(model, gold), 0.9, 1e-12);
}

TEST(Metrics, SpearmanInvariantsAndErrors) {
  gen::Rng r(5);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> a(15), b(15);
    for (auto& x : a) x = r.normal();
    for (auto& x : b) x = r.normal();
    const double rho = spearman_rho(a, b);
    EXPECT_EQ(rho, spearman_rho(b, a));
    auto t = a;
    for (auto& x : t) x = std::exp(2 * x) + 3;
    EXPECT_NEAR(spearman_rho(t, b), rho, 1e-12);
    EXPECT_GE(rho, -1.0);
    EXPECT_LE(rho, 1.0);
  }
  EXPECT_THROW(spearman_rho(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), UndefinedStatisticError);
  EXPECT_THROW(spearman_rho(std::vector<double>{1}, std::vector<double>{1}), UndefinedStatisticError);
  EXPECT_THROW(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1}), ShapeError);
}

TEST(Metrics, MeanAndStandardError) {
  const std::vector<double> xs{1, 2, 3, 4};
  EXPECT_EQ(mean(xs), 2.5);
  EXPECT_NEAR(standard_error(xs), std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_THROW(standard_error(std::vector<double>{1}), UndefinedStatisticError);
  EXPECT_EQ(cosine(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0)), 0.0);
  EXPECT_NEAR(cosine(Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 0)), std::sqrt(0.5), 1e-15);
}

TEST(Permutation, ReferenceFixtures) {
  std::vector<double> a(20), b(20);
  gen::Rng r(2);
  for (auto& x : a) x = r.normal();
  EXPECT_EQ(paired_significance(a, a), 1.0);
  for (std::size_t i = 0; i < 20; ++i) b[i] = a[i] - 0.1;
  EXPECT_LT(paired_significance(a, b), 0.001);
  // differences +d, -d in pairs: sum zero, every sign pattern is at least as extreme
  std::vector<double> c(20), z(20, 0.0);
  for (std::size_t i = 0; i < 20; ++i) c[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + static_cast<double>(i / 2));
  EXPECT_GT(paired_significance(c, z), 0.5);
  EXPECT_THROW(paired_significance(std::vector<double>(5, 1.0), std::vector<double>(5, 0.0)), UndefinedStatisticError);
  EXPECT_THROW(paired_significance(std::vector<double>(6, 1.0), std::vector<double>(7, 0.0)), ShapeError);
}

TEST(Permutation, ExactEnumerationMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    gen::Rng r(seed);
    const auto n = static_cast<std::size_t>(r.uniform_int(6, 12));
    std::vector<double> d(n), zero(n, 0.0);
    for (auto& x : d) x = r.normal();
    double obs = 0;
    for (double x : d) obs += x;
    std::size_t extreme = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1) ? -d[i] : d[i];
      extreme += std::abs(s) >= std::abs(obs) - 1e-12;
    }
    EXPECT_NEAR(paired_significance(d, zero), static_cast<double>(extreme) / static_cast<double>(1ULL << n), 1e-15);
    // sampled estimate agrees with the exact value
    PermutationOptions sampled;
    sampled.exact_limit = 0;
    sampled.resamples = 20000;
    EXPECT_NEAR(paired_significance(d, zero, sampled), paired_significance(d, zero), 0.02);
  }
}

TEST(Permutation, RhoSwapTest) {
  gen::Rng r(4);
  std::vector<double> gold(40), good(40), bad(40);
  for (std::size_t i = 0; i < 40; ++i) {
    gold[i] = r.normal();
    good[i] = gold[i] + r.normal(0.1);
    bad[i] = r.normal();
  }
  PermutationOptions opts;
  opts.resamples = 2000;
  EXPECT_EQ(paired_rho_significance(good, good, gold, opts), 1.0);
  EXPECT_LT(paired_rho_significance(good, bad, gold, opts), 0.01);
  EXPECT_EQ(paired_rho_significance(good, bad, gold, opts), paired_rho_significance(good, bad, gold, opts));
}

TEST(Folds, PartitionEachSense) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    gen::Rng r(seed);
    SenseAnnotatedDataset ds;
    ds.verb = "v";
    for (int i = r.uniform_int(4, 20); i > 0; --i) ds.sense1.push_back("a" + std::to_string(i));
    for (int i = r.uniform_int(4, 20); i > 0; --i) ds.sense2.push_back("b" + std::to_string(i));
    const int k = r.uniform_int(2, 4);
    const auto folds = crossval_folds(ds, k, seed);
    ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
    for (int s = 0; s < 2; ++s) {
      const auto& all = s == 0 ? ds.sense1 : ds.sense2;
      std::multiset<std::string> tested;
      std::size_t lo = all.size(), hi = 0;
      for (const auto& f : folds) {
        tested.insert(f.test[s].begin(), f.test[s].end());
        lo = std::min(lo, f.test[s].size());
        hi = std::max(hi, f.test[s].size());
        EXPECT_EQ(f.train[s].size() + f.test[s].size(), all.size());
        std::set<std::string> train(f.train[s].begin(), f.train[s].end());
        for (const auto& o : f.test[s]) EXPECT_FALSE(train.count(o));
      }
      EXPECT_EQ(tested, std::multiset<std::string>(all.begin(), all.end()));
      EXPECT_LE(hi - lo, 1u);
    }
    EXPECT_EQ(crossval_folds(ds, k, seed)[0].test[0], folds[0].test[0]);
  }
}

TEST(Folds, Errors) {
  SenseAnnotatedDataset ds{"v", {"a", "b"}, {"c", "d", "e"}};
  EXPECT_THROW(crossval_folds(ds, 3, 1), Error);
  EXPECT_THROW(crossval_folds(ds, 1, 1), ConfigError);
  SenseAnnotatedDataset overlap{"v", {"a", "b"}, {"b", "c"}};
  EXPECT_THROW(overlap.validate(), FormatError);
}

TEST(Datasets, ReadSenseAndSimilarityFiles) {
  std::istringstream sup("# header\nrun\t1\tcompany\nrun\t2\tmarathon\nplay\t1\tguitar\nrun\t1\tshop\n");
  const auto ds = read_sense_dataset(sup);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].verb, "run");
  EXPECT_EQ(ds[0].sense1, (std::vector<std::string>{"company", "shop"}));
  EXPECT_EQ(ds[0].sense2, std::vector<std::string>{"marathon"});
  std::istringstream bad("run\t3\tcompany\n");
  EXPECT_THROW(read_sense_dataset(bad), FormatError);
  std::istringstream dup("run\t1\tx\nrun\t2\tx\n");
  EXPECT_THROW(read_sense_dataset(dup), FormatError);

  std::istringstream sim("play\tguitar\tplay\tpiano\t6.5\n");
  const auto entries = read_phrase_sim_dataset(sim);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].second.object, "piano");
  EXPECT_EQ(entries[0].score, 6.5);
  std::istringstream short_line("play\tguitar\tplay\t6.5\n");
  EXPECT_THROW(read_phrase_sim_dataset(short_line), FormatError);
}

TEST(SupervisedTask, SenseSpecificMatricesWinAndRerunsMatch) {
  const SupervisedFixture f(1);
  SupervisedOptions opts;
  opts.seed = 3;
  opts.permutation.resamples = 2000;
  const auto a = run_supervised_task(f.datasets, f.words, f.holistic, fast_regression(), opts);
  EXPECT_EQ(a.pool_size, 32u);
  EXPECT_EQ(a.ambiguous.count, 32u);
  EXPECT_EQ(a.folds.size(), 4u);
  EXPECT_GT(a.disambiguated.avg_cosine, a.ambiguous.avg_cosine);
  EXPECT_GE(a.disambiguated.mrr, a.ambiguous.mrr);
  ASSERT_TRUE(a.p_value);
  EXPECT_LT(*a.p_value, 0.01);
  for (const auto* m : {&a.ambiguous, &a.disambiguated}) {
    EXPECT_LE(0.0, m->accuracy);
    EXPECT_LE(m->accuracy, m->mrr);
    EXPECT_LE(m->mrr, 1.0);
  }
  opts.jobs = 3;
  const auto b = run_supervised_task(f.datasets, f.words, f.holistic, fast_regression(), opts);
  EXPECT_EQ(supervised_report_json(a), supervised_report_json(b));
  EXPECT_EQ(a.disambiguated_cosines, b.disambiguated_cosines);
}

TEST(SupervisedTask, TsvLayout) {
  const SupervisedFixture f(2);
  SupervisedOptions opts;
  opts.permutation.resamples = 100;
  const auto tsv = supervised_report_tsv(run_supervised_task(f.datasets, f.words, f.holistic, fast_regression(), opts));
  std::istringstream in(tsv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "verb\taccuracy_amb\taccuracy_dis\tmrr_amb\tmrr_dis\tavgsim_amb\tavgsim_dis");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line.substr(0, line.find('\t')));
  EXPECT_EQ(rows, (std::vector<std::string>{"verb0", "verb1", "ALL"}));
}

TEST(SupervisedTask, MissingVectorsAreListed) {
  SupervisedFixture f(3);
  f.datasets[0].sense1.push_back("ghost");
  try {
    run_supervised_task(f.datasets, f.words, f.holistic, fast_regression(), SupervisedOptions{});
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost|N"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("verb0 ghost"), std::string::npos);
  }
}

TEST(SimilarityTask, RhoSkipsAndPValue) {
  gen::Rng r(6);
  auto res = std::make_shared<CompositionResources>();
  std::vector<std::string> keys;
  for (int i = 0; i < 6; ++i) keys.push_back("v" + std::to_string(i) + "|V"), keys.push_back("n" + std::to_string(i) + "|N");
  res->words = std::make_shared<SemanticSpace>(keys, gen::gaussian(r, 12, 4));
  for (int i = 0; i < 6; ++i) {
    VerbMatrix vm;
    vm.verb = "v" + std::to_string(i);
    vm.w = gen::gaussian(r, 4, 4);
    res->ambiguous[vm.verb] = vm;
    SenseModel sm;
    sm.inventory.verb = vm.verb;
    sm.inventory.senses = {Sense{0, Eigen::VectorXd::Ones(4), {}, 1}};
    sm.matrices = {vm};
    res->senses[vm.verb] = sm;
  }
  std::vector<PhraseSimEntry> data;
  for (int k = 0; k < 30; ++k)
    data.push_back({{"v" + std::to_string(r.uniform_int(0, 5)), "n" + std::to_string(r.uniform_int(0, 5))},
                    {"v" + std::to_string(r.uniform_int(0, 5)), "n" + std::to_string(r.uniform_int(0, 5))},
                    r.uniform(1, 7)});
  data.push_back({{"v0", "unknown"}, {"v1", "n1"}, 3.0});
  const std::vector<CompositionModel> models{CompositionModel(ModelKind::Additive, res),
                                             CompositionModel(ModelKind::AmbiguousMatrix, res),
                                             CompositionModel(ModelKind::DisambiguatedMatrix, res)};
  PermutationOptions opts;
  opts.resamples = 500;
  const auto rep = run_similarity_task(data, models, opts);
  ASSERT_EQ(rep.models.size(), 3u);
  for (const auto& m : rep.models) {
    EXPECT_EQ(m.skipped, 1u);
    EXPECT_EQ(m.scored, 30u);
    EXPECT_FALSE(m.cosines.back());
    std::vector<double> cos, gold;
    for (std::size_t i = 0; i < 30; ++i) cos.push_back(*m.cosines[i]), gold.push_back(data[i].score);
    EXPECT_NEAR(m.rho, oracle::spearman(cos, gold), 1e-12);
  }
  // identical matrices under both models: no difference at all
  EXPECT_EQ(rep.find(ModelKind::AmbiguousMatrix)->rho, rep.find(ModelKind::DisambiguatedMatrix)->rho);
  ASSERT_TRUE(rep.p_value);
  EXPECT_EQ(*rep.p_value, 1.0);
  EXPECT_EQ(rep.find(ModelKind::HolisticLookup), nullptr);
  const auto tsv = similarity_report_tsv(rep);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "model\tspearman_rho");

  const std::vector<PhraseSimEntry> hopeless{{{"x", "y"}, {"x", "z"}, 1.0}, {{"x", "y"}, {"x", "q"}, 2.0}};
  EXPECT_THROW(run_similarity_task(hopeless, models, opts), UndefinedStatisticError);
  EXPECT_THROW(run_similarity_task({}, models, opts), EmptyInputError);
}
