#include <gtest/gtest.h>

#include <map>
#include <set>

#include "gen.hpp"
#include "oracles.hpp"
#include "priordis/clustering.hpp"
#include "priordis/error.hpp"
#include "priordis/senses.hpp"

using namespace priordis;

namespace {

ClusterConfig with(Distance d) {
  ClusterConfig cfg;
  cfg.distance = d;
  return cfg;
}

std::vector<Eigen::VectorXd> random_points(gen::Rng& r, int n, int dim) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) pts.push_back(gen::gaussian_vector(r, dim));
  return pts;
}

// Integer grid points: many exactly equal distances.
std::vector<Eigen::VectorXd> grid_points(gen::Rng& r, int n, int dim) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p(dim);
    for (int j = 0; j < dim; ++j) p(j) = r.uniform_int(0, 3);
    pts.push_back(p);
  }
  return pts;
}

VerbOccurrence occ(std::string object, Eigen::VectorXd v) { return {std::move(object), std::move(v)}; }

Eigen::VectorXd e(int dim, int i, double scale = 1.0) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v(i) = scale;
  return v;
}

}  // namespace

TEST(BaseDistance, Definitions) {
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 2, 4, 6;
  EXPECT_NEAR(base_distance(a, b, Distance::Pearson), 0.0, 1e-15);
  EXPECT_NEAR(base_distance(a, b, Distance::Cosine), 0.0, 1e-15);
  EXPECT_EQ(base_distance(a, b, Distance::SquaredEuclidean), 14.0);
  b << 3, 2, 1;
  EXPECT_NEAR(base_distance(a, b, Distance::Pearson), 2.0, 1e-15);
  EXPECT_EQ(base_distance(a, Eigen::VectorXd::Constant(3, 5.0), Distance::Pearson), 1.0);
  EXPECT_THROW(base_distance(a, Eigen::VectorXd::Zero(2), Distance::Cosine), ShapeError);
  EXPECT_EQ(parse_distance(to_string(Distance::SquaredEuclidean)), Distance::SquaredEuclidean);
  EXPECT_THROW(parse_distance("manhattan"), ConfigError);
}

TEST(Hac, MatchesDefinitionalWardOnSmallFixtures) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    gen::Rng r(seed);
    const int n = r.uniform_int(1, 8);
    const auto pts = seed % 2 ? random_points(r, n, r.uniform_int(1, 4)) : grid_points(r, n, r.uniform_int(1, 3));
    const auto d = hac_cluster(pts, with(Distance::SquaredEuclidean));
    EXPECT_TRUE(oracle::same_merges(d, oracle::ward_euclidean(pts, &d))) << "seed " << seed;
  }
}

TEST(Hac, MatchesReferenceTableForEveryDistance) {
  for (auto kind : {Distance::Pearson, Distance::Cosine, Distance::SquaredEuclidean}) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      gen::Rng r(seed);
      const int n = r.uniform_int(2, 8);
      const auto pts = seed % 2 ? random_points(r, n, r.uniform_int(2, 5)) : grid_points(r, n, r.uniform_int(2, 4));
      const auto d = hac_cluster(pts, with(kind));
      EXPECT_TRUE(oracle::same_merges(d, oracle::ward_table(oracle::base_distances(pts, kind), &d)))
          << to_string(kind) << " seed " << seed;
    }
  }
}

TEST(Hac, ExactTiesGoToSmallestPair) {
  // integer coordinates keep every cost exact
  std::vector<Eigen::VectorXd> pts;
  for (double x : {5.0, 6.0, 0.0, 1.0, 2.0}) pts.push_back(Eigen::VectorXd::Constant(1, x));
  const auto d = hac_cluster(pts, with(Distance::SquaredEuclidean));
  ASSERT_EQ(d.merges.size(), 4u);
  // (0,1), (2,3) and (3,4) all cost 1; (0,1) then (2,3) win
  EXPECT_EQ(d.merges[0].a, 0u);
  EXPECT_EQ(d.merges[0].b, 1u);
  EXPECT_EQ(d.merges[1].a, 2u);
  EXPECT_EQ(d.merges[1].b, 3u);
  EXPECT_EQ(d.merges[1].cost, 1.0);
  // point 2 joins {0, 1} at 3 = (2 * 1 + 2 * 4 - 1) / 3
  EXPECT_EQ(d.merges[2].a, 4u);
  EXPECT_EQ(d.merges[2].b, 6u);
  EXPECT_EQ(d.merges[2].cost, 3.0);
  EXPECT_TRUE(oracle::same_merges(d, oracle::ward_euclidean(pts)));
}

TEST(Hac, TreeShapeAndMonotoneCosts) {
  for (auto kind : {Distance::Pearson, Distance::Cosine, Distance::SquaredEuclidean}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      gen::Rng r(seed);
      const int n = r.uniform_int(2, 40);
      const auto pts = random_points(r, n, 6);
      const auto d = hac_cluster(pts, with(kind));
      ASSERT_EQ(d.merges.size(), static_cast<std::size_t>(n - 1));
      std::multiset<std::size_t> children;
      for (std::size_t t = 0; t < d.merges.size(); ++t) {
        const auto& m = d.merges[t];
        EXPECT_LT(m.a, m.b);
        EXPECT_LT(m.b, static_cast<std::size_t>(n) + t);
        children.insert(m.a);
        children.insert(m.b);
        if (t) {
          EXPECT_GE(m.cost, d.merges[t - 1].cost - 1e-12) << to_string(kind) << " seed " << seed;
        }
      }
      // every node but the root is merged exactly once
      for (std::size_t id = 0; id + 1 < static_cast<std::size_t>(2 * n - 1); ++id) EXPECT_EQ(children.count(id), 1u);
      EXPECT_EQ(d.merges.back().size, static_cast<std::size_t>(n));
    }
  }
}

TEST(Hac, DegenerateSizes) {
  EXPECT_TRUE(hac_cluster(std::vector<Eigen::VectorXd>{}, ClusterConfig{}).merges.empty());
  const std::vector<Eigen::VectorXd> one{Eigen::VectorXd::Ones(3)};
  const auto d = hac_cluster(one, ClusterConfig{});
  EXPECT_TRUE(d.merges.empty());
  EXPECT_EQ(d.cut(1), std::vector<int>{0});
}

TEST(Dendrogram, CutLabelsFollowSmallestLeaf) {
  std::vector<Eigen::VectorXd> pts;
  for (double x : {10.0, 0.0, 10.1, 0.1, 20.0}) pts.push_back(Eigen::VectorXd::Constant(1, x));
  const auto d = hac_cluster(pts, with(Distance::SquaredEuclidean));
  EXPECT_EQ(d.cut(5), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(d.cut(3), (std::vector<int>{0, 1, 0, 1, 2}));
  EXPECT_EQ(d.cut(1), (std::vector<int>{0, 0, 0, 0, 0}));
  EXPECT_THROW(d.cut(0), Error);
  EXPECT_THROW(d.cut(6), Error);
}

TEST(VarianceRatio, MatchesScatterDefinition) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    gen::Rng r(seed);
    const int n = r.uniform_int(4, 30);
    const auto pts = random_points(r, n, r.uniform_int(1, 5));
    const int k = r.uniform_int(2, std::min(5, n - 1));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < k ? i : r.uniform_int(0, k - 1);
    const double vr = variance_ratio(pts, labels);
    EXPECT_NEAR(vr, oracle::calinski_harabasz(pts, labels), 1e-9 * vr) << "seed " << seed;

    // relabelling and translation leave it unchanged
    std::vector<int> renamed = labels;
    for (auto& l : renamed) l = 100 - 7 * l;
    EXPECT_NEAR(variance_ratio(pts, renamed), vr, 1e-12 * vr);
    const Eigen::VectorXd shift = gen::gaussian_vector(r, pts[0].size(), 50.0);
    auto moved = pts;
    for (auto& p : moved) p += shift;
    EXPECT_NEAR(variance_ratio(moved, labels), vr, 1e-7 * vr);
  }
}

TEST(VarianceRatio, EdgeCases) {
  std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
  EXPECT_EQ(variance_ratio(pts, std::vector<int>{0, 0, 1}), std::numeric_limits<double>::infinity());
  EXPECT_THROW(variance_ratio(pts, std::vector<int>{0, 0, 0}), UndefinedStatisticError);
  EXPECT_THROW(variance_ratio(pts, std::vector<int>{0, 1, 2}), UndefinedStatisticError);
  EXPECT_THROW(variance_ratio(pts, std::vector<int>{0, 1}), ShapeError);
}

TEST(SelectPartition, RecoversPlantedBlobs) {
  for (auto kind : {Distance::Pearson, Distance::SquaredEuclidean}) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      gen::Rng r(seed);
      const int k = 2 + static_cast<int>(seed % 2);
      const auto b = gen::blobs(r, k, 12, 10, 0.3, 5.0);
      const auto labels = select_partition(hac_cluster(b.points, with(kind)), b.points, with(kind));
      hits += gen::same_partition(labels, b.truth);
    }
    EXPECT_GE(hits, 95) << to_string(kind);
  }
}

TEST(SelectPartition, SmallInputsStayTogether) {
  std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  const auto labels = select_partition(hac_cluster(pts, ClusterConfig{}), pts, ClusterConfig{});
  EXPECT_EQ(labels, (std::vector<int>{0, 0}));
}

TEST(ClusterConfig, Validation) {
  ClusterConfig cfg;
  cfg.k_min = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ClusterConfig{};
  cfg.k_max = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ContextVector, MeanOfOtherTokens) {
  SemanticSpace space({"a|N", "b|N", "play|V"}, (Eigen::MatrixXd(3, 2) << 1, 0, 0, 1, 5, 5).finished());
  const Sentence s{{"a", Pos::Noun}, {"play", Pos::Verb}, {"b", Pos::Noun}, {"zzz", Pos::Noun}};
  const auto cv = context_vector(s, 1, space, 7);
  ASSERT_TRUE(cv);
  EXPECT_EQ(cv->contributors, 2u);
  EXPECT_EQ(cv->occurrence, 7u);
  EXPECT_EQ(cv->vector, Eigen::Vector2d(0.5, 0.5));
  const Sentence lonely{{"play", Pos::Verb}, {"zzz", Pos::Noun}};
  EXPECT_FALSE(context_vector(lonely, 0, space));
  EXPECT_THROW(context_vector(lonely, 5, space), Error);
}

TEST(AssignObject, NearestCentroidScaleInvariantTiesLow) {
  SenseInventory inv;
  inv.verb = "v";
  inv.senses = {Sense{0, e(3, 0), {}, 0}, Sense{1, e(3, 1), {}, 0}, Sense{2, e(3, 1, 2.0), {}, 0}};
  inv.dominant = 2;
  gen::Rng r(1);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd v = gen::gaussian_vector(r, 3);
    const auto a = assign_object(v, inv);
    EXPECT_EQ(assign_object(v * r.uniform(0.01, 100.0), inv).sense, a.sense);
    EXPECT_NE(a.sense, 2);  // ties with sense 1 go to the lower id
  }
  const auto z = assign_object(Eigen::VectorXd::Zero(3), inv);
  EXPECT_EQ(z.sense, 2);
  EXPECT_TRUE(z.zero_vector);
  SenseInventory single;
  single.senses = {Sense{0, e(3, 0), {}, 0}};
  EXPECT_EQ(assign_object(Eigen::VectorXd::Zero(3), single).sense, 0);
  EXPECT_THROW(assign_object(Eigen::VectorXd::Zero(3), SenseInventory{}), Error);
}

TEST(SenseInventory, TwoSeparatedSensesRecovered) {
  gen::Rng r(3);
  std::vector<VerbOccurrence> occs;
  for (int o = 0; o < 8; ++o)
    for (int t = 0; t < 4; ++t) {
      const int sense = o % 2;
      occs.push_back(occ("obj" + std::to_string(o), e(6, sense * 3, 1.0) + gen::gaussian_vector(r, 6, 0.05)));
    }
  const auto inv = build_sense_inventory("v", occs, ClusterConfig{});
  ASSERT_EQ(inv.senses.size(), 2u);
  for (const auto& s : inv.senses) {
    EXPECT_EQ(s.exemplars(), 4u);
    std::set<int> planted;
    for (const auto& o : s.objects) planted.insert((o.back() - '0') % 2);
    EXPECT_EQ(planted.size(), 1u);
  }
  for (int o = 0; o < 8; ++o) EXPECT_TRUE(inv.sense_of("obj" + std::to_string(o)));
  EXPECT_FALSE(inv.sense_of("nothing"));
}

TEST(SenseInventory, UndersizedSenseFoldsIntoDominant) {
  gen::Rng r(4);
  std::vector<VerbOccurrence> occs;
  for (int o = 0; o < 6; ++o)
    for (int t = 0; t < 3; ++t) occs.push_back(occ("big" + std::to_string(o), e(6, 0) + gen::gaussian_vector(r, 6, 0.05)));
  for (int o = 0; o < 2; ++o)
    for (int t = 0; t < 3; ++t) occs.push_back(occ("small" + std::to_string(o), e(6, 4) + gen::gaussian_vector(r, 6, 0.05)));
  const auto inv = build_sense_inventory("v", occs, ClusterConfig{});
  ASSERT_EQ(inv.senses.size(), 1u);
  EXPECT_EQ(inv.senses[0].exemplars(), 8u);
  EXPECT_EQ(inv.dominant, 0);
  // centroid recomputed over every occurrence after merging
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
  for (const auto& o : occs) mean += o.context;
  mean /= static_cast<double>(occs.size());
  EXPECT_LT((inv.senses[0].centroid - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(inv.senses[0].occurrences, occs.size());
}

TEST(SenseInventory, InvariantsOnRandomInputs) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    gen::Rng r(seed);
    std::vector<VerbOccurrence> occs;
    const int objects = r.uniform_int(1, 12);
    const int groups = r.uniform_int(1, 4);
    for (int o = 0; o < objects; ++o) {
      const int g = r.uniform_int(0, groups - 1);
      for (int t = r.uniform_int(1, 4); t > 0; --t)
        occs.push_back(occ("o" + std::to_string(o), e(8, 2 * g) + gen::gaussian_vector(r, 8, r.uniform(0.05, 1.0))));
    }
    ClusterConfig cfg;
    cfg.min_exemplars = r.uniform_int(1, 4);
    const auto inv = build_sense_inventory("v", occs, cfg);
    ASSERT_FALSE(inv.senses.empty());
    std::set<std::string> seen;
    std::size_t occ_total = 0;
    std::size_t biggest = 0;
    for (std::size_t i = 0; i < inv.senses.size(); ++i) {
      const auto& s = inv.senses[i];
      EXPECT_EQ(s.id, static_cast<int>(i));
      if (inv.senses.size() > 1) {
        EXPECT_GE(s.exemplars(), static_cast<std::size_t>(cfg.min_exemplars)) << "seed " << seed;
      }
      EXPECT_TRUE(std::is_sorted(s.objects.begin(), s.objects.end()));
      for (const auto& o : s.objects) EXPECT_TRUE(seen.insert(o).second) << "object in two senses";
      occ_total += s.occurrences;
      biggest = std::max(biggest, s.exemplars());
    }
    EXPECT_EQ(seen.size(), static_cast<std::size_t>(objects));
    EXPECT_EQ(occ_total, occs.size());
    // dominant: largest exemplar count, ties to the lowest id
    const auto& dom = inv.sense(inv.dominant);
    EXPECT_EQ(dom.exemplars(), biggest);
    for (int i = 0; i < inv.dominant; ++i) EXPECT_LT(inv.sense(i).exemplars(), biggest);
  }
}

TEST(SenseInventory, MajorityVoteTieGoesToDominant) {
  // obj "x" appears once in each cluster; the larger cluster is dominant
  std::vector<VerbOccurrence> occs;
  for (int o = 0; o < 4; ++o) occs.push_back(occ("a" + std::to_string(o), e(4, 0)));
  for (int o = 0; o < 3; ++o) occs.push_back(occ("b" + std::to_string(o), e(4, 3)));
  occs.push_back(occ("x", e(4, 3)));
  occs.push_back(occ("x", e(4, 0)));
  ClusterConfig cfg;
  cfg.distance = Distance::SquaredEuclidean;
  const auto inv = build_sense_inventory("v", occs, cfg);
  ASSERT_EQ(inv.senses.size(), 2u);
  EXPECT_EQ(*inv.sense_of("x"), *inv.sense_of("a0"));
  EXPECT_EQ(inv.dominant, *inv.sense_of("a0"));
}

TEST(SenseInventory, EmptyInputThrows) {
  EXPECT_THROW(build_sense_inventory("v", std::vector<VerbOccurrence>{}, ClusterConfig{}), EmptyInputError);
}

TEST(SenseInventory, JsonRoundTrip) {
  gen::Rng r(9);
  SenseInventory inv;
  inv.verb = "run";
  inv.senses = {Sense{0, gen::gaussian_vector(r, 4), {"a", "b", "c"}, 9}, Sense{1, gen::gaussian_vector(r, 4), {"d", "e", "f"}, 7}};
  inv.senses[0].centroid(0) = 5e-324;
  inv.dominant = 0;
  inv.config_hash = "0123";
  const auto back = inventory_from_json(inventory_to_json(inv));
  EXPECT_EQ(back.verb, inv.verb);
  EXPECT_EQ(back.dominant, 0);
  EXPECT_EQ(back.config_hash, "0123");
  ASSERT_EQ(back.senses.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back.sense(i).centroid, inv.sense(i).centroid);
    EXPECT_EQ(back.sense(i).objects, inv.sense(i).objects);
    EXPECT_EQ(back.sense(i).occurrences, inv.sense(i).occurrences);
  }
  EXPECT_THROW(inventory_from_json("{"), FormatError);
  EXPECT_THROW(inventory_from_json(R"({"verb":"v","senses":[],"dominant":0})"), FormatError);
  EXPECT_THROW(inventory_from_json(R"({"verb":"v","senses":[{"id":1,"centroid":[1],"objects":[]}],"dominant":0})"),
               FormatError);
}
