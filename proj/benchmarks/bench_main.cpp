#include <benchmark/benchmark.h>

#include <random>

#include "priordis/clustering.hpp"
#include "priordis/corpus.hpp"
#include "priordis/regression.hpp"
#include "priordis/synthetic.hpp"
#include "priordis/weighting.hpp"

using namespace priordis;

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return n(rng); });
}

void BM_TrainGd(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto dim = state.range(1);
  const TrainingSet ts{gaussian(rng, state.range(0), dim), gaussian(rng, state.range(0), dim), {}};
  RegressionConfig cfg;
  cfg.auto_step = true;
  cfg.lambda = 0.3;
  cfg.tol = 1e-9;
  cfg.max_iters = 5000;
  for (auto _ : state) benchmark::DoNotOptimize(train_gd(ts, cfg).w.data());
}
BENCHMARK(BM_TrainGd)->Args({32, 50})->Args({128, 100})->Args({256, 200})->Unit(benchmark::kMillisecond);

void BM_ClosedForm(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto dim = state.range(1);
  const TrainingSet ts{gaussian(rng, state.range(0), dim), gaussian(rng, state.range(0), dim), {}};
  for (auto _ : state) benchmark::DoNotOptimize(closed_form(ts, 0.3).w.data());
}
BENCHMARK(BM_ClosedForm)->Args({128, 100})->Args({512, 300})->Unit(benchmark::kMillisecond);

void BM_Hac(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<Eigen::VectorXd> pts;
  for (int64_t i = 0; i < state.range(0); ++i) pts.push_back(gaussian(rng, 100, 1));
  ClusterConfig cfg;
  for (auto _ : state) {
    const auto d = hac_cluster(pts, cfg);
    benchmark::DoNotOptimize(select_partition(d, pts, cfg).data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hac)->RangeMultiplier(2)->Range(64, 1024)->Complexity()->Unit(benchmark::kMillisecond);

void BM_ReduceSvd(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto x = gaussian(rng, state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(reduce_svd(x, 100).projected.data());
}
BENCHMARK(BM_ReduceSvd)->Args({1000, 500})->Args({2000, 1000})->Unit(benchmark::kMillisecond);

void BM_CountCooccurrences(benchmark::State& state) {
  SyntheticSpec spec;
  spec.verbs = static_cast<int>(state.range(0));
  const auto data = generate_synthetic(spec);
  const auto cfg = synthetic_pipeline_config(spec);
  const auto vocab = build_vocabulary(data.corpus, cfg.space, data.stop);
  for (auto _ : state) benchmark::DoNotOptimize(count_cooccurrences(data.corpus, vocab, cfg.space).total());
  state.counters["tokens"] = benchmark::Counter(static_cast<double>(data.corpus.token_count()) *
                                                    static_cast<double>(state.iterations()),
                                                benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CountCooccurrences)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
