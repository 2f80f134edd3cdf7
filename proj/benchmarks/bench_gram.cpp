#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "dapca/gram.hpp"
#include "dapca/knn.hpp"
#include "dapca/weights.hpp"

namespace {

dapca::Dataset labelled_cloud(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  dapca::Dataset ds;
  ds.values = Eigen::MatrixXd::NullaryExpr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d),
                                           [&] { return normal(rng); });
  ds.labels.emplace();
  for (std::size_t i = 0; i < n; ++i) ds.labels->push_back("c" + std::to_string(i % classes));
  return ds;
}

// Dense N x N weights for the supervised case, same constants as the block path.
Eigen::MatrixXd dense_supervised(const dapca::Dataset& ds, const dapca::EffectiveBlockConstants& d_eff) {
  const auto index = dapca::index_labels(*ds.labels);
  const auto n = static_cast<Eigen::Index>(ds.rows());
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      w(i, j) = i == j ? 0.0
                       : d_eff.coefficients(static_cast<Eigen::Index>(index.codes[static_cast<std::size_t>(i)]),
                                            static_cast<Eigen::Index>(index.codes[static_cast<std::size_t>(j)]));
    }
  }
  return w;
}

void BM_GramSupervised(benchmark::State& state) {
  const auto ds = labelled_cloud(static_cast<std::size_t>(state.range(0)), 20, 4, 1);
  const auto d_eff = dapca::build_delta(dapca::DeltaSpec{}, std::span<const std::string>(*ds.labels));
  for (auto _ : state) benchmark::DoNotOptimize(dapca::gram_supervised(ds, d_eff));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GramSupervised)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_GramDense(benchmark::State& state) {
  const auto ds = labelled_cloud(static_cast<std::size_t>(state.range(0)), 20, 4, 1);
  const auto d_eff = dapca::build_delta(dapca::DeltaSpec{}, std::span<const std::string>(*ds.labels));
  const Eigen::MatrixXd w = dense_supervised(ds, d_eff);
  for (auto _ : state) benchmark::DoNotOptimize(dapca::gram_oracle(ds.values, w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GramDense)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_KnnMatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto source = labelled_cloud(n, 10, 2, 2);
  const auto target = labelled_cloud(n, 10, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(dapca::knn_match(source.values, target.values, 5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnMatch)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

}  // namespace
