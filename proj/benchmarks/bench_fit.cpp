#include <benchmark/benchmark.h>

#include <string>

#include "dapca/fit.hpp"
#include "dapca/toy.hpp"

namespace {

void BM_FitToy(benchmark::State& state) {
  const auto toy = dapca::generate_toy(dapca::ToyConfig{});
  dapca::FitConfig cfg;
  cfg.method = static_cast<dapca::Method>(state.range(0));
  cfg.delta.within_class_attraction = 1.0;
  cfg.gamma = 100.0;
  cfg.k = 5;
  cfg.q_requested = 2;
  for (auto _ : state) benchmark::DoNotOptimize(dapca::fit(toy.source, toy.target, cfg));
  state.SetLabel(std::string(dapca::to_string(cfg.method)));
}
BENCHMARK(BM_FitToy)
    ->Arg(static_cast<int>(dapca::Method::pca))
    ->Arg(static_cast<int>(dapca::Method::spca))
    ->Arg(static_cast<int>(dapca::Method::sspca))
    ->Arg(static_cast<int>(dapca::Method::stca))
    ->Arg(static_cast<int>(dapca::Method::dapca))
    ->Unit(benchmark::kMillisecond);

}  // namespace
