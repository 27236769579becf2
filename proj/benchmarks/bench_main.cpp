#include <benchmark/benchmark.h>

#include <vector>

#include "flr/regression.hpp"
#include "flr/selfnorm.hpp"
#include "flr/simulate.hpp"
#include "flr/spectral.hpp"

namespace {

flr::Dataset design_sample(std::size_t n) {
  const flr::MeasureSpace g = flr::MeasureSpace::default_grid();
  flr::SimConfig cfg;
  cfg.n = n;
  cfg.seed = 11;
  return flr::gen_dataset(cfg, flr::kernel_op_from_fn(flr::phi_s, g, g));
}

void BM_Eigensystem(benchmark::State& state) {
  const flr::Dataset d = design_sample(500);
  std::vector<flr::FuncObs> xs;
  for (std::size_t i = 0; i < d.size(); ++i) xs.push_back(d.regressor(i));
  const flr::KernelOp c = flr::covariance_prefix(xs, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(flr::eigensystem(c));
}
BENCHMARK(BM_Eigensystem);

void BM_DistancePath(benchmark::State& state) {
  const flr::Dataset d = design_sample(static_cast<std::size_t>(state.range(0)));
  const flr::MeasureSpace g = flr::MeasureSpace::default_grid();
  const flr::KernelOp s0 = flr::kernel_op_from_fn(flr::phi_s0, g, g);
  const std::vector<double> fr{0.2, 0.4, 0.6, 0.8};
  for (auto _ : state)
    benchmark::DoNotOptimize(flr::distance_path(d, s0, fr, 4, flr::DistanceKind::Location));
}
BENCHMARK(BM_DistancePath)->Arg(200)->Arg(500)->Arg(2000);

void BM_SimulateW(benchmark::State& state) {
  const flr::NuMeasure nu = flr::NuMeasure::default_measure();
  for (auto _ : state)
    benchmark::DoNotOptimize(flr::simulate_w(nu, 10000, static_cast<std::size_t>(state.range(0)), 1, 1));
}
BENCHMARK(BM_SimulateW)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
