#include <benchmark/benchmark.h>

#include "halfcav/dynamics.hpp"
#include "halfcav/pulses.hpp"
#include "halfcav/read_shaper.hpp"
#include "halfcav/write_optimizer.hpp"

using namespace halfcav;

namespace {

ComplexEnvelope time_bin(double sigma) {
  TimeBinSpec s;
  s.sigma = sigma;
  const double pad = 8.0 / sigma;
  const double dt = std::min(1.0, 1.0 / sigma) / 200.0;
  return make_time_bin(
      s, TimeGrid::with_spacing(-pad, dt, static_cast<std::size_t>((20.0 + 2 * pad) / dt) + 1));
}

void BM_AbsorptionProbability(benchmark::State& state) {
  const auto xi = time_bin(0.2);
  const auto w = optimal_write_profile(xi, MemoryConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(absorption_probability(w.profile, w.input));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xi.size()));
}
BENCHMARK(BM_AbsorptionProbability);

void BM_BlochOracle(benchmark::State& state) {
  const auto xi = time_bin(0.2);
  const auto w = optimal_write_profile(xi, MemoryConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(bloch_ode_oracle(w.profile, w.input));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xi.size()));
}
BENCHMARK(BM_BlochOracle);

void BM_OptimalWrite(benchmark::State& state) {
  const auto xi = time_bin(static_cast<double>(state.range(0)) / 10.0);
  const MemoryConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(optimal_write_profile(xi, cfg));
}
BENCHMARK(BM_OptimalWrite)->Arg(2)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ReadShaper(benchmark::State& state) {
  const auto xi = time_bin(static_cast<double>(state.range(0)) / 10.0);
  const MemoryConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(read_profile_for_target(xi, 0.9, cfg));
}
BENCHMARK(BM_ReadShaper)->Arg(2)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
