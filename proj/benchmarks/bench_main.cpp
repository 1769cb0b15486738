#include <benchmark/benchmark.h>

#include <vector>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/exact_oracle.hpp"
#include "fermi_landauer/spectrum.hpp"
#include "fermi_landauer/vacuum_channel.hpp"

namespace fl = fermi_landauer;

namespace {

fl::CavityConfig cavity(double mass) {
  fl::CavityConfig c;
  c.mass = mass;
  return c;
}

fl::DetectorConfig detector(const fl::CavityConfig& c, double omega, double T) {
  return fl::DetectorConfig::make(omega, 0.01, T, fl::Worldline::stationary(0.3, c),
                                  {fl::Complex{1.0, 0.0}, fl::Complex{0.0, 0.0}}, 0.3);
}

void BM_SolveModes(benchmark::State& state) {
  const auto c = cavity(1.0);
  const int count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fl::solve_modes(c, count));
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_SolveModes)->Arg(50)->Arg(500);

void BM_CouplingSet(benchmark::State& state) {
  const auto c = cavity(1.0);
  const auto d = detector(c, 1.0, 5.0);
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fl::compute_coupling_set(c, d, n_max, fl::SwitchingProfile::sharp()));
  }
}
BENCHMARK(BM_CouplingSet)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_MovingDetectorCoupling(benchmark::State& state) {
  const auto c = cavity(1.0);
  const auto mode = fl::solve_modes(c, 10).back();
  const auto d = fl::DetectorConfig::make(1.0, 0.01, 5.0, fl::Worldline::uniform(0.2, 0.1, c, 5.0),
                                          {fl::Complex{1.0, 0.0}, fl::Complex{0.0, 0.0}}, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fl::compute_coupling(mode, d, fl::CouplingKind::W,
                                                  fl::SwitchingProfile::sharp(), c));
  }
}
BENCHMARK(BM_MovingDetectorCoupling)->Unit(benchmark::kMillisecond);

void BM_OraclePropagator(benchmark::State& state) {
  const auto c = cavity(1.0);
  const int n_modes = static_cast<int>(state.range(0));
  const double omega = fl::solve_modes(c, 1)[0].omega;
  const fl::OracleSetup setup{fl::TruncatedSpace(n_modes), c, detector(c, omega, 5.0),
                              fl::SwitchingProfile::sharp(), fl::InteractionTerms::all};
  for (auto _ : state) benchmark::DoNotOptimize(fl::build_propagator(setup, 5.0 / 256));
}
BENCHMARK(BM_OraclePropagator)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
