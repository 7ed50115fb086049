#include "setreadout/dynamics.hpp"
#include "setreadout/set_protocol.hpp"
#include "setreadout/spin_core.hpp"

#include <benchmark/benchmark.h>

using namespace setreadout;

namespace {

const SystemParams kSystem = SystemParams::from_delta(10000.0, 63.5, 50.0);

void BM_TransitionTable(benchmark::State& state) {
  const AnisotropyParams aniso{3.0, -1.0};
  for (auto _ : state) benchmark::DoNotOptimize(transition_table(kSystem, aniso));
}
BENCHMARK(BM_TransitionTable);

void BM_EvolveNumeric2(benchmark::State& state) {
  const auto rho0 = imperfect_flip_state(0.1, Branch::Long);
  const DecoherenceRates rates;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_numeric(rho0, rates, std::nullopt, 100.0, 0.01));
}
BENCHMARK(BM_EvolveNumeric2)->Unit(benchmark::kMillisecond);

void BM_EvolveNumeric8(benchmark::State& state) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(kProductDim, kProductDim) / double(kProductDim);
  const DensityMatrix rho0(rho);
  const auto h = build_hamiltonian(kSystem);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_numeric(rho0, DecoherenceRates{}, h, 1.0, 0.001));
  }
}
BENCHMARK(BM_EvolveNumeric8)->Unit(benchmark::kMillisecond);

void BM_RunWindow(benchmark::State& state) {
  TunnelingParams p;
  p.alpha = 0.1;
  p.p_leak_source = 0.05;
  p.p_leak_drain = 0.05;
  p.window = double(state.range(0)) * 1e3;
  PulseSpec pulse;
  pulse.frequency = resonance_frequency(Encoding::Outer, transition_table(kSystem));
  const InsideSpinState truth(1.5, Encoding::Outer);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_window(truth, pulse, kSystem, p, {}, seed++));
  state.SetItemsProcessed(state.iterations() * p.cycles());
}
BENCHMARK(BM_RunWindow)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
