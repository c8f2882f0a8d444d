#include <benchmark/benchmark.h>

#include <cmath>

#include "edtlab/analytic_edt.hpp"
#include "edtlab/closed_form.hpp"
#include "edtlab/queueing.hpp"
#include "edtlab/rng.hpp"
#include "edtlab/series_kernel.hpp"
#include "edtlab/simulator.hpp"

namespace {

using namespace edtlab;

const TrafficModel kModel(3, 2);
const PacketSpec kPacket(4);

void BM_Hyp1f1(benchmark::State& state) {
  const int a = -static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hyp1f1_terminating(a, 2.5, -7.3));
}
BENCHMARK(BM_Hyp1f1)->Arg(10)->Arg(100)->Arg(1000);

void BM_Hyp2f2(benchmark::State& state) {
  const int a = -static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hyp2f2_terminating(3.0, a, 2.0, 2.0, -7.3));
}
BENCHMARK(BM_Hyp2f2)->Arg(10)->Arg(100)->Arg(1000);

void BM_PartialFractionExpand(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(partial_fraction_expand(n, 1.7).evaluate(0.4));
}
BENCHMARK(BM_PartialFractionExpand)->Arg(5)->Arg(50);

void BM_ClosedFormDensity(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        closed_form_density(kModel, kPacket, PeriodicPerfectSensing{0.5}, PuState::kOff, t));
  }
}
BENCHMARK(BM_ClosedFormDensity)->Arg(5)->Arg(20);

void BM_WaitingDistributions(benchmark::State& state) {
  const SensingMode modes[] = {ContinuousSensing{}, PeriodicPerfectSensing{0.5},
                               PeriodicImperfectSensing{0.5, 0.2}};
  const SensingMode& mode = modes[state.range(0)];
  for (auto _ : state) {
    benchmark::DoNotOptimize(waiting_distributions({kModel, kPacket, mode}));
  }
  state.SetLabel(describe(mode));
}
BENCHMARK(BM_WaitingDistributions)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_MeanDelay(benchmark::State& state) {
  const QueueConfig c{TrafficModel(10, 6), PacketSpec(1), PeriodicPerfectSensing{0.5}, 40};
  for (auto _ : state) benchmark::DoNotOptimize(mean_delay(c));
}
BENCHMARK(BM_MeanDelay);

void BM_SimulateEdt(benchmark::State& state) {
  SimConfig c{kModel, kPacket, PeriodicImperfectSensing{0.5, 0.1}};
  c.n_samples = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_edt(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateEdt)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SimulateQueue(benchmark::State& state) {
  SimConfig c{TrafficModel(10, 6), PacketSpec(1), PeriodicPerfectSensing{0.5}};
  c.psi = 40;
  c.horizon = 40.0 * static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_queue(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateQueue)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Philox(benchmark::State& state) {
  RandomStream r(1, 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(r.next_u64());
}
BENCHMARK(BM_Philox);

}  // namespace

BENCHMARK_MAIN();
