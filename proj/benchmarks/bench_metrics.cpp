#include <benchmark/benchmark.h>

#include <nomajam/detection.hpp>
#include <nomajam/fbl.hpp>
#include <nomajam/metrics.hpp>
#include <nomajam/montecarlo.hpp>
#include <nomajam/optimizer.hpp>
#include <nomajam/scenario.hpp>

namespace {

using namespace nomajam;

const Scenario& reference() {
  static const Scenario s = reference_scenario();
  return s;
}

void BM_Bler(benchmark::State& state) {
  double sinr = 3.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bler(sinr, CodeSpec{80, 256}));
    sinr += 1e-9;
  }
}
BENCHMARK(BM_Bler);

void BM_DetectionRayleigh(benchmark::State& state) {
  const DetectionInputs in = detection_inputs(reference(), 0.07);
  for (auto _ : state) benchmark::DoNotOptimize(detection_prob_rayleigh(in));
}
BENCHMARK(BM_DetectionRayleigh);

void BM_Evaluate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(reference()));
}
BENCHMARK(BM_Evaluate);

// Metrics with the detection probability supplied, the inner loop of grid searches.
void BM_EvaluateCachedDetection(benchmark::State& state) {
  const double pd = detection_prob(reference());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(reference(), pd));
}
BENCHMARK(BM_EvaluateCachedDetection);

void BM_GaGenerations(benchmark::State& state) {
  GaSettings g = reference().ga;
  g.max_generations = static_cast<int>(state.range(0));
  g.max_stall_generations = g.max_generations;
  g.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve(reference(), g).esr_bps);
}
BENCHMARK(BM_GaGenerations)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MonteCarloSuccess(benchmark::State& state) {
  McConfig cfg;
  cfg.trials = static_cast<std::uint64_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mc_success_prob(reference(), 0, cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloSuccess)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_MonteCarloDelay(benchmark::State& state) {
  McConfig cfg;
  cfg.arrivals = static_cast<std::uint64_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mc_delay(reference(), 0, cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloDelay)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
