#include <benchmark/benchmark.h>

#include "wetting/bkw.hpp"
#include "wetting/experiments.hpp"
#include "wetting/walks.hpp"

using namespace wetting;

static void BM_SwendsenWangSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DobrushinDomain d(n, n);
  const CriticalParams cp = params_from_q(25);
  SwendsenWang sw(d, cp.p, 25, 1, 0);
  for (auto _ : state) sw.sweep();
  state.SetItemsProcessed(state.iterations() * d.num_interior());
}
BENCHMARK(BM_SwendsenWangSweep)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_HeatBathSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DobrushinDomain d(n, n);
  HeatBathSampler hb(fk_dobrushin(d, 25, true), 1, 0, ConstraintMode::RejectViolating);
  for (auto _ : state) hb.sweep();
  state.SetItemsProcessed(state.iterations() * d.num_interior());
}
BENCHMARK(BM_HeatBathSweep)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_ChainAndStats(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DobrushinDomain d(n, n);
  const CriticalParams cp = params_from_q(25);
  const CouplingThresholds th = CouplingThresholds::from(cp);
  SwendsenWang sw(d, cp.p, 25, 2, 0);
  for (int i = 0; i < 50; ++i) sw.sweep();
  Rng rng(3);
  StatsConfig cfg;
  for (auto _ : state) {
    const ChainSample c = run_chain(d, sw.state(), th, rng);
    const SampleStats s = sample_stats(d, sw.state(), potts_from_fk(d, sw.state(), 25, rng), c, cfg);
    benchmark::DoNotOptimize(s.gap);
  }
}
BENCHMARK(BM_ChainAndStats)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_KernelDp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int w = default_window(n);
  for (auto _ : state) {
    const SyncWalkKernels k = kernel_dp(IncrementDist::simple(), 1, 0, n, -w, w, {n});
    benchmark::DoNotOptimize(k.qplus_total.back());
  }
}
BENCHMARK(BM_KernelDp)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_VerifyChain(benchmark::State& state) {
  const CriticalParams cp = params_from_q(25);
  const CouplingThresholds th = CouplingThresholds::from(cp);
  for (auto _ : state) benchmark::DoNotOptimize(verify_chain(static_cast<int>(state.range(0)), 0, cp, th).max_tv());
}
BENCHMARK(BM_VerifyChain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_MidpointLaw(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(midpoint_law_pm1(n, scale_sc(n), scale_sc(n)).lost);
}
BENCHMARK(BM_MidpointLaw)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
