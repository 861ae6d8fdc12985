#include <benchmark/benchmark.h>

#include "kovtop/abel.hpp"
#include "kovtop/koetter.hpp"
#include "kovtop/reference.hpp"
#include "kovtop/rigid_dynamics.hpp"
#include "kovtop/theta.hpp"

namespace {

using namespace kovtop;

const Trajectory& chart_trajectory() {
  static const Trajectory tr = [] {
    const auto states = reference::family_states(1, 1);
    return integrate(states[0], reference::config(reference::kChartSampleDt, 5.0));
  }();
  return tr;
}

void BM_Integrate(benchmark::State& state) {
  StateSampler sampler(1);
  const EuclideanState s0 = sampler.next();
  TrajectoryConfig cfg;
  cfg.t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    Trajectory tr = integrate(s0, cfg);
    benchmark::DoNotOptimize(tr.state(tr.size() - 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Integrate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ThetaEval(benchmark::State& state) {
  Eigen::Matrix2cd t;
  t << Complex(0.2, 1.1), Complex(-0.1, 0.15), Complex(-0.1, 0.15), Complex(0.35, 0.9);
  const PeriodMatrix tau(t);
  ThetaConfig cfg;
  cfg.N = static_cast<int>(state.range(0));
  cfg.auto_raise = false;
  cfg.target = 1.0;
  const Characteristic ch = named_characteristic("theta24");
  const CVec2 u(Complex(0.1, 0.05), Complex(-0.2, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(theta_eval(ch, u, tau, cfg));
}
BENCHMARK(BM_ThetaEval)->Arg(6)->Arg(8)->Arg(16);

void BM_ToXy(benchmark::State& state) {
  const Trajectory& tr = chart_trajectory();
  for (auto _ : state) benchmark::DoNotOptimize(to_xy(tr));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tr.size()));
}
BENCHMARK(BM_ToXy)->Unit(benchmark::kMillisecond);

void BM_AbelIncrements(benchmark::State& state) {
  const Trajectory& tr = chart_trajectory();
  for (auto _ : state) benchmark::DoNotOptimize(abel_increments(tr));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tr.size()));
}
BENCHMARK(BM_AbelIncrements)->Unit(benchmark::kMillisecond);

void BM_RootBranches(benchmark::State& state) {
  StateSampler sampler(2);
  const IntegralSet in = integrals(sampler.next());
  for (auto _ : state) benchmark::DoNotOptimize(root_branches(in));
}
BENCHMARK(BM_RootBranches);

}  // namespace

BENCHMARK_MAIN();
