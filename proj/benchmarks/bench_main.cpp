// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "polygauge/builders.hpp"
#include "polygauge/certify.hpp"
#include "polygauge/experiment.hpp"
#include "polygauge/lp.hpp"
#include "polygauge/qp.hpp"
#include "polygauge/rng.hpp"

namespace {

using namespace polygauge;

void BM_EvalGaugeL1(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const HMatrix h = build_l1(n);
  Xoshiro256pp rng(7);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_gauge(h, x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalGaugeL1)->DenseRange(4, 14, 2)->Complexity();

void BM_SolveLpRandom(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Xoshiro256pp rng(11);
  LinearProgram lp;
  lp.objective.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) lp.objective[i] = rng.gaussian();
  lp.a_le.resize(2 * n, n);
  lp.b_le.resize(2 * n);
  for (Eigen::Index r = 0; r < 2 * n; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) lp.a_le(r, i) = rng.gaussian();
    lp.b_le[r] = 1.0 + rng.uniform();
  }
  lp.lower = Eigen::VectorXd::Constant(n, -2.0);
  lp.upper = Eigen::VectorXd::Constant(n, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_lp(lp));
  }
}
BENCHMARK(BM_SolveLpRandom)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_Criterion(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const HMatrix h = build_l1(n);
  EnsembleConfig config;
  config.gauge.kind = HDescriptor::Kind::l1;
  config.gauge.n = n;
  config.q = n;
  config.sparsity = std::max<Eigen::Index>(1, n - 3);
  const DrawnInstance d = draw_instance(config, h, 42);
  const HSupport support = h_support(h, d.x0);
  const SupportGeometry geom = support_geometry(d.phi, h, support);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ic(d.phi, h, geom));
  }
}
BENCHMARK(BM_Criterion)->Arg(6)->Arg(8)->Arg(10);

void BM_QpPathFollowing(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const HMatrix h = build_linf(n);
  EnsembleConfig config;
  config.gauge.kind = HDescriptor::Kind::linf;
  config.gauge.n = n;
  config.q = n;
  config.sigma = 0.01;
  const DrawnInstance d = draw_instance(config, h, 5);
  const Eigen::VectorXd y = d.phi * d.x0 + d.w;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_p_lambda(d.phi, h, y, 0.05));
  }
}
BENCHMARK(BM_QpPathFollowing)->Arg(4)->Arg(8)->Arg(12);

void BM_P0Dual(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const HMatrix h = build_l1(n);
  EnsembleConfig config;
  config.gauge.kind = HDescriptor::Kind::l1;
  config.gauge.n = n;
  config.q = std::max<Eigen::Index>(2, n - 2);
  config.sparsity = 2;
  const DrawnInstance d = draw_instance(config, h, 9);
  const Eigen::VectorXd y = d.phi * d.x0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_p0(d.phi, h, y));
  }
}
BENCHMARK(BM_P0Dual)->Arg(6)->Arg(8)->Arg(10);

} // namespace

BENCHMARK_MAIN();
