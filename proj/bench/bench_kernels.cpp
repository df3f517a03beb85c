#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mots/nariai.hpp"
#include "mots/stability.hpp"

using namespace mots;

namespace {

stab::StabilityProblem problem(int n, int m_max) {
  const geom::ThetaGrid g(n);
  Field Q(static_cast<std::size_t>(n)), Xt(Q.size()), Xp(Q.size());
  for (int j = 0; j < n; ++j) {
    const double t = g.node(j);
    const auto u = static_cast<std::size_t>(j);
    Q[u] = 0.5 + 0.3 * std::cos(t);
    Xt[u] = 0.2 * std::sin(t);
    Xp[u] = 0.4 * (1.0 + 0.5 * std::cos(t));
  }
  return stab::StabilityProblem::on_profile(geom::MetricProfile::regular_poly({0.1}), g, Q, Xt, Xp, m_max);
}

void eigenpair(benchmark::State& state, Execution exec) {
  const stab::StabilityProblem p = problem(static_cast<int>(state.range(0)), 8);
  stab::EigenOptions opts;
  opts.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(stab::principal_eigenpair(p, opts).lambda1);
}

void nariai_sweep(benchmark::State& state, Execution exec) {
  std::vector<double> as;
  for (int i = 0; i < state.range(0); ++i) as.push_back(0.26 * i / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nariai::sweep(as, 1.0, 2048, exec).back().gap);
}

}  // namespace

BENCHMARK_CAPTURE(eigenpair, serial, Execution::serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(eigenpair, parallel, Execution::parallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(nariai_sweep, serial, Execution::serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(nariai_sweep, parallel, Execution::parallel)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
