// Micro- and macro-benchmarks: jet arithmetic, the generic bitension oracle,
// and full verification sweeps in serial versus parallel mode.

#include <benchmark/benchmark.h>

#include "warpcheck/jet.hpp"
#include "warpcheck/map_calculus.hpp"
#include "warpcheck/verify.hpp"

namespace {

using namespace warpcheck;

void BM_JetMultiply(benchmark::State& state) {
  const JetLayout* layout = JetLayout::get(2, 4);
  Jet a = Jet::variable(layout, 0, 0.7);
  Jet b = Jet::variable(layout, 1, -0.3);
  const Jet x = sin(a) + exp(b) * a;
  const Jet y = inverse(2.0 + a * b);
  for (auto _ : state) {
    Jet z = x * y;
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_JetMultiply);

void BM_JetCompose(benchmark::State& state) {
  const JetLayout* outer_layout = JetLayout::get(2, 4);
  const JetLayout* inner_layout = JetLayout::get(3, 4);
  const Jet u = Jet::variable(outer_layout, 0, 0.2);
  const Jet v = Jet::variable(outer_layout, 1, -0.4);
  const Jet outer = sin(u) * exp(v) + u * u;
  const Jet s = Jet::variable(inner_layout, 0, 0.2);
  const Jet t = Jet::variable(inner_layout, 1, 0.1);
  const Jet w = Jet::variable(inner_layout, 2, -0.3);
  const std::vector<Jet> inner{s + t * w, v.value() + s * s - w};
  for (auto _ : state) {
    Jet z = compose(outer, inner);
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_JetCompose);

void BM_BitensionOracle(benchmark::State& state) {
  const DwpSpace s = space_from_config(builtin_config("cfg-a"));
  const SmoothMap incl = inclusion_map(s, FactorSide::base, {0.1});
  const Vec p{0.3};
  for (auto _ : state) {
    Vec t2 = bitension_oracle(incl, p);
    benchmark::DoNotOptimize(t2);
  }
}
BENCHMARK(BM_BitensionOracle);

void run_sweep(benchmark::State& state, RunMode mode, const char* case_id) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    FieldReport r = run_case(cfg, case_id, mode);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepSerial(benchmark::State& state) { run_sweep(state, RunMode::serial, "inclusion-b"); }
BENCHMARK(BM_SweepSerial)->Arg(16)->Arg(64);

void BM_SweepParallel(benchmark::State& state) {
  run_sweep(state, RunMode::parallel, "inclusion-b");
}
BENCHMARK(BM_SweepParallel)->Arg(16)->Arg(64);

void BM_SweepSerialCurvature(benchmark::State& state) {
  run_sweep(state, RunMode::serial, "curvature");
}
BENCHMARK(BM_SweepSerialCurvature)->Arg(16);

void BM_SweepParallelCurvature(benchmark::State& state) {
  run_sweep(state, RunMode::parallel, "curvature");
}
BENCHMARK(BM_SweepParallelCurvature)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
