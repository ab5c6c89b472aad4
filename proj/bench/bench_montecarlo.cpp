// Serial reference versus OpenMP chunked Monte-Carlo kernels.
#include <benchmark/benchmark.h>

#include "orthostream/montecarlo.hpp"
#include "orthostream/rng.hpp"

namespace {

using namespace ortho;

struct Fixture {
  mc::BgSampler sampler;
  Mat d;
  OdlProblem problem;
  mc::Plan plan;

  explicit Fixture(Index n, std::size_t samples)
      : sampler{random_orthogonal(n, std::uint64_t{1}), 0.3}, d(random_orthogonal(n, std::uint64_t{2})) {
    problem.n = n;
    plan.samples = samples;
    plan.seed = 3;
  }
};

void BM_ObjectiveSerial(benchmark::State& state) {
  Fixture f(state.range(0), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(mc::serial::objective(f.d, Objective::L3, f.sampler, f.plan).mean);
}

void BM_ObjectiveParallel(benchmark::State& state) {
  Fixture f(state.range(0), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(mc::parallel::objective(f.d, Objective::L3, f.sampler, f.plan).mean);
}

void BM_GradientSerial(benchmark::State& state) {
  Fixture f(state.range(0), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(mc::serial::gradient(f.d, f.problem, f.sampler, f.plan).mean);
}

void BM_GradientParallel(benchmark::State& state) {
  Fixture f(state.range(0), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(mc::parallel::gradient(f.d, f.problem, f.sampler, f.plan).mean);
}

}  // namespace

BENCHMARK(BM_ObjectiveSerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObjectiveParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientSerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
