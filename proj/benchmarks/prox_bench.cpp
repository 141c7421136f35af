#include "ndf/calculus.hpp"
#include "ndf/prox.hpp"
#include "ndf/sampler.hpp"
#include "ndf/semigroup.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ndf;

Form make_form(FormFamily family, Eigen::Index n, std::uint64_t seed) {
  FieldSampler sampler(seed);
  return random_form(sampler, family, n);
}

void BM_prox_quadratic(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  FieldSampler sampler(7);
  const MeasureSpace space = random_space(sampler, n);
  const Form form = make_form(FormFamily::kQuadraticGraph, n, 11);
  const Field u = sampler.gaussian_field(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox(form, u, 0.1, space));
  }
}
BENCHMARK(BM_prox_quadratic)->Arg(8)->Arg(32)->Arg(128);

void BM_prox_anisotropic(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  FieldSampler sampler(7);
  const MeasureSpace space = random_space(sampler, n);
  const Form form = make_form(FormFamily::kAnisotropicGraph, n, 13);
  const Field u = sampler.gaussian_field(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox(form, u, 0.1, space));
  }
}
BENCHMARK(BM_prox_anisotropic)->Arg(8)->Arg(32)->Arg(128);

void BM_prox_tv_squared(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  FieldSampler sampler(7);
  const MeasureSpace space = random_space(sampler, n);
  PowerSumSpec spec;
  spec.exponent = 1.0;
  for (int i = 0; i + 1 < n; ++i) spec.edges.push_back({i, i + 1, 1.0});
  const Form form(n, std::move(spec));
  const Field u = sampler.gaussian_field(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox(form, u, 0.1, space));
  }
}
BENCHMARK(BM_prox_tv_squared)->Arg(8)->Arg(32);

void BM_slope_enclosure(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  FieldSampler sampler(7);
  const MeasureSpace space = random_space(sampler, n);
  const Form form = make_form(FormFamily::kAnisotropicGraph, n, 17);
  const Field u = sampler.gaussian_field(n);
  const Field v = sampler.gaussian_field(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(slope_enclosure(form, u, v, space, 1e-6));
  }
}
BENCHMARK(BM_slope_enclosure)->Arg(8)->Arg(32);

void BM_flow_quadratic(benchmark::State& state) {
  const Eigen::Index n = 16;
  FieldSampler sampler(7);
  const MeasureSpace space = random_space(sampler, n);
  const Form form = make_form(FormFamily::kQuadraticGraph, n, 19);
  const Field u0 = sampler.gaussian_field(n);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(flow(form, u0, 1.0, steps, space));
  }
}
BENCHMARK(BM_flow_quadratic)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
