#include <benchmark/benchmark.h>

#include <cstdint>

#include "losdoe/anova.hpp"
#include "losdoe/diagnostics.hpp"
#include "losdoe/linmod.hpp"
#include "losdoe/model.hpp"
#include "losdoe/special.hpp"
#include "losdoe/synth.hpp"

namespace {

using namespace losdoe;

Dataset cohort(std::size_t n) {
  auto spec = default_cohort_spec();
  spec.n = n;
  spec.seed = 7;
  return apply_transform(generate(spec), Transform::log10);
}

void BM_NoncentralFCdf(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  const special::FDist d(3, 1160, lambda);
  for (auto _ : state) benchmark::DoNotOptimize(special::noncentral_f_cdf(3.8, d));
}
BENCHMARK(BM_NoncentralFCdf)->Arg(5)->Arg(50)->Arg(500)->Arg(5000);

void BM_OlsFit(benchmark::State& state) {
  const auto d = cohort(static_cast<std::size_t>(state.range(0)));
  const auto x = build_design(d, ModelSpec::factorial(d.layout(), 3, Coding::reference));
  const auto y = d.responses();
  for (auto _ : state) benchmark::DoNotOptimize(ols_fit(x, y));
}
BENCHMARK(BM_OlsFit)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_Type3Anova(benchmark::State& state) {
  const auto d = cohort(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(type3_anova(d, 3));
}
BENCHMARK(BM_Type3Anova)->Arg(8000)->Arg(82718)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
