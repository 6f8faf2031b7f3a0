#include <benchmark/benchmark.h>

#include "varlex/maximal.hpp"
#include "varlex/testfam.hpp"

using namespace varlex;

namespace {

GridFunction bench_input_1d(long res) {
  DomainBox box(1, Vec(-1.0), Vec(1.0), {res, 1});
  TestFamilyOptions o;
  o.count = 1;
  o.seed = 12;
  return make_test_family(box, o)[0];
}

GridFunction bench_input_2d(long res) {
  DomainBox box(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {res, res});
  TestFamilyOptions o;
  o.count = 1;
  o.seed = 12;
  return make_test_family(box, o)[0];
}

void BM_hl_maximal_1d(benchmark::State& state) {
  GridFunction f = bench_input_1d(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hl_maximal(f));
  state.SetComplexityN(state.range(0));
}

void BM_hl_maximal_2d(benchmark::State& state) {
  GridFunction f = bench_input_2d(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hl_maximal(f));
  state.SetComplexityN(state.range(0));
}

void BM_frac_maximal_2d(benchmark::State& state) {
  GridFunction f = bench_input_2d(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(frac_maximal(f, 0.5));
  state.SetComplexityN(state.range(0));
}

BENCHMARK(BM_hl_maximal_1d)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_hl_maximal_2d)->RangeMultiplier(2)->Range(32, 256)->Complexity();
BENCHMARK(BM_frac_maximal_2d)->RangeMultiplier(2)->Range(32, 256)->Complexity();

}  // namespace
