#include <benchmark/benchmark.h>

#include "varlex/operators.hpp"
#include "varlex/testfam.hpp"

using namespace varlex;

namespace {

void BM_apply_kernel_1d(benchmark::State& state) {
  long res = state.range(0);
  DomainBox box(1, Vec(-1.0), Vec(1.0), {res, 1});
  TestFamilyOptions o;
  o.count = 1;
  o.seed = 12;
  GridFunction f = make_test_family(box, o)[0];
  KernelSpec k = single_matrix_kernel(Matrix::scalar1d(2.0), 0.5);
  DomainBox out = default_output_box(k, box);
  for (auto _ : state) benchmark::DoNotOptimize(apply_kernel(f, k, out));
  state.SetComplexityN(res);
}

// two factors, so the per-cell kernel product dominates
void BM_apply_kernel_2d(benchmark::State& state) {
  long res = state.range(0);
  DomainBox box(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {res, res});
  TestFamilyOptions o;
  o.count = 1;
  o.seed = 12;
  GridFunction f = make_test_family(box, o)[0];
  MatrixFamily fam = make_family(2, {Matrix::identity(2), Matrix::diagonal(-1.0, -1.0)});
  KernelSpec k = make_kernel(fam, {0.75, 0.75});
  DomainBox out = default_output_box(k, box);
  for (auto _ : state) benchmark::DoNotOptimize(apply_kernel(f, k, out));
  state.SetComplexityN(res);
}

BENCHMARK(BM_apply_kernel_1d)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_apply_kernel_2d)->RangeMultiplier(2)->Range(16, 64)->Complexity();

}  // namespace

BENCHMARK_MAIN();
