#include "rtk/hmatrix.hpp"
#include "rtk/krylov.hpp"
#include "rtk/rbf.hpp"

#include <benchmark/benchmark.h>

using namespace rtk;

namespace {

PointSet cube(std::size_t n) { return gen_cube(Shape3(n, n, n), Distribution::Halton, 1); }

Tensor3 ones(Shape3 s) {
  Tensor3 x(s);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / static_cast<double>(i + 1);
  return x;
}

void BM_DenseAssemble(benchmark::State& st) {
  const PointSet ps = cube(static_cast<std::size_t>(st.range(0)));
  const MQKernel k(1.0);
  HelmholtzProblem pr;
  for (auto _ : st) benchmark::DoNotOptimize(assemble_H(ps, k, pr));
}

void BM_HAssemble(benchmark::State& st) {
  const PointSet ps = cube(static_cast<std::size_t>(st.range(0)));
  const MQKernel k(1.0);
  HelmholtzProblem pr;
  HParams hp;
  for (auto _ : st) benchmark::DoNotOptimize(assemble_h(ps, k, pr, hp));
}

void BM_DenseApply(benchmark::State& st) {
  const PointSet ps = cube(static_cast<std::size_t>(st.range(0)));
  const Operator6 h = assemble_H(ps, MQKernel(1.0), HelmholtzProblem{});
  const Tensor3 x = ones(ps.shape());
  for (auto _ : st) benchmark::DoNotOptimize(h.apply(x));
}

void BM_HApply(benchmark::State& st) {
  const PointSet ps = cube(static_cast<std::size_t>(st.range(0)));
  const HOperator h = assemble_h(ps, MQKernel(1.0), HelmholtzProblem{}, HParams{});
  const Tensor3 x = ones(ps.shape());
  st.counters["bytes"] = static_cast<double>(h.bytes());
  for (auto _ : st) benchmark::DoNotOptimize(h_apply(h, x));
}

void BM_GolubKahan(benchmark::State& st) {
  const PointSet ps = cube(8);
  const Operator6 h = assemble_H(ps, MQKernel(1.0), HelmholtzProblem{});
  const Tensor3 f = ones(ps.shape());
  const auto m = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(ggkb(h, f, m));
}

void BM_GlobalArnoldi(benchmark::State& st) {
  const PointSet ps = cube(8);
  const Operator6 h = assemble_H(ps, MQKernel(1.0), HelmholtzProblem{});
  const Tensor3 f = ones(ps.shape());
  const auto m = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(etga(h, f, m));
}

}  // namespace

BENCHMARK(BM_DenseAssemble)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HAssemble)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseApply)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HApply)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GolubKahan)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GlobalArnoldi)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
