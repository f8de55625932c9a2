#include <benchmark/benchmark.h>

#include <gpfit/bench.hpp>
#include <gpfit/design.hpp>
#include <gpfit/gp.hpp>
#include <gpfit/kernel.hpp>

using namespace gpfit;

namespace {

Vector goldprice_outputs(const DesignMatrix& X) {
  Vector y(X.rows());
  for (Index i = 0; i < X.rows(); ++i) y[i] = bench::goldprice(X.row(i).transpose());
  return y;
}

void BM_Deviance(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DesignMatrix X = maximin_lhd(n, 2, 1);
  const DevianceFunction dev(X, goldprice_outputs(X), 20.0);
  Vector beta(2);
  beta << 0.8, 1.2;
  for (auto _ : state) benchmark::DoNotOptimize(dev(beta));
}
BENCHMARK(BM_Deviance)->Arg(10)->Arg(25)->Arg(50)->Arg(100);

void BM_Eigenvalues(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DesignMatrix X = maximin_lhd(n, 2, 2);
  Vector beta(2);
  beta << 0.5, 0.5;
  const CorrMatrix R = corr_matrix(X, CorrParams(beta));
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigenvalues(R.values()));
}
BENCHMARK(BM_Eigenvalues)->Arg(10)->Arg(25)->Arg(50);

void BM_MaximinLhd(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(maximin_lhd(n, 2, ++seed));
}
BENCHMARK(BM_MaximinLhd)->Arg(25)->Arg(400);

void BM_Fit(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DesignMatrix X = maximin_lhd(n, 2, 3);
  const Vector Y = goldprice_outputs(X);
  for (auto _ : state) benchmark::DoNotOptimize(fit(X, Y));
}
BENCHMARK(BM_Fit)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
