#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <vector>

#include "wickgl/gl.hpp"
#include "wickgl/oracle.hpp"
#include "wickgl/ou.hpp"
#include "wickgl/spectral_grid.hpp"
#include "wickgl/wick.hpp"

namespace {

using namespace wickgl;

SpectralField sample_field(int dim, int cutoff) {
  const ModeLattice lat(dim, cutoff);
  return stationary_sample(CutoffProfile::ones(lat), 1).v;
}

void BM_Synthesize2D(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const SpectralField f = sample_field(2, k);
  SpectralGrid grid(2, fft_friendly_size(4 * k + 1));
  std::vector<double> out(grid.grid_size());
  for (auto _ : state) {
    grid.synthesize(f, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Synthesize2D)->Arg(8)->Arg(16)->Arg(32);

void BM_HolderNorm2D(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const SpectralField f = sample_field(2, k);
  const int n = fft_friendly_size(4 * k + 1);
  for (auto _ : state) benchmark::DoNotOptimize(holder_norm(f, 0.5, n));
}
BENCHMARK(BM_HolderNorm2D)->Arg(8)->Arg(16);

void BM_PointwiseCube2D(benchmark::State& state) {
  const SpectralField f = sample_field(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_power(f, 3));
}
BENCHMARK(BM_PointwiseCube2D)->Arg(8)->Arg(16);

void BM_WickExpectation(benchmark::State& state) {
  const std::vector<int> n = {2, 2, 2, 2};
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(4, 4, 0.3);
  cov.diagonal().setOnes();
  for (auto _ : state) benchmark::DoNotOptimize(wick_expectation_product(n, cov));
}
BENCHMARK(BM_WickExpectation);

void BM_NfoldLambdaSum(benchmark::State& state) {
  const auto route = static_cast<SumRoute>(state.range(0));
  const double w[] = {1.0, 1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nfold_lambda_sum(2, Mode{}, 3, w, 12, SumKernel::kNone, route));
  }
}
BENCHMARK(BM_NfoldLambdaSum)
    ->Arg(static_cast<int>(SumRoute::kDirect))
    ->Arg(static_cast<int>(SumRoute::kFft))
    ->Arg(static_cast<int>(SumRoute::kShell));

void BM_CorrelationWick(benchmark::State& state) {
  const ModeLattice lat(2, 8);
  const CutoffProfile phi = CutoffProfile::ones(lat);
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlation_wick(2, 8, phi, phi, 3, 3, Mode{}, Mode{}, 0.3));
  }
}
BENCHMARK(BM_CorrelationWick);

void BM_TwoSidedCheck3D(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(twosided_bound_check(3, 0.5, 1.0, Mode{2, 1, 0}, 24));
  }
}
BENCHMARK(BM_TwoSidedCheck3D);

void BM_OuStepWithAccumulators(benchmark::State& state) {
  const ModeLattice lat(2, static_cast<int>(state.range(0)));
  const CutoffProfile phi = CutoffProfile::ones(lat);
  OUState s = stationary_sample(phi, 3);
  attach_accumulators(s, {2}, {2});
  OuStepper stepper(phi, 1.0 / 256, {2}, {2});
  for (auto _ : state) stepper.step(s);
}
BENCHMARK(BM_OuStepWithAccumulators)->Arg(2)->Arg(8);

void BM_GlRhsCubic2D(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const SpectralField v = sample_field(2, k);
  const SpectralField y = 0.1 * sample_field(2, k);
  GlRhs rhs(v.lattice(), 3, 1.0);
  SpectralField out(v.lattice());
  const std::vector<double> kappa = {0.0, 0.0, 0.0, -1.0};
  for (auto _ : state) rhs.evaluate(kappa, y, v, out);
}
BENCHMARK(BM_GlRhsCubic2D)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
