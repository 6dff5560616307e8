#include <gtest/gtest.h>

#include <cmath>

#include "wickgl/error.hpp"
#include "wickgl/montecarlo.hpp"

namespace wickgl {
namespace {

EstimateTarget wp_target(int n, Mode k1, Mode k2, double tau, std::size_t m) {
  EstimateTarget t;
  t.name = "wp";
  t.kind = WickKind::kWP;
  t.dim = 1;
  t.cutoff = 2;
  t.n1 = t.n2 = n;
  t.k1 = k1;
  t.k2 = k2;
  t.time.tau = tau;
  t.samples = m;
  t.seed = 17;
  return t;
}

TEST(Estimate, LinearCovarianceExample) {
  const EstimateReport r = estimate_wick_correlation(wp_target(1, {1}, {1}, 0.5, 20000));
  ASSERT_TRUE(r.oracle);
  EXPECT_NEAR(r.oracle->real(), std::exp(-1.0) / 2.0, 1e-15);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.zscore, 4.0);
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_EQ(r.bias_budget, 0.0);
  EXPECT_NEAR(r.zscore, std::abs(r.estimate - *r.oracle) / r.std_error, 1e-12);
}

TEST(Estimate, DistinctModesAverageToZero) {
  const EstimateReport r = estimate_wick_correlation(wp_target(2, {1}, {0}, 0.0, 5000));
  EXPECT_EQ(*r.oracle, Complex(0.0));
  EXPECT_LE(std::abs(r.estimate), 4.0 * r.std_error);
  EXPECT_TRUE(r.passed);
}

TEST(Estimate, SecondOrderMatchesOracle) {
  EstimateTarget t = wp_target(2, {1}, {1}, 0.3, 10000);
  t.dim = 2;
  t.k1 = t.k2 = Mode{1, 0};
  const EstimateReport r = estimate_wick_correlation(t);
  EXPECT_TRUE(r.passed) << r.zscore;
}

TEST(Estimate, AveragedPowerMatchesOracle) {
  EstimateTarget t = wp_target(2, {0}, {0}, 0.0, 2000);
  t.kind = WickKind::kAWP;
  t.time = {.tau = 0, .t0 = 0, .t1 = 0.5, .t2 = 0.5};
  t.dt = 1.0 / 64;
  const EstimateReport r = estimate_wick_correlation(t);
  EXPECT_NEAR(r.bias_budget, 0.01 * std::abs(*r.oracle), 1e-15);
  EXPECT_TRUE(r.passed) << r.zscore;
}

TEST(Estimate, DeterministicAndThreadIndependent) {
  const EstimateTarget t = wp_target(2, {1}, {1}, 0.3, 3000);
  const EstimateReport a = estimate_wick_correlation(t, 1);
  const EstimateReport b = estimate_wick_correlation(t, 1);
  const EstimateReport c = estimate_wick_correlation(t, 3);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.estimate, c.estimate);
  EXPECT_EQ(a.stderr_re, c.stderr_re);
  EXPECT_EQ(a.stderr_im, c.stderr_im);
}

TEST(Estimate, MeanOfSummands) {
  const EstimateTarget t = wp_target(2, {1}, {1}, 0.2, 300);
  Complex sum = 0.0;
  for (std::uint64_t i = 0; i < t.samples; ++i) sum += wick_correlation_sample(t, i);
  const EstimateReport r = estimate_wick_correlation(t);
  EXPECT_NEAR(std::abs(r.estimate - sum / double(t.samples)), 0.0, 1e-13);
}

TEST(Estimate, StandardErrorScaling) {
  const EstimateReport a = estimate_wick_correlation(wp_target(2, {1}, {1}, 0.0, 8000));
  const EstimateReport b = estimate_wick_correlation(wp_target(2, {1}, {1}, 0.0, 16000));
  EXPECT_NEAR(a.std_error / b.std_error, std::sqrt(2.0), 0.15 * std::sqrt(2.0));
}

TEST(Estimate, DivergentRegimeHasNoOracle) {
  EstimateTarget t = wp_target(3, {}, {}, 0.0, 100);
  t.dim = 3;
  const EstimateReport r = estimate_wick_correlation(t);
  EXPECT_FALSE(r.oracle);
  EXPECT_EQ(r.note, "no oracle, trend mode");
  EXPECT_TRUE(r.passed);
}

TEST(Estimate, Errors) {
  EXPECT_THROW(estimate_wick_correlation(wp_target(1, {1}, {1}, 0, 99)), DomainError);
}

TEST(Estimate, RiggedFixedTargetFails) {
  EstimateTarget t;
  t.name = "rigged";
  t.fixed = true;
  t.fixed_estimate = 0.0;
  t.fixed_stderr = 1e-6;
  t.fixed_oracle = 1.0;
  const EstimateReport r = estimate_wick_correlation(t);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(ensemble_exit_status({r}), 1);
  t.fixed_estimate = 1.0 + 3e-6;
  EXPECT_TRUE(estimate_wick_correlation(t).passed);
}

// ---------------------------------------------------------------------------

TEST(EnsembleSpec, EmptySpecSucceeds) {
  const EnsembleSpec spec = parse_ensemble_spec("# nothing\n\n");
  EXPECT_TRUE(spec.targets.empty());
  const auto reports = run_ensemble(spec);
  EXPECT_TRUE(reports.empty());
  EXPECT_EQ(ensemble_exit_status(reports), 0);
}

TEST(EnsembleSpec, ParsesTargetsAndDefaults) {
  const EnsembleSpec spec = parse_ensemble_spec(R"(
[defaults]
dim = 2
cutoff = 3
samples = 500
seed = 5

[cov]
kind = wp
n = 1
k = 1,0
tau = 0.3

; second target
[aver]
kind = awp
n1 = 2
n2 = 2
k1 = 0,0
k2 = 0,0
t0 = 0
t1 = 1
t2 = 1
dt = 0.015625
bias_relative = 0.02
profile = smooth
radius = 2.5

[self]
kind = fixed
estimate = 1
stderr = 0.1
oracle = 1.2
)");
  ASSERT_EQ(spec.targets.size(), 3u);
  const EstimateTarget& a = spec.targets[0];
  EXPECT_EQ(a.name, "cov");
  EXPECT_EQ(a.dim, 2);
  EXPECT_EQ(a.cutoff, 3);
  EXPECT_EQ(a.samples, 500u);
  EXPECT_EQ(a.seed, 5u);
  EXPECT_EQ(a.k1[0], 1);
  EXPECT_EQ(a.k2[0], 1);
  EXPECT_DOUBLE_EQ(a.time.tau, 0.3);
  const EstimateTarget& b = spec.targets[1];
  EXPECT_EQ(b.kind, WickKind::kAWP);
  EXPECT_EQ(b.profile, ProfileKind::kSmooth);
  EXPECT_DOUBLE_EQ(b.profile_radius, 2.5);
  EXPECT_DOUBLE_EQ(b.bias_relative, 0.02);
  EXPECT_DOUBLE_EQ(b.time.t1, 1.0);
  EXPECT_TRUE(spec.targets[2].fixed);
  EXPECT_DOUBLE_EQ(spec.targets[2].fixed_oracle, 1.2);

  const auto reports = run_ensemble(spec, 2);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[2].target, "self");
  EXPECT_TRUE(reports[2].passed);  // |0.2| <= 4 * 0.1
}

void expect_line_error(const std::string& text, int line) {
  try {
    parse_ensemble_spec(text);
    ADD_FAILURE() << "no error for:\n" << text;
  } catch (const DomainError& e) {
    const std::string want = "line " + std::to_string(line) + ":";
    EXPECT_EQ(std::string(e.what()).rfind(want, 0), 0u) << e.what();
  }
}

TEST(EnsembleSpec, ErrorsCarryLineNumbers) {
  expect_line_error("[a]\nkind = wp\nbogus = 1\n", 3);
  expect_line_error("[a]\nkind = wp\ndim = two\n", 3);
  expect_line_error("[a]\nkind = xyz\n", 2);
  expect_line_error("dim = 1\n", 1);
  expect_line_error("[a]\nkind = wp\n[a]\nkind = wp\n", 3);
  expect_line_error("[a]\nkind = wp\ndim = 2\nk = 1\n", 4);
  expect_line_error("[a]\ndim = 2\n", 1);
  expect_line_error("[a]\nkind = wp\n[defaults]\n", 3);
  expect_line_error("[a\n", 1);
  expect_line_error("[a]\nkind wp\n", 2);
  expect_line_error("[a]\nkind = wp\nsamples = -3\n", 3);
  expect_line_error("[a]\nkind = wp\nprofile = round\n", 3);
}

TEST(EnsembleSpec, MissingFileThrows) {
  EXPECT_THROW(load_ensemble_spec("/nonexistent/spec.ini"), DomainError);
}

}  // namespace
}  // namespace wickgl
