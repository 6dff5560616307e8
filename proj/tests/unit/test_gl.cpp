#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "wickgl/error.hpp"
#include "wickgl/gl.hpp"
#include "wickgl/ou.hpp"
#include "wickgl/rng.hpp"
#include "wickgl/spectral_grid.hpp"

namespace wickgl {
namespace {

using testing::direct_gl_path;
using testing::max_node_c0_distance;
using testing::random_field;
using testing::rk4;

SpectralField constant_field(const ModeLattice& lat, double c) {
  SpectralField f(lat);
  f.set(lat.zero_index(), Complex(c, 0.0));
  return f;
}

double zero_mode(const SpectralField& f) {
  return f[f.lattice().zero_index()].real();
}

// ---------------------------------------------------------------------------
// kappa schedules

TEST(Kappa, ConstantAndTable) {
  const KappaSchedule c({1.0, 2.0, 3.0});
  EXPECT_EQ(c.degree(), 2u);
  EXPECT_TRUE(c.is_constant());
  EXPECT_EQ(c.at(7.0), (std::vector<double>{1, 2, 3}));

  const KappaSchedule tab({0.0, 1.0}, {{0.0, 0.0}, {2.0, -4.0}});
  EXPECT_FALSE(tab.is_constant());
  EXPECT_EQ(tab.degree(), 1u);
  EXPECT_EQ(tab.at(0.25), (std::vector<double>{0.5, -1.0}));
  EXPECT_EQ(tab.at(-1.0), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(tab.at(3.0), (std::vector<double>{2.0, -4.0}));
}

TEST(Kappa, Errors) {
  EXPECT_THROW(KappaSchedule(std::vector<double>{}), DomainError);
  EXPECT_THROW(KappaSchedule({0.0, 1.0}, {{1.0}}), DomainError);
  EXPECT_THROW(KappaSchedule({0.0, 1.0}, {{1.0}, {1.0, 2.0}}), DomainError);
  EXPECT_THROW(KappaSchedule({1.0, 1.0}, {{1.0}, {2.0}}), DomainError);
}

// ---------------------------------------------------------------------------
// right-hand sides

TEST(GlRhs, ZeroNoiseQuadratic) {
  const ModeLattice lat(2, 3);
  const SpectralField y = random_field(lat, 1);
  const SpectralField zero(lat);
  const SpectralField f =
      gl2d_rhs(0.0, y, {zero, zero}, KappaSchedule({0.0, 0.0, 1.0}));
  const SpectralField want = pointwise_power(y, 2).resized(lat) + y;
  EXPECT_LT(max_coefficient_distance(f, want), 1e-14);
}

TEST(GlRhs, ZeroStateCollapsesToWickPowers) {
  const ModeLattice lat(2, 3);
  const SpectralField v = random_field(lat, 2);
  const SpectralField w2 = random_field(lat, 3);
  const SpectralField w3 = random_field(lat, 4);
  const SpectralField f = gl2d_rhs(0.0, SpectralField(lat), {v, w2, w3},
                                   KappaSchedule({0.5, -0.3, 2.0, -1.5}));
  SpectralField want = constant_field(lat, 0.5) + 0.7 * v;
  want += 2.0 * w2;
  want += -1.5 * w3;
  EXPECT_LT(max_coefficient_distance(f, want), 1e-13);
}

TEST(GlRhs, BinomialIdentityOnScalars) {
  // With ordinary powers in place of Wick powers the shifted form is
  // (y + V)^w, plus the linear shift (y + V).
  const ModeLattice lat(2, 1);
  const double y = 0.3, v = -0.7;
  for (int w = 2; w <= 5; ++w) {
    std::vector<SpectralField> pow_v;
    for (int j = 1; j <= w; ++j) pow_v.push_back(constant_field(lat, std::pow(v, j)));
    std::vector<double> kappa(w + 1, 0.0);
    kappa[w] = 1.0;
    const SpectralField f =
        gl2d_rhs(0.0, constant_field(lat, y), pow_v, KappaSchedule(kappa));
    EXPECT_NEAR(zero_mode(f), std::pow(y + v, w) + (y + v), 1e-12) << w;
  }
}

TEST(GlRhs, TwoAndThreeDimensionalFormsAgreeBitwise) {
  const ModeLattice lat(3, 2);
  const SpectralField y = random_field(lat, 5);
  const SpectralField v = random_field(lat, 6);
  const SpectralField v2 = random_field(lat, 7);
  const SpectralField a = gl2d_rhs(0.0, y, {v, v2}, KappaSchedule({0.4, 1.1, -0.6}));
  const SpectralField b = gl3d_rhs(0.0, y, v, v2, 0.4, 1.1, -0.6);
  ASSERT_EQ(a.coefficients().size(), b.coefficients().size());
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
  }
}

TEST(GlRhs, ThreeDimensionalScalarForm) {
  const ModeLattice lat(3, 1);
  const double y = 0.8;
  const SpectralField zero(lat);
  const SpectralField f =
      gl3d_rhs(0.0, constant_field(lat, y), zero, zero, 0.2, 0.5, -1.3);
  EXPECT_NEAR(zero_mode(f), -1.3 * y * y + 1.5 * y + 0.2, 1e-14);
}

TEST(GlRhs, PointwiseWickPowersMatchSuppliedOnes) {
  const ModeLattice lat(2, 3);
  const double var = 0.37;
  const SpectralField y = random_field(lat, 8);
  const SpectralField v = random_field(lat, 9);
  // :V^2: = V^2 - var, :V^3: = V^3 - 3 var V on the product lattices.
  const SpectralField v2 = pointwise_power(v, 2) - constant_field(ModeLattice(2, 6), var);
  const SpectralField v3 =
      pointwise_power(v, 3) - (3.0 * var) * v.resized(ModeLattice(2, 9));
  const std::vector<double> kappa = {0.1, 0.2, 0.3, 0.4};
  GlRhs rhs(lat, 3, var);
  SpectralField a(lat), b(lat);
  rhs.evaluate(kappa, y, v, a);
  rhs.evaluate(kappa, y, {v, v2, v3}, b);
  EXPECT_LT(max_coefficient_distance(a, b), 1e-12);
}

TEST(GlRhs, Errors) {
  const ModeLattice lat(2, 2);
  GlRhs rhs(lat, 2, 0.0);
  SpectralField out(lat);
  const SpectralField y(lat);
  EXPECT_THROW(rhs.evaluate({1.0, 2.0}, y, y, out), DomainError);
  EXPECT_THROW(rhs.evaluate({1.0, 2.0, 3.0}, y, SpectralField(ModeLattice(2, 3)), out),
               DomainError);
  EXPECT_THROW(GlRhs(lat, -1, 0.0), DomainError);
  EXPECT_THROW(GlRhs(lat, 2, -1.0), DomainError);
}

// ---------------------------------------------------------------------------
// driver

GlConfig quiet_config(int dim, std::vector<double> kappa) {
  GlConfig c;
  c.dim = dim;
  c.kappa = KappaSchedule(std::move(kappa));
  c.cutoff = 2;
  c.noise = false;
  c.t_end = 0.5;
  return c;
}

TEST(SolveGl, NoiseOffConstantMatchesScalarOde) {
  const std::vector<double> kappa = {0.3, -0.4, 0.8};
  auto ode = [&](double, double y) {
    return kappa[2] * y * y + kappa[1] * y + kappa[0];
  };
  const double ref = rk4(ode, 0.6, 0.0, 0.5, 2000);
  std::vector<double> err;
  for (double dt : {1e-3, 5e-4}) {
    GlConfig c = quiet_config(2, kappa);
    c.dt = dt;
    const GlSolution sol = solve_gl(c, constant_field(ModeLattice(2, 2), 0.6));
    ASSERT_FALSE(sol.blowup_time);
    err.push_back(std::abs(zero_mode(sol.x.back()) - ref));
  }
  EXPECT_LT(err[1], 5e-4);
  EXPECT_NEAR(err[0] / err[1], 2.0, 0.2);
}

TEST(SolveGl, ThreeDimensionalConstantForcingIsExact) {
  // kappa_1 = -1 and kappa_2 = 0 leave y' = A y + kappa_0, which the
  // exponential step integrates exactly.
  GlConfig c = quiet_config(3, {0.7, -1.0, 0.0});
  c.eta = -0.75;
  c.dt = 0.01;
  const ModeLattice lat(3, 2);
  const SpectralField xi = random_field(lat, 12);
  const GlSolution sol = solve_gl(c, xi);
  EXPECT_TRUE(sol.warnings.empty());
  for (std::size_t j = 0; j < sol.times.size(); j += 10) {
    const double t = sol.times[j];
    for (std::size_t i = 0; i < lat.size(); ++i) {
      Complex want = std::exp(-lat.lambda(i) * t) * xi[i];
      if (i == lat.zero_index()) want += 0.7 * (1.0 - std::exp(-t));
      EXPECT_NEAR(std::abs(sol.x[j][i] - want), 0.0, 1e-12);
    }
  }
}

TEST(SolveGl, ShiftCancellingKappaGivesStochasticConvolution) {
  GlConfig c;
  c.dim = 2;
  c.kappa = KappaSchedule({0.0, -1.0, 0.0});
  c.cutoff = 3;
  c.seed = 77;
  c.dt = 1.0 / 64;
  c.t_end = 0.5;
  const ModeLattice lat(2, 3);
  const SpectralField xi = random_field(lat, 13);
  const GlSolution sol = solve_gl(c, xi);

  const CutoffProfile phi = gl_profile(c);
  OUState ou = stationary_sample(phi, c.seed, c.trajectory);
  const OuPropagator prop(phi, c.dt);
  const CounterRng rng(c.seed, c.trajectory);
  const SpectralField y0 = xi - ou.v;
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    if (j > 0) prop.advance(ou.v, rng, j - 1);
    SpectralField y = y0;
    std::vector<double> m(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      m[i] = std::exp(-lat.lambda(i) * sol.times[j]);
    }
    y.scale_modes(m);
    EXPECT_LT(max_coefficient_distance(sol.y[j], y), 1e-12);
    EXPECT_LT(max_coefficient_distance(sol.x[j], y + ou.v), 1e-12);
  }
}

TEST(SolveGl, ShiftedAndDirectFormsAgreeToFirstOrder) {
  // Refinement levels keep one Brownian path across the step sizes; the
  // distance is averaged over a few seeds to tame single-path noise.
  std::vector<double> dist(3, 0.0);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (int level = 2; level >= 0; --level) {
      GlConfig c;
      c.dim = 2;
      c.kappa = KappaSchedule({0.1, 0.2, -0.3});
      c.cutoff = 2;
      c.seed = seed;
      c.dt = std::ldexp(1.0 / 1024, level);
      c.refinement_level = level;
      c.t_end = 0.5;
      const SpectralField xi = random_field(ModeLattice(2, 2), 14);
      const GlSolution sol = solve_gl(c, xi);
      ASSERT_FALSE(sol.blowup_time);
      dist[2 - level] += max_node_c0_distance(sol.x, direct_gl_path(c, xi), 16);
    }
  }
  EXPECT_NEAR(dist[0] / dist[1], 2.0, 0.4);
  EXPECT_NEAR(dist[1] / dist[2], 2.0, 0.4);
}

TEST(SolveGl, BlowUpSetsSentinels) {
  GlConfig c = quiet_config(2, {0.0, 0.0, 1.0});
  c.dt = 1e-3;
  c.t_end = 2.0;
  const GlSolution sol = solve_gl(c, constant_field(ModeLattice(2, 2), 1.0));
  ASSERT_TRUE(sol.blowup_time);
  EXPECT_NEAR(*sol.blowup_time, 1.0, 0.05);
  EXPECT_EQ(sol.times.back(), 2.0);
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    const bool after = sol.times[j] >= *sol.blowup_time;
    EXPECT_EQ(is_infinity_sentinel(sol.x[j]), after);
    EXPECT_EQ(std::isinf(sol.node_norms[j][0]), after);
  }
}

TEST(SolveGl, TraceStableUnderStepHalving) {
  std::vector<std::vector<double>> traces;
  for (int level : {1, 0}) {
    GlConfig c;
    c.dim = 2;
    c.kappa = KappaSchedule({0.0, 0.0, 0.0, -1.0});
    c.cutoff = 4;
    c.seed = 9;
    c.dt = std::ldexp(1.0 / 1024, level);
    c.refinement_level = level;
    c.t_end = 0.5;
    const GlSolution sol = solve_gl(c, random_field(ModeLattice(2, 4), 15));
    ASSERT_FALSE(sol.blowup_time);
    traces.push_back(sol.traces);
  }
  for (std::size_t r = 0; r < traces[0].size(); ++r) {
    EXPECT_TRUE(std::isfinite(traces[0][r]));
    EXPECT_NEAR(traces[1][r] / traces[0][r], 1.0, 0.1) << r;
  }
}

TEST(SolveGl, StrideAndWarnings) {
  GlConfig c = quiet_config(2, {0.0, 0.0, 0.5});
  c.dt = 0.01;
  c.snapshot_stride = 10;
  c.eta = 0.5;
  const GlSolution sol = solve_gl(c, SpectralField(ModeLattice(2, 2)));
  EXPECT_EQ(sol.times.size(), 6u);
  EXPECT_EQ(sol.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(sol.r0, 0.25);
  EXPECT_DOUBLE_EQ(sol.r1, 0.95);
}

TEST(SolveGl, Errors) {
  const SpectralField xi2(ModeLattice(2, 2));
  GlConfig c = quiet_config(2, {0.0, 0.0, 1.0});
  c.dim = 1;
  EXPECT_THROW(solve_gl(c, xi2), DomainError);
  c = quiet_config(3, {0.0, 0.0, 0.0, 1.0});
  EXPECT_THROW(solve_gl(c, SpectralField(ModeLattice(3, 2))), DomainError);
  c = quiet_config(2, {0.0, 0.0, 1.0});
  c.dt = 0.3;
  EXPECT_THROW(solve_gl(c, xi2), DomainError);
  c = quiet_config(2, {0.0, 0.0, 1.0});
  EXPECT_THROW(solve_gl(c, SpectralField(ModeLattice(2, 3))), DomainError);
}

}  // namespace
}  // namespace wickgl
