#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "wickgl/error.hpp"
#include "wickgl/wick.hpp"

using namespace wickgl;
namespace wt = wickgl::testing;

namespace {

Eigen::MatrixXd random_covariance(int m, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(m, m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= m; ++j) a(i, j) = normal(gen);
  }
  return a * a.transpose() / (m + 1.0);
}

}  // namespace

TEST(Hermite, SpecExamples) {
  EXPECT_EQ(hermite_eval(0, 7.3), 1.0);
  EXPECT_EQ(hermite_eval(2, 2.0), 3.0);
  EXPECT_EQ(hermite_eval(4, 1.0), -2.0);
  EXPECT_THROW(hermite_eval(-1, 0.0), DomainError);
  EXPECT_THROW(hermite_eval(kMaxHermiteDegree + 1, 0.0), DomainError);
  EXPECT_NO_THROW(hermite_eval(kMaxHermiteDegree, 0.5));
}

TEST(Hermite, MatchesExplicitForms) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  for (int k = 0; k < 10; ++k) {
    const double x = uni(gen);
    EXPECT_NEAR(hermite_eval(1, x), x, 1e-12);
    EXPECT_NEAR(hermite_eval(3, x), x * x * x - 3 * x, 1e-12);
    for (int n = 0; n <= 8; ++n) {
      EXPECT_NEAR(hermite_eval(n, x), wt::hermite_explicit(n, x),
                  1e-12 * std::max(1.0, std::abs(wt::hermite_explicit(n, x))));
    }
  }
}

TEST(Hermite, GeneratingFunction) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double x = ux(gen);
    const double t = ut(gen);
    double s = 0.0, tn = 1.0, fact = 1.0;
    for (int n = 0; n <= 20; ++n) {
      if (n > 0) {
        tn *= t;
        fact *= n;
      }
      s += tn / fact * hermite_eval(n, x);
    }
    EXPECT_LT(std::abs(s - std::exp(-t * t / 2 + t * x)), 1e-8);
  }
}

TEST(WickScalar, SpecExamples) {
  EXPECT_EQ(wick_power_scalar(0.0, 1.0, 2), -1.0);
  EXPECT_EQ(wick_power_scalar(5.0, 0.0, 3), 125.0);
  EXPECT_EQ(wick_power_scalar(2.0, 4.0, 2), 0.0);
  EXPECT_THROW(wick_power_scalar(1.0, -1.0, 2), DomainError);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> uni(-4.0, 4.0);
  for (int k = 0; k < 20; ++k) {
    const double z = uni(gen), var = std::abs(uni(gen));
    EXPECT_NEAR(wick_power_scalar(z, var, 2), z * z - var, 1e-12);
  }
}

TEST(FieldVariance, SpecExamples) {
  EXPECT_EQ(field_variance(CutoffProfile::zero(ModeLattice(2, 3))), 0.0);
  EXPECT_NEAR(field_variance(CutoffProfile::ones(ModeLattice(1, 1))), 2.0,
              1e-15);
  EXPECT_NEAR(field_variance(CutoffProfile::ones(ModeLattice(2, 1))),
              13.0 / 3.0, 1e-15);
}

TEST(WickField, SpecExamples) {
  const ModeLattice lat(2, 3);
  const CutoffProfile phi = CutoffProfile::ones(lat);
  const double var = field_variance(phi);
  const SpectralField v = wt::random_field(lat, 4);
  EXPECT_LT(max_coefficient_distance(wick_power_field(v, phi, 1), v), 1e-15);

  const SpectralField w0 = wick_power_field(SpectralField(lat), phi, 2);
  EXPECT_NEAR(w0.at(Mode{}).real(), -var, 1e-13);
  EXPECT_NEAR(w0.max_abs_coefficient(), var, 1e-13);

  // n = 3 on a constant field with unit variance.
  const ModeLattice l1(1, 1);
  const CutoffProfile half(l1, {0.0, 1.0, 0.0});
  ASSERT_NEAR(field_variance(half), 1.0, 1e-15);
  const double z = 1.7;
  const SpectralField c = wick_power_field(SpectralField::constant(l1, z), half, 3);
  EXPECT_NEAR(c.at(Mode{0}).real(), z * z * z - 3 * z, 1e-12);
  EXPECT_NEAR(std::abs(c.at(Mode{1})), 0.0, 1e-13);
}

TEST(WickField, SquareIsPointwiseSquareMinusVariance) {
  for (int d = 1; d <= 3; ++d) {
    const ModeLattice lat(d, 2);
    const CutoffProfile phi = CutoffProfile::smooth(lat, 1.5);
    const double var = field_variance(phi);
    const SpectralField v = wt::random_field(lat, 10 + d);
    SpectralField expect = pointwise_power(v, 2);
    expect -= SpectralField::constant(expect.lattice(), var);
    EXPECT_LT(max_coefficient_distance(wick_power_field(v, phi, 2), expect),
              1e-12);
  }
}

TEST(ThetaPreimage, SpecExamples) {
  {
    const int n[] = {1, 1};
    const auto r = enumerate_theta_preimage(2, n);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].at(0, 1), 1);
  }
  {
    const int n[] = {1, 2};
    EXPECT_TRUE(enumerate_theta_preimage(2, n).empty());
  }
  {
    const int n[] = {1, 1, 2};
    const auto r = enumerate_theta_preimage(3, n);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].at(0, 1), 0);
    EXPECT_EQ(r[0].at(0, 2), 1);
    EXPECT_EQ(r[0].at(1, 2), 1);
  }
}

TEST(ThetaPreimage, CompleteAndDuplicateFree) {
  // Exhaustive search over alpha <= 4 componentwise for m = 4.
  const int n[] = {2, 3, 1, 2};
  const auto r = enumerate_theta_preimage(4, n);
  std::set<std::vector<int>> seen;
  for (const auto& p : r) {
    EXPECT_EQ(p.theta(), std::vector<int>(std::begin(n), std::end(n)));
    EXPECT_TRUE(seen.insert(p.alpha).second);
  }
  std::size_t brute = 0;
  std::vector<int> a(6, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == 6) {
      const PairingIndex p{4, a};
      if (p.theta() == std::vector<int>(std::begin(n), std::end(n))) ++brute;
      return;
    }
    for (int x = 0; x <= 4; ++x) {
      a[i] = x;
      rec(i + 1);
    }
  };
  rec(0);
  EXPECT_EQ(r.size(), brute);
}

TEST(ThetaPreimage, CapsAreEnforced) {
  const std::vector<int> many(kMaxWickFactors + 1, 1);
  EXPECT_THROW(enumerate_theta_preimage(kMaxWickFactors + 1, many),
               DomainError);
  const int big[] = {9, 9};
  EXPECT_THROW(enumerate_theta_preimage(2, big), DomainError);
  const int neg[] = {-1, 1};
  EXPECT_THROW(enumerate_theta_preimage(2, neg), DomainError);
}

TEST(WickExpectation, SpecExamples) {
  const double c = 0.3;
  Eigen::MatrixXd cov2(2, 2);
  cov2 << 1.0, c, c, 2.0;
  const int n11[] = {1, 1}, n22[] = {2, 2};
  EXPECT_NEAR(wick_expectation_product(n11, cov2), c, 1e-15);
  EXPECT_NEAR(wick_expectation_product(n22, cov2), 2 * c * c, 1e-15);

  Eigen::MatrixXd cov4(4, 4);
  cov4 << 2.0, 0.1, 0.2, 0.3,
          0.1, 2.0, 0.4, 0.5,
          0.2, 0.4, 2.0, 0.6,
          0.3, 0.5, 0.6, 2.0;
  const int n1111[] = {1, 1, 1, 1};
  EXPECT_NEAR(wick_expectation_product(n1111, cov4),
              0.1 * 0.6 + 0.2 * 0.5 + 0.3 * 0.4, 1e-15);
}

TEST(WickExpectation, RejectsBadCovariances) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  const int n[] = {1, 1};
  EXPECT_THROW(wick_expectation_product(n, asym), DomainError);
  EXPECT_THROW(wick_expectation_product(n, indef), DomainError);
  EXPECT_THROW(wick_expectation_product(n, Eigen::MatrixXd::Identity(3, 3)),
               DomainError);
}

TEST(WickExpectation, CenteringAndOrthogonality) {
  std::mt19937_64 gen(11);
  for (int k = 1; k <= 8; ++k) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = 1.7;
    const int n[] = {k, 0};
    EXPECT_EQ(wick_expectation_product(n, cov), 0.0);
  }
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd cov = random_covariance(2, gen);
    for (int k = 0; k <= 5; ++k) {
      for (int l = 0; l <= 5; ++l) {
        const int n[] = {k, l};
        const double e = wick_expectation_product(n, cov);
        if (k != l) {
          EXPECT_EQ(e, 0.0);
        } else {
          double f = 1.0;
          for (int i = 2; i <= k; ++i) f *= i;
          EXPECT_NEAR(e, f * std::pow(cov(0, 1), k), 1e-12 * std::max(1.0, f));
        }
      }
    }
  }
}

TEST(WickExpectation, OrthogonalityAgainstMonteCarlo) {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.6, 0.6, 1.5;
  for (auto [k, l] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{2, 2}}) {
    const int n[] = {k, l};
    const auto mc = wt::gaussian_mc_wick_product(n, cov, 1000000, 99 + k + l);
    EXPECT_LE(std::abs(mc.mean - wick_expectation_product(n, cov)),
              4.0 * mc.stderr_);
  }
}

TEST(WickExpectation, MatchesIsserlisBruteForce) {
  std::mt19937_64 gen(5);
  for (int m = 1; m <= 4; ++m) {
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::MatrixXd cov = random_covariance(m, gen);
      std::vector<int> n(m, 0);
      std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == m) {
          const double a = wick_expectation_product(n, cov);
          const double b = wt::isserlis_wick_product(n, cov);
          EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(b)));
          return;
        }
        for (int k = 0; k <= left; ++k) {
          n[i] = k;
          rec(i + 1, left - k);
        }
      };
      rec(0, 8);
    }
  }
}

TEST(WickKernel, MultiDegreeMatchesSingleCalls) {
  const ModeLattice lat(2, 2);
  const CutoffProfile phi = CutoffProfile::ones(lat);
  const SpectralField v = wt::random_field(lat, 8);
  WickPowerKernel kernel(lat, field_variance(phi), {0, 1, 2, 3});
  const auto out = kernel.evaluate(v);
  ASSERT_EQ(out.size(), 4u);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_LT(max_coefficient_distance(out[n], wick_power_field(v, phi, n)),
              1e-12);
  }
  EXPECT_NEAR(out[0].at(Mode{}).real(), 1.0, 1e-14);
}
