#include <gtest/gtest.h>

#include "wickgl/error.hpp"
#include "wickgl/oracle.hpp"

namespace wickgl {
namespace {

TEST(Regime, Examples) {
  const RegimeReport a = regime_classify(3, 3);
  EXPECT_FALSE(a.wp_exists);
  EXPECT_FALSE(a.wp_exponent);
  EXPECT_TRUE(a.awp_exists);
  EXPECT_DOUBLE_EQ(*a.awp_exponent, -0.5);
  EXPECT_TRUE(a.cwp_exists);
  EXPECT_DOUBLE_EQ(*a.cwp_exponent, 0.5);

  const RegimeReport b = regime_classify(2, 2);
  EXPECT_DOUBLE_EQ(*b.wp_exponent, 0.0);
  EXPECT_DOUBLE_EQ(*b.awp_exponent, 0.5);
  EXPECT_DOUBLE_EQ(*b.cwp_exponent, 2.0);

  const RegimeReport c = regime_classify(5, 3);
  EXPECT_FALSE(c.wp_exists || c.awp_exists || c.cwp_exists);
}

// Expected table written out by hand for d = 2..6, n = 2..5.
TEST(Regime, Table) {
  struct Row {
    int n, d;
    bool wp, awp;
    double wpe, awpe, cwpe;
  };
  const Row rows[] = {
      {2, 2, true, true, 0, 0.5, 2},        {3, 2, true, true, 0, 1.0 / 3, 2},
      {4, 2, true, true, 0, 0.25, 2},       {5, 2, true, true, 0, 0.2, 2},
      {2, 3, true, true, -1, 0, 1},         {3, 3, false, true, 0, -0.5, 0.5},
      {4, 3, false, true, 0, -1.0, 0},      {5, 3, false, false, 0, 0, 0},
      {2, 4, false, true, 0, -1, 0},        {3, 4, false, false, 0, 0, 0},
      {4, 4, false, false, 0, 0, 0},        {5, 4, false, false, 0, 0, 0},
      {2, 5, false, true, 0, -2, -1},       {2, 6, false, false, 0, 0, 0},
      {5, 6, false, false, 0, 0, 0},
  };
  for (const Row& r : rows) {
    const RegimeReport rep = regime_classify(r.n, r.d);
    SCOPED_TRACE(testing::Message() << "n=" << r.n << " d=" << r.d);
    EXPECT_EQ(rep.wp_exists, r.wp);
    EXPECT_EQ(rep.awp_exists, r.awp);
    EXPECT_EQ(rep.cwp_exists, r.awp);
    if (r.wp) EXPECT_NEAR(*rep.wp_exponent, r.wpe, 1e-15);
    if (r.awp) {
      EXPECT_NEAR(*rep.awp_exponent, r.awpe, 1e-15);
      EXPECT_NEAR(*rep.cwp_exponent, r.cwpe, 1e-15);
    } else {
      EXPECT_FALSE(rep.awp_exponent);
      EXPECT_FALSE(rep.cwp_exponent);
    }
  }
}

TEST(Regime, InvariantsOverGrid) {
  for (int d = 2; d <= 6; ++d) {
    for (int n = 2; n <= 8; ++n) {
      const RegimeReport r = regime_classify(n, d);
      const bool renorm = (n + 1.0) / (n - 1.0) > d / 2.0;
      EXPECT_EQ(r.awp_exists, renorm);
      EXPECT_EQ(r.cwp_exists, renorm);
      EXPECT_EQ(r.wp_exists, d <= 2 || (d == 3 && n == 2));
      // WP existence implies AWP existence.
      if (r.wp_exists) EXPECT_TRUE(r.awp_exists);
      if (r.awp_exists) EXPECT_GT(*r.cwp_exponent, *r.awp_exponent);
    }
  }
}

TEST(Regime, Errors) {
  EXPECT_THROW(regime_classify(1, 3), DomainError);
  EXPECT_THROW(regime_classify(3, 1), DomainError);
  EXPECT_THROW(regime_exists(WickKind::kWP, -1, 2), DomainError);
}

TEST(Regime, ExistsExtendsToLowOrders) {
  EXPECT_TRUE(regime_exists(WickKind::kWP, 1, 6));
  EXPECT_TRUE(regime_exists(WickKind::kWP, 0, 6));
  EXPECT_TRUE(regime_exists(WickKind::kWP, 7, 1));
  EXPECT_FALSE(regime_exists(WickKind::kWP, 3, 3));
  EXPECT_TRUE(regime_exists(WickKind::kAWP, 3, 3));
  EXPECT_FALSE(regime_exists(WickKind::kCWP, 5, 3));
}

void expect_monotone(const DivergenceScan& s) {
  for (std::size_t i = 1; i < s.sums.size(); ++i) {
    EXPECT_GE(s.sums[i], s.sums[i - 1]);
  }
  ASSERT_EQ(s.increments.size() + 1, s.sums.size());
}

TEST(DivergenceScan, SummableWickDecays) {
  const auto s = divergence_scan(WickKind::kWP, 2, 3, Mode{}, {4, 8, 16});
  expect_monotone(s);
  EXPECT_EQ(s.verdict, "decaying");
}

TEST(DivergenceScan, CubicWickInThreeDimensionsDoesNot) {
  const auto s = divergence_scan(WickKind::kWP, 3, 3, Mode{}, {2, 4, 8, 16});
  expect_monotone(s);
  EXPECT_EQ(s.verdict, "non-decaying");
  for (double inc : s.increments) EXPECT_GT(inc, 0.5 * s.increments.front());
}

TEST(DivergenceScan, AveragedBoundaryCaseDoesNot) {
  const auto s = divergence_scan(WickKind::kAWP, 5, 3, Mode{}, {1, 2, 4});
  expect_monotone(s);
  EXPECT_EQ(s.verdict, "non-decaying");
}

TEST(DivergenceScan, AveragedAndConvolutionalDecayWhenTheyExist) {
  for (WickKind kind : {WickKind::kAWP, WickKind::kCWP}) {
    const auto s = divergence_scan(kind, 3, 3, Mode{1, 0, 0}, {2, 4, 8});
    expect_monotone(s);
    EXPECT_EQ(s.verdict, "decaying");
  }
  const auto a = divergence_scan(WickKind::kAWP, 2, 3, Mode{1, 0, 0}, {2, 4});
  const auto c = divergence_scan(WickKind::kCWP, 2, 3, Mode{1, 0, 0}, {2, 4});
  EXPECT_NEAR(c.sums[1], a.sums[1] / 2.0, 1e-15);
}

TEST(DivergenceScan, Errors) {
  EXPECT_THROW(divergence_scan(WickKind::kWP, 2, 2, Mode{}, {4, 4}), DomainError);
  EXPECT_THROW(divergence_scan(WickKind::kWP, 2, 2, Mode{}, {}), DomainError);
  EXPECT_THROW(divergence_scan(WickKind::kWP, 0, 2, Mode{}, {2}), DomainError);
  const auto one = divergence_scan(WickKind::kWP, 2, 2, Mode{}, {3});
  EXPECT_EQ(one.verdict, "inconclusive");
}

}  // namespace
}  // namespace wickgl
