#pragma once

// Closed-form correlation oracles for Wick, averaged Wick and convolutional
// Wick powers, the time integrals they rest on, discrete-convolution
// checkers, the existence/regularity classifier and divergence scanners.
//
// All correlations are coefficient-space quantities E[conj(c_{k1}) c'_{k2}]
// with c_v = (2pi)^{-d} <g_v, .>; no 2pi factors appear anywhere.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wickgl/lattice.hpp"

namespace wickgl {

// ---------------------------------------------------------------------------
// n-fold lambda sums

/// Extra factor multiplying each term of an n-fold sum.
enum class SumKernel {
  kNone,     // 1
  kSumTool,  // 1 / (lambda_v + sum_i lambda_{l_i})
};

enum class SumRoute {
  kAuto,
  kDirect,   // iterated dense convolution on the box
  kFft,      // cyclic convolution on an alias-free grid
  kShell,    // exact tables over (mode, sum of lambdas)
  kLaplace,  // kSumTool only: 1/x = int_0^inf exp(-x u) du, trapezoid in log u
};

/// sum over l_1 + ... + l_n = v, |l_i|_inf <= K, of
/// prod_i lambda_{l_i}^{-w_i} times the kernel.
double nfold_lambda_sum(int d, const Mode& v, int n,
                        std::span<const double> weights, int cutoff,
                        SumKernel kernel = SumKernel::kNone,
                        SumRoute route = SumRoute::kAuto);

/// sum over l_1 + ... + l_n = v of prod_i f_i(l_i), with each f_i given per
/// mode of `lattice`.  `factors` holds n arrays (or one, reused n times).
double nfold_convolution(const ModeLattice& lattice,
                         const std::vector<std::vector<double>>& factors,
                         int n, const Mode& v, SumRoute route = SumRoute::kAuto);

/// Same sum, split by the integer value s = sum_i lambda_{l_i}: returns
/// s -> partial sum.  Exact; cost grows like (2nK+1)^d * n (1 + d K^2).
std::map<long, double> nfold_shells(const ModeLattice& lattice,
                                    std::span<const double> factor, int n,
                                    const Mode& v);

/// Laplace-quadrature evaluation of sum prod f(l_i) / (c + sum lambda_{l_i})
/// for a single factor array f; used for large-K kernel sums.
double nfold_resolvent_laplace(const ModeLattice& lattice,
                               std::span<const double> factor, int n,
                               const Mode& v, double c);

// ---------------------------------------------------------------------------
// time integrals

/// int_{t0}^{t1} int_{t0}^{t2} exp(-c |s1 - s2|) ds2 ds1.
double time_integral_aver(double c, double t0, double t1, double t2);
/// Lower bound (t1 - t0)(1 - exp(-c (t1 - t0) / 2)) / c for t1 = t2.
double time_integral_aver_lower(double c, double t0, double t1);
/// Upper bound 2 (t1 - t0)^theta / c^(2 - theta), theta in [1, 2].
double time_integral_aver_upper(double c, double t0, double t1, double theta);

/// int_{-inf}^{t1} int_{-inf}^{t2} exp(-a (t1 - s1)) exp(-a (t2 - s2))
///   exp(-b |s1 - s2|) ds2 ds1, for t1 <= t2.
double time_integral_conv(double a, double b, double t1, double t2);

// ---------------------------------------------------------------------------
// correlations

struct TimeArgs {
  double tau = 0.0;  // Wick powers: t2 - t1
  double t0 = 0.0;   // averaged powers: start of the time average
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Wick powers at times t and t + tau.
Complex correlation_wick(int d, int cutoff, const CutoffProfile& phi1,
                         const CutoffProfile& phi2, int n1, int n2,
                         const Mode& k1, const Mode& k2, double tau);

double correlation_awp(int d, int cutoff, const CutoffProfile& phi1,
                       const CutoffProfile& phi2, int n1, int n2,
                       const Mode& k1, const Mode& k2, double t0, double t1,
                       double t2);

double correlation_cwp(int d, int cutoff, const CutoffProfile& phi1,
                       const CutoffProfile& phi2, int n1, int n2,
                       const Mode& k1, const Mode& k2, double t1, double t2);

enum class WickKind { kWP, kAWP, kCWP };

WickKind parse_wick_kind(const std::string& name);
const char* to_string(WickKind kind) noexcept;

/// E|c_k[phi] - c_k[psi]|^2 for the chosen Wick object at equal times
/// (AWP: integrated over [t0, t1]).  Requires phi and psi on one lattice.
double cutoff_difference_variance(WickKind kind, const CutoffProfile& phi,
                                  const CutoffProfile& psi, int n,
                                  const Mode& k, const TimeArgs& time = {});

// ---------------------------------------------------------------------------
// discrete convolution bounds

struct TwoSidedReport {
  // first: |k| <= |v|/2;  second: |v|/2 < |k| <= 2|v|;  third: |k| > 2|v|
  double first_lower, first_mid, first_upper;
  double second_lower, second_mid, second_upper;
  double third_lower, third_mid, third_upper;
  bool holds[6];  // lower <= mid, mid <= upper for each of the three
  bool all() const noexcept {
    for (bool h : holds) {
      if (!h) return false;
    }
    return true;
  }
};

/// Evaluates the three two-sided bounds for discrete convolutions with all
/// sums truncated to |k|_inf <= K (and |k|_inf <= K for the auxiliary ball
/// sums).  Requires alpha, beta >= 0.
TwoSidedReport twosided_bound_check(int d, double alpha, double beta,
                                    const Mode& v, int cutoff);

enum class Classification { kYes, kNo, kUnclassified };
const char* to_string(Classification c) noexcept;

/// sum_k lambda_k^{-alpha} < inf  iff  alpha > d/2.
bool lambda_sum_finite(int d, double alpha) noexcept;
/// sum_k lambda_k^{-alpha} lambda_{v-k}^{-beta} < inf  iff  alpha+beta > d/2.
bool discrete_conv_finite(int d, double alpha, double beta) noexcept;
/// sup_v lambda_v^gamma sum_k ... < inf  iff  gamma <= min(alpha, beta,
/// alpha + beta - d/2); kUnclassified outside alpha + beta > d/2 != max.
Classification discrete_conv_regularity(int d, double alpha, double beta,
                                        double gamma) noexcept;
/// Growth of sup_v: finite iff beta <= alpha - d/2 (within the admissible
/// alpha range; kUnclassified otherwise).
Classification small_values_bounded(int d, double alpha, double beta) noexcept;
Classification large_values_bounded(int d, double alpha, double beta) noexcept;

/// lambda_v^beta * sum_{|k| <= c|v|, |k|_inf <= K} lambda_k^{-alpha} at
/// v = r e_1, r = 0..rmax.
std::vector<double> small_values_profile(int d, double alpha, double beta,
                                         double c, int cutoff, int rmax);
/// lambda_v^beta * sum_{|k| > c|v|, |k|_inf <= K} lambda_k^{-alpha} at
/// v = r e_1, r = 0..rmax.
std::vector<double> large_values_profile(int d, double alpha, double beta,
                                         double c, int cutoff, int rmax);

/// sup over |v|_inf <= vmax of lambda_v^gamma sum_{|k|_inf <= K}
/// lambda_k^{-alpha} lambda_{v-k}^{-beta}.
double truncated_conv_sup(int d, double alpha, double beta, double gamma,
                          int cutoff, int vmax);

// ---------------------------------------------------------------------------
// regimes

struct RegimeReport {
  int n = 0;
  int d = 0;
  bool wp_exists = false;
  bool awp_exists = false;
  bool cwp_exists = false;
  std::optional<double> wp_exponent;
  std::optional<double> awp_exponent;
  std::optional<double> cwp_exponent;
};

/// Existence flags and supremal spatial regularity exponents.  Requires
/// n >= 2 and d >= 2.  The boundary (n+1)/(n-1) = d/2 counts as
/// non-existent.
RegimeReport regime_classify(int n, int d);

/// Whether the chosen object exists for (n, d).  Accepts n, d >= 1 (every
/// object exists for n = 1 or d = 1).
bool regime_exists(WickKind kind, int n, int d);

// ---------------------------------------------------------------------------
// divergence scans

struct DivergenceScan {
  WickKind kind;
  int n = 0;
  int d = 0;
  std::vector<int> cutoffs;
  std::vector<double> sums;
  std::vector<double> increments;  // sums[i+1] - sums[i]
  /// "decaying" (each increment <= 0.75 x the previous), "non-decaying"
  /// (last increment >= 0.5 x the first) or "inconclusive".
  std::string verdict;
};

/// Partial sums S(K) of the kernel behind the kind's second moment at
/// mode v: WP sum 1/prod lambda; AWP sum 1/(prod lambda (lambda_v + sum
/// lambda)); CWP the AWP kernel divided by lambda_v.  K strictly increasing.
DivergenceScan divergence_scan(WickKind kind, int n, int d, const Mode& v,
                               const std::vector<int>& cutoffs);

}  // namespace wickgl
