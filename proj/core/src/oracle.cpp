#include "wickgl/oracle.hpp"

#include <cctype>
#include <algorithm>
#include <cmath>

#include "wickgl/error.hpp"

namespace wickgl {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

bool same_mode(const Mode& a, const Mode& b, int d) {
  for (int j = 0; j < d; ++j) {
    if (a[j] != b[j]) return false;
  }
  return true;
}

bool is_zero_mode(const Mode& a, int d) {
  for (int j = 0; j < d; ++j) {
    if (a[j] != 0) return false;
  }
  return true;
}

// x + expm1(-x) without cancellation for small x.
double x_plus_expm1_neg(double x) {
  if (x < 1e-2) {
    double term = x * x / 2.0;
    double s = 0.0;
    for (int k = 2; k < 12; ++k) {
      s += term;
      term *= -x / (k + 1);
    }
    return s;
  }
  return x + std::expm1(-x);
}

void check_profiles(int d, int cutoff, const CutoffProfile& a,
                    const CutoffProfile& b) {
  const ModeLattice lat(d, cutoff);
  if (!(a.lattice() == lat) || !(b.lattice() == lat)) {
    throw DomainError("cutoff profiles must live on the (d, K) lattice");
  }
}

std::vector<double> pair_factor(const CutoffProfile& a, const CutoffProfile& b,
                                double tau) {
  const ModeLattice& lat = a.lattice();
  std::vector<double> f(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double lam = lat.lambda(i);
    f[i] = a[i] * b[i] * std::exp(-lam * std::abs(tau)) / lam;
  }
  return f;
}

template <typename Kernel>
double shell_assembly(const CutoffProfile& a, const CutoffProfile& b, int n,
                      const Mode& k, Kernel kernel) {
  const std::vector<double> f = pair_factor(a, b, 0.0);
  double s = 0.0;
  for (const auto& [sum_lambda, val] : nfold_shells(a.lattice(), f, n, k)) {
    s += val * kernel(static_cast<double>(sum_lambda));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

double time_integral_aver(double c, double t0, double t1, double t2) {
  if (!(c > 0.0)) throw DomainError("time integral needs c > 0");
  if (t0 > std::min(t1, t2)) {
    throw DomainError("time integral needs t0 <= min(t1, t2)");
  }
  const double u1 = std::min(t1, t2) - t0;
  const double gap = std::abs(t2 - t1);
  // 2 u1 / c + (e^{-c u1} + e^{-c u2} - 1 - e^{-c gap}) / c^2, rewritten as
  // [2 (x + expm1(-x)) + (1 - e^{-c gap})(1 - e^{-x})] / c^2 with x = c u1.
  const double x = c * u1;
  const double y = -std::expm1(-c * gap);
  return (2.0 * x_plus_expm1_neg(x) + y * (-std::expm1(-x))) / (c * c);
}

double time_integral_aver_lower(double c, double t0, double t1) {
  if (!(c > 0.0)) throw DomainError("time integral needs c > 0");
  if (t0 > t1) throw DomainError("time integral needs t0 <= t1");
  const double u = t1 - t0;
  return u * (-std::expm1(-c * u / 2.0)) / c;
}

double time_integral_aver_upper(double c, double t0, double t1, double theta) {
  if (!(c > 0.0)) throw DomainError("time integral needs c > 0");
  if (t0 > t1) throw DomainError("time integral needs t0 <= t1");
  if (theta < 1.0 || theta > 2.0) throw DomainError("theta must lie in [1, 2]");
  return 2.0 * std::pow(t1 - t0, theta) / std::pow(c, 2.0 - theta);
}

double time_integral_conv(double a, double b, double t1, double t2) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("convolution time integral needs a, b > 0");
  }
  if (t1 > t2) throw DomainError("convolution time integral needs t1 <= t2");
  const double tau = t2 - t1;
  const double ea = std::exp(-a * tau);
  const double first = ea / (a * (a + b));
  if (a == b) return first + tau * ea / (a + b);
  // (e^{-b tau} - e^{-a tau}) / (a - b) = e^{-a tau} expm1((a - b) tau)/(a-b)
  const double diff = a - b;
  return first + ea * std::expm1(diff * tau) / (diff * (a + b));
}

// ---------------------------------------------------------------------------

Complex correlation_wick(int d, int cutoff, const CutoffProfile& phi1,
                         const CutoffProfile& phi2, int n1, int n2,
                         const Mode& k1, const Mode& k2, double tau) {
  check_profiles(d, cutoff, phi1, phi2);
  if (n1 < 0 || n2 < 0) throw DomainError("Wick degrees must be >= 0");
  if (n1 != n2 || !same_mode(k1, k2, d)) return 0.0;
  if (n1 == 0) return is_zero_mode(k1, d) ? 1.0 : 0.0;
  const std::vector<double> f = pair_factor(phi1, phi2, tau);
  return factorial(n1) * nfold_convolution(phi1.lattice(), {f}, n1, k1);
}

double correlation_awp(int d, int cutoff, const CutoffProfile& phi1,
                       const CutoffProfile& phi2, int n1, int n2,
                       const Mode& k1, const Mode& k2, double t0, double t1,
                       double t2) {
  check_profiles(d, cutoff, phi1, phi2);
  if (n1 < 0 || n2 < 0) throw DomainError("Wick degrees must be >= 0");
  if (t0 > std::min(t1, t2)) throw DomainError("need t0 <= min(t1, t2)");
  if (n1 != n2 || !same_mode(k1, k2, d)) return 0.0;
  if (n1 == 0) return is_zero_mode(k1, d) ? (t1 - t0) * (t2 - t0) : 0.0;
  return factorial(n1) *
         shell_assembly(phi1, phi2, n1, k1, [&](double s) {
           return time_integral_aver(s, t0, t1, t2);
         });
}

double correlation_cwp(int d, int cutoff, const CutoffProfile& phi1,
                       const CutoffProfile& phi2, int n1, int n2,
                       const Mode& k1, const Mode& k2, double t1, double t2) {
  check_profiles(d, cutoff, phi1, phi2);
  if (n1 < 0 || n2 < 0) throw DomainError("Wick degrees must be >= 0");
  if (t1 > t2) throw DomainError("need t1 <= t2");
  if (n1 != n2 || !same_mode(k1, k2, d)) return 0.0;
  if (n1 == 0) return is_zero_mode(k1, d) ? 1.0 : 0.0;
  const double lam_k = lambda_of(k1, d);
  return factorial(n1) *
         shell_assembly(phi1, phi2, n1, k1, [&](double s) {
           return time_integral_conv(lam_k, s, t1, t2);
         });
}

WickKind parse_wick_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "wp" || s == "wick") return WickKind::kWP;
  if (s == "awp" || s == "aver" || s == "averaged") return WickKind::kAWP;
  if (s == "cwp" || s == "conv" || s == "convolutional") return WickKind::kCWP;
  throw DomainError("unknown Wick object '" + name +
                    "' (expected wp, awp or cwp)");
}

const char* to_string(WickKind kind) noexcept {
  switch (kind) {
    case WickKind::kWP: return "wp";
    case WickKind::kAWP: return "awp";
    case WickKind::kCWP: return "cwp";
  }
  return "wp";
}

double cutoff_difference_variance(WickKind kind, const CutoffProfile& phi,
                                  const CutoffProfile& psi, int n,
                                  const Mode& k, const TimeArgs& time) {
  if (!(phi.lattice() == psi.lattice())) {
    throw DomainError("profiles must live on the same lattice");
  }
  if (n < 0) throw DomainError("Wick degree must be >= 0");
  if (n == 0) return 0.0;
  const ModeLattice& lat = phi.lattice();
  const int d = lat.dim();
  // (prod phi - prod psi)^2 = prod phi^2 - 2 prod phi psi + prod psi^2
  auto combine = [&](auto&& one) {
    return one(phi, phi) - 2.0 * one(phi, psi) + one(psi, psi);
  };
  double value = 0.0;
  switch (kind) {
    case WickKind::kWP:
      value = combine([&](const CutoffProfile& a, const CutoffProfile& b) {
        return nfold_convolution(lat, {pair_factor(a, b, 0.0)}, n, k);
      });
      break;
    case WickKind::kAWP:
      if (time.t0 > time.t1) throw DomainError("need t0 <= t1");
      value = combine([&](const CutoffProfile& a, const CutoffProfile& b) {
        return shell_assembly(a, b, n, k, [&](double s) {
          return time_integral_aver(s, time.t0, time.t1, time.t1);
        });
      });
      break;
    case WickKind::kCWP: {
      const double lam_k = lambda_of(k, d);
      value = combine([&](const CutoffProfile& a, const CutoffProfile& b) {
        return shell_assembly(a, b, n, k, [&](double s) {
          return 1.0 / (lam_k * (lam_k + s));
        });
      });
      break;
    }
  }
  return std::max(0.0, factorial(n) * value);
}

// ---------------------------------------------------------------------------

TwoSidedReport twosided_bound_check(int d, double alpha, double beta,
                                    const Mode& v, int cutoff) {
  if (alpha < 0.0 || beta < 0.0) {
    throw DomainError("two-sided bounds need alpha, beta >= 0");
  }
  const ModeLattice box(d, cutoff);
  long v2 = 0;
  for (int j = 0; j < d; ++j) v2 += long(v[j]) * v[j];
  const double lam_v = 1.0 + v2;

  // Ball sums |k| <= r|v| are enumerated over the full ball.
  const int reach = static_cast<int>(std::ceil(3.0 * std::sqrt(double(v2))));
  const ModeLattice ball(d, std::max(reach, 1));

  // Every lambda here is an integer; tabulate its powers once.
  long vmax = 0;
  for (int j = 0; j < d; ++j) vmax = std::max(vmax, long(std::abs(v[j])));
  const long span = std::max<long>(cutoff, ball.cutoff()) + vmax;
  const std::size_t top = 1 + std::size_t(d) * span * span;
  std::vector<double> pa(top + 1), pb(top + 1);
  for (std::size_t n = 1; n <= top; ++n) {
    pa[n] = std::pow(double(n), -alpha);
    pb[n] = std::pow(double(n), -beta);
  }
  auto lam_diff = [&](const Mode& k) {
    long s = 1;
    for (int j = 0; j < d; ++j) {
      const long x = v[j] - k[j];
      s += x * x;
    }
    return s;
  };

  // At v = 0 the first two regions are vacuous and the tail statement
  // covers the whole box, k = 0 included.
  const bool origin = v2 == 0;
  double ball_half_alpha = 0, ball_third_beta = 0, ball_three_beta = 0;
  double mid_first = 0, mid_second = 0;
  const std::size_t ball_count = origin ? 0 : ball.size();
  for (std::size_t i = 0; i < ball_count; ++i) {
    const long k2 = ball.norm2(i);
    const long lam_k = 1 + k2;
    const Mode k = ball.mode(i);
    if (4 * k2 <= v2) {
      ball_half_alpha += pa[lam_k];
      mid_first += pa[lam_k] * pb[lam_diff(k)];
    }
    if (9 * k2 <= v2) ball_third_beta += pb[lam_k];
    if (k2 <= 9 * v2) ball_three_beta += pb[lam_k];
    if (4 * k2 > v2 && k2 <= 4 * v2) {
      mid_second += pa[lam_k] * pb[lam_diff(k)];
    }
  }
  double tail_sum = 0, mid_third = 0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const long k2 = box.norm2(i);
    if (!origin && k2 <= 4 * v2) continue;
    const long lam_k = 1 + k2;
    tail_sum += pa[lam_k] * pb[lam_k];
    mid_third += pa[lam_k] * pb[lam_diff(box.mode(i))];
  }

  TwoSidedReport r{};
  r.first_lower = std::pow(4.0, -beta) * std::pow(lam_v, -beta) * ball_half_alpha;
  r.first_mid = mid_first;
  r.first_upper = std::pow(4.0, beta) * std::pow(lam_v, -beta) * ball_half_alpha;
  r.second_lower =
      std::pow(4.0, -alpha) * std::pow(lam_v, -alpha) * ball_third_beta;
  r.second_mid = mid_second;
  r.second_upper =
      std::pow(4.0, alpha) * std::pow(lam_v, -alpha) * ball_three_beta;
  r.third_lower = std::pow(4.0, -beta) * tail_sum;
  r.third_mid = mid_third;
  r.third_upper = std::pow(4.0, beta) * tail_sum;
  // Equality is attained in degenerate cases (e.g. beta = 0); allow rounding.
  auto le = [](double a, double b) {
    return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b));
  };
  r.holds[0] = le(r.first_lower, r.first_mid);
  r.holds[1] = le(r.first_mid, r.first_upper);
  r.holds[2] = le(r.second_lower, r.second_mid);
  r.holds[3] = le(r.second_mid, r.second_upper);
  r.holds[4] = le(r.third_lower, r.third_mid);
  r.holds[5] = le(r.third_mid, r.third_upper);
  return r;
}

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::kYes: return "yes";
    case Classification::kNo: return "no";
    case Classification::kUnclassified: return "unclassified";
  }
  return "unclassified";
}

bool lambda_sum_finite(int d, double alpha) noexcept {
  return alpha > d / 2.0;
}

bool discrete_conv_finite(int d, double alpha, double beta) noexcept {
  return alpha + beta > d / 2.0;
}

Classification discrete_conv_regularity(int d, double alpha, double beta,
                                        double gamma) noexcept {
  const double half = d / 2.0;
  if (alpha < 0 || beta < 0 || gamma < 0) return Classification::kUnclassified;
  if (!(alpha + beta > half) || std::max(alpha, beta) == half) {
    return Classification::kUnclassified;
  }
  const double bound = std::min({alpha, beta, alpha + beta - half});
  return gamma <= bound ? Classification::kYes : Classification::kNo;
}

Classification small_values_bounded(int d, double alpha, double beta) noexcept {
  if (!(alpha >= 0.0 && alpha < d / 2.0)) return Classification::kUnclassified;
  return beta <= alpha - d / 2.0 ? Classification::kYes : Classification::kNo;
}

Classification large_values_bounded(int d, double alpha, double beta) noexcept {
  if (!(alpha > d / 2.0)) return Classification::kUnclassified;
  return beta <= alpha - d / 2.0 ? Classification::kYes : Classification::kNo;
}

namespace {

template <typename Pred>
std::vector<double> growth_profile(int d, double alpha, double beta,
                                   int cutoff, int rmax, Pred in_region) {
  const ModeLattice box(d, cutoff);
  std::vector<double> out;
  for (int r = 0; r <= rmax; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const double k2 = box.norm2(i);
      if (in_region(k2, double(r) * r)) s += std::pow(1.0 + k2, -alpha);
    }
    out.push_back(std::pow(1.0 + double(r) * r, beta) * s);
  }
  return out;
}

}  // namespace

std::vector<double> small_values_profile(int d, double alpha, double beta,
                                         double c, int cutoff, int rmax) {
  if (!(c > 0.0)) throw DomainError("need c > 0");
  return growth_profile(d, alpha, beta, cutoff, rmax,
                        [c](double k2, double v2) { return k2 <= c * c * v2; });
}

std::vector<double> large_values_profile(int d, double alpha, double beta,
                                         double c, int cutoff, int rmax) {
  if (!(c > 0.0)) throw DomainError("need c > 0");
  return growth_profile(d, alpha, beta, cutoff, rmax,
                        [c](double k2, double v2) { return k2 > c * c * v2; });
}

double truncated_conv_sup(int d, double alpha, double beta, double gamma,
                          int cutoff, int vmax) {
  const ModeLattice box(d, cutoff);
  const ModeLattice vs(d, std::max(vmax, 1));
  std::vector<double> fa(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    fa[i] = std::pow(box.lambda(i), -alpha);
  }
  double sup = 0.0;
  for (std::size_t a = 0; a < vs.size(); ++a) {
    if (vs.max_norm(a) > vmax) continue;
    const Mode v = vs.mode(a);
    double s = 0.0;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Mode k = box.mode(i);
      double l = 1.0;
      for (int j = 0; j < d; ++j) {
        const double x = v[j] - k[j];
        l += x * x;
      }
      s += fa[i] * std::pow(l, -beta);
    }
    sup = std::max(sup, std::pow(vs.lambda(a), gamma) * s);
  }
  return sup;
}

}  // namespace wickgl
