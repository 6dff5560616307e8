#include <algorithm>
#include <string>

#include "wickgl/error.hpp"
#include "wickgl/oracle.hpp"

namespace wickgl {

namespace {

// (n + 1) / (n - 1) > d / 2 in exact integer arithmetic.
bool renormalizable(int n, int d) { return 2 * (n + 1) > d * (n - 1); }

}  // namespace

RegimeReport regime_classify(int n, int d) {
  if (n < 2) throw DomainError("regime classification needs n >= 2");
  if (d < 2) throw DomainError("regime classification needs d >= 2");
  RegimeReport r;
  r.n = n;
  r.d = d;
  r.wp_exists = d <= 2 || (d == 3 && n == 2);
  r.awp_exists = renormalizable(n, d);
  r.cwp_exists = r.awp_exists;
  if (r.wp_exists) r.wp_exponent = 2.0 - d;
  if (r.awp_exists) {
    // e = 1 + 1/n - d/2 = num / (2n); a negative e is multiplied by n.
    // Integer numerator so that every table entry is correctly rounded.
    const int num = 2 * n + 2 - n * d;
    r.awp_exponent = num >= 0 ? num / (2.0 * n) : num / 2.0;
  }
  if (r.cwp_exists) r.cwp_exponent = (4 + n * (2 - d)) / 2.0;
  return r;
}

bool regime_exists(WickKind kind, int n, int d) {
  if (n < 0 || d < 1) throw DomainError("need n >= 0 and d >= 1");
  if (n <= 1 || d == 1) return true;
  const RegimeReport r = regime_classify(n, d);
  switch (kind) {
    case WickKind::kWP: return r.wp_exists;
    case WickKind::kAWP: return r.awp_exists;
    case WickKind::kCWP: return r.cwp_exists;
  }
  return false;
}

DivergenceScan divergence_scan(WickKind kind, int n, int d, const Mode& v,
                               const std::vector<int>& cutoffs) {
  if (n < 1) throw DomainError("divergence scan needs n >= 1");
  if (cutoffs.empty()) throw DomainError("divergence scan needs cutoffs");
  for (std::size_t i = 1; i < cutoffs.size(); ++i) {
    if (cutoffs[i] <= cutoffs[i - 1]) {
      throw DomainError("cutoff list must be strictly increasing");
    }
  }
  DivergenceScan scan;
  scan.kind = kind;
  scan.n = n;
  scan.d = d;
  scan.cutoffs = cutoffs;
  const double weight[] = {1.0};
  const double lam_v = lambda_of(v, d);
  for (int k : cutoffs) {
    double s = 0.0;
    switch (kind) {
      case WickKind::kWP:
        s = nfold_lambda_sum(d, v, n, weight, k);
        break;
      case WickKind::kAWP:
        s = nfold_lambda_sum(d, v, n, weight, k, SumKernel::kSumTool);
        break;
      case WickKind::kCWP:
        s = nfold_lambda_sum(d, v, n, weight, k, SumKernel::kSumTool) / lam_v;
        break;
    }
    scan.sums.push_back(s);
  }
  for (std::size_t i = 1; i < scan.sums.size(); ++i) {
    scan.increments.push_back(scan.sums[i] - scan.sums[i - 1]);
  }
  scan.verdict = "inconclusive";
  const auto& inc = scan.increments;
  if (inc.size() >= 2) {
    bool decaying = true;
    for (std::size_t i = 1; i < inc.size(); ++i) {
      if (!(inc[i] <= 0.75 * inc[i - 1])) decaying = false;
    }
    if (decaying) {
      scan.verdict = "decaying";
    } else if (inc.back() >= 0.5 * inc.front()) {
      scan.verdict = "non-decaying";
    }
  }
  return scan;
}

}  // namespace wickgl
