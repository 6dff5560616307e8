#include "wickgl/wick.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wickgl/error.hpp"

namespace wickgl {

double hermite_eval(int n, double x) {
  if (n < 0 || n > kMaxHermiteDegree) {
    throw DomainError("Hermite degree must be in [0, " +
                      std::to_string(kMaxHermiteDegree) + "], got " +
                      std::to_string(n));
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double wick_power_scalar(double z, double var, int n) {
  if (!(var >= 0.0)) throw DomainError("Wick power needs var >= 0");
  if (n < 0 || n > kMaxHermiteDegree) {
    throw DomainError("Wick degree must be in [0, " +
                      std::to_string(kMaxHermiteDegree) + "]");
  }
  if (var == 0.0) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= z;
    return p;
  }
  const double s = std::sqrt(var);
  return std::pow(s, n) * hermite_eval(n, z / s);
}

double field_variance(const CutoffProfile& phi) {
  const ModeLattice& lat = phi.lattice();
  double s = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    s += phi[i] * phi[i] / lat.lambda(i);
  }
  return s;
}

SpectralField wick_power_field(const SpectralField& v, const CutoffProfile& phi,
                               int n) {
  if (!(phi.lattice() == v.lattice())) {
    throw DomainError("field and cutoff profile live on different lattices");
  }
  WickPowerKernel kernel(v.lattice(), field_variance(phi), {n});
  return std::move(kernel.evaluate(v).front());
}

WickPowerKernel::WickPowerKernel(const ModeLattice& lattice, double var,
                                 std::vector<int> degrees)
    : WickPowerKernel(lattice, var, std::move(degrees), -1) {}

namespace {

int kernel_grid_size(const ModeLattice& lattice, const std::vector<int>& deg,
                     int output_cutoff) {
  int top = 1;
  for (int n : deg) top = std::max(top, n);
  int need = 2 * top * lattice.cutoff() + 1;
  if (output_cutoff > 0) need = std::max(need, 2 * output_cutoff + 1);
  return fft_friendly_size(need);
}

}  // namespace

WickPowerKernel::WickPowerKernel(const ModeLattice& lattice, double var,
                                 std::vector<int> degrees, int output_cutoff)
    : lattice_(lattice),
      var_(var),
      degrees_(std::move(degrees)),
      n_(kernel_grid_size(lattice, degrees_, output_cutoff)),
      grid_(lattice.dim(), n_) {
  if (!(var >= 0.0)) throw DomainError("Wick power needs var >= 0");
  if (degrees_.empty()) throw DomainError("no Wick degrees requested");
  for (int n : degrees_) {
    if (n < 0 || n > kMaxHermiteDegree) {
      throw DomainError("Wick degree out of range: " + std::to_string(n));
    }
    max_degree_ = std::max(max_degree_, n);
    const int cutoff = output_cutoff > 0
                           ? output_cutoff
                           : std::max(n, 1) * lattice.cutoff();
    targets_.emplace_back(lattice.dim(), cutoff);
  }
  values_.resize(grid_.grid_size());
  work_.resize(grid_.grid_size());
  hermite_.assign(static_cast<std::size_t>(max_degree_) + 1,
                  std::vector<double>(grid_.grid_size()));
}

void WickPowerKernel::evaluate(const SpectralField& v,
                               std::vector<SpectralField>& outputs) {
  if (!(v.lattice() == lattice_)) {
    throw DomainError("Wick kernel built for a different lattice");
  }
  if (outputs.size() != degrees_.size()) {
    outputs.clear();
    for (const auto& t : targets_) outputs.emplace_back(t);
  }
  grid_.synthesize(v, values_);
  // :z^{k+1}: = z :z^k: - k var :z^{k-1}:, valid also at var = 0.
  const std::size_t total = values_.size();
  std::fill(hermite_[0].begin(), hermite_[0].end(), 1.0);
  if (max_degree_ >= 1) hermite_[1] = values_;
  for (int k = 1; k < max_degree_; ++k) {
    const auto& pk = hermite_[k];
    const auto& pm = hermite_[k - 1];
    auto& out = hermite_[k + 1];
    const double c = k * var_;
    for (std::size_t j = 0; j < total; ++j) {
      out[j] = values_[j] * pk[j] - c * pm[j];
    }
  }
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    grid_.analyze(hermite_[degrees_[i]], outputs[i]);
  }
}

std::vector<SpectralField> WickPowerKernel::evaluate(const SpectralField& v) {
  std::vector<SpectralField> out;
  evaluate(v, out);
  return out;
}

int PairingIndex::at(int i, int j) const {
  if (i == j) return 0;
  if (i > j) std::swap(i, j);
  // pairs before row i: sum_{r<i} (m-1-r)
  const int offset = i * (2 * m - i - 1) / 2;
  return alpha[offset + (j - i - 1)];
}

std::vector<int> PairingIndex::theta() const {
  std::vector<int> t(m, 0);
  std::size_t p = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j, ++p) {
      t[i] += alpha[p];
      t[j] += alpha[p];
    }
  }
  return t;
}

namespace {

struct PairEnumerator {
  int m;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> remaining;
  std::vector<int> alpha;
  std::vector<PairingIndex> out;

  void run(std::size_t p) {
    if (p == pairs.size()) {
      if (std::all_of(remaining.begin(), remaining.end(),
                      [](int r) { return r == 0; })) {
        out.push_back(PairingIndex{m, alpha});
      }
      return;
    }
    const auto [i, j] = pairs[p];
    const bool last_for_i = (j == m - 1);
    const int hi = std::min(remaining[i], remaining[j]);
    // After the last pair (i, m-1), index i can receive nothing more.
    const int lo = last_for_i ? remaining[i] : 0;
    if (lo > hi) return;
    for (int a = lo; a <= hi; ++a) {
      alpha[p] = a;
      remaining[i] -= a;
      remaining[j] -= a;
      run(p + 1);
      remaining[i] += a;
      remaining[j] += a;
    }
    alpha[p] = 0;
  }
};

void validate_degrees(int m, std::span<const int> n) {
  if (m < 1) throw DomainError("need at least one factor");
  if (m > kMaxWickFactors) {
    throw DomainError("at most " + std::to_string(kMaxWickFactors) +
                      " factors supported");
  }
  if (n.size() != static_cast<std::size_t>(m)) {
    throw DomainError("degree vector length must equal m");
  }
  int total = 0;
  for (int k : n) {
    if (k < 0) throw DomainError("degrees must be nonnegative");
    total += k;
  }
  if (total > kMaxWickTotalDegree) {
    throw DomainError("total degree above " +
                      std::to_string(kMaxWickTotalDegree) + " not supported");
  }
}

}  // namespace

std::vector<PairingIndex> enumerate_theta_preimage(int m,
                                                   std::span<const int> n) {
  validate_degrees(m, n);
  const int total = std::accumulate(n.begin(), n.end(), 0);
  if (total % 2 != 0) return {};
  PairEnumerator e;
  e.m = m;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) e.pairs.emplace_back(i, j);
  }
  e.remaining.assign(n.begin(), n.end());
  e.alpha.assign(e.pairs.size(), 0);
  if (m == 1) {
    if (n[0] == 0) e.out.push_back(PairingIndex{1, {}});
    return e.out;
  }
  e.run(0);
  return e.out;
}

void require_covariance(const Eigen::MatrixXd& cov, double tolerance) {
  if (cov.rows() != cov.cols()) throw DomainError("covariance must be square");
  const double scale = std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < cov.cols(); ++j) {
      if (std::abs(cov(i, j) - cov(j, i)) > tolerance * scale) {
        throw DomainError("covariance is not symmetric");
      }
    }
  }
  if (cov.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      cov, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance * scale) {
    throw DomainError("covariance is not positive semidefinite");
  }
}

double wick_expectation_product(std::span<const int> n,
                                const Eigen::MatrixXd& cov) {
  const int m = static_cast<int>(n.size());
  validate_degrees(m, n);
  if (cov.rows() != m || cov.cols() != m) {
    throw DomainError("covariance must be m x m");
  }
  require_covariance(cov);
  auto factorial = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  double numer = 1.0;
  for (int k : n) numer *= factorial(k);
  double sum = 0.0;
  for (const PairingIndex& a : enumerate_theta_preimage(m, n)) {
    double term = numer;
    std::size_t p = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j, ++p) {
        const int k = a.alpha[p];
        term /= factorial(k);
        for (int r = 0; r < k; ++r) term *= cov(i, j);
      }
    }
    sum += term;
  }
  return sum;
}

}  // namespace wickgl
