#pragma once

// Hermite polynomials, Wick powers of Gaussian scalars and fields, and the
// generalized Wick theorem for expectations of products of Wick powers.

#include <Eigen/Core>

#include <span>
#include <vector>

#include "wickgl/lattice.hpp"
#include "wickgl/spectral_grid.hpp"

namespace wickgl {

inline constexpr int kMaxHermiteDegree = 60;
inline constexpr int kMaxWickFactors = 6;
inline constexpr int kMaxWickTotalDegree = 16;

/// Probabilists' Hermite polynomial He_n(x) by the three-term recurrence.
/// Throws DomainError for n < 0 or n > kMaxHermiteDegree.
double hermite_eval(int n, double x);

/// :z^n: for a centered Gaussian of variance `var`:
/// var^{n/2} He_n(z / sqrt(var)), or z^n when var == 0.
double wick_power_scalar(double z, double var, int n);

/// sigma^2_phi = sum_v phi_v^2 / lambda_v over the profile's lattice.
double field_variance(const CutoffProfile& phi);

/// :V^n: of a field sampled under `phi`, on the lattice with cutoff nK
/// (cutoff K for n <= 1; the constant 1 for n = 0).
SpectralField wick_power_field(const SpectralField& v, const CutoffProfile& phi,
                               int n);

/// Computes :V^j: for several degrees from a single synthesis of V on the
/// dealiased grid of the largest degree.  Holds its own workspace; one
/// instance per thread.
class WickPowerKernel {
 public:
  /// `degrees` must be >= 0; `var` is the pointwise variance of V.
  WickPowerKernel(const ModeLattice& lattice, double var,
                  std::vector<int> degrees);
  /// Same, projecting every output onto `output_cutoff` instead of jK.
  WickPowerKernel(const ModeLattice& lattice, double var,
                  std::vector<int> degrees, int output_cutoff);

  const std::vector<int>& degrees() const noexcept { return degrees_; }
  double variance() const noexcept { return var_; }
  int grid_points() const noexcept { return n_; }

  /// Fills outputs[i] with :V^{degrees[i]}:.  Outputs are (re)shaped on
  /// first use and reused afterwards.
  void evaluate(const SpectralField& v, std::vector<SpectralField>& outputs);
  std::vector<SpectralField> evaluate(const SpectralField& v);

 private:
  ModeLattice lattice_;
  double var_;
  std::vector<int> degrees_;
  std::vector<ModeLattice> targets_;
  int max_degree_ = 0;
  int n_ = 0;
  SpectralGrid grid_;
  std::vector<double> values_;
  std::vector<double> work_;
  std::vector<std::vector<double>> hermite_;
};

/// One element of Theta^{-1}(n): alpha over unordered pairs (i, j), i < j,
/// stored in the order (0,1), (0,2), ..., (0,m-1), (1,2), ...
struct PairingIndex {
  int m = 0;
  std::vector<int> alpha;

  int at(int i, int j) const;
  /// Theta(alpha)_i = sum of alpha over pairs containing i.
  std::vector<int> theta() const;
};

/// All alpha in N_0^{P_m} with Theta(alpha) = n.  Empty when sum n is odd.
/// Accepts m >= 1 (m = 1 yields one empty pairing iff n = (0)).  Throws
/// DomainError for m > kMaxWickFactors, sum n > kMaxWickTotalDegree or
/// negative degrees.
std::vector<PairingIndex> enumerate_theta_preimage(int m,
                                                   std::span<const int> n);

/// E[prod_i :Z_i^{n_i}:] = sum_{Theta(alpha)=n} (prod n_i! / prod alpha!)
/// prod_{i<j} cov_ij^{alpha_ij}.  Throws DomainError unless cov is m x m,
/// symmetric and positive semidefinite to 1e-10 (minimum eigenvalue from a
/// self-adjoint eigensolver, relative to the largest diagonal entry).
double wick_expectation_product(std::span<const int> n,
                                const Eigen::MatrixXd& cov);

/// Positive semidefinite check used by wick_expectation_product.
void require_covariance(const Eigen::MatrixXd& cov, double tolerance = 1e-10);

}  // namespace wickgl
