#pragma once

// Transforms between SpectralField coefficients and real values on the
// uniform grid x_j = (2pi/N) j, j in {0..N-1}^d, plus the spectral operators
// built on them (fractional powers of 1 - Laplacian, grid C^r norms,
// alias-free pointwise products).

#include <memory>
#include <span>
#include <vector>

#include "wickgl/lattice.hpp"

namespace wickgl {

/// Smallest size >= n whose prime factors are 2, 3 or 5.
int fft_friendly_size(int n);

/// Grid size used for alias-free degree-n products of band-K fields:
/// fft_friendly_size(2 n K + 1).
int dealiased_grid_size(int degree, int cutoff);

/// Reusable transform workspace for one (d, N) pair.  Not thread-safe; give
/// each thread its own instance.  Plans are shared process-wide.
class SpectralGrid {
 public:
  SpectralGrid(int dim, int points_per_axis);
  ~SpectralGrid();
  SpectralGrid(SpectralGrid&&) noexcept;
  SpectralGrid& operator=(SpectralGrid&&) noexcept;
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int dim() const noexcept { return dim_; }
  int points() const noexcept { return n_; }
  std::size_t grid_size() const noexcept { return total_; }

  /// u(x_j) = sum_v c_v exp(i <v, x_j>).  Throws DomainError("undersampled")
  /// when N < 2K + 1.
  void synthesize(const SpectralField& field, std::span<double> out);
  std::vector<double> synthesize(const SpectralField& field);

  /// c_v = N^{-d} sum_j u(x_j) exp(-i <v, x_j>) for every v of `target`.
  void analyze(std::span<const double> values, SpectralField& target);
  SpectralField analyze(std::span<const double> values,
                        const ModeLattice& target);

 private:
  struct Impl;
  int dim_;
  int n_;
  std::size_t total_;
  std::unique_ptr<Impl> impl_;
};

/// Per-thread cached workspace for (d, N); valid for the calling thread's
/// lifetime.
SpectralGrid& thread_grid(int dim, int points_per_axis);

std::vector<double> synthesize(const SpectralField& field, int points_per_axis);
SpectralField analyze(std::span<const double> values, int dim,
                      int points_per_axis, const ModeLattice& target);

/// Multiplies c_v by lambda_v^{r/2}: the r/2 power of -(Laplacian - 1).
SpectralField apply_fractional_power(const SpectralField& field, double r);

/// Grid proxy for the C^r norm: max_j |((1 - Laplacian)^{r/2} u)(x_j)|.
/// The grid maximum never exceeds the continuum supremum.
double holder_norm(const SpectralField& field, double r, int points_per_axis);
/// Same, reusing a caller-owned workspace.
double holder_norm(const SpectralField& field, double r, SpectralGrid& grid);

/// Exact coefficients of u^n on the lattice with cutoff nK.
SpectralField pointwise_power(const SpectralField& field, int n);

/// Exact coefficients of u * w on the lattice with cutoff K_u + K_w.
SpectralField pointwise_product(const SpectralField& u, const SpectralField& w);

/// ||u w||_{C^gamma} / (||u||_{C^alpha} ||w||_{C^beta}) on an N-point grid.
/// Requires alpha + beta > 0, gamma < min(alpha, beta), and N large enough
/// for the product (N >= 2 (K_u + K_w) + 1).  Throws DomainError("zero
/// factor") when either norm vanishes.
double product_norm_ratio(const SpectralField& u, const SpectralField& w,
                          double alpha, double beta, double gamma,
                          int points_per_axis);

}  // namespace wickgl
