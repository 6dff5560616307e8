#pragma once

// Stochastic Ginzburg-Landau drivers through the shifted unknown y = X - V:
//   y' = A y + kappa_0 + (kappa_1 + 1)(y + V)
//        + sum_{w=2}^n kappa_w sum_{k=0}^{w} binom(w, k) y^k :V^{w-k}:
// with :V^0: = 1.  All products are evaluated pointwise on an alias-free
// grid and projected back onto the Galerkin lattice of y.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wickgl/lattice.hpp"
#include "wickgl/solver.hpp"
#include "wickgl/spectral_grid.hpp"

namespace wickgl {

/// kappa(t): constant, or piecewise linear in t through tabulated rows
/// (clamped outside the table).
class KappaSchedule {
 public:
  KappaSchedule() = default;
  explicit KappaSchedule(std::vector<double> constant);
  KappaSchedule(std::vector<double> times,
                std::vector<std::vector<double>> rows);

  std::size_t degree() const noexcept;  // n (number of coefficients - 1)
  std::vector<double> at(double t) const;
  bool is_constant() const noexcept { return times_.empty(); }

 private:
  std::vector<double> times_;
  std::vector<std::vector<double>> rows_;
};

/// Reusable evaluator of the shifted nonlinearity on one lattice.
class GlRhs {
 public:
  /// `degree` is n; `variance` the pointwise variance of V.
  GlRhs(const ModeLattice& lattice, int degree, double variance);

  int degree() const noexcept { return degree_; }
  int grid_points() const noexcept { return grid_.points(); }

  /// Wick powers of V computed pointwise from V itself.
  void evaluate(const std::vector<double>& kappa, const SpectralField& y,
                const SpectralField& v, SpectralField& out);
  /// Wick powers supplied: wick[j - 1] = :V^j:, j = 1..n, any cutoffs that
  /// the grid resolves.
  void evaluate(const std::vector<double>& kappa, const SpectralField& y,
                const std::vector<SpectralField>& wick, SpectralField& out);

 private:
  void combine(const std::vector<double>& kappa, SpectralField& out);

  ModeLattice lattice_;
  int degree_;
  double variance_;
  SpectralGrid grid_;
  std::vector<double> y_;
  std::vector<std::vector<double>> wick_;  // wick_[j] = :V^j: on the grid
  std::vector<double> f_;
};

/// Shifted 2D nonlinearity with supplied Wick powers (wick[j-1] = :V^j:).
SpectralField gl2d_rhs(double t, const SpectralField& y,
                       const std::vector<SpectralField>& wick,
                       const KappaSchedule& kappa);
/// kappa_2 (y^2 + 2 V y + :V^2:) + (kappa_1 + 1)(y + V) + kappa_0.
SpectralField gl3d_rhs(double t, const SpectralField& y, const SpectralField& v,
                       const SpectralField& v2_wick, double kappa0,
                       double kappa1, double kappa2);

struct GlConfig {
  int dim = 2;
  KappaSchedule kappa;
  int cutoff = 4;
  int grid_points = 0;  // norm grid; 0: 2K + 1 rounded to an FFT size
  ProfileKind profile = ProfileKind::kBox;
  double profile_radius = 0.0;  // 0: the cutoff
  bool noise = true;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  int refinement_level = 0;
  double t0 = 0.0;
  double dt = 1e-3;
  double t_end = 0.5;
  double eta = -0.5;
  double eps_prime = 0.05;
  double blowup_threshold = 1e6;
  int snapshot_stride = 1;
  std::vector<double> trace_exponents = {0.0, 0.5, 1.0};
};

struct GlSolution {
  std::vector<double> times;
  std::vector<SpectralField> x;  // X = y + V (sentinel after blow-up)
  std::vector<SpectralField> y;
  std::optional<double> blowup_time;
  std::vector<double> trace_exponents;
  /// sup over steps of (s - t0)^{(r - eta)/2} ||y(s)||_{C^r}, per r.
  std::vector<double> traces;
  /// Per recorded node: ||y||_{C^r} per r (for trace CSV output).
  std::vector<std::vector<double>> node_norms;
  std::vector<std::string> warnings;
  double variance = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;
};

/// Exponential-Euler solve of the shifted equation driven by an exact OU
/// trajectory.  xi is the initial X on the configured lattice.
GlSolution solve_gl(const GlConfig& config, const SpectralField& xi);

/// The cutoff profile solve_gl uses for a configuration.
CutoffProfile gl_profile(const GlConfig& config);

}  // namespace wickgl
