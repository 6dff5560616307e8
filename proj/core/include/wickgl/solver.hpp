#pragma once

// Mild solutions of x' = A x + sum_i F_i(t, x) on a Galerkin lattice, with
// A = Laplacian - 1 acting as the exact multiplier exp(-lambda_v t).
//
// Exponents in this header live on the U-scale U_r = D((-A)^r), so
// ||x||_{U_r} is the C^{2r} grid proxy holder_norm(x, 2r, N).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wickgl/lattice.hpp"

namespace wickgl {

/// F_i(t, y): writes the result (on y's lattice) into `out`.
using FieldMap =
    std::function<void(double t, const SpectralField& y, SpectralField& out)>;

struct TermExponents {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

struct NonlinearitySpec {
  std::vector<TermExponents> exponents;
  std::vector<FieldMap> terms;
  double r0 = 0.0;
  double r1 = 0.0;

  std::size_t size() const noexcept { return terms.size(); }
  /// Sum of all terms.
  void evaluate(double t, const SpectralField& y, SpectralField& out) const;
  /// Empty optional when the standing hypotheses hold; otherwise the reason.
  /// Checked: max(beta_i, gamma_i) <= r1 < 1 + min alpha_i, delta_i >= 0 and
  /// max_i [gamma_i - min(alpha_i, r0) + delta_i (beta_i - r0)] < 1.
  std::optional<std::string> hypothesis_violation() const;
  /// max_i max(beta_i, gamma_i), the scale of the blow-up proxy.
  double state_exponent() const;
};

/// Norm in U_r: holder_norm(x, 2 r, N).
double u_norm(const SpectralField& x, double r, int grid_points);

struct MildSolution {
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
  std::optional<double> blowup_time;
  /// sup over nodes of (s - t0)^{r1 - r0} ||y(s)||_{U_{r1}}.
  double weighted_trace = 0.0;
  /// Picard only: final defect ||x - Phi x||_E and iterate distances.
  double residual = 0.0;
  std::vector<double> iterate_distances;
  double interval = 0.0;  // length of the time interval actually covered
  int halvings = 0;
};

/// All coefficients +inf: the value assigned after blow-up.
SpectralField infinity_sentinel(const ModeLattice& lattice);
bool is_infinity_sentinel(const SpectralField& field) noexcept;

/// Randomized lower bound on the F-norm: sampled pairs x, y with
/// ||.||_{U_{max(beta, gamma)}} <= radius, at the given times.
double fnorm_estimate(const NonlinearitySpec& f, const ModeLattice& lattice,
                      int samples, double radius, int grid_points,
                      std::uint64_t seed,
                      const std::vector<double>& times = {0.0});

struct PicardOptions {
  int nodes = 256;               // uniform time nodes on [t0, t0 + tau]
  int max_iterations = 200;
  int certificate_iterations = 8;
  double tolerance = 1e-13;      // stop when the E-distance falls below
  int max_halvings = 20;
  int grid_points = 0;           // 0: 2K + 1 rounded to an FFT size
};

/// Fixed point of (Phi x)(t) = e^{A(t - t0)} v + int_{t0}^t e^{A(t-s)}
/// F(s, x(s)) ds in the weighted space with norm sum_{j=0,1} sup_t
/// (t - t0)^{r_j - r0} ||x(t)||_{U_{r_j}}.  Quadrature: exponential
/// trapezoid on the nodes.  Halves tau until `certificate_iterations`
/// iterations shrink the iterate distance by at least 2x; throws
/// ConvergenceError("no local contraction certificate") otherwise.
MildSolution picard_solve(const NonlinearitySpec& f, const SpectralField& v,
                          double t0, double tau,
                          const PicardOptions& options = {});

/// Weighted E-distance between two paths on the same nodes.
double weighted_distance(const std::vector<double>& times,
                         const std::vector<SpectralField>& a,
                         const std::vector<SpectralField>& b, double t0,
                         double r0, double r1, int grid_points);

struct EulerOptions {
  double blowup_threshold = 1e6;
  int snapshot_stride = 1;
  int grid_points = 0;  // 0: 2K + 1 rounded to an FFT size
};

/// y <- e^{-lambda dt} y + phi_1(lambda dt) dt F(t, y), phi_1(z) =
/// (1 - e^{-z}) / z.  Blow-up is declared at the first step whose state has
/// ||y||_{U_{max(beta, gamma)}} > R or a non-finite coefficient; every later
/// snapshot is the infinity sentinel.
MildSolution exp_euler_solve(const NonlinearitySpec& f, const SpectralField& v,
                             double t0, double t_end, double dt,
                             const EulerOptions& options = {});

struct ContinuityReport {
  std::vector<double> sizes;
  std::vector<double> distances;
  std::vector<bool> blew_up;  // flagged sizes are excluded from `distances`
};

/// Runs the base problem (eps = 0) and each perturbed problem on the same
/// time grid with exp_euler_solve and reports weighted E-distances.
ContinuityReport continuity_probe(
    const std::function<NonlinearitySpec(double)>& f_of_eps,
    const std::function<SpectralField(double)>& v_of_eps,
    const std::vector<double>& sizes, double t0, double t_end, double dt,
    const EulerOptions& options = {});

}  // namespace wickgl
