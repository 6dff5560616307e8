#pragma once

// Exact sampling of the cutoff Ornstein-Uhlenbeck field
//   V_t = sum_v sqrt(2) phi_v int_{-inf}^t exp(-lambda_v (t - s)) dbeta^v_s g_v
// and accumulation of averaged (time-integral) and convolutional
// (semigroup-smoothed) Wick powers along a trajectory.
//
// Noise convention: beta^0 is a real standard Brownian motion; for v != 0,
// beta^v is complex with Re and Im independent, each of variance t / 2, and
// beta^{-v} = conj(beta^v).  This gives E|a_v|^2 = phi_v^2 / lambda_v.

#include <cstdint>
#include <optional>
#include <vector>

#include "wickgl/lattice.hpp"
#include "wickgl/rng.hpp"
#include "wickgl/wick.hpp"

namespace wickgl {

/// Burn-in before convolutional Wick powers are read out.
inline constexpr double kCwpBurnIn = 20.0;

/// Exact one-step transition of the mode system for a fixed dt, optionally
/// also returning the forcing increment dW_v = sqrt(2) phi_v dbeta^v over the
/// same step (jointly Gaussian with the OU innovation).
///
/// With refinement level L the step is composed from 2^L exact sub-steps
/// whose draws use counters step * 2^L + j.  A run at (dt, L + 1) therefore
/// sees exactly the Brownian path of a run at (dt / 2, L).  The innovation
/// uses only the first normal of each component, so it does not depend on
/// whether dW is requested.
class OuPropagator {
 public:
  OuPropagator(const CutoffProfile& phi, double dt, int refinement_level = 0);

  double dt() const noexcept { return dt_; }
  int refinement_level() const noexcept { return level_; }
  const ModeLattice& lattice() const noexcept { return lattice_; }

  /// a <- exp(-lambda dt) a + xi for step index `step`.
  void advance(SpectralField& a, const CounterRng& rng,
               std::uint64_t step) const;
  /// Same, also writing the forcing increment into `dw`.
  void advance(SpectralField& a, SpectralField& dw, const CounterRng& rng,
               std::uint64_t step) const;

 private:
  struct SubStep {
    double decay;   // exp(-lambda h)
    double xi_sd;   // sd of each real component of xi
    double b_load;  // dW component = b_load * z1 + b_sd * z2
    double b_sd;
  };
  void advance_impl(SpectralField& a, SpectralField* dw,
                    const CounterRng& rng, std::uint64_t step) const;

  ModeLattice lattice_;
  double dt_;
  int level_;
  std::vector<SubStep> sub_;
};

struct OUState {
  double t = 0.0;
  SpectralField v;
  CutoffProfile phi;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  std::uint64_t step = 0;

  // Averaged Wick powers int_{t0}^t :V_s^n: ds, one per entry of awp_degrees.
  double awp_t0 = 0.0;
  std::vector<int> awp_degrees{};
  std::vector<SpectralField> awp{};
  // Convolutional Wick powers int_{cwp_start}^t exp(A(t - s)) :V_s^n: ds;
  // they approximate the stationary objects once t - cwp_start >= burn-in.
  double cwp_start = 0.0;
  std::vector<int> cwp_degrees{};
  std::vector<SpectralField> cwp{};

  /// :V_t^n: for the union of tracked degrees (internal quadrature state).
  std::vector<int> tracked_degrees{};
  std::vector<SpectralField> current_wick{};

  bool cwp_ready(double burn_in = kCwpBurnIn) const noexcept {
    return t - cwp_start >= burn_in - 1e-12;
  }
};

/// Draws V from the stationary law: a_0 real, E|a_v|^2 = phi_v^2 / lambda_v,
/// a_{-v} = conj(a_v).  Deterministic in (seed, trajectory).
OUState stationary_sample(const CutoffProfile& phi, std::uint64_t seed,
                          std::uint64_t trajectory = 0);
OUState stationary_sample(const ModeLattice& lattice, const CutoffProfile& phi,
                          std::uint64_t seed);

/// Starts accumulators at the current time (zero fields).
void attach_accumulators(OUState& state, std::vector<int> awp_degrees,
                         std::vector<int> cwp_degrees);

/// Advances state by dt with the exact transition, updating attached
/// accumulators (trapezoid for averaged, exponential trapezoid for
/// convolutional powers).  Throws DomainError for dt <= 0.
void ou_step_inplace(OUState& state, double dt);
OUState ou_step(const OUState& state, double dt);

/// Reusable stepper for hot loops: caches the transition coefficients, the
/// Wick kernel and the quadrature weights.
class OuStepper {
 public:
  /// `awp_degrees` and `cwp_degrees` must match the state's attachments.
  OuStepper(const CutoffProfile& phi, double dt, std::vector<int> awp_degrees,
            std::vector<int> cwp_degrees);

  void step(OUState& state);

 private:
  OuPropagator prop_;
  double dt_;
  std::vector<int> tracked_;
  std::optional<WickPowerKernel> kernel_;
  std::vector<std::size_t> awp_slot_, cwp_slot_;
  std::vector<std::vector<double>> cwp_decay_, cwp_c0_, cwp_c1_;
  std::vector<SpectralField> next_wick_;
};

/// Composite trapezoid integral of :V^n: over a uniformly sampled trajectory.
/// One sample (t = t0) gives the zero field; an empty trajectory throws.
SpectralField awp_accumulate(const std::vector<SpectralField>& trajectory,
                             const CutoffProfile& phi, int n, double dt);

/// Exponential-trapezoid weights (c0, c1) for int_0^h exp(-lambda (h - s))
/// w(s) ds with w linear between w(0) and w(h).
std::pair<double, double> exp_trapezoid_weights(double lambda, double h);

/// One convolutional update b <- exp(-lambda dt) b + c0 w_old + c1 w_new,
/// all fields on the same lattice.
void cwp_update(SpectralField& b, const SpectralField& w_old,
                const SpectralField& w_new, double dt);

}  // namespace wickgl
