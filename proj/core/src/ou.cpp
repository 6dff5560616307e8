#include "wickgl/ou.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "wickgl/error.hpp"

namespace wickgl {

namespace {

// Counter step reserved for the stationary initial draw.
constexpr std::uint64_t kInitialDrawStep =
    std::numeric_limits<std::uint64_t>::max();

std::vector<int> union_degrees(const std::vector<int>& a,
                               const std::vector<int>& b) {
  std::set<int> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

ModeLattice wick_lattice(const ModeLattice& base, int n) {
  return ModeLattice(base.dim(), std::max(n, 1) * base.cutoff());
}

}  // namespace

OuPropagator::OuPropagator(const CutoffProfile& phi, double dt,
                           int refinement_level)
    : lattice_(phi.lattice()), dt_(dt), level_(refinement_level) {
  if (!(dt > 0.0)) throw DomainError("OU step needs dt > 0");
  if (refinement_level < 0 || refinement_level > 20) {
    throw DomainError("refinement level must be in [0, 20]");
  }
  const double h = std::ldexp(dt, -refinement_level);
  sub_.resize(lattice_.size());
  const std::size_t zero = lattice_.zero_index();
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    const double lam = lattice_.lambda(i);
    const double p = phi[i];
    // Real BM for v = 0; each of Re, Im has half the variance otherwise.
    const double q = 2.0 * p * p * (i == zero ? 1.0 : 0.5);
    SubStep s{};
    s.decay = std::exp(-lam * h);
    const double var_xi = q * (-std::expm1(-2.0 * lam * h)) / (2.0 * lam);
    const double cov = q * (-std::expm1(-lam * h)) / lam;
    const double var_w = q * h;
    s.xi_sd = std::sqrt(var_xi);
    if (s.xi_sd > 0.0) {
      s.b_load = cov / s.xi_sd;
      s.b_sd = std::sqrt(std::max(0.0, var_w - s.b_load * s.b_load));
    }
    sub_[i] = s;
  }
}

void OuPropagator::advance_impl(SpectralField& a, SpectralField* dw,
                                const CounterRng& rng,
                                std::uint64_t step) const {
  if (!(a.lattice() == lattice_)) {
    throw DomainError("OU state lives on a different lattice");
  }
  auto c = a.raw();
  std::span<Complex> w;
  if (dw != nullptr) {
    if (!(dw->lattice() == lattice_)) {
      throw DomainError("noise increment lives on a different lattice");
    }
    w = dw->raw();
    std::fill(w.begin(), w.end(), Complex{});
  }
  const std::size_t zero = lattice_.zero_index();
  const std::size_t size = lattice_.size();
  const std::uint64_t subs = std::uint64_t{1} << level_;
  for (std::uint64_t j = 0; j < subs; ++j) {
    const std::uint64_t fine = step * subs + j;
    for (std::size_t i = zero; i < size; ++i) {
      const SubStep& s = sub_[i];
      const auto [z1r, z1i] = rng.normal_pair(fine, 2 * i);
      if (i == zero) {
        c[i] = Complex(s.decay * c[i].real() + s.xi_sd * z1r, 0.0);
      } else {
        c[i] = s.decay * c[i] + Complex(s.xi_sd * z1r, s.xi_sd * z1i);
      }
      if (dw != nullptr) {
        const auto [z2r, z2i] = rng.normal_pair(fine, 2 * i + 1);
        if (i == zero) {
          w[i] += Complex(s.b_load * z1r + s.b_sd * z2r, 0.0);
        } else {
          w[i] += Complex(s.b_load * z1r + s.b_sd * z2r,
                          s.b_load * z1i + s.b_sd * z2i);
        }
      }
    }
  }
  for (std::size_t i = zero + 1; i < size; ++i) {
    c[lattice_.negated(i)] = std::conj(c[i]);
    if (dw != nullptr) w[lattice_.negated(i)] = std::conj(w[i]);
  }
}

void OuPropagator::advance(SpectralField& a, const CounterRng& rng,
                           std::uint64_t step) const {
  advance_impl(a, nullptr, rng, step);
}

void OuPropagator::advance(SpectralField& a, SpectralField& dw,
                           const CounterRng& rng, std::uint64_t step) const {
  advance_impl(a, &dw, rng, step);
}

OUState stationary_sample(const CutoffProfile& phi, std::uint64_t seed,
                          std::uint64_t trajectory) {
  const ModeLattice& lat = phi.lattice();
  OUState s{.t = 0.0,
            .v = SpectralField(lat),
            .phi = phi,
            .seed = seed,
            .trajectory = trajectory};
  const CounterRng rng(seed, trajectory);
  auto c = s.v.raw();
  const std::size_t zero = lat.zero_index();
  for (std::size_t i = zero; i < lat.size(); ++i) {
    const double sd = phi[i] / std::sqrt(lat.lambda(i));
    const auto [zr, zi] = rng.normal_pair(kInitialDrawStep, i);
    if (i == zero) {
      c[i] = Complex(sd * zr, 0.0);
    } else {
      c[i] = Complex(sd * std::sqrt(0.5) * zr, sd * std::sqrt(0.5) * zi);
      c[lat.negated(i)] = std::conj(c[i]);
    }
  }
  return s;
}

OUState stationary_sample(const ModeLattice& lattice, const CutoffProfile& phi,
                          std::uint64_t seed) {
  if (!(phi.lattice() == lattice)) {
    throw DomainError("cutoff profile lives on a different lattice");
  }
  return stationary_sample(phi, seed, 0);
}

void attach_accumulators(OUState& state, std::vector<int> awp_degrees,
                         std::vector<int> cwp_degrees) {
  for (int n : awp_degrees) {
    if (n < 0) throw DomainError("Wick degree must be >= 0");
  }
  for (int n : cwp_degrees) {
    if (n < 0) throw DomainError("Wick degree must be >= 0");
  }
  const ModeLattice& lat = state.v.lattice();
  state.awp_t0 = state.t;
  state.cwp_start = state.t;
  state.awp_degrees = std::move(awp_degrees);
  state.cwp_degrees = std::move(cwp_degrees);
  state.awp.clear();
  state.cwp.clear();
  for (int n : state.awp_degrees) state.awp.emplace_back(wick_lattice(lat, n));
  for (int n : state.cwp_degrees) state.cwp.emplace_back(wick_lattice(lat, n));
  state.tracked_degrees = union_degrees(state.awp_degrees, state.cwp_degrees);
  state.current_wick.clear();
  if (!state.tracked_degrees.empty()) {
    WickPowerKernel kernel(lat, field_variance(state.phi),
                           state.tracked_degrees);
    kernel.evaluate(state.v, state.current_wick);
  }
}

std::pair<double, double> exp_trapezoid_weights(double lambda, double h) {
  const double x = lambda * h;
  double c1 = 0.0;
  if (x < 1e-2) {
    // (x - 1 + e^{-x}) / x^2 = 1/2 - x/6 + x^2/24 - x^3/120 + ...
    c1 = h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 +
              x * x * x * x / 720.0);
  } else {
    c1 = (x + std::expm1(-x)) / (lambda * x);
  }
  const double total = x < 1e-8 ? h : -std::expm1(-x) / lambda;
  return {total - c1, c1};
}

OuStepper::OuStepper(const CutoffProfile& phi, double dt,
                     std::vector<int> awp_degrees,
                     std::vector<int> cwp_degrees)
    : prop_(phi, dt), dt_(dt) {
  tracked_ = union_degrees(awp_degrees, cwp_degrees);
  const ModeLattice& lat = phi.lattice();
  if (!tracked_.empty()) {
    kernel_.emplace(lat, field_variance(phi), tracked_);
  }
  auto slot_of = [&](int n) {
    return static_cast<std::size_t>(
        std::find(tracked_.begin(), tracked_.end(), n) - tracked_.begin());
  };
  for (int n : awp_degrees) awp_slot_.push_back(slot_of(n));
  for (int n : cwp_degrees) {
    cwp_slot_.push_back(slot_of(n));
    const ModeLattice wl = wick_lattice(lat, n);
    std::vector<double> e(wl.size()), c0(wl.size()), c1(wl.size());
    for (std::size_t i = 0; i < wl.size(); ++i) {
      const double lam = wl.lambda(i);
      e[i] = std::exp(-lam * dt);
      std::tie(c0[i], c1[i]) = exp_trapezoid_weights(lam, dt);
    }
    cwp_decay_.push_back(std::move(e));
    cwp_c0_.push_back(std::move(c0));
    cwp_c1_.push_back(std::move(c1));
  }
}

void OuStepper::step(OUState& state) {
  if (state.tracked_degrees != tracked_ ||
      state.awp.size() != awp_slot_.size() ||
      state.cwp.size() != cwp_slot_.size()) {
    throw DomainError("OU state accumulators do not match the stepper");
  }
  prop_.advance(state.v, CounterRng(state.seed, state.trajectory),
                state.step);
  state.step += 1;
  state.t += dt_;
  if (!kernel_) return;
  kernel_->evaluate(state.v, next_wick_);
  const double half = 0.5 * dt_;
  for (std::size_t a = 0; a < awp_slot_.size(); ++a) {
    auto acc = state.awp[a].raw();
    const auto w0 = state.current_wick[awp_slot_[a]].coefficients();
    const auto w1 = next_wick_[awp_slot_[a]].coefficients();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += half * (w0[i] + w1[i]);
  }
  for (std::size_t c = 0; c < cwp_slot_.size(); ++c) {
    auto b = state.cwp[c].raw();
    const auto w0 = state.current_wick[cwp_slot_[c]].coefficients();
    const auto w1 = next_wick_[cwp_slot_[c]].coefficients();
    const auto& e = cwp_decay_[c];
    const auto& c0 = cwp_c0_[c];
    const auto& c1 = cwp_c1_[c];
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = e[i] * b[i] + c0[i] * w0[i] + c1[i] * w1[i];
    }
  }
  std::swap(state.current_wick, next_wick_);
}

void ou_step_inplace(OUState& state, double dt) {
  OuStepper stepper(state.phi, dt, state.awp_degrees, state.cwp_degrees);
  stepper.step(state);
}

OUState ou_step(const OUState& state, double dt) {
  OUState next = state;
  ou_step_inplace(next, dt);
  return next;
}

SpectralField awp_accumulate(const std::vector<SpectralField>& trajectory,
                             const CutoffProfile& phi, int n, double dt) {
  if (trajectory.empty()) throw DomainError("empty trajectory");
  if (!(dt > 0.0)) throw DomainError("awp quadrature needs dt > 0");
  const ModeLattice& lat = trajectory.front().lattice();
  SpectralField acc(wick_lattice(lat, n));
  if (trajectory.size() == 1) return acc;
  WickPowerKernel kernel(lat, field_variance(phi), {n});
  std::vector<SpectralField> w;
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    kernel.evaluate(trajectory[s], w);
    const double weight =
        (s == 0 || s + 1 == trajectory.size()) ? 0.5 * dt : dt;
    acc.axpy(weight, w.front());
  }
  return acc;
}

void cwp_update(SpectralField& b, const SpectralField& w_old,
                const SpectralField& w_new, double dt) {
  if (!(b.lattice() == w_old.lattice()) || !(b.lattice() == w_new.lattice())) {
    throw DomainError("convolutional update on mismatched lattices");
  }
  if (!(dt > 0.0)) throw DomainError("convolutional update needs dt > 0");
  const ModeLattice& lat = b.lattice();
  auto c = b.raw();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double lam = lat.lambda(i);
    const auto [c0, c1] = exp_trapezoid_weights(lam, dt);
    c[i] = std::exp(-lam * dt) * c[i] + c0 * w_old[i] + c1 * w_new[i];
  }
}

}  // namespace wickgl
