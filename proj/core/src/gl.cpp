#include "wickgl/gl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fmt/format.h>

#include "wickgl/error.hpp"
#include "wickgl/ou.hpp"
#include "wickgl/wick.hpp"

namespace wickgl {

KappaSchedule::KappaSchedule(std::vector<double> constant) {
  if (constant.empty()) throw DomainError("kappa needs >= 1 coefficient");
  rows_.push_back(std::move(constant));
}

KappaSchedule::KappaSchedule(std::vector<double> times,
                             std::vector<std::vector<double>> rows)
    : times_(std::move(times)), rows_(std::move(rows)) {
  if (times_.empty() || times_.size() != rows_.size()) {
    throw DomainError("kappa table needs one row per time");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].empty() || rows_[i].size() != rows_[0].size()) {
      throw DomainError("kappa table rows must share a nonzero length");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DomainError("kappa table times must be strictly increasing");
    }
  }
}

std::size_t KappaSchedule::degree() const noexcept {
  return rows_.empty() ? 0 : rows_.front().size() - 1;
}

std::vector<double> KappaSchedule::at(double t) const {
  if (rows_.empty()) return {0.0};
  if (times_.empty() || t <= times_.front()) return rows_.front();
  if (t >= times_.back()) return rows_.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  std::vector<double> out(rows_[lo].size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = (1.0 - w) * rows_[lo][j] + w * rows_[hi][j];
  }
  return out;
}

GlRhs::GlRhs(const ModeLattice& lattice, int degree, double variance)
    : lattice_(lattice),
      degree_(degree),
      variance_(variance),
      grid_(lattice.dim(),
            dealiased_grid_size(std::max(degree, 1), lattice.cutoff())) {
  if (degree < 0) throw DomainError("GL degree must be >= 0");
  if (!(variance >= 0.0)) throw DomainError("variance must be >= 0");
  y_.resize(grid_.grid_size());
  f_.resize(grid_.grid_size());
  wick_.assign(degree_ + 1, std::vector<double>(grid_.grid_size()));
  std::fill(wick_[0].begin(), wick_[0].end(), 1.0);
}

void GlRhs::evaluate(const std::vector<double>& kappa, const SpectralField& y,
                     const SpectralField& v, SpectralField& out) {
  if (!(y.lattice() == lattice_) || !(v.lattice() == lattice_)) {
    throw DomainError("GL fields live on a different lattice");
  }
  grid_.synthesize(y, y_);
  if (degree_ >= 1) {
    grid_.synthesize(v, wick_[1]);
    for (int j = 1; j < degree_; ++j) {
      const auto& a = wick_[j];
      const auto& b = wick_[j - 1];
      auto& c = wick_[j + 1];
      for (std::size_t p = 0; p < c.size(); ++p) {
        c[p] = a[p] * wick_[1][p] - j * variance_ * b[p];
      }
    }
  }
  combine(kappa, out);
}

void GlRhs::evaluate(const std::vector<double>& kappa, const SpectralField& y,
                     const std::vector<SpectralField>& wick,
                     SpectralField& out) {
  if (!(y.lattice() == lattice_)) {
    throw DomainError("GL fields live on a different lattice");
  }
  if (wick.size() < static_cast<std::size_t>(degree_)) {
    throw DomainError(
        fmt::format("need Wick powers up to {}, got {}", degree_, wick.size()));
  }
  for (int j = 1; j <= degree_; ++j) {
    if (wick[j - 1].lattice().dim() != lattice_.dim()) {
      throw DomainError("Wick power lives on a lattice of another dimension");
    }
  }
  grid_.synthesize(y, y_);
  for (int j = 1; j <= degree_; ++j) grid_.synthesize(wick[j - 1], wick_[j]);
  combine(kappa, out);
}

void GlRhs::combine(const std::vector<double>& kappa, SpectralField& out) {
  if (kappa.size() != static_cast<std::size_t>(degree_) + 1) {
    throw DomainError(fmt::format("kappa has {} coefficients, expected {}",
                                  kappa.size(), degree_ + 1));
  }
  // binom[w][k]
  std::vector<std::vector<double>> binom(degree_ + 1);
  for (int w = 0; w <= degree_; ++w) {
    binom[w].assign(w + 1, 1.0);
    for (int k = 1; k < w; ++k) binom[w][k] = binom[w - 1][k - 1] + binom[w - 1][k];
  }
  std::vector<double> coef(kappa);
  if (degree_ >= 1) coef[1] += 1.0;
  std::vector<double> ypow(degree_ + 1);
  for (std::size_t p = 0; p < f_.size(); ++p) {
    ypow[0] = 1.0;
    for (int k = 1; k <= degree_; ++k) ypow[k] = ypow[k - 1] * y_[p];
    double total = 0.0;
    for (int w = 0; w <= degree_; ++w) {
      if (coef[w] == 0.0) continue;
      double s = 0.0;
      for (int k = 0; k <= w; ++k) s += binom[w][k] * ypow[k] * wick_[w - k][p];
      total += coef[w] * s;
    }
    f_[p] = total;
  }
  if (!(out.lattice() == lattice_)) out = SpectralField(lattice_);
  grid_.analyze(f_, out);
}

SpectralField gl2d_rhs(double t, const SpectralField& y,
                       const std::vector<SpectralField>& wick,
                       const KappaSchedule& kappa) {
  const int n = static_cast<int>(kappa.degree());
  GlRhs rhs(y.lattice(), n, 0.0);
  SpectralField out(y.lattice());
  rhs.evaluate(kappa.at(t), y, wick, out);
  return out;
}

SpectralField gl3d_rhs(double t, const SpectralField& y, const SpectralField& v,
                       const SpectralField& v2_wick, double kappa0,
                       double kappa1, double kappa2) {
  if (!(v.lattice() == y.lattice())) {
    throw DomainError("V lives on a different lattice than y");
  }
  return gl2d_rhs(t, y, {v, v2_wick},
                  KappaSchedule(std::vector<double>{kappa0, kappa1, kappa2}));
}

CutoffProfile gl_profile(const GlConfig& config) {
  const ModeLattice lat(config.dim, config.cutoff);
  if (!config.noise) return CutoffProfile::zero(lat);
  const double radius =
      config.profile_radius > 0.0 ? config.profile_radius : config.cutoff;
  return make_profile(config.profile, lat, radius);
}

GlSolution solve_gl(const GlConfig& config, const SpectralField& xi) {
  if (config.dim != 2 && config.dim != 3) {
    throw DomainError("GL driver supports d = 2 or d = 3");
  }
  if (config.cutoff < 1) throw DomainError("cutoff must be >= 1");
  if (!(config.dt > 0.0)) throw DomainError("time step must be > 0");
  if (!(config.t_end > config.t0)) throw DomainError("need t_end > t0");
  if (!(config.blowup_threshold > 0.0)) {
    throw DomainError("blow-up threshold must be > 0");
  }
  if (config.snapshot_stride < 1) throw DomainError("stride must be >= 1");
  const ModeLattice lat(config.dim, config.cutoff);
  if (!(xi.lattice() == lat)) {
    throw DomainError("initial field lives on a different lattice");
  }
  const int n = static_cast<int>(config.kappa.degree());
  if (config.dim == 3 && n > 2) {
    throw DomainError("three-dimensional driver is limited to degree <= 2");
  }
  const double span = config.t_end - config.t0;
  const long steps = std::lround(span / config.dt);
  if (steps < 1 || std::abs(steps * config.dt - span) > 1e-9 * span) {
    throw DomainError("t_end - t0 must be a whole number of steps");
  }

  GlSolution sol;
  const double eta = config.eta;
  if (config.dim == 2 && n >= 2 && !(eta > -2.0 / n && eta < 0.0)) {
    sol.warnings.push_back(
        fmt::format("eta = {} outside (-2/n, 0) for n = {}", eta, n));
  }
  if (config.dim == 3 && !(eta > -1.0 && eta < -0.5)) {
    sol.warnings.push_back(fmt::format("eta = {} outside (-1, -1/2)", eta));
  }
  sol.r0 = eta / 2.0;
  sol.r1 = (config.dim == 2 ? 1.0 : 0.5) - config.eps_prime;
  sol.trace_exponents = config.trace_exponents;
  sol.traces.assign(config.trace_exponents.size(), 0.0);

  const CutoffProfile phi = gl_profile(config);
  sol.variance = field_variance(phi);
  OUState ou = stationary_sample(phi, config.seed, config.trajectory);
  SpectralField v = ou.v;
  const OuPropagator prop(phi, config.dt, config.refinement_level);
  const CounterRng rng(config.seed, config.trajectory);
  GlRhs rhs(lat, n, sol.variance);
  const int n_grid = config.grid_points > 0 ? config.grid_points
                                            : fft_friendly_size(lat.side());
  SpectralGrid& norm_grid = thread_grid(lat.dim(), n_grid);

  std::vector<double> decay(lat.size()), phi1(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double lam = lat.lambda(i);
    decay[i] = std::exp(-lam * config.dt);
    phi1[i] = -std::expm1(-lam * config.dt) / lam;
  }

  SpectralField y = xi - v;
  SpectralField f(lat);
  auto record = [&](double t, const SpectralField& yy, const SpectralField& vv,
                    bool sentinel) {
    sol.times.push_back(t);
    if (sentinel) {
      sol.y.push_back(infinity_sentinel(lat));
      sol.x.push_back(infinity_sentinel(lat));
      sol.node_norms.emplace_back(config.trace_exponents.size(),
                                  std::numeric_limits<double>::infinity());
      return;
    }
    sol.y.push_back(yy);
    sol.x.push_back(yy + vv);
    std::vector<double> norms;
    for (double r : config.trace_exponents) {
      norms.push_back(holder_norm(yy, r, norm_grid));
    }
    sol.node_norms.push_back(std::move(norms));
  };
  record(config.t0, y, v, false);

  for (long k = 0; k < steps; ++k) {
    const double t = config.t0 + k * config.dt;
    rhs.evaluate(config.kappa.at(t), y, v, f);
    auto c = y.raw();
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = decay[i] * c[i] + phi1[i] * f[i];
    }
    prop.advance(v, rng, static_cast<std::uint64_t>(k));
    const double t_next = config.t0 + (k + 1) * config.dt;
    bool finite = true;
    for (const Complex& z : y.coefficients()) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        finite = false;
        break;
      }
    }
    if (!finite ||
        !(holder_norm(y, 2.0 * config.eps_prime, norm_grid) <=
          config.blowup_threshold)) {
      sol.blowup_time = t_next;
      for (long r = k + 1; r <= steps; ++r) {
        if (r % config.snapshot_stride == 0 || r == steps) {
          record(config.t0 + r * config.dt, y, v, true);
        }
      }
      break;
    }
    const double s = t_next - config.t0;
    for (std::size_t j = 0; j < config.trace_exponents.size(); ++j) {
      const double r = config.trace_exponents[j];
      const double w = std::pow(s, (r - eta) / 2.0);
      sol.traces[j] = std::max(sol.traces[j], w * holder_norm(y, r, norm_grid));
    }
    if ((k + 1) % config.snapshot_stride == 0 || k + 1 == steps) {
      record(t_next, y, v, false);
    }
  }
  return sol;
}

}  // namespace wickgl
