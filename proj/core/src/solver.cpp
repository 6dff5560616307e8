#include "wickgl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wickgl/error.hpp"
#include "wickgl/ou.hpp"
#include "wickgl/rng.hpp"
#include "wickgl/spectral_grid.hpp"

namespace wickgl {

namespace {

int default_grid(const ModeLattice& lat, int requested) {
  return requested > 0 ? requested : fft_friendly_size(lat.side());
}

bool all_finite(const SpectralField& f) {
  for (const Complex& c : f.coefficients()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

struct ModeWeights {
  std::vector<double> decay, c0, c1, phi1;
};

ModeWeights mode_weights(const ModeLattice& lat, double h) {
  ModeWeights w;
  w.decay.resize(lat.size());
  w.c0.resize(lat.size());
  w.c1.resize(lat.size());
  w.phi1.resize(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double lam = lat.lambda(i);
    w.decay[i] = std::exp(-lam * h);
    std::tie(w.c0[i], w.c1[i]) = exp_trapezoid_weights(lam, h);
    w.phi1[i] = -std::expm1(-lam * h) / lam;
  }
  return w;
}

}  // namespace

void NonlinearitySpec::evaluate(double t, const SpectralField& y,
                                SpectralField& out) const {
  out = SpectralField(y.lattice());
  if (terms.empty()) return;
  SpectralField tmp(y.lattice());
  for (const FieldMap& term : terms) {
    term(t, y, tmp);
    out += tmp;
  }
}

std::optional<std::string> NonlinearitySpec::hypothesis_violation() const {
  if (exponents.size() != terms.size()) {
    return "exponent list and term list differ in length";
  }
  if (exponents.empty()) return std::nullopt;
  double min_alpha = std::numeric_limits<double>::infinity();
  double max_bg = -std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  for (const TermExponents& e : exponents) {
    if (e.delta < 0.0) return "delta must be >= 0";
    min_alpha = std::min(min_alpha, e.alpha);
    max_bg = std::max({max_bg, e.beta, e.gamma});
    worst = std::max(worst, e.gamma - std::min(e.alpha, r0) +
                                e.delta * (e.beta - r0));
  }
  if (r1 < max_bg) return "need r1 >= max(beta, gamma)";
  if (!(r1 < 1.0 + min_alpha)) return "need r1 < 1 + min(alpha)";
  if (!(worst < 1.0)) {
    return "need max_i [gamma_i - min(alpha_i, r0) + delta_i (beta_i - r0)] < 1";
  }
  return std::nullopt;
}

double NonlinearitySpec::state_exponent() const {
  double m = 0.0;
  bool any = false;
  for (const TermExponents& e : exponents) {
    const double v = std::max(e.beta, e.gamma);
    m = any ? std::max(m, v) : v;
    any = true;
  }
  return m;
}

double u_norm(const SpectralField& x, double r, int grid_points) {
  return holder_norm(x, 2.0 * r, grid_points);
}

SpectralField infinity_sentinel(const ModeLattice& lattice) {
  SpectralField f(lattice);
  for (Complex& c : f.raw()) {
    c = Complex(std::numeric_limits<double>::infinity(), 0.0);
  }
  return f;
}

bool is_infinity_sentinel(const SpectralField& field) noexcept {
  for (const Complex& c : field.coefficients()) {
    if (!std::isinf(c.real())) return false;
  }
  return field.size() > 0;
}

double fnorm_estimate(const NonlinearitySpec& f, const ModeLattice& lattice,
                      int samples, double radius, int grid_points,
                      std::uint64_t seed, const std::vector<double>& times) {
  if (samples < 2) throw DomainError("fnorm estimate needs >= 2 samples");
  if (!(radius > 0.0)) throw DomainError("fnorm estimate needs radius > 0");
  if (f.exponents.size() != f.terms.size()) {
    throw DomainError("exponent list and term list differ in length");
  }
  const int n_grid = default_grid(lattice, grid_points);
  const CounterRng rng(seed, 0);
  std::uint64_t counter = 0;
  auto random_field = [&](double norm_exponent, double scale) {
    SpectralField x(lattice);
    const std::size_t zero = lattice.zero_index();
    for (std::size_t i = zero; i < lattice.size(); ++i) {
      const auto [a, b] = rng.normal_pair(counter, i);
      const double w = 1.0 / lattice.lambda(i);
      x.set(i, i == zero ? Complex(a * w, 0.0) : Complex(a * w, b * w));
    }
    ++counter;
    const double norm = u_norm(x, norm_exponent, n_grid);
    if (norm > 0.0) x *= scale / norm;
    return x;
  };

  double best = 0.0;
  for (double t : times) {
    double total = 0.0;
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
      const TermExponents& e = f.exponents[i];
      const double s = std::max(e.beta, e.gamma);
      SpectralField out(lattice), out2(lattice);
      f.terms[i](t, SpectralField(lattice), out);
      double term = u_norm(out, e.alpha, n_grid);
      double sup = 0.0;
      for (int k = 0; k < samples; ++k) {
        const double ux = rng.uniform(counter, 1u << 20);
        const double uy = rng.uniform(counter, (1u << 20) + 1);
        const SpectralField x = random_field(s, radius * ux);
        const SpectralField y = random_field(s, radius * uy);
        const double dxy = u_norm(x - y, e.gamma, n_grid);
        if (dxy == 0.0) continue;
        f.terms[i](t, x, out);
        f.terms[i](t, y, out2);
        const double num = u_norm(out - out2, e.alpha, n_grid);
        const double px = std::pow(u_norm(x, e.beta, n_grid), e.delta);
        const double py = std::pow(u_norm(y, e.beta, n_grid), e.delta);
        sup = std::max(sup, num / ((1.0 + px + py) * dxy));
      }
      total += term + sup;
    }
    best = std::max(best, total);
  }
  return best;
}

double weighted_distance(const std::vector<double>& times,
                         const std::vector<SpectralField>& a,
                         const std::vector<SpectralField>& b, double t0,
                         double r0, double r1, int grid_points) {
  if (a.size() != times.size() || b.size() != times.size()) {
    throw DomainError("paths must share the time nodes");
  }
  double sup0 = 0.0, sup1 = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const SpectralField diff = a[j] - b[j];
    sup0 = std::max(sup0, u_norm(diff, r0, grid_points));
    const double s = times[j] - t0;
    const double w = r1 == r0 ? 1.0 : (s > 0.0 ? std::pow(s, r1 - r0) : 0.0);
    if (w > 0.0) sup1 = std::max(sup1, w * u_norm(diff, r1, grid_points));
  }
  return sup0 + sup1;
}

namespace {

// One application of the mild map on fixed nodes.
void apply_mild_map(const NonlinearitySpec& f, const ModeWeights& w,
                    const std::vector<double>& times,
                    const std::vector<SpectralField>& linear,
                    const std::vector<SpectralField>& x,
                    std::vector<SpectralField>& out) {
  const ModeLattice& lat = linear.front().lattice();
  const std::size_t m = times.size();
  out.assign(m, SpectralField(lat));
  SpectralField acc(lat), f_prev(lat), f_cur(lat);
  f.evaluate(times[0], x[0], f_prev);
  out[0] = linear[0];
  for (std::size_t j = 1; j < m; ++j) {
    f.evaluate(times[j], x[j], f_cur);
    auto a = acc.raw();
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = w.decay[i] * a[i] + w.c0[i] * f_prev[i] + w.c1[i] * f_cur[i];
    }
    out[j] = linear[j];
    out[j] += acc;
    std::swap(f_prev, f_cur);
  }
}

}  // namespace

MildSolution picard_solve(const NonlinearitySpec& f, const SpectralField& v,
                          double t0, double tau, const PicardOptions& options) {
  if (!(tau > 0.0)) throw DomainError("Picard interval must be > 0");
  if (options.nodes < 1) throw DomainError("Picard needs >= 1 interval");
  if (auto why = f.hypothesis_violation()) {
    throw DomainError("nonlinearity hypotheses violated: " + *why);
  }
  const ModeLattice& lat = v.lattice();
  const int n_grid = default_grid(lat, options.grid_points);
  const double scale_tol = options.tolerance;

  for (int halving = 0; halving <= options.max_halvings; ++halving) {
    const double interval = std::ldexp(tau, -halving);
    const double h = interval / options.nodes;
    const ModeWeights w = mode_weights(lat, h);
    std::vector<double> times(options.nodes + 1);
    std::vector<SpectralField> linear;
    linear.reserve(times.size());
    for (int j = 0; j <= options.nodes; ++j) {
      times[j] = t0 + j * h;
      SpectralField lj = v;
      std::vector<double> mult(lat.size());
      for (std::size_t i = 0; i < lat.size(); ++i) {
        mult[i] = std::exp(-lat.lambda(i) * (times[j] - t0));
      }
      lj.scale_modes(mult);
      linear.push_back(std::move(lj));
    }

    std::vector<SpectralField> x = linear, next;
    std::vector<double> dist;
    bool certified = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      apply_mild_map(f, w, times, linear, x, next);
      const double d =
          weighted_distance(times, next, x, t0, f.r0, f.r1, n_grid);
      dist.push_back(d);
      std::swap(x, next);
      if (!std::isfinite(d)) break;
      if (d <= scale_tol) {
        certified = true;
        break;
      }
      if (!certified &&
          static_cast<int>(dist.size()) == options.certificate_iterations) {
        if (dist.back() <= 0.5 * dist.front()) {
          certified = true;
        } else {
          break;
        }
      }
    }
    if (!certified) continue;

    MildSolution sol;
    apply_mild_map(f, w, times, linear, x, next);
    sol.residual = weighted_distance(times, next, x, t0, f.r0, f.r1, n_grid);
    sol.times = times;
    sol.snapshots = std::move(x);
    sol.iterate_distances = std::move(dist);
    sol.interval = interval;
    sol.halvings = halving;
    for (std::size_t j = 0; j < sol.times.size(); ++j) {
      const double s = sol.times[j] - t0;
      const double wgt =
          f.r1 == f.r0 ? 1.0 : (s > 0.0 ? std::pow(s, f.r1 - f.r0) : 0.0);
      if (wgt > 0.0) {
        sol.weighted_trace = std::max(
            sol.weighted_trace, wgt * u_norm(sol.snapshots[j], f.r1, n_grid));
      }
    }
    return sol;
  }
  throw ConvergenceError("no local contraction certificate");
}

MildSolution exp_euler_solve(const NonlinearitySpec& f, const SpectralField& v,
                             double t0, double t_end, double dt,
                             const EulerOptions& options) {
  if (!(dt > 0.0)) throw DomainError("time step must be > 0");
  if (!(t_end > t0)) throw DomainError("need t_end > t0");
  if (!(options.blowup_threshold > 0.0)) {
    throw DomainError("blow-up threshold must be > 0");
  }
  if (options.snapshot_stride < 1) throw DomainError("stride must be >= 1");
  const ModeLattice& lat = v.lattice();
  const int n_grid = default_grid(lat, options.grid_points);
  const long steps =
      std::max(1L, static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9)));
  const double h = (t_end - t0) / steps;
  const ModeWeights w = mode_weights(lat, h);
  const double proxy = f.state_exponent();

  MildSolution sol;
  sol.interval = t_end - t0;
  SpectralField y = v;
  SpectralField rhs(lat);
  auto record = [&](double t, const SpectralField& s) {
    sol.times.push_back(t);
    sol.snapshots.push_back(s);
  };
  record(t0, y);
  for (long k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    f.evaluate(t, y, rhs);
    auto c = y.raw();
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = w.decay[i] * c[i] + w.phi1[i] * rhs[i];
    }
    const double t_next = t0 + (k + 1) * h;
    const bool exploded =
        !all_finite(y) ||
        !(u_norm(y, proxy, n_grid) <= options.blowup_threshold);
    if (exploded) {
      sol.blowup_time = t_next;
      const SpectralField inf = infinity_sentinel(lat);
      for (long r = k + 1; r <= steps; ++r) {
        if (r % options.snapshot_stride == 0 || r == steps) {
          record(t0 + r * h, inf);
        }
      }
      break;
    }
    if ((k + 1) % options.snapshot_stride == 0 || k + 1 == steps) {
      record(t_next, y);
    }
  }
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    if (is_infinity_sentinel(sol.snapshots[j])) break;
    const double s = sol.times[j] - t0;
    const double wgt =
        f.r1 == f.r0 ? 1.0 : (s > 0.0 ? std::pow(s, f.r1 - f.r0) : 0.0);
    if (wgt > 0.0) {
      sol.weighted_trace = std::max(
          sol.weighted_trace, wgt * u_norm(sol.snapshots[j], f.r1, n_grid));
    }
  }
  return sol;
}

ContinuityReport continuity_probe(
    const std::function<NonlinearitySpec(double)>& f_of_eps,
    const std::function<SpectralField(double)>& v_of_eps,
    const std::vector<double>& sizes, double t0, double t_end, double dt,
    const EulerOptions& options) {
  const NonlinearitySpec f0 = f_of_eps(0.0);
  const SpectralField v0 = v_of_eps(0.0);
  const MildSolution base = exp_euler_solve(f0, v0, t0, t_end, dt, options);
  if (base.blowup_time) {
    throw DomainError("unperturbed problem blows up before t_end");
  }
  const int n_grid = default_grid(v0.lattice(), options.grid_points);
  ContinuityReport report;
  for (double eps : sizes) {
    const MildSolution run =
        exp_euler_solve(f_of_eps(eps), v_of_eps(eps), t0, t_end, dt, options);
    report.sizes.push_back(eps);
    if (run.blowup_time) {
      report.blew_up.push_back(true);
      report.distances.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    report.blew_up.push_back(false);
    report.distances.push_back(weighted_distance(
        base.times, run.snapshots, base.snapshots, t0, f0.r0, f0.r1, n_grid));
  }
  return report;
}

}  // namespace wickgl
