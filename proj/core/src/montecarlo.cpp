#include "wickgl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "wickgl/error.hpp"
#include "wickgl/ou.hpp"
#include "wickgl/parallel.hpp"
#include "wickgl/wick.hpp"

namespace wickgl {

namespace {

constexpr std::size_t kBlock = 256;

long whole_steps(double span, double dt, const char* what) {
  const long s = std::lround(span / dt);
  if (s < 0 || std::abs(s * dt - span) > 1e-9 * std::max(1.0, span)) {
    throw DomainError(std::string(what) + " must be a whole number of steps");
  }
  return s;
}

Complex coefficient(const SpectralField& f, const Mode& k) {
  const auto i = f.lattice().find(k);
  return i ? f[*i] : Complex{};
}

std::vector<int> distinct(int a, int b) {
  return a == b ? std::vector<int>{a} : std::vector<int>{a, b};
}

std::size_t slot(const std::vector<int>& degs, int n) {
  return static_cast<std::size_t>(std::find(degs.begin(), degs.end(), n) -
                                  degs.begin());
}

CutoffProfile target_profile(const EstimateTarget& t) {
  const ModeLattice lat(t.dim, t.cutoff);
  const double radius = t.profile_radius > 0.0 ? t.profile_radius : t.cutoff;
  return make_profile(t.profile, lat, radius);
}

void validate(const EstimateTarget& t) {
  if (t.fixed) {
    if (!(t.fixed_stderr > 0.0)) throw DomainError("stderr must be > 0");
    return;
  }
  if (t.samples < 100) throw DomainError("need at least 100 samples");
  if (t.n1 < 0 || t.n2 < 0) throw DomainError("Wick degree must be >= 0");
  if (t.kind != WickKind::kWP) {
    if (!(t.dt > 0.0)) throw DomainError("dt must be > 0");
  }
  if (t.kind == WickKind::kWP && !(t.time.tau >= 0.0)) {
    throw DomainError("tau must be >= 0");
  }
  if (t.kind == WickKind::kAWP &&
      (t.time.t1 < t.time.t0 || t.time.t2 < t.time.t0)) {
    throw DomainError("averaged powers need t1, t2 >= t0");
  }
  if (t.kind == WickKind::kCWP) {
    if (t.time.t2 < t.time.t1) throw DomainError("need t2 >= t1");
    if (!(t.burn_in >= 0.0)) throw DomainError("burn-in must be >= 0");
  }
}

// Per-thread sampling workspace for one target.
class Sampler {
 public:
  explicit Sampler(const EstimateTarget& t)
      : t_(t), phi_(target_profile(t)), degs_(distinct(t.n1, t.n2)) {
    const double var = field_variance(phi_);
    switch (t.kind) {
      case WickKind::kWP:
        kernel_.emplace(phi_.lattice(), var, degs_);
        if (t.time.tau > 0.0) prop_.emplace(phi_, t.time.tau);
        break;
      case WickKind::kAWP:
        stepper_.emplace(phi_, t.dt, degs_, std::vector<int>{});
        break;
      case WickKind::kCWP:
        stepper_.emplace(phi_, t.dt, std::vector<int>{}, degs_);
        break;
    }
  }

  Complex sample(std::uint64_t trajectory) {
    OUState s = stationary_sample(phi_, t_.seed, trajectory);
    switch (t_.kind) {
      case WickKind::kWP: {
        kernel_->evaluate(s.v, out_);
        const Complex a = coefficient(out_[slot(degs_, t_.n1)], t_.k1);
        if (prop_) prop_->advance(s.v, CounterRng(t_.seed, trajectory), 0);
        kernel_->evaluate(s.v, out_);
        const Complex b = coefficient(out_[slot(degs_, t_.n2)], t_.k2);
        return std::conj(a) * b;
      }
      case WickKind::kAWP: {
        attach_accumulators(s, degs_, {});
        const long s1 = whole_steps(t_.time.t1 - t_.time.t0, t_.dt, "t1 - t0");
        const long s2 = whole_steps(t_.time.t2 - t_.time.t0, t_.dt, "t2 - t0");
        Complex a, b;
        const long last = std::max(s1, s2);
        for (long k = 0; k <= last; ++k) {
          if (k == s1) a = coefficient(s.awp[slot(degs_, t_.n1)], t_.k1);
          if (k == s2) b = coefficient(s.awp[slot(degs_, t_.n2)], t_.k2);
          if (k < last) stepper_->step(s);
        }
        return std::conj(a) * b;
      }
      case WickKind::kCWP: {
        attach_accumulators(s, {}, degs_);
        const long burn = whole_steps(t_.burn_in, t_.dt, "burn-in");
        const long lag = whole_steps(t_.time.t2 - t_.time.t1, t_.dt, "t2 - t1");
        for (long k = 0; k < burn; ++k) stepper_->step(s);
        const Complex a = coefficient(s.cwp[slot(degs_, t_.n1)], t_.k1);
        for (long k = 0; k < lag; ++k) stepper_->step(s);
        const Complex b = coefficient(s.cwp[slot(degs_, t_.n2)], t_.k2);
        return std::conj(a) * b;
      }
    }
    return {};
  }

 private:
  const EstimateTarget& t_;
  CutoffProfile phi_;
  std::vector<int> degs_;
  std::optional<WickPowerKernel> kernel_;
  std::optional<OuPropagator> prop_;
  std::optional<OuStepper> stepper_;
  std::vector<SpectralField> out_;
};

// Count, mean and sum of squared deviations, merged in a fixed order.
struct Moments {
  double n = 0.0;
  Complex mean{};
  double m2_re = 0.0;
  double m2_im = 0.0;

  void add(Complex x) {
    n += 1.0;
    const Complex delta = x - mean;
    mean += delta / n;
    const Complex delta2 = x - mean;
    m2_re += delta.real() * delta2.real();
    m2_im += delta.imag() * delta2.imag();
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const Complex delta = o.mean - mean;
    m2_re += o.m2_re + delta.real() * delta.real() * n * o.n / total;
    m2_im += o.m2_im + delta.imag() * delta.imag() * n * o.n / total;
    mean += delta * (o.n / total);
    n = total;
  }
};

std::optional<Complex> oracle_value(const EstimateTarget& t,
                                    const CutoffProfile& phi) {
  if (!regime_exists(t.kind, t.n1, t.dim) ||
      !regime_exists(t.kind, t.n2, t.dim)) {
    return std::nullopt;
  }
  switch (t.kind) {
    case WickKind::kWP:
      return correlation_wick(t.dim, t.cutoff, phi, phi, t.n1, t.n2, t.k1,
                              t.k2, t.time.tau);
    case WickKind::kAWP:
      return Complex(correlation_awp(t.dim, t.cutoff, phi, phi, t.n1, t.n2,
                                     t.k1, t.k2, t.time.t0, t.time.t1,
                                     t.time.t2));
    case WickKind::kCWP:
      return Complex(correlation_cwp(t.dim, t.cutoff, phi, phi, t.n1, t.n2,
                                     t.k1, t.k2, t.time.t1, t.time.t2));
  }
  return std::nullopt;
}

void judge(EstimateReport& r, double bias_relative, double bias_absolute) {
  r.std_error = std::hypot(r.stderr_re, r.stderr_im);
  if (!r.oracle) {
    r.note = "no oracle, trend mode";
    r.passed = true;
    return;
  }
  const double gap = std::abs(r.estimate - *r.oracle);
  r.bias_budget = bias_relative * std::abs(*r.oracle) + bias_absolute;
  if (r.std_error > 0.0) {
    r.zscore = gap / r.std_error;
  } else {
    r.zscore = gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.passed = gap <= r.z_max * r.std_error + r.bias_budget;
}

}  // namespace

Complex wick_correlation_sample(const EstimateTarget& target,
                                std::uint64_t trajectory) {
  validate(target);
  if (target.fixed) return target.fixed_estimate;
  Sampler sampler(target);
  return sampler.sample(trajectory);
}

EstimateReport estimate_wick_correlation(const EstimateTarget& target,
                                         int threads) {
  validate(target);
  EstimateReport r;
  r.target = target.name;
  r.z_max = target.z_max;
  if (target.fixed) {
    r.kind = "fixed";
    r.samples = target.samples;
    r.estimate = target.fixed_estimate;
    r.stderr_re = target.fixed_stderr;
    r.oracle = Complex(target.fixed_oracle);
    judge(r, 0.0, target.bias_absolute);
    return r;
  }
  r.kind = to_string(target.kind);
  r.samples = target.samples;
  const std::size_t blocks = (target.samples + kBlock - 1) / kBlock;
  std::vector<Moments> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    Sampler sampler(target);
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(target.samples, lo + kBlock);
    Moments m;
    for (std::size_t i = lo; i < hi; ++i) m.add(sampler.sample(i));
    partial[b] = m;
  });
  Moments total;
  for (const Moments& m : partial) total.merge(m);
  const double n = total.n;
  r.estimate = total.mean;
  r.stderr_re = std::sqrt(total.m2_re / (n - 1.0) / n);
  r.stderr_im = std::sqrt(total.m2_im / (n - 1.0) / n);
  r.oracle = oracle_value(target, target_profile(target));
  const double rel = target.bias_relative >= 0.0
                         ? target.bias_relative
                         : (target.kind == WickKind::kWP ? 0.0 : 0.01);
  judge(r, rel, target.bias_absolute);
  return r;
}

std::vector<EstimateReport> run_ensemble(const EnsembleSpec& spec,
                                         int threads) {
  std::vector<EstimateReport> out;
  out.reserve(spec.targets.size());
  for (const EstimateTarget& t : spec.targets) {
    out.push_back(estimate_wick_correlation(t, threads));
  }
  return out;
}

int ensemble_exit_status(const std::vector<EstimateReport>& reports) {
  for (const EstimateReport& r : reports) {
    if (!r.passed) return 1;
  }
  return 0;
}

}  // namespace wickgl
