#include "wickgl/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "wickgl/error.hpp"

namespace wickgl {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;   // r2c
  fftw_plan backward = nullptr;  // c2r
};

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair shared_plans(int dim, int n) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find({dim, n});
  if (it != cache.end()) return it->second;

  std::vector<int> dims(dim, n);
  std::size_t real_total = 1;
  for (int j = 0; j < dim; ++j) real_total *= n;
  const std::size_t half_total = real_total / n * (n / 2 + 1);
  double* in = fftw_alloc_real(real_total);
  fftw_complex* out = fftw_alloc_complex(half_total);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c(dim, dims.data(), in, out, flags);
  p.backward = fftw_plan_dft_c2r(dim, dims.data(), out, in,
                                 flags | FFTW_DESTROY_INPUT);
  fftw_free(in);
  fftw_free(out);
  if (p.forward == nullptr || p.backward == nullptr) {
    throw DomainError("FFT planner failed for d=" + std::to_string(dim) +
                      ", N=" + std::to_string(n));
  }
  cache.emplace(std::make_pair(dim, n), p);
  return p;
}

bool is_smooth_235(int n) {
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

int fft_friendly_size(int n) {
  if (n < 1) n = 1;
  while (!is_smooth_235(n)) ++n;
  return n;
}

int dealiased_grid_size(int degree, int cutoff) {
  return fft_friendly_size(2 * degree * cutoff + 1);
}

struct SpectralGrid::Impl {
  PlanPair plans;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::size_t half_total = 0;
  // Offsets of lattice modes into the half spectrum; -1 for v_d < 0, whose
  // coefficient is the conjugate of the one stored for -v.
  int mapped_cutoff = -1;
  std::vector<std::ptrdiff_t> offsets;

  ~Impl() {
    fftw_free(real);
    fftw_free(spec);
  }

  void map_lattice(const ModeLattice& lat, int n) {
    if (mapped_cutoff == lat.cutoff()) return;
    const int d = lat.dim();
    const int half = n / 2 + 1;
    offsets.assign(lat.size(), -1);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const Mode v = lat.mode(i);
      if (v[d - 1] < 0) continue;
      std::ptrdiff_t off = 0;
      for (int j = 0; j < d - 1; ++j) {
        off = off * n + ((v[j] % n) + n) % n;
      }
      off = off * half + v[d - 1];
      offsets[i] = off;
    }
    mapped_cutoff = lat.cutoff();
  }
};

SpectralGrid::SpectralGrid(int dim, int points_per_axis)
    : dim_(dim), n_(points_per_axis), total_(1) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("grid dimension must be in [1, 6]");
  }
  if (points_per_axis < 1) throw DomainError("grid size must be >= 1");
  for (int j = 0; j < dim; ++j) total_ *= static_cast<std::size_t>(n_);
  impl_ = std::make_unique<Impl>();
  impl_->plans = shared_plans(dim, n_);
  impl_->half_total = total_ / n_ * (n_ / 2 + 1);
  impl_->real = fftw_alloc_real(total_);
  impl_->spec = fftw_alloc_complex(impl_->half_total);
}

SpectralGrid::~SpectralGrid() = default;
SpectralGrid::SpectralGrid(SpectralGrid&&) noexcept = default;
SpectralGrid& SpectralGrid::operator=(SpectralGrid&&) noexcept = default;

void SpectralGrid::synthesize(const SpectralField& field,
                              std::span<double> out) {
  const ModeLattice& lat = field.lattice();
  if (lat.dim() != dim_) throw DomainError("grid/field dimension mismatch");
  if (n_ < lat.side()) {
    throw DomainError("undersampled: grid N=" + std::to_string(n_) +
                      " < 2K+1=" + std::to_string(lat.side()));
  }
  if (out.size() != total_) throw DomainError("output grid has wrong size");
  Impl& im = *impl_;
  im.map_lattice(lat, n_);
  std::fill(im.spec[0], im.spec[0] + 2 * im.half_total, 0.0);
  const auto coeffs = field.coefficients();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::ptrdiff_t off = im.offsets[i];
    if (off < 0) continue;
    im.spec[off][0] = coeffs[i].real();
    im.spec[off][1] = coeffs[i].imag();
  }
  fftw_execute_dft_c2r(im.plans.backward, im.spec, out.data());
}

std::vector<double> SpectralGrid::synthesize(const SpectralField& field) {
  std::vector<double> out(total_);
  synthesize(field, out);
  return out;
}

void SpectralGrid::analyze(std::span<const double> values,
                           SpectralField& target) {
  const ModeLattice& lat = target.lattice();
  if (lat.dim() != dim_) throw DomainError("grid/field dimension mismatch");
  if (n_ < lat.side()) {
    throw DomainError("undersampled: grid N=" + std::to_string(n_) +
                      " < 2K+1=" + std::to_string(lat.side()));
  }
  if (values.size() != total_) throw DomainError("input grid has wrong size");
  Impl& im = *impl_;
  im.map_lattice(lat, n_);
  // r2c with FFTW_UNALIGNED leaves the input intact, but the API takes a
  // non-const pointer.
  std::copy(values.begin(), values.end(), im.real);
  fftw_execute_dft_r2c(im.plans.forward, im.real, im.spec);
  const double scale = 1.0 / static_cast<double>(total_);
  auto raw = target.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::ptrdiff_t off = im.offsets[i];
    if (off < 0) continue;
    const Complex c(im.spec[off][0] * scale, im.spec[off][1] * scale);
    raw[i] = c;
    raw[lat.negated(i)] = std::conj(c);
  }
  // The zero mode of a real signal has zero imaginary part up to rounding.
  raw[lat.zero_index()] = raw[lat.zero_index()].real();
}

SpectralField SpectralGrid::analyze(std::span<const double> values,
                                    const ModeLattice& target) {
  SpectralField f(target);
  analyze(values, f);
  return f;
}

SpectralGrid& thread_grid(int dim, int points_per_axis) {
  thread_local std::map<std::pair<int, int>, SpectralGrid> grids;
  auto it = grids.find({dim, points_per_axis});
  if (it == grids.end()) {
    it = grids
             .emplace(std::make_pair(dim, points_per_axis),
                      SpectralGrid(dim, points_per_axis))
             .first;
  }
  return it->second;
}

std::vector<double> synthesize(const SpectralField& field,
                               int points_per_axis) {
  return thread_grid(field.lattice().dim(), points_per_axis)
      .synthesize(field);
}

SpectralField analyze(std::span<const double> values, int dim,
                      int points_per_axis, const ModeLattice& target) {
  return thread_grid(dim, points_per_axis).analyze(values, target);
}

SpectralField apply_fractional_power(const SpectralField& field, double r) {
  SpectralField out = field;
  if (r == 0.0) return out;
  const ModeLattice& lat = field.lattice();
  auto raw = out.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] *= std::pow(lat.lambda(i), 0.5 * r);
  }
  return out;
}

double holder_norm(const SpectralField& field, double r, SpectralGrid& grid) {
  const SpectralField w = apply_fractional_power(field, r);
  const std::vector<double> values = grid.synthesize(w);
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double holder_norm(const SpectralField& field, double r, int points_per_axis) {
  return holder_norm(field, r,
                     thread_grid(field.lattice().dim(), points_per_axis));
}

SpectralField pointwise_power(const SpectralField& field, int n) {
  if (n < 1) throw DomainError("pointwise power degree must be >= 1");
  if (n == 1) return field;
  const ModeLattice& lat = field.lattice();
  const ModeLattice target(lat.dim(), n * lat.cutoff());
  SpectralGrid& grid =
      thread_grid(lat.dim(), dealiased_grid_size(n, lat.cutoff()));
  std::vector<double> values = grid.synthesize(field);
  for (double& x : values) {
    double p = x;
    for (int k = 1; k < n; ++k) p *= x;
    x = p;
  }
  return grid.analyze(values, target);
}

SpectralField pointwise_product(const SpectralField& u,
                                const SpectralField& w) {
  if (u.lattice().dim() != w.lattice().dim()) {
    throw DomainError("product of fields of different dimension");
  }
  const int d = u.lattice().dim();
  const int kt = u.lattice().cutoff() + w.lattice().cutoff();
  const ModeLattice target(d, kt);
  SpectralGrid& grid = thread_grid(d, fft_friendly_size(2 * kt + 1));
  const std::vector<double> a = grid.synthesize(u);
  std::vector<double> b = grid.synthesize(w);
  for (std::size_t j = 0; j < b.size(); ++j) b[j] *= a[j];
  return grid.analyze(b, target);
}

double product_norm_ratio(const SpectralField& u, const SpectralField& w,
                          double alpha, double beta, double gamma,
                          int points_per_axis) {
  if (!(alpha + beta > 0.0)) throw DomainError("need alpha + beta > 0");
  if (!(gamma < std::min(alpha, beta))) {
    throw DomainError("need gamma < min(alpha, beta)");
  }
  const int needed = 2 * (u.lattice().cutoff() + w.lattice().cutoff()) + 1;
  if (points_per_axis < needed) {
    throw DomainError("undersampled: product needs N >= " +
                      std::to_string(needed));
  }
  const double nu = holder_norm(u, alpha, points_per_axis);
  const double nw = holder_norm(w, beta, points_per_axis);
  if (nu == 0.0 || nw == 0.0) throw DomainError("zero factor");
  const SpectralField prod = pointwise_product(u, w);
  return holder_norm(prod, gamma, points_per_axis) / (nu * nw);
}

}  // namespace wickgl
