#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "wickgl/error.hpp"
#include "wickgl/oracle.hpp"
#include "wickgl/spectral_grid.hpp"

namespace wickgl {

namespace {

constexpr double kDirectBudget = 5e7;
constexpr double kShellBudget = 2e8;

int max_abs(const Mode& v, int d) {
  int m = 0;
  for (int j = 0; j < d; ++j) m = std::max(m, std::abs(v[j]));
  return m;
}

// Offsets of the modes of `from` inside the lexicographic layout of a box
// with cutoff `to_cutoff`, assuming the sum of two cutoffs fits.
std::vector<std::size_t> embed_offsets(const ModeLattice& from, int shift,
                                       int to_side) {
  std::vector<std::size_t> off(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Mode u = from.mode(i);
    std::size_t o = 0;
    for (int j = 0; j < from.dim(); ++j) {
      o = o * to_side + static_cast<std::size_t>(u[j] + shift);
    }
    off[i] = o;
  }
  return off;
}

// h = g * f with g on box(Rg), f on box(Rf), h on box(Rg + Rf).
std::vector<double> convolve_dense(const ModeLattice& lg,
                                   const std::vector<double>& g,
                                   const ModeLattice& lf,
                                   std::span<const double> f) {
  const ModeLattice lh(lg.dim(), lg.cutoff() + lf.cutoff());
  std::vector<double> h(lh.size(), 0.0);
  const auto og = embed_offsets(lg, lg.cutoff(), lh.side());
  const auto of = embed_offsets(lf, lf.cutoff(), lh.side());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double gi = g[i];
    if (gi == 0.0) continue;
    double* base = h.data() + og[i];
    for (std::size_t j = 0; j < f.size(); ++j) base[of[j]] += gi * f[j];
  }
  return h;
}

double evaluate_last(const ModeLattice& lg, const std::vector<double>& g,
                     const ModeLattice& lf, std::span<const double> f,
                     const Mode& v) {
  double s = 0.0;
  const int d = lf.dim();
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] == 0.0) continue;
    const Mode l = lf.mode(j);
    Mode u{};
    for (int k = 0; k < d; ++k) u[k] = v[k] - l[k];
    if (auto i = lg.find(u)) s += g[*i] * f[j];
  }
  return s;
}

double direct_route(const ModeLattice& lat,
                    const std::vector<std::vector<double>>& factors, int n,
                    const Mode& v) {
  auto factor = [&](int i) -> std::span<const double> {
    return factors.size() == 1 ? factors[0] : factors[i];
  };
  if (n == 1) {
    auto i = lat.find(v);
    return i ? factor(0)[*i] : 0.0;
  }
  ModeLattice lg = lat;
  std::vector<double> g(factor(0).begin(), factor(0).end());
  for (int k = 1; k < n - 1; ++k) {
    g = convolve_dense(lg, g, lat, factor(k));
    lg = ModeLattice(lat.dim(), lg.cutoff() + lat.cutoff());
  }
  return evaluate_last(lg, g, lat, factor(n - 1), v);
}

std::mutex& fft_plan_mutex() {
  static std::mutex m;
  return m;
}

// Evaluates prod of transforms at a single point via one inverse transform.
class CyclicConvolver {
 public:
  CyclicConvolver(int dim, int m) : dim_(dim), m_(m) {
    total_ = 1;
    for (int j = 0; j < dim; ++j) total_ *= static_cast<std::size_t>(m);
    half_ = total_ / m * (m / 2 + 1);
    real_ = fftw_alloc_real(total_);
    spec_ = fftw_alloc_complex(half_);
    acc_ = fftw_alloc_complex(half_);
    std::vector<int> dims(dim, m);
    std::lock_guard<std::mutex> lock(fft_plan_mutex());
    fwd_ = fftw_plan_dft_r2c(dim, dims.data(), real_, spec_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r(dim, dims.data(), acc_, real_, FFTW_ESTIMATE);
  }
  ~CyclicConvolver() {
    {
      std::lock_guard<std::mutex> lock(fft_plan_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(inv_);
    }
    fftw_free(real_);
    fftw_free(spec_);
    fftw_free(acc_);
  }
  CyclicConvolver(const CyclicConvolver&) = delete;
  CyclicConvolver& operator=(const CyclicConvolver&) = delete;

  void load(const ModeLattice& lat, std::span<const double> f) {
    std::fill(real_, real_ + total_, 0.0);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      real_[wrapped(lat.mode(i))] = f[i];
    }
    fftw_execute(fwd_);
  }
  // acc = spec^power (first) or acc *= spec^power.
  void multiply_into(int power, bool first) {
    for (std::size_t i = 0; i < half_; ++i) {
      const Complex z(spec_[i][0], spec_[i][1]);
      Complex p = 1.0;
      for (int k = 0; k < power; ++k) p *= z;
      if (!first) p *= Complex(acc_[i][0], acc_[i][1]);
      acc_[i][0] = p.real();
      acc_[i][1] = p.imag();
    }
  }
  double value_at(const Mode& v) {
    fftw_execute(inv_);
    return real_[wrapped(v)] / static_cast<double>(total_);
  }

 private:
  std::size_t wrapped(const Mode& u) const {
    std::size_t o = 0;
    for (int j = 0; j < dim_; ++j) {
      o = o * m_ + static_cast<std::size_t>(((u[j] % m_) + m_) % m_);
    }
    return o;
  }

  int dim_;
  int m_;
  std::size_t total_ = 0;
  std::size_t half_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_complex* acc_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

int cyclic_size(int n, int cutoff, const Mode& v, int d) {
  return fft_friendly_size(n * cutoff + max_abs(v, d) + 1);
}

double fft_route(const ModeLattice& lat,
                 const std::vector<std::vector<double>>& factors, int n,
                 const Mode& v) {
  const int d = lat.dim();
  CyclicConvolver conv(d, cyclic_size(n, lat.cutoff(), v, d));
  if (factors.size() == 1) {
    conv.load(lat, factors[0]);
    conv.multiply_into(n, true);
  } else {
    for (int i = 0; i < n; ++i) {
      conv.load(lat, factors[i]);
      conv.multiply_into(1, i == 0);
    }
  }
  return conv.value_at(v);
}

double direct_cost(const ModeLattice& lat, int n) {
  double cost = static_cast<double>(lat.size());
  for (int k = 1; k < n - 1; ++k) {
    cost += std::pow(2.0 * (k * lat.cutoff()) + 1.0, lat.dim()) * lat.size();
  }
  return cost;
}

double shell_cost(const ModeLattice& lat, int n) {
  const double span = 1.0 + n * lat.dim() * double(lat.cutoff()) * lat.cutoff();
  return std::pow(2.0 * ((n - 1) * lat.cutoff()) + 1.0, lat.dim()) * span *
         lat.size();
}

}  // namespace

double nfold_convolution(const ModeLattice& lattice,
                         const std::vector<std::vector<double>>& factors,
                         int n, const Mode& v, SumRoute route) {
  if (n < 1) throw DomainError("n-fold sum needs n >= 1");
  if (factors.size() != 1 && factors.size() != static_cast<std::size_t>(n)) {
    throw DomainError("need one factor array or n of them");
  }
  for (const auto& f : factors) {
    if (f.size() != lattice.size()) {
      throw DomainError("factor array does not match lattice size");
    }
  }
  if (max_abs(v, lattice.dim()) > n * lattice.cutoff()) return 0.0;
  if (route == SumRoute::kAuto) {
    route = direct_cost(lattice, n) <= kDirectBudget ? SumRoute::kDirect
                                                     : SumRoute::kFft;
  }
  switch (route) {
    case SumRoute::kDirect: return direct_route(lattice, factors, n, v);
    case SumRoute::kFft: return fft_route(lattice, factors, n, v);
    case SumRoute::kShell: {
      if (factors.size() != 1) {
        throw DomainError("shell route needs a single factor array");
      }
      double s = 0.0;
      for (const auto& [key, val] : nfold_shells(lattice, factors[0], n, v)) {
        s += val;
      }
      return s;
    }
    default:
      throw DomainError("route not available for plain n-fold sums");
  }
}

std::map<long, double> nfold_shells(const ModeLattice& lattice,
                                    std::span<const double> factor, int n,
                                    const Mode& v) {
  if (n < 1) throw DomainError("n-fold sum needs n >= 1");
  if (factor.size() != lattice.size()) {
    throw DomainError("factor array does not match lattice size");
  }
  const int d = lattice.dim();
  std::map<long, double> out;
  if (max_abs(v, d) > n * lattice.cutoff()) return out;
  std::vector<long> lam(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    lam[i] = 1 + lattice.norm2(i);
  }
  const long lam_max = *std::max_element(lam.begin(), lam.end());
  if (n == 1) {
    if (auto i = lattice.find(v)) out[lam[*i]] = factor[*i];
    return out;
  }
  // table[mode][s - j] for sums of j factors; s ranges over [j, j lam_max].
  ModeLattice lt = lattice;
  long width = lam_max;  // s - 1 in [0, lam_max - 1]
  std::vector<double> table(lattice.size() * width, 0.0);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    table[i * width + (lam[i] - 1)] = factor[i];
  }
  for (int j = 1; j < n - 1; ++j) {
    const ModeLattice ln(d, lt.cutoff() + lattice.cutoff());
    const long nwidth = (j + 1) * lam_max - j;
    std::vector<double> next(ln.size() * nwidth, 0.0);
    const auto og = embed_offsets(lt, lt.cutoff(), ln.side());
    const auto of = embed_offsets(lattice, lattice.cutoff(), ln.side());
    for (std::size_t a = 0; a < lt.size(); ++a) {
      const double* row = table.data() + a * width;
      for (std::size_t b = 0; b < lattice.size(); ++b) {
        const double fb = factor[b];
        if (fb == 0.0) continue;
        // new index s' - (j+1) = (s - j) + (lam_b - 1)
        double* dst = next.data() + (og[a] + of[b]) * nwidth + (lam[b] - 1);
        for (long s = 0; s < width; ++s) dst[s] += row[s] * fb;
      }
    }
    table = std::move(next);
    width = nwidth;
    lt = ln;
  }
  // last factor, evaluated at v only
  const long base = n - 1;  // smallest s stored in the table
  std::vector<double> acc(width + lam_max, 0.0);
  for (std::size_t b = 0; b < lattice.size(); ++b) {
    const double fb = factor[b];
    if (fb == 0.0) continue;
    const Mode l = lattice.mode(b);
    Mode u{};
    for (int k = 0; k < d; ++k) u[k] = v[k] - l[k];
    auto a = lt.find(u);
    if (!a) continue;
    const double* row = table.data() + *a * width;
    for (long s = 0; s < width; ++s) {
      if (row[s] != 0.0) acc[s + lam[b]] += row[s] * fb;
    }
  }
  for (long s = 0; s < static_cast<long>(acc.size()); ++s) {
    if (acc[s] != 0.0) out[s + base] = acc[s];
  }
  return out;
}

double nfold_resolvent_laplace(const ModeLattice& lattice,
                               std::span<const double> factor, int n,
                               const Mode& v, double c) {
  if (n < 1) throw DomainError("n-fold sum needs n >= 1");
  if (!(c > 0.0)) throw DomainError("resolvent shift must be > 0");
  const int d = lattice.dim();
  if (max_abs(v, d) > n * lattice.cutoff()) return 0.0;
  double lam_max = 1.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    lam_max = std::max(lam_max, lattice.lambda(i));
  }
  // 1/(c + S) = int_0^inf e^{-(c + S) u} du, u = e^x; below u_min the
  // integrand is replaced by its u = 0 value.
  const double u_min = 1e-7 / (c + n * lam_max);
  const double x_min = std::log(u_min);
  const double x_max = std::log(45.0 / (c + n));
  const double h = 0.2;
  CyclicConvolver conv(d, cyclic_size(n, lattice.cutoff(), v, d));
  std::vector<double> fu(lattice.size());
  auto evaluate = [&](double u) {
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      fu[i] = factor[i] * std::exp(-lattice.lambda(i) * u);
    }
    conv.load(lattice, fu);
    conv.multiply_into(n, true);
    return conv.value_at(v);
  };
  double total = u_min * evaluate(0.0);
  const int steps = static_cast<int>(std::ceil((x_max - x_min) / h));
  for (int s = 0; s <= steps; ++s) {
    const double x = x_min + s * h;
    const double u = std::exp(x);
    const double w = (s == 0 || s == steps) ? 0.5 * h : h;
    total += w * u * std::exp(-c * u) * evaluate(u);
  }
  return total;
}

double nfold_lambda_sum(int d, const Mode& v, int n,
                        std::span<const double> weights, int cutoff,
                        SumKernel kernel, SumRoute route) {
  const ModeLattice lat(d, cutoff);
  if (n < 1) throw DomainError("n-fold sum needs n >= 1");
  if (weights.size() != 1 && weights.size() != static_cast<std::size_t>(n)) {
    throw DomainError("need one exponent or n of them");
  }
  std::vector<std::vector<double>> factors;
  for (double w : weights) {
    std::vector<double> f(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      f[i] = std::pow(lat.lambda(i), -w);
    }
    factors.push_back(std::move(f));
  }
  const bool uniform =
      std::all_of(weights.begin(), weights.end(),
                  [&](double w) { return w == weights[0]; });
  if (uniform) factors.resize(1);

  if (kernel == SumKernel::kNone) {
    return nfold_convolution(lat, factors, n, v, route);
  }
  if (max_abs(v, d) > n * cutoff) return 0.0;
  const double lam_v = lambda_of(v, d);
  if (!uniform) {
    throw DomainError("kernel sums need a common exponent for all factors");
  }
  if (route == SumRoute::kAuto) {
    route = shell_cost(lat, n) <= kShellBudget ? SumRoute::kShell
                                               : SumRoute::kLaplace;
  }
  if (route == SumRoute::kShell) {
    double s = 0.0;
    for (const auto& [sum_lambda, val] : nfold_shells(lat, factors[0], n, v)) {
      s += val / (lam_v + static_cast<double>(sum_lambda));
    }
    return s;
  }
  if (route == SumRoute::kLaplace) {
    return nfold_resolvent_laplace(lat, factors[0], n, v, lam_v);
  }
  throw DomainError("route not available for kernel sums");
}

}  // namespace wickgl
