#pragma once

// Mode lattices on the d-dimensional torus [0, 2pi)^d and the Fourier
// coefficient fields that live on them.
//
// A ModeLattice is the box { v in Z^d : |v|_inf <= K } enumerated in
// lexicographic order on (v_1, ..., v_d), v_1 most significant.  Because the
// box is symmetric, the index of -v is size() - 1 - index(v).
//
// A SpectralField stores c_v = (2pi)^{-d} <g_v, u> with g_v(x) = exp(i<v,x>),
// so that u(x) = sum_v c_v g_v(x).  Real fields satisfy c_{-v} = conj(c_v);
// every mutator in this header keeps that symmetry.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wickgl {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 6;

/// A lattice point; only the first `dim` entries are meaningful.
using Mode = std::array<int, kMaxDim>;

class ModeLattice {
 public:
  /// Throws DomainError unless 1 <= d <= kMaxDim and K >= 1.
  ModeLattice(int dim, int cutoff);

  int dim() const noexcept { return dim_; }
  int cutoff() const noexcept { return cutoff_; }
  int side() const noexcept { return 2 * cutoff_ + 1; }
  std::size_t size() const noexcept { return size_; }

  Mode mode(std::size_t index) const noexcept;
  /// lambda_v = 1 + |v|^2
  double lambda(std::size_t index) const noexcept;
  std::vector<double> lambdas() const;

  /// Squared Euclidean norm |v|^2 of the mode at `index`.
  int norm2(std::size_t index) const noexcept;
  int max_norm(std::size_t index) const noexcept;

  bool contains(const Mode& v) const noexcept;
  /// Throws DomainError if v lies outside the box.
  std::size_t index_of(const Mode& v) const;
  std::optional<std::size_t> find(const Mode& v) const noexcept;

  std::size_t negated(std::size_t index) const noexcept {
    return size_ - 1 - index;
  }
  std::size_t zero_index() const noexcept { return (size_ - 1) / 2; }

  friend bool operator==(const ModeLattice&, const ModeLattice&) = default;

 private:
  int dim_;
  int cutoff_;
  std::size_t size_;
};

/// Validated construction; same as the ModeLattice constructor.
ModeLattice build_lattice(int dim, int cutoff);

/// Mode from a coordinate list (size must be <= kMaxDim).
Mode make_mode(std::span<const int> coords);

inline double lambda_of(const Mode& v, int dim) noexcept {
  double s = 1.0;
  for (int j = 0; j < dim; ++j) s += static_cast<double>(v[j]) * v[j];
  return s;
}

class SpectralField {
 public:
  explicit SpectralField(ModeLattice lattice);

  static SpectralField zero(const ModeLattice& lattice) {
    return SpectralField(lattice);
  }
  static SpectralField constant(const ModeLattice& lattice, double value);

  /// Accepts raw coefficients in lattice order.  Throws DomainError unless
  /// they are Hermitian to `tolerance` (absolute, scaled by max |c|); the
  /// stored field is the exact Hermitian part.
  static SpectralField from_coefficients(const ModeLattice& lattice,
                                         std::vector<Complex> coeffs,
                                         double tolerance = 1e-12);

  const ModeLattice& lattice() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex operator[](std::size_t index) const noexcept {
    return coeffs_[index];
  }
  Complex at(const Mode& v) const;
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  /// Sets c_v = value and c_{-v} = conj(value).  At v = 0 the value must be
  /// real.
  void set(std::size_t index, Complex value);
  void set(const Mode& v, Complex value) { set(lattice_.index_of(v), value); }

  /// Multiplies every c_v by the real weight m_v.  Symmetric weights keep the
  /// field Hermitian; `weights` must satisfy m_v = m_{-v}.
  void scale_modes(std::span<const double> weights);

  /// Zero-pads (larger cutoff) or projects (smaller cutoff) onto `target`.
  SpectralField resized(const ModeLattice& target) const;

  bool is_zero() const noexcept;
  double max_abs_coefficient() const noexcept;
  /// sum_v |c_v|^2
  double energy() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    return a += b;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    return a -= b;
  }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Mutable access for kernels that fill whole Hermitian arrays at once.
  /// Callers are responsible for symmetry.
  std::span<Complex> raw() noexcept { return coeffs_; }

 private:
  void require_same_lattice(const SpectralField& other) const;

  ModeLattice lattice_;
  std::vector<Complex> coeffs_;
};

double max_coefficient_distance(const SpectralField& a, const SpectralField& b);

/// Symmetric spectral multiplier phi : lattice -> [0, 1].
class CutoffProfile {
 public:
  /// Throws DomainError unless values are symmetric and within [0, 1].
  CutoffProfile(ModeLattice lattice, std::vector<double> values);

  /// 1 on |v|_inf <= radius.
  static CutoffProfile sharp_box(const ModeLattice& lattice, int radius);
  /// 1 on |v|_2 <= radius.
  static CutoffProfile sharp_ball(const ModeLattice& lattice, double radius);
  /// exp(-|v|^2 / radius^2) on the lattice box.
  static CutoffProfile smooth(const ModeLattice& lattice, double radius);
  static CutoffProfile zero(const ModeLattice& lattice);
  static CutoffProfile ones(const ModeLattice& lattice) {
    return sharp_box(lattice, lattice.cutoff());
  }

  const ModeLattice& lattice() const noexcept { return lattice_; }
  double operator[](std::size_t index) const noexcept {
    return values_[index];
  }
  std::span<const double> values() const noexcept { return values_; }

  /// Same profile re-expressed on another lattice (zero outside the old box).
  CutoffProfile on(const ModeLattice& target) const;

 private:
  ModeLattice lattice_;
  std::vector<double> values_;
};

enum class ProfileKind { kBox, kBall, kSmooth };

ProfileKind parse_profile_kind(std::string_view name);
const char* to_string(ProfileKind kind) noexcept;
CutoffProfile make_profile(ProfileKind kind, const ModeLattice& lattice,
                           double radius);

}  // namespace wickgl
