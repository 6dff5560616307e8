#include "wickgl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wickgl/error.hpp"

namespace wickgl {

ModeLattice::ModeLattice(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("lattice dimension must be in [1, " +
                      std::to_string(kMaxDim) + "], got " +
                      std::to_string(dim));
  }
  if (cutoff < 1) {
    throw DomainError("lattice cutoff must be >= 1, got " +
                      std::to_string(cutoff));
  }
  size_ = 1;
  for (int j = 0; j < dim; ++j) size_ *= static_cast<std::size_t>(side());
}

ModeLattice build_lattice(int dim, int cutoff) {
  return ModeLattice(dim, cutoff);
}

Mode make_mode(std::span<const int> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw DomainError("mode has more than " + std::to_string(kMaxDim) +
                      " coordinates");
  }
  Mode v{};
  std::copy(coords.begin(), coords.end(), v.begin());
  return v;
}

Mode ModeLattice::mode(std::size_t index) const noexcept {
  Mode v{};
  const auto s = static_cast<std::size_t>(side());
  for (int j = dim_ - 1; j >= 0; --j) {
    v[j] = static_cast<int>(index % s) - cutoff_;
    index /= s;
  }
  return v;
}

double ModeLattice::lambda(std::size_t index) const noexcept {
  return 1.0 + norm2(index);
}

std::vector<double> ModeLattice::lambdas() const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = lambda(i);
  return out;
}

int ModeLattice::norm2(std::size_t index) const noexcept {
  const Mode v = mode(index);
  int s = 0;
  for (int j = 0; j < dim_; ++j) s += v[j] * v[j];
  return s;
}

int ModeLattice::max_norm(std::size_t index) const noexcept {
  const Mode v = mode(index);
  int m = 0;
  for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs(v[j]));
  return m;
}

bool ModeLattice::contains(const Mode& v) const noexcept {
  for (int j = 0; j < dim_; ++j) {
    if (v[j] < -cutoff_ || v[j] > cutoff_) return false;
  }
  return true;
}

std::optional<std::size_t> ModeLattice::find(const Mode& v) const noexcept {
  if (!contains(v)) return std::nullopt;
  std::size_t index = 0;
  const auto s = static_cast<std::size_t>(side());
  for (int j = 0; j < dim_; ++j) {
    index = index * s + static_cast<std::size_t>(v[j] + cutoff_);
  }
  return index;
}

std::size_t ModeLattice::index_of(const Mode& v) const {
  if (auto i = find(v)) return *i;
  throw DomainError("mode outside the lattice box |v|_inf <= " +
                    std::to_string(cutoff_));
}

SpectralField::SpectralField(ModeLattice lattice)
    : lattice_(lattice), coeffs_(lattice.size(), Complex{0.0, 0.0}) {}

SpectralField SpectralField::constant(const ModeLattice& lattice,
                                      double value) {
  SpectralField f(lattice);
  f.coeffs_[lattice.zero_index()] = value;
  return f;
}

SpectralField SpectralField::from_coefficients(const ModeLattice& lattice,
                                               std::vector<Complex> coeffs,
                                               double tolerance) {
  if (coeffs.size() != lattice.size()) {
    throw DomainError("coefficient count " + std::to_string(coeffs.size()) +
                      " does not match lattice size " +
                      std::to_string(lattice.size()));
  }
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  const double limit = tolerance * std::max(scale, 1.0);
  SpectralField f(lattice);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::size_t j = lattice.negated(i);
    if (std::abs(coeffs[i] - std::conj(coeffs[j])) > limit) {
      throw DomainError("coefficients are not Hermitian (c_{-v} != conj c_v)");
    }
    f.coeffs_[i] = 0.5 * (coeffs[i] + std::conj(coeffs[j]));
  }
  return f;
}

Complex SpectralField::at(const Mode& v) const {
  return coeffs_[lattice_.index_of(v)];
}

void SpectralField::set(std::size_t index, Complex value) {
  const std::size_t j = lattice_.negated(index);
  if (j == index) {
    if (value.imag() != 0.0) {
      throw DomainError("the zero mode of a real field must be real");
    }
    coeffs_[index] = value;
    return;
  }
  coeffs_[index] = value;
  coeffs_[j] = std::conj(value);
}

void SpectralField::scale_modes(std::span<const double> weights) {
  if (weights.size() != coeffs_.size()) {
    throw DomainError("mode weight count does not match lattice size");
  }
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] *= weights[i];
}

SpectralField SpectralField::resized(const ModeLattice& target) const {
  if (target.dim() != lattice_.dim()) {
    throw DomainError("cannot resize a field across dimensions");
  }
  SpectralField out(target);
  if (target == lattice_) {
    out.coeffs_ = coeffs_;
    return out;
  }
  const ModeLattice& small =
      target.cutoff() < lattice_.cutoff() ? target : lattice_;
  for (std::size_t i = 0; i < small.size(); ++i) {
    const Mode v = small.mode(i);
    out.coeffs_[target.index_of(v)] = coeffs_[lattice_.index_of(v)];
  }
  return out;
}

bool SpectralField::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return c == Complex{}; });
}

double SpectralField::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double SpectralField::energy() const noexcept {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

void SpectralField::require_same_lattice(const SpectralField& other) const {
  if (!(other.lattice_ == lattice_)) {
    throw DomainError("lattice mismatch between fields");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_lattice(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_lattice(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same_lattice(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    coeffs_[i] += s * other.coeffs_[i];
  }
  return *this;
}

double max_coefficient_distance(const SpectralField& a,
                                const SpectralField& b) {
  if (!(a.lattice() == b.lattice())) {
    throw DomainError("lattice mismatch between fields");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace wickgl
