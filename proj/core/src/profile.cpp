#include <cmath>
#include <string>

#include "wickgl/error.hpp"
#include "wickgl/lattice.hpp"

namespace wickgl {

CutoffProfile::CutoffProfile(ModeLattice lattice, std::vector<double> values)
    : lattice_(lattice), values_(std::move(values)) {
  if (values_.size() != lattice_.size()) {
    throw DomainError("profile size does not match lattice size");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double p = values_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("profile values must lie in [0, 1]");
    }
    if (p != values_[lattice_.negated(i)]) {
      throw DomainError("profile must satisfy phi_v = phi_{-v}");
    }
  }
}

CutoffProfile CutoffProfile::sharp_box(const ModeLattice& lattice,
                                       int radius) {
  std::vector<double> v(lattice.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = lattice.max_norm(i) <= radius ? 1.0 : 0.0;
  }
  return CutoffProfile(lattice, std::move(v));
}

CutoffProfile CutoffProfile::sharp_ball(const ModeLattice& lattice,
                                        double radius) {
  std::vector<double> v(lattice.size());
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = lattice.norm2(i) <= r2 ? 1.0 : 0.0;
  }
  return CutoffProfile(lattice, std::move(v));
}

CutoffProfile CutoffProfile::smooth(const ModeLattice& lattice,
                                    double radius) {
  if (!(radius > 0.0)) throw DomainError("smooth profile radius must be > 0");
  std::vector<double> v(lattice.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::exp(-lattice.norm2(i) / (radius * radius));
  }
  return CutoffProfile(lattice, std::move(v));
}

CutoffProfile CutoffProfile::zero(const ModeLattice& lattice) {
  return CutoffProfile(lattice, std::vector<double>(lattice.size(), 0.0));
}

CutoffProfile CutoffProfile::on(const ModeLattice& target) const {
  if (target.dim() != lattice_.dim()) {
    throw DomainError("cannot move a profile across dimensions");
  }
  std::vector<double> v(target.size(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (auto j = lattice_.find(target.mode(i))) v[i] = values_[*j];
  }
  return CutoffProfile(target, std::move(v));
}

ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "box") return ProfileKind::kBox;
  if (name == "ball") return ProfileKind::kBall;
  if (name == "smooth") return ProfileKind::kSmooth;
  throw DomainError("unknown cutoff profile '" + std::string(name) +
                    "' (expected box, ball or smooth)");
}

const char* to_string(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::kBox: return "box";
    case ProfileKind::kBall: return "ball";
    case ProfileKind::kSmooth: return "smooth";
  }
  return "box";
}

CutoffProfile make_profile(ProfileKind kind, const ModeLattice& lattice,
                           double radius) {
  switch (kind) {
    case ProfileKind::kBox:
      return CutoffProfile::sharp_box(lattice,
                                      static_cast<int>(std::floor(radius)));
    case ProfileKind::kBall: return CutoffProfile::sharp_ball(lattice, radius);
    case ProfileKind::kSmooth: return CutoffProfile::smooth(lattice, radius);
  }
  throw DomainError("unknown profile kind");
}

}  // namespace wickgl
