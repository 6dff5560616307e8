#include "wickgl/rng.hpp"

#include <cmath>
#include <numbers>

namespace wickgl {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t trajectory,
                           std::uint64_t step, std::uint64_t slot) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ trajectory);
  h = splitmix64(h ^ step);
  return splitmix64(h ^ slot);
}

double counter_uniform(std::uint64_t seed, std::uint64_t trajectory,
                       std::uint64_t step, std::uint64_t slot) noexcept {
  const std::uint64_t bits = counter_hash(seed, trajectory, step, slot) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> counter_normal_pair(std::uint64_t seed,
                                              std::uint64_t trajectory,
                                              std::uint64_t step,
                                              std::uint64_t slot) noexcept {
  const std::uint64_t h1 = counter_hash(seed, trajectory, step, 2 * slot);
  const std::uint64_t h2 = splitmix64(h1 ^ 0x5851f42d4c957f2dULL);
  const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(h2 >> 11) + 0.5) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace wickgl
