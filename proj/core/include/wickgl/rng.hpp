#pragma once

// Counter-based Gaussian source.  Every draw is a pure function of
// (seed, trajectory, step, slot), so ensembles give identical results no
// matter how trajectories are scheduled across threads.

#include <cstdint>
#include <utility>

namespace wickgl {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64 well-mixed bits for the given counter tuple.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t trajectory,
                           std::uint64_t step, std::uint64_t slot) noexcept;

/// Uniform in the open interval (0, 1), 53-bit resolution.
double counter_uniform(std::uint64_t seed, std::uint64_t trajectory,
                       std::uint64_t step, std::uint64_t slot) noexcept;

/// Two independent standard normals (Box-Muller on two counter uniforms).
std::pair<double, double> counter_normal_pair(std::uint64_t seed,
                                              std::uint64_t trajectory,
                                              std::uint64_t step,
                                              std::uint64_t slot) noexcept;

/// Stream view with a fixed (seed, trajectory) key.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trajectory) noexcept
      : seed_(seed), trajectory_(trajectory) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t trajectory() const noexcept { return trajectory_; }

  std::pair<double, double> normal_pair(std::uint64_t step,
                                        std::uint64_t slot) const noexcept {
    return counter_normal_pair(seed_, trajectory_, step, slot);
  }
  double uniform(std::uint64_t step, std::uint64_t slot) const noexcept {
    return counter_uniform(seed_, trajectory_, step, slot);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t trajectory_;
};

}  // namespace wickgl
