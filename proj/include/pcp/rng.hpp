#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pcp {

/// splitmix64 finalizer; used to turn structured coordinates into
/// well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from `seed` and a path of stream coordinates.
/// Distinct paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path);

/// Explicitly seeded random stream. There is no global randomness anywhere
/// in the library; every stochastic routine takes one of these.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  Engine& engine() noexcept { return engine_; }

  /// A fresh stream whose seed depends only on this stream's seed and
  /// `path` (not on how many numbers were drawn so far).
  Rng split(std::initializer_list<std::uint64_t> path) const {
    return Rng(derive_seed(seed_, path));
  }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  /// Uniform real in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  /// Uniform real in the open interval (0, 1).
  double uniform_positive() {
    double u = 0.0;
    while (u == 0.0) u = uniform();
    return u;
  }

 private:
  std::uint64_t seed_;
  Engine engine_;
};

}  // namespace pcp
