#pragma once

#include <cmath>
#include <cstdint>

namespace recomb {

// Keyed pseudo-random streams built on the SplitMix64 finalizer. A stream is
// derived from (seed, unit, purpose), so independent work units (simulation
// categories, test replications) draw from disjoint streams and results do
// not depend on scheduling or thread count.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

enum class Purpose : std::uint64_t {
  category_size = 1,
  agent_knowledge = 2,
  value_noise = 3,
  cost_noise = 4,
  generic = 100,
};

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t unit, Purpose purpose)
      : state_(mix64(mix64(seed ^ mix64(unit + 1)) ^
                     (static_cast<std::uint64_t>(purpose) * 0xda942042e4dd58b5ull))) {}

  explicit Stream(std::uint64_t seed) : state_(mix64(seed)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1); redraws the measure-zero exact 0.
  double uniform_open01() {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return u;
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; the spare deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform_open01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Pareto(scale, shape) by inverse CDF: scale / U^(1/shape), U in (0,1).
  double pareto(double scale, double shape) {
    return scale / std::pow(uniform_open01(), 1.0 / shape);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rng
}  // namespace recomb
