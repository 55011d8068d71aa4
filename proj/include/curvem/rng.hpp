#pragma once

#include <cmath>
#include <cstdint>

namespace curvem {

// Counter-based deterministic generator: every draw is a pure function of
// (seed, counter), so parallel consumers and reruns see identical streams
// on any platform.
struct CounterRng {
  std::uint64_t seed = 1;

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(splitmix64(seed) ^ splitmix64(counter * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL));
  }

  // uniform in [0,1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // uniform in [-1,1)
  double symmetric(std::uint64_t counter) const { return 2.0 * uniform(counter) - 1.0; }

  // standard normal via Box-Muller on two sub-counters
  double normal(std::uint64_t counter) const;
};

inline double CounterRng::normal(std::uint64_t counter) const {
  double u1 = uniform(2 * counter);
  double u2 = uniform(2 * counter + 1);
  if (u1 < 1e-300) u1 = 1e-300;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace curvem
