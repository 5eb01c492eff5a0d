// Counter-based pseudo-random generator. Every draw is a pure function of
// (seed, stream, counter), so parallel tasks keyed by stream index produce
// identical results regardless of execution order.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace busemann {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(detail::splitmix64(seed ^ detail::splitmix64(stream * 0xda942042e4dd58b5ULL))) {}

  std::uint64_t next_u64() {
    return detail::splitmix64(key_ + counter_++ * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform direction on the unit sphere of R^4.
  std::array<double, 4> unit4() {
    std::array<double, 4> v{};
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (auto& x : v) {
        x = normal();
        n2 += x * x;
      }
    } while (n2 < 1e-300);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : v) x *= inv;
    return v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace busemann
