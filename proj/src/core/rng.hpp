#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace survkit {

// Seeded random stream with hand-rolled distributions. The standard library
// distributions are implementation-defined, so drawing through them would tie
// generated datasets to one libstdc++ version; everything here is pinned to
// the mt19937_64 bit stream and stays reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  // Uniform integer in [lo, hi] inclusive.
  int range_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Standard normal via Box-Muller. Consumes two uniforms per draw.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Exponential with the given rate; strictly positive.
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Fisher-Yates, deterministic for a fixed stream.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace survkit
