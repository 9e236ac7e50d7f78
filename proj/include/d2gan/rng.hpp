#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace d2gan {

// Deterministic random stream. mt19937_64 is fully specified by the standard,
// and all distribution transforms below are hand-rolled, so a given seed
// produces the same stream on every platform and standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform index in [0, n). Multiply-high map; bias is O(n / 2^64).
  std::size_t uniform_index(std::size_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
    return static_cast<std::size_t>(wide >> 64);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace d2gan
