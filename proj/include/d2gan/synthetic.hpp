#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "d2gan/rng.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// 2D benchmark density: 8 equally weighted isotropic Gaussians with
// variance 0.02, means on the circle of radius 2 centered at the origin.
struct GaussianMixture {
  static constexpr std::size_t component_count = 8;
  double radius = 2.0;
  double variance = 0.02;

  std::array<std::array<double, 2>, component_count> means() const {
    std::array<std::array<double, 2>, component_count> m{};
    for (std::size_t k = 0; k < component_count; ++k) {
      const double angle = 2.0 * kPi * static_cast<double>(k) /
                           static_cast<double>(component_count);
      m[k] = {radius * std::cos(angle), radius * std::sin(angle)};
    }
    return m;
  }

  double sigma() const { return std::sqrt(variance); }

  // Exact mixture density, positive everywhere.
  double density(double x, double y) const {
    const auto mu = means();
    const double norm = 1.0 / (2.0 * kPi * variance);
    double acc = 0.0;
    for (const auto& m : mu) {
      const double dx = x - m[0], dy = y - m[1];
      acc += std::exp(-(dx * dx + dy * dy) / (2.0 * variance));
    }
    return acc * norm / static_cast<double>(component_count);
  }

  // n i.i.d. draws: uniform component index, then isotropic Gaussian noise.
  Tensor sample(std::size_t n, SeededRng& rng) const {
    const auto mu = means();
    const double sd = sigma();
    Tensor out = Tensor::matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rng.uniform_index(component_count);
      out(i, 0) = mu[k][0] + sd * rng.normal();
      out(i, 1) = mu[k][1] + sd * rng.normal();
    }
    return out;
  }
};

inline Tensor sample_ring(std::size_t n, SeededRng& rng) {
  return GaussianMixture{}.sample(n, rng);
}

inline std::vector<std::array<double, 2>> ring_centroids() {
  const auto mu = GaussianMixture{}.means();
  return {mu.begin(), mu.end()};
}

inline double ring_density(double x, double y) {
  return GaussianMixture{}.density(x, y);
}

enum class NoiseKind { gaussian, uniform };

// Noise prior draws: i.i.d. standard normal entries, or uniform(-1, 1)
// behind the config switch.
inline Tensor sample_noise(std::size_t n, std::size_t dim, SeededRng& rng,
                           NoiseKind kind = NoiseKind::gaussian) {
  Tensor out = Tensor::matrix(n, dim);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = kind == NoiseKind::gaussian ? rng.normal() : rng.uniform(-1.0, 1.0);
  return out;
}

}  // namespace d2gan
