#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2gan/rng.hpp"
#include "d2gan/synthetic.hpp"

namespace d2gan {

// A normalized density on R^1 or R^2 with pointwise evaluation; the
// quadrature oracles integrate it over uniform midpoint grids.
struct EvaluableDensity {
  std::size_t dim = 1;
  std::function<double(const double*)> pdf;

  double operator()(double x) const { return pdf(&x); }
  double operator()(double x, double y) const {
    const double p[2] = {x, y};
    return pdf(p);
  }
};

inline EvaluableDensity gaussian_density_1d(double mean, double stddev) {
  const double inv_norm = 1.0 / (stddev * std::sqrt(2.0 * kPi));
  return {1, [=](const double* x) {
            const double z = (x[0] - mean) / stddev;
            return inv_norm * std::exp(-0.5 * z * z);
          }};
}

inline EvaluableDensity gaussian_density_2d(double mx, double my, double variance) {
  const double inv_norm = 1.0 / (2.0 * kPi * variance);
  return {2, [=](const double* x) {
            const double dx = x[0] - mx, dy = x[1] - my;
            return inv_norm * std::exp(-(dx * dx + dy * dy) / (2.0 * variance));
          }};
}

inline EvaluableDensity ring_mixture_density() {
  return {2, [](const double* x) { return ring_density(x[0], x[1]); }};
}

// Closed-form KL(N(m1,s1^2) || N(m2,s2^2)); the independent oracle for the
// quadrature-based divergences.
inline double gaussian_kl_closed_form(double m1, double s1, double m2, double s2) {
  return std::log(s2 / s1) +
         (s1 * s1 + (m1 - m2) * (m1 - m2)) / (2.0 * s2 * s2) - 0.5;
}

// Uniform midpoint-rule grid over an axis-aligned box, dim 1 or 2.
struct QuadratureGrid {
  std::vector<double> lo, hi;
  std::vector<std::size_t> cells;

  static QuadratureGrid line(double lo, double hi, std::size_t n) {
    return {{lo}, {hi}, {n}};
  }
  static QuadratureGrid box(double x_lo, double x_hi, double y_lo, double y_hi,
                            std::size_t nx, std::size_t ny) {
    return {{x_lo, y_lo}, {x_hi, y_hi}, {nx, ny}};
  }

  std::size_t dim() const { return lo.size(); }

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (std::size_t c : cells) n *= c;
    return n;
  }

  double cell_volume() const {
    double v = 1.0;
    for (std::size_t d = 0; d < dim(); ++d)
      v *= (hi[d] - lo[d]) / static_cast<double>(cells[d]);
    return v;
  }

  void validate() const {
    if (dim() == 0 || dim() > 2 || hi.size() != dim() || cells.size() != dim())
      throw std::invalid_argument("QuadratureGrid: dim must be 1 or 2");
    for (std::size_t d = 0; d < dim(); ++d)
      if (!(hi[d] > lo[d]) || cells[d] == 0)
        throw std::invalid_argument("QuadratureGrid: empty box or zero cells");
  }

  // Visit every cell midpoint.
  template <class Fn>
  void for_each_midpoint(Fn&& fn) const {
    if (dim() == 1) {
      const double step = (hi[0] - lo[0]) / static_cast<double>(cells[0]);
      for (std::size_t i = 0; i < cells[0]; ++i) {
        const double x = lo[0] + (static_cast<double>(i) + 0.5) * step;
        fn(&x);
      }
      return;
    }
    const double sx = (hi[0] - lo[0]) / static_cast<double>(cells[0]);
    const double sy = (hi[1] - lo[1]) / static_cast<double>(cells[1]);
    for (std::size_t i = 0; i < cells[0]; ++i) {
      double p[2];
      p[0] = lo[0] + (static_cast<double>(i) + 0.5) * sx;
      for (std::size_t j = 0; j < cells[1]; ++j) {
        p[1] = lo[1] + (static_cast<double>(j) + 0.5) * sy;
        fn(p);
      }
    }
  }

  // Midpoint-rule mass of a density over this grid.
  double mass(const EvaluableDensity& density) const {
    validate();
    if (density.dim != dim())
      throw std::invalid_argument("QuadratureGrid: density dim mismatch");
    double acc = 0.0;
    for_each_midpoint([&](const double* x) { acc += density.pdf(x); });
    return acc * cell_volume();
  }
};

}  // namespace d2gan
