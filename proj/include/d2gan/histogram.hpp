#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2gan/tensor.hpp"

namespace d2gan {

struct Bounds2D {
  double x_lo = -4.0, x_hi = 4.0;
  double y_lo = -4.0, y_hi = 4.0;
};

// Normalized 2D histogram on a fixed axis-aligned grid. Mass sums to one
// over the in-bounds points; out-of-bounds points are only counted.
struct Histogram2D {
  Bounds2D bounds;
  std::size_t bins_x = 0, bins_y = 0;
  std::vector<double> mass;  // bins_x * bins_y, row i = x bin, col j = y bin
  std::size_t in_bounds = 0;
  std::size_t out_of_bounds = 0;

  double bin_width_x() const {
    return (bounds.x_hi - bounds.x_lo) / static_cast<double>(bins_x);
  }
  double bin_width_y() const {
    return (bounds.y_hi - bounds.y_lo) / static_cast<double>(bins_y);
  }

  double center_x(std::size_t i) const {
    return bounds.x_lo + (static_cast<double>(i) + 0.5) * bin_width_x();
  }
  double center_y(std::size_t j) const {
    return bounds.y_lo + (static_cast<double>(j) + 0.5) * bin_width_y();
  }

  double& at(std::size_t i, std::size_t j) { return mass[i * bins_y + j]; }
  double at(std::size_t i, std::size_t j) const { return mass[i * bins_y + j]; }

  bool same_grid(const Histogram2D& other) const {
    return bins_x == other.bins_x && bins_y == other.bins_y &&
           bounds.x_lo == other.bounds.x_lo && bounds.x_hi == other.bounds.x_hi &&
           bounds.y_lo == other.bounds.y_lo && bounds.y_hi == other.bounds.y_hi;
  }
};

// Bin a point batch. Bins are half-open, so x == x_hi falls outside.
inline Histogram2D histogram2d(const Tensor& points, const Bounds2D& bounds,
                               std::size_t bins_x, std::size_t bins_y) {
  if (bins_x == 0 || bins_y == 0)
    throw std::invalid_argument("histogram2d: need at least one bin per axis");
  if (!(bounds.x_hi > bounds.x_lo) || !(bounds.y_hi > bounds.y_lo))
    throw std::invalid_argument("histogram2d: empty bounds");
  if (points.rank() != 2 || points.cols() != 2)
    throw std::invalid_argument("histogram2d: points must be [n x 2], got " +
                                points.shape_string());

  Histogram2D h;
  h.bounds = bounds;
  h.bins_x = bins_x;
  h.bins_y = bins_y;
  h.mass.assign(bins_x * bins_y, 0.0);
  const double sx = static_cast<double>(bins_x) / (bounds.x_hi - bounds.x_lo);
  const double sy = static_cast<double>(bins_y) / (bounds.y_hi - bounds.y_lo);
  for (std::size_t r = 0; r < points.rows(); ++r) {
    const double x = points(r, 0), y = points(r, 1);
    if (!(x >= bounds.x_lo && x < bounds.x_hi && y >= bounds.y_lo &&
          y < bounds.y_hi)) {
      ++h.out_of_bounds;
      continue;
    }
    const auto i = static_cast<std::size_t>((x - bounds.x_lo) * sx);
    const auto j = static_cast<std::size_t>((y - bounds.y_lo) * sy);
    h.at(std::min(i, bins_x - 1), std::min(j, bins_y - 1)) += 1.0;
    ++h.in_bounds;
  }
  if (h.in_bounds == 0)
    throw std::runtime_error("histogram2d: no in-bounds points");
  const double inv = 1.0 / static_cast<double>(h.in_bounds);
  for (double& m : h.mass) m *= inv;
  return h;
}

// Symmetric KL between two histograms on the same grid, computed on
// smoothed and renormalized masses: p_i -> (p_i + eps) / (1 + n*eps).
inline double symmetric_kl(const Histogram2D& a, const Histogram2D& b,
                           double smoothing = 1e-10) {
  if (!a.same_grid(b))
    throw std::invalid_argument("symmetric_kl: histogram grids differ");
  if (!(smoothing > 0.0))
    throw std::invalid_argument("symmetric_kl: smoothing must be > 0");
  const double n = static_cast<double>(a.mass.size());
  const double norm = 1.0 / (1.0 + n * smoothing);
  // KL(p||q) + KL(q||p) = sum (p - q)(log p - log q); every term is
  // non-negative and the form is exactly symmetric in the arguments.
  double acc = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) {
    const double p = (a.mass[i] + smoothing) * norm;
    const double q = (b.mass[i] + smoothing) * norm;
    acc += (p - q) * (std::log(p) - std::log(q));
  }
  return acc;
}

}  // namespace d2gan
