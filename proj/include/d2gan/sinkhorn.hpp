#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2gan/histogram.hpp"

namespace d2gan {

struct SinkhornConfig {
  double epsilon = 0.01;        // entropic regularization strength
  double tol = 1e-9;            // L1 row-marginal tolerance
  std::size_t max_iters = 10000;
};

struct SinkhornResult {
  double cost = 0.0;
  std::size_t iterations = 0;
  double marginal_error = 0.0;
};

// Entropically regularized optimal transport between two discrete
// measures, log-domain updates with epsilon scaling for stability and
// speed. `cost` is row-major [a.size() x b.size()].
inline SinkhornResult sinkhorn_transport(std::span<const double> a,
                                         std::span<const double> b,
                                         const std::vector<double>& cost,
                                         const SinkhornConfig& cfg = {}) {
  const std::size_t na = a.size(), nb = b.size();
  if (na == 0 || nb == 0)
    throw std::invalid_argument("sinkhorn: empty measure");
  if (cost.size() != na * nb)
    throw std::invalid_argument("sinkhorn: cost matrix size mismatch");
  if (!(cfg.epsilon > 0.0))
    throw std::invalid_argument("sinkhorn: epsilon must be > 0");
  for (double w : a)
    if (!(w > 0.0)) throw std::invalid_argument("sinkhorn: weights must be > 0");
  for (double w : b)
    if (!(w > 0.0)) throw std::invalid_argument("sinkhorn: weights must be > 0");

  std::vector<double> la(na), lb(nb);
  for (std::size_t i = 0; i < na; ++i) la[i] = std::log(a[i]);
  for (std::size_t j = 0; j < nb; ++j) lb[j] = std::log(b[j]);

  std::vector<double> f(na, 0.0), g(nb, 0.0);
  std::vector<double> row_buf(nb), col_max(nb), col_sum(nb);

  const double max_cost = *std::max_element(cost.begin(), cost.end());
  // Epsilon ladder: start coarse, halve down to the target, warm-starting
  // the potentials at every level.
  std::vector<double> ladder;
  for (double e = std::max(cfg.epsilon, max_cost / 4.0); e > cfg.epsilon;
       e *= 0.5)
    ladder.push_back(e);
  ladder.push_back(cfg.epsilon);

  std::size_t total_iters = 0;
  double marginal_error = std::numeric_limits<double>::infinity();

  auto update_f = [&](double eps) {
    for (std::size_t i = 0; i < na; ++i) {
      const double* ci = cost.data() + i * nb;
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nb; ++j) {
        row_buf[j] = (g[j] - ci[j]) / eps + lb[j];
        m = std::max(m, row_buf[j]);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < nb; ++j) s += std::exp(row_buf[j] - m);
      f[i] = -eps * (m + std::log(s));
    }
  };

  auto update_g = [&](double eps) {
    std::fill(col_max.begin(), col_max.end(),
              -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < na; ++i) {
      const double* ci = cost.data() + i * nb;
      const double base = f[i] / eps + la[i];
      for (std::size_t j = 0; j < nb; ++j)
        col_max[j] = std::max(col_max[j], base - ci[j] / eps);
    }
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    for (std::size_t i = 0; i < na; ++i) {
      const double* ci = cost.data() + i * nb;
      const double base = f[i] / eps + la[i];
      for (std::size_t j = 0; j < nb; ++j)
        col_sum[j] += std::exp(base - ci[j] / eps - col_max[j]);
    }
    for (std::size_t j = 0; j < nb; ++j)
      g[j] = -eps * (col_max[j] + std::log(col_sum[j]));
  };

  // L1 error of the row marginals (columns are exact right after a g
  // update).
  auto row_marginal_error = [&](double eps) {
    double err = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      const double* ci = cost.data() + i * nb;
      const double base = (f[i] / eps) + la[i];
      double r = 0.0;
      for (std::size_t j = 0; j < nb; ++j)
        r += std::exp(base + g[j] / eps - ci[j] / eps + lb[j]);
      err += std::abs(r - a[i]);
    }
    return err;
  };

  for (std::size_t level = 0; level < ladder.size(); ++level) {
    const double eps = ladder[level];
    const bool last = level + 1 == ladder.size();
    const std::size_t level_cap = last ? cfg.max_iters : 40;
    for (std::size_t it = 0; it < level_cap && total_iters < cfg.max_iters;
         ++it) {
      update_f(eps);
      update_g(eps);
      ++total_iters;
      marginal_error = row_marginal_error(eps);
      if (marginal_error <= (last ? cfg.tol : 1e-4)) break;
    }
  }
  if (!(marginal_error <= cfg.tol))
    throw std::runtime_error("sinkhorn: no convergence within " +
                             std::to_string(cfg.max_iters) +
                             " iterations, last marginal error " +
                             std::to_string(marginal_error));

  // Transport cost <P, C> at the target epsilon.
  const double eps = cfg.epsilon;
  double total = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const double* ci = cost.data() + i * nb;
    const double base = f[i] / eps + la[i];
    for (std::size_t j = 0; j < nb; ++j)
      total += std::exp(base + g[j] / eps - ci[j] / eps + lb[j]) * ci[j];
  }
  return {total, total_iters, marginal_error};
}

namespace detail {

struct SupportPoints {
  std::vector<double> x, y, mass;
};

inline SupportPoints histogram_support(const Histogram2D& h) {
  SupportPoints s;
  for (std::size_t i = 0; i < h.bins_x; ++i)
    for (std::size_t j = 0; j < h.bins_y; ++j)
      if (h.at(i, j) > 0.0) {
        s.x.push_back(h.center_x(i));
        s.y.push_back(h.center_y(j));
        s.mass.push_back(h.at(i, j));
      }
  return s;
}

}  // namespace detail

// Entropic Wasserstein distance between two histograms on the same grid:
// Euclidean ground metric between bin centers, restricted to the nonzero
// bins (zero-mass bins cannot carry transport).
inline SinkhornResult wasserstein_detailed(const Histogram2D& h1,
                                           const Histogram2D& h2,
                                           const SinkhornConfig& cfg = {}) {
  if (!h1.same_grid(h2))
    throw std::invalid_argument("wasserstein: histogram grids differ");
  const detail::SupportPoints a = detail::histogram_support(h1);
  const detail::SupportPoints b = detail::histogram_support(h2);
  std::vector<double> cost(a.mass.size() * b.mass.size());
  for (std::size_t i = 0; i < a.mass.size(); ++i) {
    double* ci = cost.data() + i * b.mass.size();
    for (std::size_t j = 0; j < b.mass.size(); ++j) {
      const double dx = a.x[i] - b.x[j], dy = a.y[i] - b.y[j];
      ci[j] = std::sqrt(dx * dx + dy * dy);
    }
  }
  return sinkhorn_transport(a.mass, b.mass, cost, cfg);
}

inline double wasserstein(const Histogram2D& h1, const Histogram2D& h2,
                          const SinkhornConfig& cfg = {}) {
  return wasserstein_detailed(h1, h2, cfg).cost;
}

// Exact 1D Wasserstein-1 between histograms with atoms on a uniform grid:
// the L1 distance between the CDFs. Internal oracle for the Sinkhorn path.
inline double wasserstein_1d_exact(std::span<const double> a,
                                   std::span<const double> b,
                                   double bin_width) {
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein_1d_exact: size mismatch");
  double cum = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    cum += a[i] - b[i];
    total += std::abs(cum);
  }
  return total * bin_width;
}

}  // namespace d2gan
