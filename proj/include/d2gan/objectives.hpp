#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "d2gan/density.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

// Hyperparameters weighting the two divergences; both in (0, 1].
struct D2ganHyper {
  double alpha = 0.2;
  double beta = 0.2;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0))
      throw std::invalid_argument("alpha and beta must lie in (0, 1]");
  }
};

// Minibatch estimate of the three-player objective, with its four terms:
//   alpha*E[log D1(x)]  -E[D1(G(z))]  -E[D2(x)]  beta*E[log D2(G(z))]
struct ObjectiveValue {
  double total = 0.0;
  double d1_real_term = 0.0;
  double d1_fake_term = 0.0;
  double d2_real_term = 0.0;
  double d2_fake_term = 0.0;
};

namespace detail {

// Guard before log: scores live in R+, so a non-positive value signals a
// wrong output head rather than a numeric accident.
inline constexpr double kScoreClamp = 1e-12;

inline void check_positive_scores(std::span<const double> s, const char* name) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i] > 0.0) || !std::isfinite(s[i]))
      throw std::invalid_argument(std::string("non-positive score ") + name +
                                  "[" + std::to_string(i) + "] = " +
                                  std::to_string(s[i]) +
                                  " (expected a softplus output in R+)");
}

inline void check_probabilities(std::span<const double> p, const char* name) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] > 0.0 && p[i] < 1.0))
      throw std::invalid_argument(std::string("probability ") + name + "[" +
                                  std::to_string(i) + "] = " +
                                  std::to_string(p[i]) + " outside (0,1)");
}

inline double mean_log_clamped(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += std::log(std::max(v, kScoreClamp));
  return acc / static_cast<double>(s.size());
}

inline double mean(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += v;
  return acc / static_cast<double>(s.size());
}

inline void check_nonempty(std::span<const double> s, const char* name) {
  if (s.empty())
    throw std::invalid_argument(std::string("empty score batch ") + name);
}

}  // namespace detail

// Minibatch value of the dual-discriminator objective. Discriminators
// ascend this; the generator descends the fake-side terms.
inline ObjectiveValue d2gan_discriminator_loss(std::span<const double> d1_real,
                                               std::span<const double> d1_fake,
                                               std::span<const double> d2_real,
                                               std::span<const double> d2_fake,
                                               const D2ganHyper& hyper) {
  hyper.validate();
  detail::check_nonempty(d1_real, "d1_real");
  detail::check_nonempty(d1_fake, "d1_fake");
  detail::check_nonempty(d2_real, "d2_real");
  detail::check_nonempty(d2_fake, "d2_fake");
  detail::check_positive_scores(d1_real, "d1_real");
  detail::check_positive_scores(d1_fake, "d1_fake");
  detail::check_positive_scores(d2_real, "d2_real");
  detail::check_positive_scores(d2_fake, "d2_fake");

  ObjectiveValue v;
  v.d1_real_term = hyper.alpha * detail::mean_log_clamped(d1_real);
  v.d1_fake_term = -detail::mean(d1_fake);
  v.d2_real_term = -detail::mean(d2_real);
  v.d2_fake_term = hyper.beta * detail::mean_log_clamped(d2_fake);
  v.total = v.d1_real_term + v.d1_fake_term + v.d2_real_term + v.d2_fake_term;
  return v;
}

// The generator-dependent part of the objective; the generator descends it.
inline double d2gan_generator_loss(std::span<const double> d1_fake,
                                   std::span<const double> d2_fake,
                                   const D2ganHyper& hyper) {
  hyper.validate();
  detail::check_nonempty(d1_fake, "d1_fake");
  detail::check_nonempty(d2_fake, "d2_fake");
  detail::check_positive_scores(d1_fake, "d1_fake");
  detail::check_positive_scores(d2_fake, "d2_fake");
  return -detail::mean(d1_fake) +
         hyper.beta * detail::mean_log_clamped(d2_fake);
}

// ---- gradients of the descent losses w.r.t. the raw scores -------------
//
// The trainers minimize:
//   D1:  -(alpha*mean(log d1_real) - mean(d1_fake))
//   D2:  -(-mean(d2_real) + beta*mean(log d2_fake))
//   G :  -mean(d1_fake) + beta*mean(log d2_fake)
// Gradients are zero inside the clamp region, matching the clamped loss.

struct ScorePairGrads {
  Tensor real;  // [n_real x 1]
  Tensor fake;  // [n_fake x 1]
};

namespace detail {
inline double dlog_clamped(double s) {
  return s > kScoreClamp ? 1.0 / s : 0.0;
}
}  // namespace detail

inline ScorePairGrads d2gan_d1_descent_grads(std::span<const double> d1_real,
                                             std::span<const double> d1_fake,
                                             const D2ganHyper& hyper) {
  ScorePairGrads g{Tensor::matrix(d1_real.size(), 1),
                   Tensor::matrix(d1_fake.size(), 1)};
  const double nr = static_cast<double>(d1_real.size());
  const double nf = static_cast<double>(d1_fake.size());
  for (std::size_t i = 0; i < d1_real.size(); ++i)
    g.real[i] = -hyper.alpha * detail::dlog_clamped(d1_real[i]) / nr;
  for (std::size_t i = 0; i < d1_fake.size(); ++i) g.fake[i] = 1.0 / nf;
  return g;
}

inline ScorePairGrads d2gan_d2_descent_grads(std::span<const double> d2_real,
                                             std::span<const double> d2_fake,
                                             const D2ganHyper& hyper) {
  ScorePairGrads g{Tensor::matrix(d2_real.size(), 1),
                   Tensor::matrix(d2_fake.size(), 1)};
  const double nr = static_cast<double>(d2_real.size());
  const double nf = static_cast<double>(d2_fake.size());
  for (std::size_t i = 0; i < d2_real.size(); ++i) g.real[i] = 1.0 / nr;
  for (std::size_t i = 0; i < d2_fake.size(); ++i)
    g.fake[i] = -hyper.beta * detail::dlog_clamped(d2_fake[i]) / nf;
  return g;
}

struct GeneratorScoreGrads {
  Tensor d1_fake;  // [n x 1]
  Tensor d2_fake;  // [n x 1]
};

inline GeneratorScoreGrads d2gan_generator_descent_grads(
    std::span<const double> d1_fake, std::span<const double> d2_fake,
    const D2ganHyper& hyper) {
  if (d1_fake.size() != d2_fake.size())
    throw std::invalid_argument("generator grads: batch size mismatch");
  GeneratorScoreGrads g{Tensor::matrix(d1_fake.size(), 1),
                        Tensor::matrix(d2_fake.size(), 1)};
  const double n = static_cast<double>(d1_fake.size());
  for (std::size_t i = 0; i < d1_fake.size(); ++i) g.d1_fake[i] = -1.0 / n;
  for (std::size_t i = 0; i < d2_fake.size(); ++i)
    g.d2_fake[i] = hyper.beta * detail::dlog_clamped(d2_fake[i]) / n;
  return g;
}

// ---- single-discriminator baseline --------------------------------------

// Value the baseline discriminator ascends: E[log D(x)] + E[log(1-D(G(z)))].
inline double gan_discriminator_loss(std::span<const double> d_real,
                                     std::span<const double> d_fake) {
  detail::check_nonempty(d_real, "d_real");
  detail::check_nonempty(d_fake, "d_fake");
  detail::check_probabilities(d_real, "d_real");
  detail::check_probabilities(d_fake, "d_fake");
  double acc_r = 0.0, acc_f = 0.0;
  for (double p : d_real) acc_r += std::log(std::max(p, detail::kScoreClamp));
  for (double p : d_fake)
    acc_f += std::log(std::max(1.0 - p, detail::kScoreClamp));
  return acc_r / static_cast<double>(d_real.size()) +
         acc_f / static_cast<double>(d_fake.size());
}

// Non-saturating generator loss -E[log D(G(z))]; the generator descends it.
inline double gan_generator_loss(std::span<const double> d_fake) {
  detail::check_nonempty(d_fake, "d_fake");
  detail::check_probabilities(d_fake, "d_fake");
  double acc = 0.0;
  for (double p : d_fake) acc += std::log(std::max(p, detail::kScoreClamp));
  return -acc / static_cast<double>(d_fake.size());
}

inline ScorePairGrads gan_d_descent_grads(std::span<const double> d_real,
                                          std::span<const double> d_fake) {
  ScorePairGrads g{Tensor::matrix(d_real.size(), 1),
                   Tensor::matrix(d_fake.size(), 1)};
  const double nr = static_cast<double>(d_real.size());
  const double nf = static_cast<double>(d_fake.size());
  for (std::size_t i = 0; i < d_real.size(); ++i)
    g.real[i] = -detail::dlog_clamped(d_real[i]) / nr;
  for (std::size_t i = 0; i < d_fake.size(); ++i)
    g.fake[i] = detail::dlog_clamped(1.0 - d_fake[i]) / nf;
  return g;
}

inline Tensor gan_g_descent_grads(std::span<const double> d_fake) {
  Tensor g = Tensor::matrix(d_fake.size(), 1);
  const double n = static_cast<double>(d_fake.size());
  for (std::size_t i = 0; i < d_fake.size(); ++i)
    g[i] = -detail::dlog_clamped(d_fake[i]) / n;
  return g;
}

// ---- closed-form optima and the reduced objective -----------------------

// D1*(x) = alpha * p_data(x) / p_g(x).
inline double optimal_d1(double p_data_x, double p_g_x, const D2ganHyper& hyper) {
  if (!(p_g_x > 0.0))
    throw std::invalid_argument(
        "optimal_d1: model density p_g vanished at the query point");
  if (!(p_data_x >= 0.0))
    throw std::invalid_argument("optimal_d1: negative data density");
  return hyper.alpha * p_data_x / p_g_x;
}

// D2*(x) = beta * p_g(x) / p_data(x).
inline double optimal_d2(double p_data_x, double p_g_x, const D2ganHyper& hyper) {
  if (!(p_data_x > 0.0))
    throw std::invalid_argument(
        "optimal_d2: data density p_data vanished at the query point");
  if (!(p_g_x >= 0.0))
    throw std::invalid_argument("optimal_d2: negative model density");
  return hyper.beta * p_g_x / p_data_x;
}

// Value of the game at the equilibrium: alpha(log alpha - 1) + beta(log beta - 1).
inline double equilibrium_value(const D2ganHyper& hyper) {
  hyper.validate();
  return hyper.alpha * (std::log(hyper.alpha) - 1.0) +
         hyper.beta * (std::log(hyper.beta) - 1.0);
}

// Integrand of the objective at a point, as a function of the two
// discriminator values there. Concave in each of d1, d2 on R+.
inline double pointwise_integrand(double p_data_x, double p_g_x, double d1,
                                  double d2, const D2ganHyper& hyper) {
  if (!(d1 > 0.0 && d2 > 0.0))
    throw std::invalid_argument("pointwise_integrand: d1, d2 must be > 0");
  return hyper.alpha * p_data_x * std::log(d1) - p_g_x * d1 - p_data_x * d2 +
         hyper.beta * p_g_x * std::log(d2);
}

// Midpoint-rule KL(p || q). Cells where q vanishes but p carries
// non-negligible mass are a support violation.
inline double kl_quadrature(const EvaluableDensity& p, const EvaluableDensity& q,
                            const QuadratureGrid& grid) {
  grid.validate();
  if (p.dim != grid.dim() || q.dim != grid.dim())
    throw std::invalid_argument("kl_quadrature: density dim mismatch");
  const double vol = grid.cell_volume();
  double acc = 0.0;
  grid.for_each_midpoint([&](const double* x) {
    const double pv = p.pdf(x);
    const double qv = q.pdf(x);
    if (pv < 0.0 || qv < 0.0)
      throw std::invalid_argument("kl_quadrature: negative density value");
    if (pv == 0.0) return;
    if (qv <= 0.0) {
      if (pv * vol > 1e-15)
        throw std::invalid_argument(
            "kl_quadrature: support violation, q = 0 where p carries mass " +
            std::to_string(pv * vol));
      return;
    }
    acc += pv * std::log(pv / qv);
  });
  return acc * vol;
}

namespace detail {
inline void check_grid_coverage(const EvaluableDensity& d,
                                const QuadratureGrid& grid, const char* name) {
  const double mass = grid.mass(d);
  if (mass < 1.0 - 1e-6)
    throw std::invalid_argument(std::string("quadrature grid covers only ") +
                                std::to_string(mass) + " of the mass of " +
                                name + " (need >= 1 - 1e-6)");
}
}  // namespace detail

// The generator objective once both discriminators are at their optimum:
//   equilibrium + alpha*KL(p_data || p_g) + beta*KL(p_g || p_data).
inline double reduced_generator_objective(const EvaluableDensity& p_data,
                                          const EvaluableDensity& p_g,
                                          const D2ganHyper& hyper,
                                          const QuadratureGrid& grid) {
  hyper.validate();
  detail::check_grid_coverage(p_data, grid, "p_data");
  detail::check_grid_coverage(p_g, grid, "p_g");
  return equilibrium_value(hyper) +
         hyper.alpha * kl_quadrature(p_data, p_g, grid) +
         hyper.beta * kl_quadrature(p_g, p_data, grid);
}

// Direct quadrature of the objective with the closed-form optima
// substituted. Same value as reduced_generator_objective, reached through
// a different algebraic route; the pair is the identity check.
inline double objective_at_optimal_discriminators(const EvaluableDensity& p_data,
                                                  const EvaluableDensity& p_g,
                                                  const D2ganHyper& hyper,
                                                  const QuadratureGrid& grid) {
  hyper.validate();
  detail::check_grid_coverage(p_data, grid, "p_data");
  detail::check_grid_coverage(p_g, grid, "p_g");
  const double vol = grid.cell_volume();
  double acc = 0.0;
  grid.for_each_midpoint([&](const double* x) {
    const double pd = p_data.pdf(x);
    const double pg = p_g.pdf(x);
    if (pd <= 0.0 && pg <= 0.0) return;
    // One-sided support gaps blow the optima up; negligible-mass cells are
    // dropped, anything larger is a genuine violation.
    if (pg <= 0.0 || pd <= 0.0) {
      const double stray = (pg <= 0.0 ? pd : pg) * vol;
      if (stray > 1e-15)
        throw std::invalid_argument(
            "objective_at_optimal_discriminators: one density vanishes where "
            "the other carries mass " +
            std::to_string(stray));
      return;
    }
    const double d1 = optimal_d1(pd, pg, hyper);
    const double d2 = optimal_d2(pd, pg, hyper);
    acc += pointwise_integrand(pd, pg, d1, d2, hyper);
  });
  return acc * vol;
}

}  // namespace d2gan
