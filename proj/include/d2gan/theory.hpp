#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "d2gan/density.hpp"
#include "d2gan/gradcheck.hpp"
#include "d2gan/networks.hpp"
#include "d2gan/objectives.hpp"
#include "d2gan/training_ops.hpp"

namespace d2gan::theory {

struct TheoryCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst observed error
  double tolerance = 0.0;
  std::string detail;
};

// ---- independent maximizer of the pointwise integrand -------------------

namespace detail {

// Golden-section maximization of a unimodal function on [lo, hi].
template <class Fn>
double golden_section_max(Fn&& f, double lo, double hi, double tol = 1e-13) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Brute-force argmax of the objective integrand over (0, limit]^2: coarse
// grid scan first, then golden-section refinement around the best cell.
// Knows nothing about the closed-form solution it is checking.
inline std::pair<double, double> maximize_integrand(double p_data_x, double p_g_x,
                                                    const D2ganHyper& hyper,
                                                    double limit = 10.0,
                                                    std::size_t coarse = 400) {
  const double step = limit / static_cast<double>(coarse);
  double best_d1 = step, best_d2 = step, best = -1e300;
  for (std::size_t i = 1; i <= coarse; ++i) {
    for (std::size_t j = 1; j <= coarse; ++j) {
      const double d1 = static_cast<double>(i) * step;
      const double d2 = static_cast<double>(j) * step;
      const double v = pointwise_integrand(p_data_x, p_g_x, d1, d2, hyper);
      if (v > best) {
        best = v;
        best_d1 = d1;
        best_d2 = d2;
      }
    }
  }
  const double lo1 = std::max(best_d1 - 2.0 * step, step * 1e-6);
  const double hi1 = std::min(best_d1 + 2.0 * step, limit);
  const double lo2 = std::max(best_d2 - 2.0 * step, step * 1e-6);
  const double hi2 = std::min(best_d2 + 2.0 * step, limit);
  const double r1 = detail::golden_section_max(
      [&](double d1) {
        return pointwise_integrand(p_data_x, p_g_x, d1, best_d2, hyper);
      },
      lo1, hi1);
  const double r2 = detail::golden_section_max(
      [&](double d2) {
        return pointwise_integrand(p_data_x, p_g_x, r1, d2, hyper);
      },
      lo2, hi2);
  return {r1, r2};
}

// ---- individual checks ---------------------------------------------------

inline TheoryCheck check_equilibrium_values() {
  struct Case {
    double alpha, beta, expected;
  };
  // exp-free reference values computed from the formula directly
  const Case cases[] = {
      {1.0, 1.0, -2.0},
      {0.2, 0.1, 0.2 * (std::log(0.2) - 1.0) + 0.1 * (std::log(0.1) - 1.0)},
      {0.5, 0.5, std::log(0.5) - 1.0},
  };
  double worst = 0.0;
  for (const auto& c : cases)
    worst = std::max(worst,
                     std::abs(equilibrium_value({c.alpha, c.beta}) - c.expected));
  return {"equilibrium value", worst < 1e-12, worst, 1e-12,
          "alpha(log alpha - 1) + beta(log beta - 1) at 3 hyper pairs"};
}

inline TheoryCheck check_optimal_discriminators(std::uint64_t seed,
                                                std::size_t tuples = 100) {
  SeededRng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < tuples; ++t) {
    const double pd = rng.uniform(0.1, 1.0);
    const double pg = rng.uniform(0.1, 1.0);
    const D2ganHyper hyper{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
    const auto [d1_hat, d2_hat] = maximize_integrand(pd, pg, hyper);
    const double d1_star = optimal_d1(pd, pg, hyper);
    const double d2_star = optimal_d2(pd, pg, hyper);
    worst = std::max(worst, std::abs(d1_hat - d1_star) / d1_star);
    worst = std::max(worst, std::abs(d2_hat - d2_star) / d2_star);
  }
  return {"optimal discriminators (grid-search oracle)", worst < 1e-3, worst,
          1e-3,
          std::to_string(tuples) + " random (p_data, p_g, alpha, beta) tuples"};
}

inline TheoryCheck check_integrand_concavity(std::uint64_t seed,
                                             std::size_t tuples = 100) {
  SeededRng rng(seed);
  const double h = 1e-4;
  double worst = -1e300;  // largest (most positive) second difference
  for (std::size_t t = 0; t < tuples; ++t) {
    const double pd = rng.uniform(0.05, 2.0);
    const double pg = rng.uniform(0.05, 2.0);
    const D2ganHyper hyper{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
    const double d1 = rng.uniform(0.05, 8.0), d2 = rng.uniform(0.05, 8.0);
    const auto f = [&](double a, double b) {
      return pointwise_integrand(pd, pg, a, b, hyper);
    };
    const double c1 = f(d1 + h, d2) - 2.0 * f(d1, d2) + f(d1 - h, d2);
    const double c2 = f(d1, d2 + h) - 2.0 * f(d1, d2) + f(d1, d2 - h);
    worst = std::max({worst, c1 / (h * h), c2 / (h * h)});
  }
  return {"integrand concavity in each discriminator", worst <= 1e-6, worst,
          1e-6, "second differences non-positive on random tuples"};
}

// Quadrature of the objective with the optima substituted vs. the reduced
// form, against closed-form Gaussian divergences.
inline TheoryCheck check_objective_identity() {
  const EvaluableDensity p_data = gaussian_density_1d(0.0, 1.0);
  const EvaluableDensity p_g = gaussian_density_1d(0.5, 1.0);
  const QuadratureGrid grid = QuadratureGrid::line(-12.0, 12.5, 4900);
  const double kl = gaussian_kl_closed_form(0.0, 1.0, 0.5, 1.0);       // 0.125
  const double kl_rev = gaussian_kl_closed_form(0.5, 1.0, 0.0, 1.0);   // 0.125

  const D2ganHyper hypers[] = {{1.0, 1.0}, {0.2, 0.1}, {0.5, 0.5}};
  double worst = 0.0;
  std::ostringstream detail;
  for (const auto& hyper : hypers) {
    const double direct =
        objective_at_optimal_discriminators(p_data, p_g, hyper, grid);
    const double reduced = reduced_generator_objective(p_data, p_g, hyper, grid);
    const double closed =
        equilibrium_value(hyper) + hyper.alpha * kl + hyper.beta * kl_rev;
    worst = std::max(worst, std::abs(direct - closed));
    worst = std::max(worst, std::abs(reduced - closed));
    worst = std::max(worst, std::abs(direct - reduced));
    detail << "(" << hyper.alpha << "," << hyper.beta << ")->" << direct << " ";
  }
  return {"objective identity at optimal discriminators", worst < 1e-4, worst,
          1e-4, detail.str()};
}

// At p_g = p_data both divergences vanish and the value is exactly the
// equilibrium constant.
inline TheoryCheck check_equilibrium_at_match() {
  const EvaluableDensity p = gaussian_density_1d(0.0, 1.0);
  const QuadratureGrid grid = QuadratureGrid::line(-12.0, 12.5, 4900);
  const D2ganHyper hypers[] = {{1.0, 1.0}, {0.2, 0.1}, {0.5, 0.5}};
  double worst = 0.0;
  for (const auto& hyper : hypers) {
    const double eq = equilibrium_value(hyper);
    worst = std::max(worst,
                     std::abs(reduced_generator_objective(p, p, hyper, grid) - eq));
    worst = std::max(
        worst,
        std::abs(objective_at_optimal_discriminators(p, p, hyper, grid) - eq));
  }
  return {"equilibrium value at p_g = p_data", worst < 1e-9, worst, 1e-9,
          "reduced and direct quadrature routes"};
}

// The reduced objective over a 1D mean sweep is minimized where the model
// matches the data.
inline TheoryCheck check_minimum_at_data_distribution() {
  const EvaluableDensity p_data = gaussian_density_1d(0.0, 1.0);
  const QuadratureGrid grid = QuadratureGrid::line(-14.0, 14.1, 5600);
  const D2ganHyper hyper{0.5, 0.5};
  double best_mu = -1.0, best = 1e300;
  for (int i = -10; i <= 10; ++i) {
    const double mu = 0.1 * static_cast<double>(i);
    const double v = reduced_generator_objective(
        p_data, gaussian_density_1d(mu, 1.0), hyper, grid);
    if (v < best) {
      best = v;
      best_mu = mu;
    }
  }
  const double gap = std::abs(best - equilibrium_value(hyper));
  const bool ok = best_mu == 0.0 && gap < 1e-9;
  return {"reduced objective minimized at p_g = p_data", ok,
          std::abs(best_mu) + gap, 1e-9, "1D Gaussian mean sweep"};
}

// KL quadrature against the closed-form Gaussian divergence.
inline TheoryCheck check_kl_quadrature() {
  const QuadratureGrid grid = QuadratureGrid::line(-16.0, 16.3, 6500);
  const double a =
      kl_quadrature(gaussian_density_1d(0.0, 1.0), gaussian_density_1d(1.0, 1.0), grid);
  const double b =
      kl_quadrature(gaussian_density_1d(0.0, 1.0), gaussian_density_1d(0.0, 2.0), grid);
  const double worst =
      std::max(std::abs(a - gaussian_kl_closed_form(0.0, 1.0, 1.0, 1.0)),
               std::abs(b - gaussian_kl_closed_form(0.0, 1.0, 0.0, 2.0)));
  return {"kl quadrature vs closed form", worst < 1e-4, worst, 1e-4,
          "N(0,1)||N(1,1) and N(0,1)||N(0,4)"};
}

// The generator loss must equal the generator-dependent terms of the full
// objective breakdown. Parameterized so a deliberately mutated loss can be
// shown to fail.
using GeneratorLossFn = std::function<double(
    std::span<const double>, std::span<const double>, const D2ganHyper&)>;

inline TheoryCheck check_generator_loss_consistency(
    std::uint64_t seed,
    const GeneratorLossFn& loss_fn =
        [](std::span<const double> f1, std::span<const double> f2,
           const D2ganHyper& h) { return d2gan_generator_loss(f1, f2, h); }) {
  SeededRng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.uniform_index(16);
    std::vector<double> real1(n), real2(n), fake1(n), fake2(n);
    for (auto* batch : {&real1, &real2, &fake1, &fake2})
      for (double& v : *batch) v = rng.uniform(0.05, 5.0);
    const D2ganHyper hyper{rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)};
    const ObjectiveValue obj =
        d2gan_discriminator_loss(real1, fake1, real2, fake2, hyper);
    const double gen = loss_fn(fake1, fake2, hyper);
    worst = std::max(worst,
                     std::abs(gen - (obj.d1_fake_term + obj.d2_fake_term)));
  }
  return {"generator loss equals fake-side objective terms", worst < 1e-12,
          worst, 1e-12, "50 random score batches"};
}

// Finite-difference validation of every analytic gradient path used in
// training.
inline TheoryCheck check_gradients(std::uint64_t seed, std::size_t instances = 4,
                                   double tolerance = 1e-6) {
  SeededRng rng(seed);
  double worst = 0.0;
  const InitScheme init{0.4, 0.0};
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const std::size_t n = 4 + rng.uniform_index(5);
    const std::size_t hidden = 6 + rng.uniform_index(6);
    const D2ganHyper hyper{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
    SeededRng build(rng.next_u64());
    Mlp g = build_generator(hidden, 2, build, init);
    // tanh head variant exercises a squashing generator output
    if (inst % 2 == 1) g.layers.back().activation = Activation::tanh;
    Mlp d1 = build_score_discriminator(hidden, build, init);
    Mlp d2 = build_score_discriminator(hidden, build, init);
    Mlp db = build_probability_discriminator(hidden, build, init);
    const Tensor real = sample_ring(n, rng);
    const Tensor fake_pts = sample_ring(n, rng);
    const Tensor noise = sample_noise(n, 2, rng);

    worst = std::max(
        worst, grad_check(
                   d1,
                   [&](const Mlp& net) {
                     return d1_loss_and_grads(net, real, fake_pts, hyper).loss;
                   },
                   [&](const Mlp& net) {
                     return flatten_gradients(
                         d1_loss_and_grads(net, real, fake_pts, hyper).grads);
                   }));
    worst = std::max(
        worst, grad_check(
                   d2,
                   [&](const Mlp& net) {
                     return d2_loss_and_grads(net, real, fake_pts, hyper).loss;
                   },
                   [&](const Mlp& net) {
                     return flatten_gradients(
                         d2_loss_and_grads(net, real, fake_pts, hyper).grads);
                   }));
    worst = std::max(
        worst,
        grad_check(
            g,
            [&](const Mlp& net) {
              return d2gan_generator_loss_and_grads(net, d1, d2, noise, hyper).loss;
            },
            [&](const Mlp& net) {
              return flatten_gradients(
                  d2gan_generator_loss_and_grads(net, d1, d2, noise, hyper).grads);
            }));
    worst = std::max(
        worst, grad_check(
                   db,
                   [&](const Mlp& net) {
                     return gan_d_loss_and_grads(net, real, fake_pts).loss;
                   },
                   [&](const Mlp& net) {
                     return flatten_gradients(
                         gan_d_loss_and_grads(net, real, fake_pts).grads);
                   }));
    worst = std::max(
        worst, grad_check(
                   g,
                   [&](const Mlp& net) {
                     return gan_generator_loss_and_grads(net, db, noise).loss;
                   },
                   [&](const Mlp& net) {
                     return flatten_gradients(
                         gan_generator_loss_and_grads(net, db, noise).grads);
                   }));
  }
  return {"training gradients vs finite differences", worst < tolerance, worst,
          tolerance, std::to_string(instances) + " random instances x 5 losses"};
}

inline std::vector<TheoryCheck> run_all(std::uint64_t seed = 20240817) {
  return {
      check_equilibrium_values(),
      check_optimal_discriminators(seed),
      check_integrand_concavity(seed + 1),
      check_objective_identity(),
      check_equilibrium_at_match(),
      check_minimum_at_data_distribution(),
      check_kl_quadrature(),
      check_generator_loss_consistency(seed + 2),
      check_gradients(seed + 3),
  };
}

}  // namespace d2gan::theory
