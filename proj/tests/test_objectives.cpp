#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "d2gan/density.hpp"
#include "d2gan/objectives.hpp"
#include "d2gan/rng.hpp"
#include "d2gan/theory.hpp"

using namespace d2gan;

TEST_CASE("discriminator objective on a hand-evaluated batch", "[objectives]") {
  // alpha=beta=1, d1_real={e,1}: the four terms are 0.5, -1, -1, 0
  const std::vector<double> d1_real{std::exp(1.0), 1.0};
  const std::vector<double> ones{1.0};
  const ObjectiveValue v =
      d2gan_discriminator_loss(d1_real, ones, ones, ones, {1.0, 1.0});
  CHECK(v.d1_real_term == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(v.d1_fake_term == Catch::Approx(-1.0).epsilon(1e-12));
  CHECK(v.d2_real_term == Catch::Approx(-1.0).epsilon(1e-12));
  CHECK(v.d2_fake_term == Catch::Approx(0.0).margin(1e-12));
  CHECK(v.total == Catch::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("all-ones scores give total -2", "[objectives]") {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  const ObjectiveValue v =
      d2gan_discriminator_loss(ones, ones, ones, ones, {1.0, 1.0});
  CHECK(v.total == Catch::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("objective at the optimum equals the equilibrium formula",
          "[objectives]") {
  // at p_g = p_data the optimal scores are alpha and beta everywhere
  const D2ganHyper hyper{0.2, 0.1};
  const std::vector<double> d1(5, hyper.alpha), d2(5, hyper.beta);
  const ObjectiveValue v = d2gan_discriminator_loss(d1, d1, d2, d2, hyper);
  const double expected = 0.2 * (std::log(0.2) - 1.0) + 0.1 * (std::log(0.1) - 1.0);
  CHECK(v.total == Catch::Approx(expected).epsilon(1e-12));
  CHECK(v.total == Catch::Approx(-0.852146).epsilon(1e-5));
  CHECK(equilibrium_value(hyper) == Catch::Approx(expected).epsilon(1e-14));
}

TEST_CASE("generator loss hand cases", "[objectives]") {
  const std::vector<double> twos{2.0, 2.0};
  const std::vector<double> ones{1.0, 1.0};
  CHECK(d2gan_generator_loss(twos, ones, {1.0, 0.5}) ==
        Catch::Approx(-2.0).epsilon(1e-14));
  // d2_fake all ones: the loss reduces to -mean(d1_fake)
  const std::vector<double> d1f{0.7, 1.9, 3.1};
  const std::vector<double> unit{1.0, 1.0, 1.0};
  CHECK(d2gan_generator_loss(d1f, unit, {0.3, 0.9}) ==
        Catch::Approx(-(0.7 + 1.9 + 3.1) / 3.0).epsilon(1e-14));
}

TEST_CASE("score validation", "[objectives]") {
  const std::vector<double> good{1.0};
  const std::vector<double> zero{0.0};
  const std::vector<double> negative{-0.5};
  CHECK_THROWS_WITH(
      d2gan_discriminator_loss(good, zero, good, good, {1.0, 1.0}),
      Catch::Matchers::ContainsSubstring("d1_fake"));
  CHECK_THROWS_AS(d2gan_generator_loss(negative, good, {1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("equilibrium values", "[objectives]") {
  CHECK(equilibrium_value({1.0, 1.0}) == Catch::Approx(-2.0).epsilon(1e-15));
  CHECK(equilibrium_value({0.2, 0.1}) ==
        Catch::Approx(-0.852146).epsilon(1e-5));
  CHECK(equilibrium_value({0.5, 0.5}) ==
        Catch::Approx(std::log(0.5) - 1.0).epsilon(1e-15));
  CHECK(equilibrium_value({0.5, 0.5}) ==
        Catch::Approx(-1.693147).epsilon(1e-5));
  CHECK_THROWS_AS(equilibrium_value({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(equilibrium_value({1.0, 1.5}), std::invalid_argument);
}

TEST_CASE("baseline objective hand cases", "[objectives]") {
  const std::vector<double> half{0.5};
  CHECK(gan_discriminator_loss(half, half) ==
        Catch::Approx(2.0 * std::log(0.5)).epsilon(1e-14));
  CHECK(gan_discriminator_loss(half, half) ==
        Catch::Approx(-1.386294).epsilon(1e-5));

  // d_fake -> 1 sends the non-saturating loss to zero
  const std::vector<double> near_one{1.0 - 1e-9};
  const double small = gan_generator_loss(near_one);
  CHECK(small > 0.0);
  CHECK(small < 1e-8);
  const double larger = gan_generator_loss(half);
  CHECK(larger > small);

  // boundary stays finite
  CHECK(std::isfinite(gan_discriminator_loss(near_one, half)));
  const std::vector<double> one{1.0};
  const std::vector<double> above{1.5};
  CHECK_THROWS_AS(gan_discriminator_loss(one, half), std::invalid_argument);
  CHECK_THROWS_AS(gan_generator_loss(above), std::invalid_argument);
}

TEST_CASE("closed-form optimal discriminators", "[objectives]") {
  CHECK(optimal_d1(0.4, 0.2, {0.5, 0.5}) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(optimal_d2(0.4, 0.2, {0.5, 0.5}) == Catch::Approx(0.25).epsilon(1e-15));
  // p_data = p_g: the optima collapse to alpha and beta
  CHECK(optimal_d1(0.7, 0.7, {0.2, 0.1}) == Catch::Approx(0.2).epsilon(1e-15));
  CHECK(optimal_d2(0.7, 0.7, {0.2, 0.1}) == Catch::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_WITH(optimal_d1(0.4, 0.0, {0.5, 0.5}),
                    Catch::Matchers::ContainsSubstring("p_g"));
  CHECK_THROWS_WITH(optimal_d2(0.0, 0.4, {0.5, 0.5}),
                    Catch::Matchers::ContainsSubstring("p_data"));
}

TEST_CASE("grid search argmax matches the closed form at the spec point",
          "[objectives]") {
  const auto [d1, d2] = theory::maximize_integrand(0.4, 0.2, {0.5, 0.5});
  CHECK(std::abs(d1 - 1.0) < 1e-3);
  CHECK(std::abs(d2 - 0.25) < 1e-3);
}

TEST_CASE("grid search recovers the optima on random tuples", "[objectives]") {
  const theory::TheoryCheck check = theory::check_optimal_discriminators(42, 30);
  INFO(check.detail << " worst " << check.measured);
  CHECK(check.passed);
}

TEST_CASE("integrand is concave in each discriminator", "[objectives]") {
  const theory::TheoryCheck check = theory::check_integrand_concavity(43, 50);
  CHECK(check.passed);
}

TEST_CASE("kl quadrature basics", "[objectives]") {
  const QuadratureGrid grid = QuadratureGrid::line(-16.0, 16.3, 6500);
  const EvaluableDensity p = gaussian_density_1d(0.0, 1.0);

  CHECK(kl_quadrature(p, p, grid) == Catch::Approx(0.0).margin(1e-9));
  CHECK(kl_quadrature(p, gaussian_density_1d(1.0, 1.0), grid) ==
        Catch::Approx(0.5).margin(1e-4));
  // ln 2 - 3/8 for the variance-4 widening
  CHECK(kl_quadrature(p, gaussian_density_1d(0.0, 2.0), grid) ==
        Catch::Approx(std::log(2.0) - 0.375).margin(1e-4));
  // oracle: closed form agrees with itself through the helper
  CHECK(gaussian_kl_closed_form(0.0, 1.0, 0.0, 2.0) ==
        Catch::Approx(std::log(2.0) - 0.375).epsilon(1e-15));
}

TEST_CASE("kl quadrature flags support violations", "[objectives]") {
  const QuadratureGrid grid = QuadratureGrid::line(-8.0, 8.0, 1000);
  const EvaluableDensity p = gaussian_density_1d(0.0, 1.0);
  const EvaluableDensity clipped{
      1, [](const double* x) {
        return x[0] > 2.0 ? 0.0 : gaussian_density_1d(0.0, 1.0).pdf(x);
      }};
  CHECK_THROWS_WITH(kl_quadrature(p, clipped, grid),
                    Catch::Matchers::ContainsSubstring("support violation"));
}

TEST_CASE("reduced generator objective on Gaussian pairs", "[objectives]") {
  const QuadratureGrid grid = QuadratureGrid::line(-12.0, 12.5, 4900);
  const EvaluableDensity p = gaussian_density_1d(0.0, 1.0);
  const EvaluableDensity q = gaussian_density_1d(0.5, 1.0);

  // closed-form Gaussian KL oracle: 0.125 each way
  CHECK(gaussian_kl_closed_form(0.0, 1.0, 0.5, 1.0) ==
        Catch::Approx(0.125).epsilon(1e-15));

  CHECK(reduced_generator_objective(p, q, {1.0, 1.0}, grid) ==
        Catch::Approx(-1.75).margin(1e-4));
  CHECK(reduced_generator_objective(p, q, {0.2, 0.1}, grid) ==
        Catch::Approx(-0.814646).margin(1e-4));
  // identical densities: both divergences vanish exactly
  CHECK(reduced_generator_objective(p, p, {0.3, 0.8}, grid) ==
        Catch::Approx(equilibrium_value({0.3, 0.8})).margin(1e-12));
}

TEST_CASE("reduced objective rejects grids that miss mass", "[objectives]") {
  const QuadratureGrid narrow = QuadratureGrid::line(-2.0, 2.0, 100);
  CHECK_THROWS_WITH(
      reduced_generator_objective(gaussian_density_1d(0.0, 1.0),
                                  gaussian_density_1d(0.5, 1.0), {1.0, 1.0},
                                  narrow),
      Catch::Matchers::ContainsSubstring("covers only"));
}

TEST_CASE("objective weight in alpha is linear", "[objectives]") {
  const QuadratureGrid grid = QuadratureGrid::line(-12.0, 12.5, 4900);
  const EvaluableDensity p = gaussian_density_1d(0.0, 1.0);
  const EvaluableDensity q = gaussian_density_1d(0.5, 1.0);
  const double kl = kl_quadrature(p, q, grid);
  const double beta = 0.4;
  const double a1 = 0.3, a2 = 0.9;
  const double v1 = reduced_generator_objective(p, q, {a1, beta}, grid);
  const double v2 = reduced_generator_objective(p, q, {a2, beta}, grid);
  const double expected_delta = (a2 * (std::log(a2) - 1.0) -
                                 a1 * (std::log(a1) - 1.0)) +
                                (a2 - a1) * kl;
  CHECK(v2 - v1 == Catch::Approx(expected_delta).margin(1e-9));
  // increasing alpha strictly increases the forward-KL contribution
  CHECK((v2 - a2 * (std::log(a2) - 1.0)) - (v1 - a1 * (std::log(a1) - 1.0)) ==
        Catch::Approx((a2 - a1) * kl).margin(1e-9));
}

TEST_CASE("quadrature identity between the two objective routes",
          "[objectives]") {
  const theory::TheoryCheck identity = theory::check_objective_identity();
  INFO(identity.detail);
  CHECK(identity.passed);
  const theory::TheoryCheck at_match = theory::check_equilibrium_at_match();
  CHECK(at_match.passed);
}

TEST_CASE("reduced objective is minimized where the model matches the data",
          "[objectives]") {
  CHECK(theory::check_minimum_at_data_distribution().passed);
}

TEST_CASE("generator loss equals the fake-side terms of the objective",
          "[objectives]") {
  CHECK(theory::check_generator_loss_consistency(7).passed);

  // mutation oracle: a sign flip in the generator loss must be caught
  const theory::GeneratorLossFn mutated =
      [](std::span<const double> f1, std::span<const double> f2,
         const D2ganHyper& h) {
        double m = 0.0;
        for (double v : f1) m += v;
        m /= static_cast<double>(f1.size());
        double l = 0.0;
        for (double v : f2) l += std::log(v);
        l /= static_cast<double>(f2.size());
        return m + h.beta * l;  // wrong sign on the first term
      };
  CHECK_FALSE(theory::check_generator_loss_consistency(7, mutated).passed);
}
