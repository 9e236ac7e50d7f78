#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "d2gan/density.hpp"
#include "d2gan/rng.hpp"
#include "d2gan/synthetic.hpp"

using namespace d2gan;

TEST_CASE("ring centroids sit on the radius-2 circle at 45 degree steps",
          "[synthetic]") {
  const auto mu = GaussianMixture{}.means();
  for (std::size_t k = 0; k < 8; ++k) {
    const double angle = kPi * static_cast<double>(k) / 4.0;
    CHECK(std::abs(mu[k][0] - 2.0 * std::cos(angle)) < 1e-12);
    CHECK(std::abs(mu[k][1] - 2.0 * std::sin(angle)) < 1e-12);
  }

  // min pairwise separation 4 sin(pi/8), more than 10 sigma
  double min_dist = 1e300;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j)
      min_dist = std::min(min_dist, std::hypot(mu[i][0] - mu[j][0],
                                               mu[i][1] - mu[j][1]));
  CHECK(min_dist == Catch::Approx(4.0 * std::sin(kPi / 8.0)).epsilon(1e-12));
  CHECK(min_dist > 10.0 * std::sqrt(0.02));
}

TEST_CASE("ring samples follow the mixture statistics", "[synthetic]") {
  SeededRng rng(2024);
  const std::size_t n = 100000;
  const Tensor pts = sample_ring(n, rng);
  const auto mu = GaussianMixture{}.means();

  // empirical mean close to the origin
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += pts(i, 0);
    my += pts(i, 1);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  CHECK(std::abs(mx) < 0.02);
  CHECK(std::abs(my) < 0.02);

  // nearest-centroid assignment: uniform component weights and 0.02 I
  // per-component covariance
  std::array<std::size_t, 8> counts{};
  std::array<std::array<double, 3>, 8> scatter{};  // xx, yy, xy sums
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < 8; ++k) {
      const double d = std::hypot(pts(i, 0) - mu[k][0], pts(i, 1) - mu[k][1]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    const double dx = pts(i, 0) - mu[best][0];
    const double dy = pts(i, 1) - mu[best][1];
    ++counts[best];
    scatter[best][0] += dx * dx;
    scatter[best][1] += dy * dy;
    scatter[best][2] += dx * dy;
  }
  for (std::size_t k = 0; k < 8; ++k) {
    const double frac = static_cast<double>(counts[k]) / static_cast<double>(n);
    CHECK(std::abs(frac - 0.125) < 0.01);
    const double cnt = static_cast<double>(counts[k]);
    CHECK(scatter[k][0] / cnt == Catch::Approx(0.02).margin(0.001));
    CHECK(scatter[k][1] / cnt == Catch::Approx(0.02).margin(0.001));
    CHECK(std::abs(scatter[k][2] / cnt) < 0.001);
  }
}

TEST_CASE("ring density value at a centroid", "[synthetic]") {
  // mixture density evaluated by hand: dominant term 1/(8 * 2 pi * 0.02),
  // everything else is below 1e-25
  const double expected = 1.0 / (8.0 * 2.0 * kPi * 0.02);
  CHECK(ring_density(2.0, 0.0) == Catch::Approx(expected).epsilon(1e-9));
  CHECK(ring_density(2.0, 0.0) == Catch::Approx(0.994718).epsilon(1e-5));
}

TEST_CASE("ring density is symmetric under 45 degree rotation", "[synthetic]") {
  SeededRng rng(7);
  const double c = std::cos(kPi / 4.0), s = std::sin(kPi / 4.0);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-3.0, 3.0), y = rng.uniform(-3.0, 3.0);
    const double rx = c * x - s * y, ry = s * x + c * y;
    CHECK(ring_density(rx, ry) ==
          Catch::Approx(ring_density(x, y)).margin(1e-12));
  }
}

TEST_CASE("ring density integrates to one", "[synthetic]") {
  const QuadratureGrid grid = QuadratureGrid::box(-4.0, 4.0, -4.0, 4.0, 1000, 1000);
  CHECK(grid.mass(ring_mixture_density()) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("sampled log density agrees with an independent entropy estimate",
          "[synthetic]") {
  // two Monte Carlo estimates of E[log p(X)] from disjoint streams
  const std::size_t n = 1000000;
  SeededRng rng_a(100), rng_b(200);
  double est_a = 0.0, est_b = 0.0;
  const Tensor a = sample_ring(n, rng_a);
  const Tensor b = sample_ring(n, rng_b);
  for (std::size_t i = 0; i < n; ++i) {
    est_a += std::log(ring_density(a(i, 0), a(i, 1)));
    est_b += std::log(ring_density(b(i, 0), b(i, 1)));
  }
  est_a /= static_cast<double>(n);
  est_b /= static_cast<double>(n);
  CHECK(std::abs(est_a - est_b) < 0.05);
}

TEST_CASE("noise sampler moments and determinism", "[synthetic]") {
  SeededRng rng(31);
  const std::size_t n = 100000;
  const Tensor z = sample_noise(n, 2, rng);
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) mean += z[i];
  mean /= static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    var += (z[i] - mean) * (z[i] - mean);
  var /= static_cast<double>(z.size());
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.02);

  SeededRng r1(77), r2(77);
  CHECK(sample_noise(64, 4, r1) == sample_noise(64, 4, r2));

  SeededRng r3(5);
  const Tensor u = sample_noise(n, 1, r3, NoiseKind::uniform);
  double umin = 1e300, umax = -1e300, usum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    umin = std::min(umin, u[i]);
    umax = std::max(umax, u[i]);
    usum += u[i];
  }
  CHECK(umin >= -1.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(usum / static_cast<double>(n)) < 0.02);
}

TEST_CASE("seeded streams are reproducible", "[synthetic]") {
  SeededRng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
  SeededRng c(123), d(123);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(c.normal() == d.normal());
    REQUIRE(c.uniform_index(8) == d.uniform_index(8));
  }
}
