#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "d2gan/nn.hpp"
#include "d2gan/rng.hpp"
#include "d2gan/synthetic.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

// Isotropic Gaussian weight init, zero biases.
struct InitScheme {
  double weight_std = 0.01;
  double bias_value = 0.0;
};

struct NoisePrior {
  NoiseKind kind = NoiseKind::gaussian;
  std::size_t dim = 2;

  Tensor sample(std::size_t n, SeededRng& rng) const {
    return sample_noise(n, dim, rng, kind);
  }
};

inline AffineLayer make_layer(std::size_t in, std::size_t out, Activation act,
                              SeededRng& rng, const InitScheme& init,
                              double leaky_slope = 0.2) {
  AffineLayer layer;
  layer.weights = Tensor::matrix(out, in);
  for (std::size_t i = 0; i < layer.weights.size(); ++i)
    layer.weights[i] = init.weight_std * rng.normal();
  layer.biases = Tensor::vector(out, init.bias_value);
  layer.activation = act;
  layer.leaky_slope = leaky_slope;
  return layer;
}

// Generator for the 2D experiment: two ReLU hidden layers, identity output
// (the ring data is unbounded, so no squashing head).
inline Mlp build_generator(std::size_t hidden, std::size_t noise_dim,
                           SeededRng& rng, const InitScheme& init = {}) {
  return Mlp({
      make_layer(noise_dim, hidden, Activation::relu, rng, init),
      make_layer(hidden, hidden, Activation::relu, rng, init),
      make_layer(hidden, 2, Activation::identity, rng, init),
  });
}

// Score discriminator: one ReLU hidden layer, softplus head so the score
// is a positive real rather than a probability.
inline Mlp build_score_discriminator(std::size_t hidden, SeededRng& rng,
                                     const InitScheme& init = {}) {
  return Mlp({
      make_layer(2, hidden, Activation::relu, rng, init),
      make_layer(hidden, 1, Activation::softplus, rng, init),
  });
}

// Probability discriminator for the single-discriminator baseline.
inline Mlp build_probability_discriminator(std::size_t hidden, SeededRng& rng,
                                           const InitScheme& init = {}) {
  return Mlp({
      make_layer(2, hidden, Activation::relu, rng, init),
      make_layer(hidden, 1, Activation::sigmoid, rng, init),
  });
}

struct SyntheticModels {
  Mlp generator;
  Mlp d1;
  Mlp d2;
};

// The three players of the dual-discriminator game. D1 and D2 get
// independent draws from the same init distribution; no parameter sharing.
inline SyntheticModels build_synthetic_models(std::size_t hidden_g,
                                              std::size_t hidden_d,
                                              std::size_t noise_dim,
                                              std::uint64_t seed,
                                              const InitScheme& init = {}) {
  if (hidden_g == 0 || hidden_d == 0 || noise_dim == 0)
    throw std::invalid_argument("build_synthetic_models: sizes must be >= 1");
  SeededRng rng(seed);
  SyntheticModels m{
      build_generator(hidden_g, noise_dim, rng, init),
      build_score_discriminator(hidden_d, rng, init),
      build_score_discriminator(hidden_d, rng, init),
  };
  return m;
}

struct BaselineModels {
  Mlp generator;
  Mlp d;
};

inline BaselineModels build_baseline_models(std::size_t hidden_g,
                                            std::size_t hidden_d,
                                            std::size_t noise_dim,
                                            std::uint64_t seed,
                                            const InitScheme& init = {}) {
  if (hidden_g == 0 || hidden_d == 0 || noise_dim == 0)
    throw std::invalid_argument("build_baseline_models: sizes must be >= 1");
  SeededRng rng(seed);
  BaselineModels m{
      build_generator(hidden_g, noise_dim, rng, init),
      build_probability_discriminator(hidden_d, rng, init),
  };
  return m;
}

// Push a noise batch through the generator.
inline Tensor generate(const Mlp& generator, const Tensor& noise_batch) {
  return generator.forward(noise_batch);
}

}  // namespace d2gan
