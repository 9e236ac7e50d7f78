#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "d2gan/rng.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

enum class Activation { identity, relu, leaky_relu, tanh, softplus, sigmoid };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

inline Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "leaky_relu") return Activation::leaky_relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "softplus") return Activation::softplus;
  if (name == "sigmoid") return Activation::sigmoid;
  throw std::invalid_argument("unknown activation: " + name);
}

// Overflow-safe softplus. Floored at the smallest normal double so the
// result stays strictly positive even where exp(-|x|) underflows.
inline double softplus(double x) {
  const double v = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  return std::max(v, std::numeric_limits<double>::min());
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double apply_activation(Activation a, double x, double leaky_slope) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::leaky_relu: return x > 0.0 ? x : leaky_slope * x;
    case Activation::tanh: return std::tanh(x);
    case Activation::softplus: return softplus(x);
    case Activation::sigmoid: {
      // Probability head; keep the output inside (0, 1) so downstream
      // logs stay finite.
      const double p = sigmoid(x);
      return std::min(std::max(p, 1e-15), 1.0 - 1e-15);
    }
  }
  return x;
}

// Derivative at pre-activation x.
inline double activation_derivative(Activation a, double x, double leaky_slope) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::leaky_relu: return x > 0.0 ? 1.0 : leaky_slope;
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::softplus: return sigmoid(x);
    case Activation::sigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

// One fully connected layer: y = act(x W^T + b).
struct AffineLayer {
  Tensor weights;  // [out x in]
  Tensor biases;   // [out]
  Activation activation = Activation::identity;
  double leaky_slope = 0.2;

  std::size_t in_dim() const { return weights.shape()[1]; }
  std::size_t out_dim() const { return weights.shape()[0]; }

  void validate(std::size_t layer_index) const {
    if (weights.rank() != 2 || biases.rank() != 1 ||
        biases.shape()[0] != weights.shape()[0])
      throw std::invalid_argument("layer " + std::to_string(layer_index) +
                                  ": weight/bias shapes inconsistent, weights " +
                                  weights.shape_string() + " biases " +
                                  biases.shape_string());
    if (activation == Activation::leaky_relu &&
        !(leaky_slope > 0.0 && leaky_slope < 1.0))
      throw std::invalid_argument("layer " + std::to_string(layer_index) +
                                  ": leaky_relu slope must be in (0,1)");
  }
};

class GradientTape;

struct Gradients {
  std::vector<Tensor> weight_grads;  // per layer, [out x in]
  std::vector<Tensor> bias_grads;    // per layer, [out]
  Tensor input_grad;                 // [n x in_dim]
};

// Stack of affine layers. Forward with a tape records everything the
// backward pass needs for exact gradients.
class Mlp {
 public:
  std::vector<AffineLayer> layers;

  Mlp() = default;
  explicit Mlp(std::vector<AffineLayer> ls) : layers(std::move(ls)) { validate(); }

  void validate() const {
    if (layers.empty()) throw std::invalid_argument("Mlp: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      layers[l].validate(l);
      if (l > 0 && layers[l].in_dim() != layers[l - 1].out_dim())
        throw std::invalid_argument(
            "layer " + std::to_string(l) + ": input dim " +
            std::to_string(layers[l].in_dim()) + " does not match layer " +
            std::to_string(l - 1) + " output dim " +
            std::to_string(layers[l - 1].out_dim()));
    }
  }

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.back().out_dim(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
  }

  // Flat read/write access to parameters, layer by layer (weights then
  // biases), used by the optimizer, the gradient checker and checkpoints.
  std::vector<Tensor*> parameters() {
    std::vector<Tensor*> ps;
    for (auto& l : layers) {
      ps.push_back(&l.weights);
      ps.push_back(&l.biases);
    }
    return ps;
  }
  std::vector<const Tensor*> parameters() const {
    std::vector<const Tensor*> ps;
    for (const auto& l : layers) {
      ps.push_back(&l.weights);
      ps.push_back(&l.biases);
    }
    return ps;
  }

  Tensor forward(const Tensor& batch) const;
  std::pair<Tensor, GradientTape> forward_with_tape(const Tensor& batch) const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
      if (!(a.layers[l].weights == b.layers[l].weights) ||
          !(a.layers[l].biases == b.layers[l].biases) ||
          a.layers[l].activation != b.layers[l].activation)
        return false;
    }
    return true;
  }
};

namespace detail {

// Z[n x out] = X[n x in] * W^T + b, rows are samples.
inline void affine_forward(const Tensor& x, const AffineLayer& layer, Tensor& z) {
  const std::size_t n = x.rows(), in = layer.in_dim(), out = layer.out_dim();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    double* zi = z.row(i);
    for (std::size_t o = 0; o < out; ++o) {
      const double* w = layer.weights.row(o);
      double acc = layer.biases[o];
      for (std::size_t k = 0; k < in; ++k) acc += xi[k] * w[k];
      zi[o] = acc;
    }
  }
}

inline void check_input_shape(const Mlp& net, const Tensor& batch) {
  if (batch.rank() != 2)
    throw std::invalid_argument("forward: batch must be rank 2, got " +
                                batch.shape_string());
  if (batch.cols() != net.input_dim())
    throw std::invalid_argument(
        "layer 0: batch width " + std::to_string(batch.cols()) +
        " does not match input dim " + std::to_string(net.input_dim()));
}

}  // namespace detail

// Record of one forward pass: the input plus every pre-activation, in
// order. Backward replays the layers exactly once in reverse. Single use;
// the tape also becomes stale if the network is mutated before backward.
class GradientTape {
 public:
  GradientTape(const Mlp* net, Tensor input, std::vector<Tensor> pre,
               std::vector<Tensor> post)
      : net_(net),
        input_(std::move(input)),
        pre_(std::move(pre)),
        post_(std::move(post)) {}

  // Gradients of sum(upstream . output) w.r.t. every parameter and the
  // batch input. Consumes the tape.
  Gradients backward(const Tensor& upstream) {
    if (consumed_)
      throw std::logic_error("GradientTape: already consumed (single-use)");
    const std::size_t n_layers = net_->layers.size();
    if (!upstream.same_shape(pre_.back()))
      throw std::invalid_argument("backward: upstream shape " +
                                  upstream.shape_string() +
                                  " does not match output shape " +
                                  pre_.back().shape_string());
    consumed_ = true;

    Gradients g;
    g.weight_grads.resize(n_layers);
    g.bias_grads.resize(n_layers);

    const std::size_t n = input_.rows();
    Tensor delta = upstream;  // dLoss/dA for the current layer
    for (std::size_t li = n_layers; li-- > 0;) {
      const AffineLayer& layer = net_->layers[li];
      const std::size_t in = layer.in_dim(), out = layer.out_dim();
      const Tensor& z = pre_[li];
      const Tensor& a_prev = li == 0 ? input_ : post_[li - 1];

      // dZ = dA * act'(Z), in place on delta.
      for (std::size_t i = 0; i < n; ++i) {
        double* di = delta.row(i);
        const double* zi = z.row(i);
        for (std::size_t o = 0; o < out; ++o)
          di[o] *= activation_derivative(layer.activation, zi[o], layer.leaky_slope);
      }

      Tensor dw = Tensor::matrix(out, in);
      Tensor db = Tensor::vector(out);
      for (std::size_t i = 0; i < n; ++i) {
        const double* di = delta.row(i);
        const double* ai = a_prev.row(i);
        for (std::size_t o = 0; o < out; ++o) {
          const double d = di[o];
          db[o] += d;
          double* dwo = dw.row(o);
          for (std::size_t k = 0; k < in; ++k) dwo[k] += d * ai[k];
        }
      }

      Tensor prev_delta = Tensor::matrix(n, in);
      for (std::size_t i = 0; i < n; ++i) {
        const double* di = delta.row(i);
        double* pi = prev_delta.row(i);
        for (std::size_t o = 0; o < out; ++o) {
          const double d = di[o];
          const double* w = layer.weights.row(o);
          for (std::size_t k = 0; k < in; ++k) pi[k] += d * w[k];
        }
      }

      g.weight_grads[li] = std::move(dw);
      g.bias_grads[li] = std::move(db);
      delta = std::move(prev_delta);
    }
    g.input_grad = std::move(delta);
    return g;
  }

  bool consumed() const { return consumed_; }

 private:
  const Mlp* net_;
  Tensor input_;
  std::vector<Tensor> pre_;   // Z per layer
  std::vector<Tensor> post_;  // A per layer
  bool consumed_ = false;
};

inline Tensor Mlp::forward(const Tensor& batch) const {
  detail::check_input_shape(*this, batch);
  const std::size_t n = batch.rows();
  Tensor a = batch;
  for (const auto& layer : layers) {
    Tensor z = Tensor::matrix(n, layer.out_dim());
    detail::affine_forward(a, layer, z);
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = apply_activation(layer.activation, z[i], layer.leaky_slope);
    a = std::move(z);
  }
  return a;
}

inline std::pair<Tensor, GradientTape> Mlp::forward_with_tape(
    const Tensor& batch) const {
  detail::check_input_shape(*this, batch);
  const std::size_t n = batch.rows();
  std::vector<Tensor> pre, post;
  pre.reserve(layers.size());
  post.reserve(layers.size());
  Tensor a = batch;
  for (const auto& layer : layers) {
    Tensor z = Tensor::matrix(n, layer.out_dim());
    detail::affine_forward(a, layer, z);
    Tensor act = z;
    for (std::size_t i = 0; i < act.size(); ++i)
      act[i] = apply_activation(layer.activation, act[i], layer.leaky_slope);
    pre.push_back(std::move(z));
    post.push_back(act);
    a = std::move(act);
  }
  return {a, GradientTape(this, batch, std::move(pre), std::move(post))};
}

}  // namespace d2gan
