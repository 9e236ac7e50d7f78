#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "d2gan/nn.hpp"

namespace d2gan {

// Flatten per-layer gradients into parameters() order.
inline std::vector<Tensor> flatten_gradients(const Gradients& g) {
  std::vector<Tensor> flat;
  flat.reserve(2 * g.weight_grads.size());
  for (std::size_t l = 0; l < g.weight_grads.size(); ++l) {
    flat.push_back(g.weight_grads[l]);
    flat.push_back(g.bias_grads[l]);
  }
  return flat;
}

// Central-difference gradient check. `loss` evaluates the scalar loss at
// the network's current parameters; `analytic` produces gradients in
// parameters() order. Returns the max over all parameters of
// |analytic - central difference| / max(1, |analytic|).
inline double grad_check(Mlp& net,
                         const std::function<double(const Mlp&)>& loss,
                         const std::function<std::vector<Tensor>(const Mlp&)>& analytic,
                         double h = 1e-5) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be > 0");
  const std::vector<Tensor> grads = analytic(net);
  std::vector<Tensor*> params = net.parameters();
  if (grads.size() != params.size())
    throw std::invalid_argument("grad_check: analytic gradient count mismatch");

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double saved = t[i];
      t[i] = saved + h;
      const double up = loss(net);
      t[i] = saved - h;
      const double down = loss(net);
      t[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double a = grads[p][i];
      const double err = std::abs(a - fd) / std::max(1.0, std::abs(a));
      if (err > worst) worst = err;
    }
  }
  return worst;
}

}  // namespace d2gan
