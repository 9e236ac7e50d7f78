#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2gan/nn.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-network Adam state: first/second moments shaped like the parameters
// plus the shared step counter.
class AdamState {
 public:
  AdamState(const Mlp& net, AdamConfig cfg = {}) : cfg_(cfg) {
    for (const Tensor* p : net.parameters()) {
      m_.emplace_back(p->shape(), 0.0);
      v_.emplace_back(p->shape(), 0.0);
    }
  }

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

  // Standard bias-corrected update. Grads are validated before any state
  // is touched, so a non-finite gradient aborts the whole step.
  void step(Mlp& net, const Gradients& grads) {
    std::vector<Tensor*> params = net.parameters();
    if (params.size() != m_.size())
      throw std::invalid_argument("adam_step: parameter count changed");

    std::vector<const Tensor*> gs;
    gs.reserve(params.size());
    for (std::size_t l = 0; l < grads.weight_grads.size(); ++l) {
      gs.push_back(&grads.weight_grads[l]);
      gs.push_back(&grads.bias_grads[l]);
    }
    if (gs.size() != params.size())
      throw std::invalid_argument("adam_step: gradient count mismatch");

    for (std::size_t p = 0; p < params.size(); ++p) {
      if (!params[p]->same_shape(*gs[p]))
        throw std::invalid_argument("adam_step: shape mismatch at parameter " +
                                    std::to_string(p));
      if (!gs[p]->all_finite())
        throw std::runtime_error("adam_step: non-finite gradient at parameter " +
                                 std::to_string(p) + " (layer " +
                                 std::to_string(p / 2) +
                                 (p % 2 == 0 ? " weights)" : " biases)"));
    }

    ++t_;
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    const double m_corr = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double v_corr = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params.size(); ++p) {
      Tensor& x = *params[p];
      const Tensor& g = *gs[p];
      Tensor& m = m_[p];
      Tensor& v = v_[p];
      for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double m_hat = m[i] / m_corr;
        const double v_hat = v[i] / v_corr;
        x[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::vector<Tensor> m_, v_;
  long t_ = 0;
};

}  // namespace d2gan
