#pragma once

#include <span>
#include <stdexcept>
#include <utility>

#include "d2gan/nn.hpp"
#include "d2gan/objectives.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

inline std::span<const double> as_span(const Tensor& t) {
  return {t.data(), t.size()};
}

// Elementwise sum of two gradient sets for the same network.
inline Gradients add_gradients(Gradients a, const Gradients& b) {
  for (std::size_t l = 0; l < a.weight_grads.size(); ++l) {
    for (std::size_t i = 0; i < a.weight_grads[l].size(); ++i)
      a.weight_grads[l][i] += b.weight_grads[l][i];
    for (std::size_t i = 0; i < a.bias_grads[l].size(); ++i)
      a.bias_grads[l][i] += b.bias_grads[l][i];
  }
  return a;
}

// One player's descent loss with its exact parameter gradients, plus the
// scores that produced it (the trainer's stability guard reads them).
struct PlayerUpdate {
  double loss = 0.0;
  Gradients grads;
  Tensor real_scores;
  Tensor fake_scores;
};

// D1 descends -(alpha*mean(log D1(x)) - mean(D1(G(z)))).
inline PlayerUpdate d1_loss_and_grads(const Mlp& d1, const Tensor& real,
                                      const Tensor& fake,
                                      const D2ganHyper& hyper) {
  auto [s_real, tape_r] = d1.forward_with_tape(real);
  auto [s_fake, tape_f] = d1.forward_with_tape(fake);
  const double loss = -(hyper.alpha * detail::mean_log_clamped(as_span(s_real)) -
                        detail::mean(as_span(s_fake)));
  ScorePairGrads sg = d2gan_d1_descent_grads(as_span(s_real), as_span(s_fake), hyper);
  Gradients g = add_gradients(tape_r.backward(sg.real), tape_f.backward(sg.fake));
  return {loss, std::move(g), std::move(s_real), std::move(s_fake)};
}

// D2 descends -(-mean(D2(x)) + beta*mean(log D2(G(z)))).
inline PlayerUpdate d2_loss_and_grads(const Mlp& d2, const Tensor& real,
                                      const Tensor& fake,
                                      const D2ganHyper& hyper) {
  auto [s_real, tape_r] = d2.forward_with_tape(real);
  auto [s_fake, tape_f] = d2.forward_with_tape(fake);
  const double loss = -(-detail::mean(as_span(s_real)) +
                        hyper.beta * detail::mean_log_clamped(as_span(s_fake)));
  ScorePairGrads sg = d2gan_d2_descent_grads(as_span(s_real), as_span(s_fake), hyper);
  Gradients g = add_gradients(tape_r.backward(sg.real), tape_f.backward(sg.fake));
  return {loss, std::move(g), std::move(s_real), std::move(s_fake)};
}

// Generator descends -mean(D1(G(z))) + beta*mean(log D2(G(z))), chaining
// the input gradients of both discriminators back through the generator.
inline PlayerUpdate d2gan_generator_loss_and_grads(const Mlp& generator,
                                                   const Mlp& d1, const Mlp& d2,
                                                   const Tensor& noise,
                                                   const D2ganHyper& hyper) {
  auto [fake, tape_g] = generator.forward_with_tape(noise);
  auto [s1, tape_1] = d1.forward_with_tape(fake);
  auto [s2, tape_2] = d2.forward_with_tape(fake);
  const double loss = d2gan_generator_loss(as_span(s1), as_span(s2), hyper);
  GeneratorScoreGrads sg =
      d2gan_generator_descent_grads(as_span(s1), as_span(s2), hyper);
  Gradients g1 = tape_1.backward(sg.d1_fake);
  Gradients g2 = tape_2.backward(sg.d2_fake);
  Tensor upstream = g1.input_grad;
  for (std::size_t i = 0; i < upstream.size(); ++i)
    upstream[i] += g2.input_grad[i];
  Gradients g = tape_g.backward(upstream);
  return {loss, std::move(g), std::move(s1), std::move(s2)};
}

// Baseline discriminator descends -(E[log D(x)] + E[log(1 - D(G(z)))]).
inline PlayerUpdate gan_d_loss_and_grads(const Mlp& d, const Tensor& real,
                                         const Tensor& fake) {
  auto [p_real, tape_r] = d.forward_with_tape(real);
  auto [p_fake, tape_f] = d.forward_with_tape(fake);
  const double loss = -gan_discriminator_loss(as_span(p_real), as_span(p_fake));
  ScorePairGrads sg = gan_d_descent_grads(as_span(p_real), as_span(p_fake));
  Gradients g = add_gradients(tape_r.backward(sg.real), tape_f.backward(sg.fake));
  return {loss, std::move(g), std::move(p_real), std::move(p_fake)};
}

// Baseline generator descends the non-saturating loss -E[log D(G(z))].
inline PlayerUpdate gan_generator_loss_and_grads(const Mlp& generator,
                                                 const Mlp& d,
                                                 const Tensor& noise) {
  auto [fake, tape_g] = generator.forward_with_tape(noise);
  auto [p_fake, tape_d] = d.forward_with_tape(fake);
  const double loss = gan_generator_loss(as_span(p_fake));
  Tensor sg = gan_g_descent_grads(as_span(p_fake));
  Gradients gd = tape_d.backward(sg);
  Gradients g = tape_g.backward(gd.input_grad);
  return {loss, std::move(g), Tensor(), std::move(p_fake)};
}

}  // namespace d2gan
