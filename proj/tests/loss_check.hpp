#pragma once

// Gradient oracle for the full objective. Both predictor targets sit behind
// stop-gradient, so the numeric side rebuilds the loss with the targets frozen
// at their values for the unperturbed parameters.

#include <vector>

#include "dasdn/model.hpp"
#include "grad_check.hpp"

namespace testing_support {

inline GradientPair total_loss_gradients(const dasdn::Tensor3& obs, const dasdn::ModelParams& p) {
  namespace g = dasdn::grad;
  namespace graph = dasdn::graph;
  const std::size_t c = p.channels();
  const auto& tk = p.tucker;
  std::vector<Leaf> leaves{
      {{tk.core.dims()[0], tk.core.dims()[1], tk.core.dims()[2]}, tk.core.values()},
      {{tk.factors[0].rows(), tk.factors[0].cols()}, tk.factors[0].values()},
      {{tk.factors[1].rows(), tk.factors[1].cols()}, tk.factors[1].values()},
      {{tk.factors[2].rows(), tk.factors[2].cols()}, tk.factors[2].values()},
      {{c}, p.beta},
      {{c}, p.gamma},
      {{c, c, 3, 3}, p.conv_weight},
      {{c}, p.conv_bias},
  };
  auto vars = [](const std::vector<g::Var>& v) {
    return graph::ParamVars{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  };

  dasdn::Tensor3 z0, z_prime0;
  {
    g::Tape tape;
    const auto fp = graph::forward(tape.constant(obs), graph::declare(tape, p), p.epsilon);
    z0 = g::to_tensor(fp.z);
    z_prime0 = g::to_tensor(fp.z_prime);
  }

  const Builder analytic = [&](g::Tape& tape, const std::vector<g::Var>& v) {
    return graph::forward(tape.constant(obs), vars(v), p.epsilon).loss;
  };
  const Builder frozen = [&](g::Tape& tape, const std::vector<g::Var>& v) {
    const auto pv = vars(v);
    const auto t_prime = graph::tucker_reconstruct(pv.core, pv.u1, pv.u2, pv.u3);
    const auto z_prime = graph::projector(t_prime, pv.beta, pv.gamma, p.epsilon);
    const auto z = graph::projector(tape.constant(obs), pv.beta, pv.gamma, p.epsilon);
    const auto lf = graph::loss_f(graph::predictor(z, pv.weight, pv.bias), tape.constant(z_prime0),
                                  graph::predictor(z_prime, pv.weight, pv.bias), tape.constant(z0));
    return graph::total_loss(lf, graph::loss_chent(pv.beta, pv.gamma));
  };
  return central_differences(analytic, frozen, std::move(leaves));
}

}  // namespace testing_support
