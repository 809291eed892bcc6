#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dasdn/grad.hpp"
#include "dasdn/tensor.hpp"
#include "dasdn/tucker.hpp"

namespace dasdn {

inline constexpr double kMachineEpsilon = std::numeric_limits<double>::epsilon();

/// Everything the optimizer updates, plus the fixed epsilon and the input
/// normalization factor.
struct ModelParams {
  TuckerFactors tucker;
  std::vector<double> beta;         // per-channel subtraction offset
  std::vector<double> gamma;        // per-channel scale
  std::vector<double> conv_weight;  // (C, C, 3, 3)
  std::vector<double> conv_bias;    // C
  double epsilon = kMachineEpsilon;
  double norm_scale = 1.0;

  std::size_t channels() const noexcept { return beta.size(); }
};

/// Tucker init from the max-normalized observation, beta = 0, gamma = 1,
/// conv weights ~ U[-k, k] with k = 1/sqrt(9 C) from a seeded generator, bias = 0.
/// norm_scale is the largest entry of t_raw (1 for an all-zero input).
ModelParams init_params(const Tensor3& t_raw, const Ranks& ranks, std::uint64_t seed);

/// tanh((t[c,f,t] - beta[c]) / (|gamma[c]| + eps)).
Tensor3 projector(const Tensor3& t, std::span<const double> beta, std::span<const double> gamma,
                  double eps = kMachineEpsilon);

/// Single 3x3 convolution over (frequency, time) with full channel mixing, zero
/// padding 1 and per-channel bias; no activation.
Tensor3 predictor(const Tensor3& z, std::span<const double> weight, std::span<const double> bias);

/// (||t_pred - z_prime||_F + ||t_prime_pred - z||_F) / 2.
double loss_f(const Tensor3& t_pred, const Tensor3& z_prime, const Tensor3& t_prime_pred,
              const Tensor3& z);

/// (H(softmax(beta)) + H(softmax(gamma))) / 2. The softmax partition sums run
/// over all C channels.
double loss_chent(std::span<const double> beta, std::span<const double> gamma);

namespace graph {

grad::Var projector(grad::Var t, grad::Var beta, grad::Var gamma, double eps = kMachineEpsilon);
grad::Var predictor(grad::Var z, grad::Var weight, grad::Var bias);
/// Both targets pass through stop_gradient here, so callers cannot leak
/// gradient into them.
grad::Var loss_f(grad::Var t_pred, grad::Var z_prime, grad::Var t_prime_pred, grad::Var z);
grad::Var loss_chent(grad::Var beta, grad::Var gamma);
grad::Var total_loss(grad::Var lf, grad::Var lchent);

/// core x1 U1 x2 U2 x3 U3 in the cheapest mode order.
grad::Var tucker_reconstruct(grad::Var core, grad::Var u1, grad::Var u2, grad::Var u3);

struct ParamVars {
  grad::Var core, u1, u2, u3, beta, gamma, weight, bias;
};

/// Declares every entry of p as a trainable leaf on the tape.
ParamVars declare(grad::Tape& tape, const ModelParams& p);

struct ForwardPass {
  grad::Var t_prime;       // low-rank reconstruction
  grad::Var z_prime;       // projector(t_prime)
  grad::Var z;             // projector(observation)
  grad::Var t_prime_pred;  // predictor(z_prime)
  grad::Var t_pred;        // predictor(z)
  grad::Var loss_f;
  grad::Var loss_chent;    // invalid when the entropy term is disabled
  grad::Var loss;
};

/// One evaluation of the full objective for the (already normalized) observation.
ForwardPass forward(grad::Var observation, const ParamVars& p, double eps = kMachineEpsilon,
                    bool with_channel_entropy = true);

}  // namespace graph

}  // namespace dasdn
