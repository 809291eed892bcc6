#include "dasdn/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dasdn {

namespace {

using grad::Tape;
using grad::Var;

// Uniform on [0, 1) from the top 53 bits; identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ModelParams init_params(const Tensor3& t_raw, const Ranks& ranks, std::uint64_t seed) {
  validate_ranks(t_raw.dims(), ranks);
  ModelParams p;
  const double peak = t_raw.max_value();
  p.norm_scale = peak > 0.0 ? peak : 1.0;
  p.tucker = hosvd((1.0 / p.norm_scale) * t_raw, ranks);

  const std::size_t channels = t_raw.dims()[0];
  p.beta.assign(channels, 0.0);
  p.gamma.assign(channels, 1.0);
  p.conv_bias.assign(channels, 0.0);
  p.conv_weight.resize(channels * channels * 9);
  const double bound = 1.0 / std::sqrt(static_cast<double>(channels) * 9.0);
  std::mt19937_64 rng(seed);
  for (double& w : p.conv_weight) w = bound * (2.0 * unit_uniform(rng) - 1.0);
  return p;
}

namespace graph {

Var projector(Var t, Var beta, Var gamma, double eps) {
  Var denom = grad::add_scalar(grad::abs(gamma), eps);
  return grad::channel_tanh(t, beta, denom);
}

Var predictor(Var z, Var weight, Var bias) { return grad::conv3x3(z, weight, bias); }

Var loss_f(Var t_pred, Var z_prime, Var t_prime_pred, Var z) {
  Tape& tape = t_pred.tape();
  Var a = grad::frobenius_distance(t_pred, tape.stop_gradient(z_prime));
  Var b = grad::frobenius_distance(t_prime_pred, tape.stop_gradient(z));
  return grad::scale(grad::add(a, b), 0.5);
}

Var loss_chent(Var beta, Var gamma) {
  if (beta.shape() != gamma.shape()) {
    throw std::invalid_argument("loss_chent: beta and gamma lengths differ");
  }
  return grad::scale(grad::add(grad::softmax_entropy(beta), grad::softmax_entropy(gamma)), 0.5);
}

Var total_loss(Var lf, Var lchent) { return grad::add(lf, lchent); }

Var tucker_reconstruct(Var core, Var u1, Var u2, Var u3) {
  const auto& cs = core.shape();
  if (cs.size() != 3) throw std::invalid_argument("tucker_reconstruct: core must be rank 3");
  const Var factors[] = {u1, u2, u3};
  Dims3 full{};
  for (std::size_t m = 0; m < 3; ++m) {
    if (factors[m].shape().size() != 2) {
      throw std::invalid_argument("tucker_reconstruct: factors must be matrices");
    }
    full[m] = factors[m].shape()[0];
  }
  Var out = core;
  for (int mode : cheapest_mode_order({cs[0], cs[1], cs[2]}, full)) {
    out = grad::mode_multiply(out, factors[mode - 1], mode);
  }
  return out;
}

ParamVars declare(Tape& tape, const ModelParams& p) {
  const std::size_t c = p.channels();
  return ParamVars{
      tape.parameter(p.tucker.core),
      tape.parameter(p.tucker.factors[0]),
      tape.parameter(p.tucker.factors[1]),
      tape.parameter(p.tucker.factors[2]),
      tape.parameter({c}, p.beta),
      tape.parameter({c}, p.gamma),
      tape.parameter({c, c, 3, 3}, p.conv_weight),
      tape.parameter({c}, p.conv_bias),
  };
}

ForwardPass forward(Var observation, const ParamVars& p, double eps, bool with_channel_entropy) {
  ForwardPass fp;
  fp.t_prime = tucker_reconstruct(p.core, p.u1, p.u2, p.u3);
  if (fp.t_prime.shape() != observation.shape()) {
    throw std::invalid_argument("forward: Tucker factors do not match the observation dims");
  }
  fp.z_prime = projector(fp.t_prime, p.beta, p.gamma, eps);
  fp.z = projector(observation, p.beta, p.gamma, eps);
  fp.t_prime_pred = predictor(fp.z_prime, p.weight, p.bias);
  fp.t_pred = predictor(fp.z, p.weight, p.bias);
  fp.loss_f = loss_f(fp.t_pred, fp.z_prime, fp.t_prime_pred, fp.z);
  if (with_channel_entropy) {
    fp.loss_chent = loss_chent(p.beta, p.gamma);
    fp.loss = total_loss(fp.loss_f, fp.loss_chent);
  } else {
    fp.loss = fp.loss_f;
  }
  return fp;
}

}  // namespace graph

Tensor3 projector(const Tensor3& t, std::span<const double> beta, std::span<const double> gamma,
                  double eps) {
  if (beta.size() != t.dims()[0] || gamma.size() != t.dims()[0]) {
    throw std::invalid_argument("projector: beta/gamma length must equal the channel count");
  }
  Tape tape;
  const std::size_t c = beta.size();
  Var out = graph::projector(tape.constant(t),
                             tape.constant({c}, {beta.begin(), beta.end()}),
                             tape.constant({c}, {gamma.begin(), gamma.end()}), eps);
  return grad::to_tensor(out);
}

Tensor3 predictor(const Tensor3& z, std::span<const double> weight, std::span<const double> bias) {
  const std::size_t c = z.dims()[0];
  if (weight.size() != c * c * 9 || bias.size() != c) {
    throw std::invalid_argument("predictor: weight must be (C, C, 3, 3) and bias length C");
  }
  Tape tape;
  Var out = graph::predictor(tape.constant(z),
                             tape.constant({c, c, 3, 3}, {weight.begin(), weight.end()}),
                             tape.constant({c}, {bias.begin(), bias.end()}));
  return grad::to_tensor(out);
}

double loss_f(const Tensor3& t_pred, const Tensor3& z_prime, const Tensor3& t_prime_pred,
              const Tensor3& z) {
  if (t_pred.dims() != z_prime.dims() || t_pred.dims() != t_prime_pred.dims() ||
      t_pred.dims() != z.dims()) {
    throw std::invalid_argument("loss_f: all four tensors must share dims");
  }
  return 0.5 * (frobenius_norm(t_pred - z_prime) + frobenius_norm(t_prime_pred - z));
}

double loss_chent(std::span<const double> beta, std::span<const double> gamma) {
  if (beta.size() != gamma.size()) {
    throw std::invalid_argument("loss_chent: beta and gamma lengths differ");
  }
  if (beta.empty()) throw std::invalid_argument("loss_chent: needs at least one channel");
  Tape tape;
  const std::size_t c = beta.size();
  return graph::loss_chent(tape.constant({c}, {beta.begin(), beta.end()}),
                           tape.constant({c}, {gamma.begin(), gamma.end()}))
      .item();
}

}  // namespace dasdn
