#include "dasdn/denoiser.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dasdn/adam.hpp"
#include "dasdn/error.hpp"

namespace dasdn {

void validate(const DenoiseConfig& cfg, const Dims3& dims) {
  validate_ranks(dims, cfg.ranks);
  if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) ||
      !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(cfg.adam_eps > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
}

Ranks spatial_ranks(const Dims3& dims, std::size_t rank_c) { return {rank_c, dims[1], dims[2]}; }

DenoiseReport denoise(const Tensor3& t_raw, const DenoiseConfig& cfg, const ProgressFn& progress) {
  validate(cfg, t_raw.dims());
  for (double v : t_raw.data()) {
    if (!(v >= 0.0)) throw std::invalid_argument("denoise: input amplitudes must be >= 0");
  }
  const auto start = std::chrono::steady_clock::now();

  ModelParams params = init_params(t_raw, cfg.ranks, cfg.seed);
  const Tensor3 observation = (1.0 / params.norm_scale) * t_raw;
  const AdamConfig adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};

  std::array<AdamState, 8> states;

  DenoiseReport report;
  report.loss_trace.reserve(cfg.iterations);
  Tensor3 output;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    grad::Tape tape;
    const grad::Var obs = tape.constant(observation);
    const graph::ParamVars pv = graph::declare(tape, params);
    const graph::ForwardPass fp = graph::forward(obs, pv, params.epsilon, cfg.channel_entropy);
    const double loss = fp.loss.item();
    if (!std::isfinite(loss)) {
      throw NumericError("loss became non-finite at iteration " + std::to_string(it), it);
    }
    report.loss_trace.push_back(loss);
    tape.backward(fp.loss);

    if (it + 1 == cfg.iterations) {
      const grad::Var a = cfg.output_mode == OutputMode::kPredictor ? fp.t_pred : obs;
      const grad::Var b = cfg.output_mode == OutputMode::kPredictor ? fp.t_prime_pred : fp.t_prime;
      output = Tensor3(observation.dims());
      auto o = output.data();
      auto av = a.value();
      auto bv = b.value();
      for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = std::max(0.0, 0.5 * (av[i] + bv[i])) * params.norm_scale;
      }
    }

    const grad::Var vars[] = {pv.core, pv.u1, pv.u2, pv.u3, pv.beta, pv.gamma, pv.weight, pv.bias};
    std::span<double> targets[] = {
        params.tucker.core.data(),       params.tucker.factors[0].data(),
        params.tucker.factors[1].data(), params.tucker.factors[2].data(),
        params.beta,                     params.gamma,
        params.conv_weight,              params.conv_bias};
    for (std::size_t k = 0; k < 8; ++k) {
      const std::vector<double> g = vars[k].grad();
      adam_step(targets[k], g, states[k], adam);
    }
    if (progress) progress(it, loss);
  }

  report.beta = params.beta;
  report.gamma = params.gamma;
  report.denoised = std::move(output);
  report.params = std::move(params);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace dasdn
