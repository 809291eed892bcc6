#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dasdn/model.hpp"
#include "dasdn/tensor.hpp"
#include "dasdn/tucker.hpp"

namespace dasdn {

enum class OutputMode {
  kPredictor,  // (predictor(Z) + predictor(Z')) / 2
  kLowRank,    // (observation + low-rank reconstruction) / 2, both normalized
};

inline constexpr std::size_t kDefaultIterations = 1500;
inline constexpr double kDefaultLearningRate = 1e-2;

struct DenoiseConfig {
  Ranks ranks{1, 1, 1};
  std::size_t iterations = kDefaultIterations;
  double learning_rate = kDefaultLearningRate;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  OutputMode output_mode = OutputMode::kPredictor;
  bool channel_entropy = true;
};

struct DenoiseReport {
  std::vector<double> loss_trace;  // one entry per iteration, before that iteration's update
  std::vector<double> beta;
  std::vector<double> gamma;
  Tensor3 denoised;  // non-negative amplitude in the units of the input
  ModelParams params;
  double wall_time_s = 0.0;
};

/// Called after every iteration with the zero-based index and that iteration's loss.
using ProgressFn = std::function<void(std::size_t iteration, double loss)>;

/// Throws std::invalid_argument when the config is unusable for dims.
void validate(const DenoiseConfig& cfg, const Dims3& dims);

/// Ranks (r_c, I_f, I_t): spatial truncation only.
Ranks spatial_ranks(const Dims3& dims, std::size_t rank_c);

/// Runs the stop-gradient projector/predictor optimization on a non-negative
/// amplitude spectrogram and returns max(0, output) rescaled to input units.
/// Throws NumericError (carrying the iteration index) if the loss becomes non-finite.
DenoiseReport denoise(const Tensor3& t_raw, const DenoiseConfig& cfg,
                      const ProgressFn& progress = {});

}  // namespace dasdn
