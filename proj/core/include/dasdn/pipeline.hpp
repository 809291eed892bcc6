#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dasdn/baselines.hpp"
#include "dasdn/denoiser.hpp"
#include "dasdn/signal.hpp"
#include "dasdn/stft.hpp"

namespace dasdn {

enum class Method { kProposed, kSpectralSubtraction, kSvd, kTucker };

/// Accepts "proposed", "ss", "svd", "tucker". Throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);
std::string_view method_name(Method m);

struct MethodOptions {
  std::size_t rank_c = 1;
  std::size_t window_size = kDefaultWindow;
  std::size_t hop_size = kDefaultHop;
  std::size_t iterations = kDefaultIterations;
  double learning_rate = kDefaultLearningRate;
  std::uint64_t seed = 0;
  OutputMode output_mode = OutputMode::kPredictor;
  double ss_alpha = 1.0;
  std::optional<NoiseFloor> noise_floor;  // required by spectral subtraction
  ProgressFn progress;
};

struct MethodResult {
  MultichannelSignal denoised;          // same channel count and length as the input
  std::optional<DenoiseReport> report;  // proposed method only
};

/// STFT -> method -> ISTFT with the noisy phase. The SVD baseline works on the
/// time-domain samples directly. Samples past the last full frame, which the
/// STFT never sees, are zero in the output.
MethodResult run_method(const MultichannelSignal& noisy, Method method, const MethodOptions& opts);

}  // namespace dasdn
