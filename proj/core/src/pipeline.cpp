#include "dasdn/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dasdn {

Method parse_method(std::string_view name) {
  if (name == "proposed") return Method::kProposed;
  if (name == "ss") return Method::kSpectralSubtraction;
  if (name == "svd") return Method::kSvd;
  if (name == "tucker") return Method::kTucker;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected proposed, ss, svd or tucker)");
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kProposed: return "proposed";
    case Method::kSpectralSubtraction: return "ss";
    case Method::kSvd: return "svd";
    case Method::kTucker: return "tucker";
  }
  return "unknown";
}

namespace {

MultichannelSignal fit_length(const MultichannelSignal& sig, std::size_t samples) {
  MultichannelSignal out(sig.channels(), samples, sig.sample_rate());
  const std::size_t n = std::min(samples, sig.samples());
  for (std::size_t c = 0; c < sig.channels(); ++c) {
    std::copy_n(sig.channel(c).begin(), n, out.channel(c).begin());
  }
  return out;
}

}  // namespace

MethodResult run_method(const MultichannelSignal& noisy, Method method, const MethodOptions& opts) {
  if (opts.rank_c < 1 || opts.rank_c > noisy.channels()) {
    throw std::invalid_argument("rank-c " + std::to_string(opts.rank_c) + " outside [1, " +
                                std::to_string(noisy.channels()) + "]");
  }
  if (method == Method::kSvd) return {svd_denoise(noisy, opts.rank_c), std::nullopt};

  const ComplexSpectrogram spec = stft(noisy, opts.window_size, opts.hop_size);
  const Tensor3 mag = magnitude(spec);
  MethodResult result;
  Tensor3 cleaned;
  switch (method) {
    case Method::kProposed: {
      DenoiseConfig cfg;
      cfg.ranks = spatial_ranks(mag.dims(), opts.rank_c);
      cfg.iterations = opts.iterations;
      cfg.learning_rate = opts.learning_rate;
      cfg.seed = opts.seed;
      cfg.output_mode = opts.output_mode;
      DenoiseReport report = denoise(mag, cfg, opts.progress);
      cleaned = report.denoised;
      result.report = std::move(report);
      break;
    }
    case Method::kSpectralSubtraction:
      if (!opts.noise_floor) {
        throw std::invalid_argument("spectral subtraction needs a noise floor");
      }
      cleaned = spectral_subtraction(mag, *opts.noise_floor, opts.ss_alpha);
      break;
    case Method::kTucker:
      cleaned = tucker_denoise(mag, spatial_ranks(mag.dims(), opts.rank_c));
      break;
    case Method::kSvd:
      break;
  }
  result.denoised = fit_length(istft_with_phase(cleaned, spec), noisy.samples());
  return result;
}

}  // namespace dasdn
