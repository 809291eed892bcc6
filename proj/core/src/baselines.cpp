#include "dasdn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dasdn/linalg.hpp"

namespace dasdn {

NoiseFloor estimate_noise_floor(const ComplexSpectrogram& noise) {
  const auto [channels, bins, frames] = noise.dims;
  Matrix floor(channels, bins);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t f = 0; f < bins; ++f) {
      double s = 0.0;
      for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t i = noise.index(c, f, t);
        s += std::hypot(noise.re[i], noise.im[i]);
      }
      floor(c, f) = s / static_cast<double>(frames);
    }
  }
  return {std::move(floor)};
}

NoiseFloor estimate_noise_floor(const MultichannelSignal& noise, std::size_t window_size,
                                std::size_t hop_size) {
  Matrix floor(noise.channels(), window_size / 2 + 1);
  for (std::size_t c = 0; c < noise.channels(); ++c) {
    const auto x = noise.channel(c);
    const MultichannelSignal single(1, noise.samples(), noise.sample_rate(),
                                    std::vector<double>(x.begin(), x.end()));
    const NoiseFloor one = estimate_noise_floor(stft(single, window_size, hop_size));
    for (std::size_t f = 0; f < floor.cols(); ++f) floor(c, f) = one.floor(0, f);
  }
  return {std::move(floor)};
}

Tensor3 spectral_subtraction(const Tensor3& mag, const NoiseFloor& floor, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("spectral_subtraction: alpha must be >= 0");
  const auto [channels, bins, frames] = mag.dims();
  if (floor.floor.rows() != channels || floor.floor.cols() != bins) {
    throw std::invalid_argument("spectral_subtraction: noise floor is " +
                                std::to_string(floor.floor.rows()) + "x" +
                                std::to_string(floor.floor.cols()) + ", spectrogram has " +
                                std::to_string(channels) + " channels and " +
                                std::to_string(bins) + " bins");
  }
  Tensor3 out(mag.dims());
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t f = 0; f < bins; ++f) {
      const double sub = alpha * floor.floor(c, f);
      for (std::size_t t = 0; t < frames; ++t) out(c, f, t) = std::max(0.0, mag(c, f, t) - sub);
    }
  }
  return out;
}

MultichannelSignal svd_denoise(const MultichannelSignal& sig, std::size_t rank) {
  if (rank < 1 || rank > sig.channels()) {
    throw std::invalid_argument("svd_denoise: rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(sig.channels()) + "]");
  }
  if (rank > sig.samples()) throw std::invalid_argument("svd_denoise: rank exceeds sample count");
  const Matrix x(sig.channels(), sig.samples(),
                 std::vector<double>(sig.data().begin(), sig.data().end()));
  const Matrix approx = svd_reconstruct(truncated_svd(x, rank));
  return MultichannelSignal(sig.channels(), sig.samples(), sig.sample_rate(), approx.values());
}

Tensor3 tucker_denoise(const Tensor3& mag, const Ranks& ranks) {
  Tensor3 out = reconstruct(hosvd(mag, ranks));
  for (double& v : out.data()) v = std::max(0.0, v);
  return out;
}

}  // namespace dasdn
