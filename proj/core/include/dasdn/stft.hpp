#pragma once

#include <cstddef>
#include <vector>

#include "dasdn/signal.hpp"
#include "dasdn/tensor.hpp"

namespace dasdn {

inline constexpr std::size_t kDefaultWindow = 640;
inline constexpr std::size_t kDefaultHop = 320;

/// Per-channel STFT; real and imaginary parts share the (channel, bin, frame) layout.
struct ComplexSpectrogram {
  Dims3 dims{0, 0, 0};
  std::vector<double> re;
  std::vector<double> im;
  std::size_t window_size = 0;
  std::size_t hop_size = 0;
  double sample_rate = 0.0;
  std::size_t signal_length = 0;

  std::size_t index(std::size_t c, std::size_t f, std::size_t t) const {
    return (c * dims[1] + f) * dims[2] + t;
  }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Frames start at sample 0 with no padding; I_t = 1 + (T_s - window) / hop,
/// I_f = window / 2 + 1. Throws std::invalid_argument for odd windows, zero hop,
/// hop > window, or signals shorter than one window.
ComplexSpectrogram stft(const MultichannelSignal& sig, std::size_t window_size = kDefaultWindow,
                        std::size_t hop_size = kDefaultHop);

Tensor3 magnitude(const ComplexSpectrogram& spec);

/// Weighted overlap-add inverse using the magnitudes in `mag` and the phase of
/// `phase_source`. Output length is (I_t - 1) * hop + window. The window-power
/// normalizer is floored at half its peak, so only the ramp-in/ramp-out edge
/// samples (those covered by a single frame's taper) are attenuated.
MultichannelSignal istft_with_phase(const Tensor3& mag, const ComplexSpectrogram& phase_source);

}  // namespace dasdn
