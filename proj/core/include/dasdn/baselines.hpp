#pragma once

#include <cstddef>

#include "dasdn/signal.hpp"
#include "dasdn/stft.hpp"
#include "dasdn/tensor.hpp"
#include "dasdn/tucker.hpp"

namespace dasdn {

/// Mean noise magnitude per (channel, frequency bin), shape (I_c x I_f).
struct NoiseFloor {
  Matrix floor;
};

/// Time average of |noise| per channel and bin.
NoiseFloor estimate_noise_floor(const ComplexSpectrogram& noise);

/// Same estimate computed channel by channel, so long noise recordings never
/// materialize their full spectrogram.
NoiseFloor estimate_noise_floor(const MultichannelSignal& noise, std::size_t window_size,
                                std::size_t hop_size);

/// max(0, mag - alpha * floor[c, f]) in the amplitude domain.
Tensor3 spectral_subtraction(const Tensor3& mag, const NoiseFloor& floor, double alpha = 1.0);

/// Best rank-r approximation of the C x T sample matrix (time domain).
MultichannelSignal svd_denoise(const MultichannelSignal& sig, std::size_t rank);

/// reconstruct(hosvd(mag, ranks)) clipped at zero.
Tensor3 tucker_denoise(const Tensor3& mag, const Ranks& ranks);

}  // namespace dasdn
