#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dasdn/fft.hpp"
#include "dasdn/signal.hpp"

namespace dasdn {

/// Max over integer lags of the normalized cross-correlation. At each lag the
/// overlapping segments are mean-removed and energy-normalized; only lags whose
/// overlap covers at least half of the shorter signal are searched.
///
/// Throws std::invalid_argument for empty inputs and std::domain_error when an
/// input is all zero (no lag has a defined correlation).
double cross_correlation_max(std::span<const double> x, std::span<const double> y);

/// Reuses the transform of a fixed reference across many cross_correlation_max calls.
class LagCorrelator {
 public:
  LagCorrelator(std::span<const double> reference, std::size_t max_other_length);

  /// cross_correlation_max(x, reference). x.size() must not exceed the length given at construction.
  double max_correlation(std::span<const double> x) const;

 private:
  std::vector<double> reference_;
  std::size_t max_other_length_;
  std::size_t fft_size_;
  Fft fft_;
  std::vector<std::complex<double>> reference_spectrum_;
};

/// 20 log10((1 + cc_denoised) / (1 + cc_noisy)) in dB.
double cci(double cc_denoised, double cc_noisy);

/// 20 log10(max(y) / rms(y)), max over signed samples. Throws std::domain_error
/// for an all-zero signal or a non-positive peak.
double psnr(std::span<const double> y);

struct ChannelMetrics {
  std::size_t channel = 0;
  double cc_noisy = 0.0;
  double cc_denoised = 0.0;
  double cci_db = 0.0;
  double psnr_noisy_db = 0.0;
  double psnr_denoised_db = 0.0;
};

struct Evaluation {
  std::vector<ChannelMetrics> channels;
  ChannelMetrics mean;  // column-wise average; channel field unused
};

/// Per-channel CC/CCi against the single-channel source plus PSNR of both signals.
/// An all-zero denoised channel scores cc_denoised = 0 and a NaN PSNR, which
/// carries into the mean row.
Evaluation evaluate(const MultichannelSignal& denoised, const MultichannelSignal& noisy,
                    std::span<const double> source);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace dasdn
