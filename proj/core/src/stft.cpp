#include "dasdn/stft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dasdn/fft.hpp"

namespace dasdn {

MultichannelSignal::MultichannelSignal(std::size_t channels, std::size_t samples,
                                       double sample_rate)
    : MultichannelSignal(channels, samples, sample_rate,
                         std::vector<double>(channels * samples, 0.0)) {}

MultichannelSignal::MultichannelSignal(std::size_t channels, std::size_t samples,
                                       double sample_rate, std::vector<double> data)
    : channels_(channels), samples_(samples), sample_rate_(sample_rate), data_(std::move(data)) {
  if (channels == 0 || samples == 0) {
    throw std::invalid_argument("signal needs at least one channel and one sample");
  }
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (data_.size() != channels * samples) {
    throw std::invalid_argument("signal data length does not match channels*samples");
  }
}

std::span<double> MultichannelSignal::channel(std::size_t c) {
  return std::span<double>(data_).subspan(c * samples_, samples_);
}

std::span<const double> MultichannelSignal::channel(std::size_t c) const {
  return std::span<const double>(data_).subspan(c * samples_, samples_);
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

ComplexSpectrogram stft(const MultichannelSignal& sig, std::size_t window_size,
                        std::size_t hop_size) {
  if (window_size < 2 || window_size % 2 != 0) {
    throw std::invalid_argument("STFT window size must be even and >= 2");
  }
  if (hop_size < 1 || hop_size > window_size) {
    throw std::invalid_argument("STFT hop size must be in [1, window size]");
  }
  if (sig.samples() < window_size) {
    throw std::invalid_argument("signal of " + std::to_string(sig.samples()) +
                                " samples is shorter than one window of " +
                                std::to_string(window_size));
  }
  const std::size_t frames = 1 + (sig.samples() - window_size) / hop_size;
  const std::size_t bins = window_size / 2 + 1;
  ComplexSpectrogram spec;
  spec.dims = {sig.channels(), bins, frames};
  spec.re.assign(sig.channels() * bins * frames, 0.0);
  spec.im.assign(spec.re.size(), 0.0);
  spec.window_size = window_size;
  spec.hop_size = hop_size;
  spec.sample_rate = sig.sample_rate();
  spec.signal_length = sig.samples();

  const auto window = hann_window(window_size);
  const Fft fft(window_size);
  std::vector<std::complex<double>> buf(window_size);
  std::vector<std::complex<double>> out(window_size);
  for (std::size_t c = 0; c < sig.channels(); ++c) {
    const auto x = sig.channel(c);
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t start = t * hop_size;
      for (std::size_t i = 0; i < window_size; ++i) buf[i] = x[start + i] * window[i];
      fft.forward(buf, out);
      for (std::size_t f = 0; f < bins; ++f) {
        const std::size_t idx = spec.index(c, f, t);
        spec.re[idx] = out[f].real();
        spec.im[idx] = out[f].imag();
      }
    }
  }
  return spec;
}

Tensor3 magnitude(const ComplexSpectrogram& spec) {
  Tensor3 mag(spec.dims);
  auto m = mag.data();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::hypot(spec.re[i], spec.im[i]);
  return mag;
}

MultichannelSignal istft_with_phase(const Tensor3& mag, const ComplexSpectrogram& phase_source) {
  if (mag.dims() != phase_source.dims) {
    throw std::invalid_argument("istft_with_phase: magnitude dims differ from phase source");
  }
  for (double v : mag.data()) {
    if (v < 0.0 || std::isnan(v)) {
      throw std::invalid_argument("istft_with_phase: magnitudes must be non-negative");
    }
  }
  const auto [channels, bins, frames] = mag.dims();
  const std::size_t n = phase_source.window_size;
  const std::size_t hop = phase_source.hop_size;
  if (bins != n / 2 + 1) throw std::invalid_argument("istft_with_phase: bin count mismatch");
  const std::size_t length = (frames - 1) * hop + n;

  const auto window = hann_window(n);
  std::vector<double> norm(length, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < n; ++i) norm[t * hop + i] += window[i] * window[i];
  }
  const double floor = 0.5 * *std::max_element(norm.begin(), norm.end());
  for (double& v : norm) v = std::max(v, floor);

  MultichannelSignal out(channels, length, phase_source.sample_rate);
  const Fft fft(n);
  std::vector<std::complex<double>> spectrum(n);
  std::vector<std::complex<double>> frame(n);
  for (std::size_t c = 0; c < channels; ++c) {
    auto y = out.channel(c);
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t f = 0; f < bins; ++f) {
        const std::size_t idx = phase_source.index(c, f, t);
        const double re = phase_source.re[idx];
        const double im = phase_source.im[idx];
        const double r = std::hypot(re, im);
        const double m = mag(c, f, t);
        std::complex<double> z = r > 0.0 ? std::complex<double>(m * re / r, m * im / r)
                                         : std::complex<double>(m, 0.0);
        if (f == 0 || f == n / 2) z = std::complex<double>(z.real(), 0.0);
        spectrum[f] = z;
        if (f != 0 && f != n / 2) spectrum[n - f] = std::conj(z);
      }
      fft.inverse(spectrum, frame);
      const std::size_t start = t * hop;
      for (std::size_t i = 0; i < n; ++i) y[start + i] += frame[i].real() * window[i];
    }
    for (std::size_t i = 0; i < length; ++i) y[i] /= norm[i];
  }
  return out;
}

}  // namespace dasdn
