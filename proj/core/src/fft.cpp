#include "dasdn/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dasdn {

using cd = std::complex<double>;

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FFT length must be >= 1");
  std::size_t rest = n;
  for (std::size_t p : {4, 2, 3, 5}) {
    while (rest % p == 0) {
      factors_.push_back(p);
      rest /= p;
    }
  }
  for (std::size_t p = 7; p * p <= rest; p += 2) {
    while (rest % p == 0) {
      factors_.push_back(p);
      rest /= p;
    }
  }
  if (rest > 1) factors_.push_back(rest);
  if (factors_.empty()) factors_.push_back(1);
  twiddles_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    twiddles_[i] = cd(std::cos(angle), std::sin(angle));
  }
}

void Fft::transform(const cd* in, std::size_t in_stride, cd* out, std::size_t n,
                    std::size_t tw_stride, std::size_t factor_index, bool inverse) const {
  const std::size_t p = factors_[factor_index];
  const std::size_t m = n / p;
  if (m == 1) {
    for (std::size_t j = 0; j < p; ++j) out[j] = in[j * in_stride];
  } else {
    for (std::size_t j = 0; j < p; ++j) {
      transform(in + j * in_stride, in_stride * p, out + j * m, m, tw_stride * p,
                factor_index + 1, inverse);
    }
  }
  if (p == 1) return;

  auto tw = [&](std::size_t idx) {
    const cd w = twiddles_[idx % n_];
    return inverse ? std::conj(w) : w;
  };

  if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const cd a = out[k];
      const cd b = out[k + m] * tw(k * tw_stride);
      out[k] = a + b;
      out[k + m] = a - b;
    }
    return;
  }
  if (p == 4) {
    const cd rot = inverse ? cd(0.0, 1.0) : cd(0.0, -1.0);
    for (std::size_t k = 0; k < m; ++k) {
      const cd a0 = out[k];
      const cd a1 = out[k + m] * tw(k * tw_stride);
      const cd a2 = out[k + 2 * m] * tw(2 * k * tw_stride);
      const cd a3 = out[k + 3 * m] * tw(3 * k * tw_stride);
      const cd s02 = a0 + a2;
      const cd d02 = a0 - a2;
      const cd s13 = a1 + a3;
      const cd d13 = (a1 - a3) * rot;
      out[k] = s02 + s13;
      out[k + m] = d02 + d13;
      out[k + 2 * m] = s02 - s13;
      out[k + 3 * m] = d02 - d13;
    }
    return;
  }
  // Generic radix-p butterfly.
  std::vector<cd> y(p);
  const std::size_t unit = n_ / p;  // exp(-2 pi i / p) = twiddles_[unit]
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t q = 0; q < p; ++q) y[q] = out[k + q * m] * tw(q * k * tw_stride);
    for (std::size_t s = 0; s < p; ++s) {
      cd acc = y[0];
      for (std::size_t q = 1; q < p; ++q) acc += y[q] * tw(((q * s) % p) * unit);
      out[k + s * m] = acc;
    }
  }
}

void Fft::forward(std::span<const cd> in, std::span<cd> out) const {
  if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("FFT size mismatch");
  if (in.data() == out.data()) {
    std::vector<cd> tmp(in.begin(), in.end());
    transform(tmp.data(), 1, out.data(), n_, 1, 0, false);
  } else {
    transform(in.data(), 1, out.data(), n_, 1, 0, false);
  }
}

void Fft::inverse(std::span<const cd> in, std::span<cd> out) const {
  if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("FFT size mismatch");
  if (in.data() == out.data()) {
    std::vector<cd> tmp(in.begin(), in.end());
    transform(tmp.data(), 1, out.data(), n_, 1, 0, true);
  } else {
    transform(in.data(), 1, out.data(), n_, 1, 0, true);
  }
  const double scale = 1.0 / static_cast<double>(n_);
  for (cd& v : out) v *= scale;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace dasdn
