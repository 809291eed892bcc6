#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dasdn {

/// Mixed-radix Cooley-Tukey FFT for any length; radices 2-5 have dedicated
/// butterflies, other prime factors fall back to an O(p^2) butterfly.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  /// X[k] = sum_j x[j] exp(-2 pi i jk / n)
  void forward(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const;
  /// x[j] = (1/n) sum_k X[k] exp(+2 pi i jk / n)
  void inverse(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const;

 private:
  void transform(const std::complex<double>* in, std::size_t in_stride,
                 std::complex<double>* out, std::size_t n, std::size_t tw_stride,
                 std::size_t factor_index, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> factors_;
  std::vector<std::complex<double>> twiddles_;
};

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace dasdn
