#include <algorithm>
#include <cstring>
#include <vector>

#include "kernels.hpp"

namespace dasdn::detail {

namespace {

constexpr std::size_t kTaps = 9;

// Output frequency rows are processed in blocks so the patch matrix stays a few MB.
constexpr std::size_t kBlockColumns = 4096;

std::size_t rows_per_block(std::size_t nt) { return std::max<std::size_t>(1, kBlockColumns / nt); }

// cols is (in_channels * 9) x (rows * T) for output rows [f0, f0 + rows);
// row (ci, kf, kt) holds z[ci, f + kf - 1, t + kt - 1], zero outside the tensor.
void im2col(const double* z, const Dims3& dims, std::size_t f0, std::size_t rows, double* cols) {
  const auto [nc, nf, nt] = dims;
  const std::size_t plane = nf * nt;
  const std::size_t width = rows * nt;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    const double* zc = z + ci * plane;
    for (std::size_t tap = 0; tap < kTaps; ++tap) {
      const long df = static_cast<long>(tap / 3) - 1;
      const long dt = static_cast<long>(tap % 3) - 1;
      double* row = cols + (ci * kTaps + tap) * width;
      for (std::size_t r = 0; r < rows; ++r) {
        double* dst = row + r * nt;
        const long sf = static_cast<long>(f0 + r) + df;
        if (sf < 0 || sf >= static_cast<long>(nf)) {
          std::memset(dst, 0, nt * sizeof(double));
          continue;
        }
        const double* src = zc + static_cast<std::size_t>(sf) * nt;
        if (dt == 0) {
          std::memcpy(dst, src, nt * sizeof(double));
        } else if (dt < 0) {
          dst[0] = 0.0;
          if (nt > 1) std::memcpy(dst + 1, src, (nt - 1) * sizeof(double));
        } else {
          if (nt > 1) std::memcpy(dst, src + 1, (nt - 1) * sizeof(double));
          dst[nt - 1] = 0.0;
        }
      }
    }
  }
}

void col2im_add(const double* cols, const Dims3& dims, std::size_t f0, std::size_t rows,
                double* grad_z) {
  const auto [nc, nf, nt] = dims;
  const std::size_t plane = nf * nt;
  const std::size_t width = rows * nt;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    double* gc = grad_z + ci * plane;
    for (std::size_t tap = 0; tap < kTaps; ++tap) {
      const long df = static_cast<long>(tap / 3) - 1;
      const long dt = static_cast<long>(tap % 3) - 1;
      const double* row = cols + (ci * kTaps + tap) * width;
      for (std::size_t r = 0; r < rows; ++r) {
        const long sf = static_cast<long>(f0 + r) + df;
        if (sf < 0 || sf >= static_cast<long>(nf)) continue;
        const double* src = row + r * nt;
        double* dst = gc + static_cast<std::size_t>(sf) * nt;
        if (dt == 0) {
          for (std::size_t t = 0; t < nt; ++t) dst[t] += src[t];
        } else if (dt < 0) {
          for (std::size_t t = 1; t < nt; ++t) dst[t - 1] += src[t];
        } else {
          for (std::size_t t = 0; t + 1 < nt; ++t) dst[t + 1] += src[t];
        }
      }
    }
  }
}

}  // namespace

void conv3x3_forward(const double* z, const Dims3& dims, const double* weight, const double* bias,
                     double* out) {
  const auto [nc, nf, nt] = dims;
  const std::size_t plane = nf * nt;
  for (std::size_t co = 0; co < nc; ++co) std::fill_n(out + co * plane, plane, bias[co]);
  const std::size_t block = rows_per_block(nt);
  std::vector<double> cols(nc * kTaps * std::min(block, nf) * nt);
  for (std::size_t f0 = 0; f0 < nf; f0 += block) {
    const std::size_t rows = std::min(block, nf - f0);
    const std::size_t width = rows * nt;
    im2col(z, dims, f0, rows, cols.data());
    gemm(false, false, nc, width, nc * kTaps, 1.0, weight, nc * kTaps, cols.data(), width, 1.0,
         out + f0 * nt, plane);
  }
}

void conv3x3_backward(const double* z, const Dims3& dims, const double* weight,
                      const double* grad_out, double* grad_z, double* grad_w, double* grad_b) {
  const auto [nc, nf, nt] = dims;
  const std::size_t plane = nf * nt;
  if (grad_b != nullptr) {
    for (std::size_t co = 0; co < nc; ++co) {
      const double* g = grad_out + co * plane;
      double s = 0.0;
      for (std::size_t i = 0; i < plane; ++i) s += g[i];
      grad_b[co] += s;
    }
  }
  if (grad_w == nullptr && grad_z == nullptr) return;
  const std::size_t block = rows_per_block(nt);
  std::vector<double> cols(nc * kTaps * std::min(block, nf) * nt);
  for (std::size_t f0 = 0; f0 < nf; f0 += block) {
    const std::size_t rows = std::min(block, nf - f0);
    const std::size_t width = rows * nt;
    const double* g = grad_out + f0 * nt;
    if (grad_w != nullptr) {
      im2col(z, dims, f0, rows, cols.data());
      gemm(false, true, nc, nc * kTaps, width, 1.0, g, plane, cols.data(), width, 1.0, grad_w,
           nc * kTaps);
    }
    if (grad_z != nullptr) {
      gemm(true, false, nc * kTaps, width, nc, 1.0, weight, nc * kTaps, g, plane, 0.0,
           cols.data(), width);
      col2im_add(cols.data(), dims, f0, rows, grad_z);
    }
  }
}

}  // namespace dasdn::detail
