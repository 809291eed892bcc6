#pragma once

// Raw-buffer kernels shared by the value-level API and the gradient tape.
// Buffers are row-major; tensors use the (channel, frequency, time) layout.

#include <cstddef>

#include "dasdn/tensor.hpp"

namespace dasdn::detail {

/// c (m x n) = alpha * op(a) * op(b) + beta * c, all row-major with explicit
/// leading dimensions (distance between consecutive rows of the stored matrix).
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k,
          double alpha, const double* a, std::size_t lda, const double* b, std::size_t ldb,
          double beta, double* c, std::size_t ldc);

/// Same with densely packed operands.
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k,
          double alpha, const double* a, const double* b, double beta, double* c);

/// out = t x_mode a, where a is (a_rows x dims[mode-1]); out must hold the result size.
void mode_multiply(const double* t, const Dims3& dims, const double* a, std::size_t a_rows,
                   int mode, double* out);

/// grad_a (g_dims[mode-1] x t_dims[mode-1]) = unfold(g) * unfold(t)^T. Overwrites grad_a
/// when accumulate is false.
void mode_multiply_grad_matrix(const double* g, const Dims3& g_dims, const double* t,
                               const Dims3& t_dims, int mode, double* grad_a, bool accumulate);

/// grad_t += g x_mode a^T, where a is (g_dims[mode-1] x t_dims[mode-1]).
void mode_multiply_grad_tensor(const double* g, const Dims3& g_dims, const double* a,
                               const Dims3& t_dims, int mode, double* grad_t);

/// 3x3 same-size convolution over (frequency, time) mixing all input channels.
/// weight layout (out, in, 3, 3), bias per output channel.
void conv3x3_forward(const double* z, const Dims3& dims, const double* weight,
                     const double* bias, double* out);

/// Accumulates gradients of the 3x3 convolution. Any of grad_z/grad_w/grad_b may be null.
void conv3x3_backward(const double* z, const Dims3& dims, const double* weight,
                      const double* grad_out, double* grad_z, double* grad_w, double* grad_b);

}  // namespace dasdn::detail
