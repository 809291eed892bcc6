#include "dasdn/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "kernels.hpp"

namespace dasdn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

std::size_t product(const Dims3& d) { return d[0] * d[1] * d[2]; }

void check_dims(const Dims3& dims) {
  for (auto d : dims) {
    if (d == 0) throw std::invalid_argument("tensor dims must all be >= 1");
  }
}

}  // namespace

namespace detail {

void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, double alpha,
          const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
          double* c, std::size_t ldc) {
  using Stride = Eigen::OuterStride<>;
  using CMap = Eigen::Map<const RowMat, 0, Stride>;
  using MMap = Eigen::Map<RowMat, 0, Stride>;
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k);
  const Stride sa(static_cast<Eigen::Index>(lda));
  const Stride sb(static_cast<Eigen::Index>(ldb));
  MMap cm(c, mi, ni, Stride(static_cast<Eigen::Index>(ldc)));
  if (beta == 0.0) {
    cm.setZero();
  } else if (beta != 1.0) {
    cm *= beta;
  }
  if (!trans_a && !trans_b) {
    cm.noalias() += alpha * CMap(a, mi, ki, sa) * CMap(b, ki, ni, sb);
  } else if (trans_a && !trans_b) {
    cm.noalias() += alpha * CMap(a, ki, mi, sa).transpose() * CMap(b, ki, ni, sb);
  } else if (!trans_a && trans_b) {
    cm.noalias() += alpha * CMap(a, mi, ki, sa) * CMap(b, ni, ki, sb).transpose();
  } else {
    cm.noalias() += alpha * CMap(a, ki, mi, sa).transpose() * CMap(b, ni, ki, sb).transpose();
  }
}

void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, double alpha,
          const double* a, const double* b, double beta, double* c) {
  gemm(trans_a, trans_b, m, n, k, alpha, a, trans_a ? m : k, b, trans_b ? k : n, beta, c, n);
}

void mode_multiply(const double* t, const Dims3& dims, const double* a, std::size_t a_rows,
                   int mode, double* out) {
  const auto [i1, i2, i3] = dims;
  switch (mode) {
    case 1:
      // (a_rows x i1) * (i1 x i2*i3)
      gemm(false, false, a_rows, i2 * i3, i1, 1.0, a, t, 0.0, out);
      break;
    case 2:
      for (std::size_t c = 0; c < i1; ++c) {
        gemm(false, false, a_rows, i3, i2, 1.0, a, t + c * i2 * i3, 0.0, out + c * a_rows * i3);
      }
      break;
    case 3:
      // (i1*i2 x i3) * a^T
      gemm(false, true, i1 * i2, a_rows, i3, 1.0, t, a, 0.0, out);
      break;
    default:
      throw std::invalid_argument("tensor mode must be 1, 2 or 3");
  }
}

void mode_multiply_grad_matrix(const double* g, const Dims3& g_dims, const double* t,
                               const Dims3& t_dims, int mode, double* grad_a, bool accumulate) {
  const double beta = accumulate ? 1.0 : 0.0;
  switch (mode) {
    case 1:
      gemm(false, true, g_dims[0], t_dims[0], t_dims[1] * t_dims[2], 1.0, g, t, beta, grad_a);
      break;
    case 2: {
      const std::size_t gs = g_dims[1] * g_dims[2];
      const std::size_t ts = t_dims[1] * t_dims[2];
      for (std::size_t c = 0; c < t_dims[0]; ++c) {
        gemm(false, true, g_dims[1], t_dims[1], t_dims[2], 1.0, g + c * gs, t + c * ts,
             c == 0 ? beta : 1.0, grad_a);
      }
      break;
    }
    case 3:
      gemm(true, false, g_dims[2], t_dims[2], t_dims[0] * t_dims[1], 1.0, g, t, beta, grad_a);
      break;
    default:
      throw std::invalid_argument("tensor mode must be 1, 2 or 3");
  }
}

void mode_multiply_grad_tensor(const double* g, const Dims3& g_dims, const double* a,
                               const Dims3& t_dims, int mode, double* grad_t) {
  switch (mode) {
    case 1:
      gemm(true, false, t_dims[0], t_dims[1] * t_dims[2], g_dims[0], 1.0, a, g, 1.0, grad_t);
      break;
    case 2: {
      const std::size_t gs = g_dims[1] * g_dims[2];
      const std::size_t ts = t_dims[1] * t_dims[2];
      for (std::size_t c = 0; c < t_dims[0]; ++c) {
        gemm(true, false, t_dims[1], t_dims[2], g_dims[1], 1.0, a, g + c * gs, 1.0,
             grad_t + c * ts);
      }
      break;
    }
    case 3:
      gemm(false, false, t_dims[0] * t_dims[1], t_dims[2], g_dims[2], 1.0, g, a, 1.0, grad_t);
      break;
    default:
      throw std::invalid_argument("tensor mode must be 1, 2 or 3");
  }
}

}  // namespace detail

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dims must be >= 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dims must be >= 1");
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("matrix data length does not match rows*cols");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  detail::gemm(false, false, a.rows(), b.cols(), a.cols(), 1.0, a.data().data(),
               b.data().data(), 0.0, out.data().data());
  return out;
}

Tensor3::Tensor3(Dims3 dims, double fill) : dims_(dims) {
  check_dims(dims);
  data_.assign(product(dims), fill);
}

Tensor3::Tensor3(Dims3 dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  check_dims(dims);
  if (data_.size() != product(dims)) {
    throw std::invalid_argument("tensor data length does not match dims");
  }
}

std::span<double> Tensor3::channel(std::size_t c) {
  const std::size_t n = dims_[1] * dims_[2];
  return std::span<double>(data_).subspan(c * n, n);
}

std::span<const double> Tensor3::channel(std::size_t c) const {
  const std::size_t n = dims_[1] * dims_[2];
  return std::span<const double>(data_).subspan(c * n, n);
}

double Tensor3::max_value() const {
  if (data_.empty()) throw std::logic_error("max_value of empty tensor");
  return *std::max_element(data_.begin(), data_.end());
}

Matrix unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [n1, n2, n3] = t.dims();
  Matrix m(t.dims()[mode - 1], t.size() / t.dims()[mode - 1]);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t k = 0; k < n3; ++k) {
        switch (mode) {
          case 1: m(i, j + k * n2) = t(i, j, k); break;
          case 2: m(j, i + k * n1) = t(i, j, k); break;
          default: m(k, i + j * n1) = t(i, j, k); break;
        }
      }
    }
  }
  return m;
}

Tensor3 fold(const Matrix& m, int mode, const Dims3& dims) {
  check_mode(mode);
  check_dims(dims);
  if (m.rows() != dims[mode - 1] || m.rows() * m.cols() != product(dims)) {
    throw std::invalid_argument("fold: matrix shape does not match target dims");
  }
  const auto [n1, n2, n3] = dims;
  Tensor3 t(dims);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t k = 0; k < n3; ++k) {
        switch (mode) {
          case 1: t(i, j, k) = m(i, j + k * n2); break;
          case 2: t(i, j, k) = m(j, i + k * n1); break;
          default: t(i, j, k) = m(k, i + j * n1); break;
        }
      }
    }
  }
  return t;
}

Tensor3 mode_multiply(const Tensor3& t, const Matrix& a, int mode) {
  check_mode(mode);
  if (a.cols() != t.dims()[mode - 1]) {
    throw std::invalid_argument("mode_multiply: matrix has " + std::to_string(a.cols()) +
                                " columns, tensor mode " + std::to_string(mode) + " has size " +
                                std::to_string(t.dims()[mode - 1]));
  }
  Dims3 out_dims = t.dims();
  out_dims[mode - 1] = a.rows();
  Tensor3 out(out_dims);
  detail::mode_multiply(t.data().data(), t.dims(), a.data().data(), a.rows(), mode,
                        out.data().data());
  return out;
}

Matrix mode_multiply_matrix_grad(const Tensor3& g, const Tensor3& t, int mode) {
  check_mode(mode);
  for (int m = 1; m <= 3; ++m) {
    if (m != mode && g.dims()[m - 1] != t.dims()[m - 1]) {
      throw std::invalid_argument("mode_multiply_matrix_grad: incompatible dims");
    }
  }
  Matrix out(g.dims()[mode - 1], t.dims()[mode - 1]);
  detail::mode_multiply_grad_matrix(g.data().data(), g.dims(), t.data().data(), t.dims(), mode,
                                    out.data().data(), false);
  return out;
}

double frobenius_norm(const Tensor3& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("tensor add: dims differ");
  Tensor3 out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("tensor subtract: dims differ");
  Tensor3 out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
  return out;
}

Tensor3 operator*(double s, const Tensor3& t) {
  Tensor3 out = t;
  for (double& v : out.data()) v *= s;
  return out;
}

}  // namespace dasdn
