#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dasdn {

using Dims3 = std::array<std::size_t, 3>;

/// Dense real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

/// Dense real 3rd-order tensor indexed (channel, frequency, time), stored
/// row-major: time varies fastest.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Dims3 dims, double fill = 0.0);
  Tensor3(Dims3 dims, std::vector<double> data);

  const Dims3& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t c, std::size_t f, std::size_t t) {
    return data_[(c * dims_[1] + f) * dims_[2] + t];
  }
  double operator()(std::size_t c, std::size_t f, std::size_t t) const {
    return data_[(c * dims_[1] + f) * dims_[2] + t];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }
  std::vector<double>&& release() && { return std::move(data_); }

  /// Contiguous (frequency x time) slice of one channel.
  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;

  double max_value() const;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Dims3 dims_{0, 0, 0};
  std::vector<double> data_;
};

/// Mode-n matricization (mode in {1,2,3}). Columns enumerate the remaining
/// two indices with the lower-numbered mode varying fastest.
Matrix unfold(const Tensor3& t, int mode);

/// Inverse of unfold for the given target dims.
Tensor3 fold(const Matrix& m, int mode, const Dims3& dims);

/// t x_mode a, i.e. fold(a * unfold(t, mode), mode). Requires a.cols() == dims[mode].
Tensor3 mode_multiply(const Tensor3& t, const Matrix& a, int mode);

/// Gradient of <g, t x_mode a> with respect to a: unfold(g) * unfold(t)^T.
Matrix mode_multiply_matrix_grad(const Tensor3& g, const Tensor3& t, int mode);

double frobenius_norm(const Tensor3& t);
double frobenius_norm(const Matrix& m);

Tensor3 operator+(const Tensor3& a, const Tensor3& b);
Tensor3 operator-(const Tensor3& a, const Tensor3& b);
Tensor3 operator*(double s, const Tensor3& t);

}  // namespace dasdn
