#pragma once

#include <cstddef>
#include <vector>

#include "dasdn/tensor.hpp"

namespace dasdn {

struct SvdResult {
  Matrix u;               // rows x r, orthonormal columns
  std::vector<double> s;  // r values, descending, non-negative
  Matrix v;               // cols x r, orthonormal columns
};

struct JacobiOptions {
  int max_sweeps = 100;
  double tolerance = 1e-12;  // max normalized off-diagonal inner product at convergence
};

/// Rank-r truncated SVD. Householder QR reduces the tall orientation to a
/// square triangle, which one-sided (Hestenes) Jacobi then diagonalizes.
/// Each left singular vector has its largest-magnitude entry made non-negative.
///
/// Throws std::invalid_argument if r is not in [1, min(rows, cols)] and
/// NumericError if Jacobi fails to converge within max_sweeps.
SvdResult truncated_svd(const Matrix& m, std::size_t r, const JacobiOptions& opts = {});

/// Leading r left singular vectors only; skips forming the right factor.
Matrix left_singular_vectors(const Matrix& m, std::size_t r, const JacobiOptions& opts = {});

/// u * diag(s) * v^T
Matrix svd_reconstruct(const SvdResult& svd);

}  // namespace dasdn
