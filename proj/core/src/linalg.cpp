#include "dasdn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dasdn/error.hpp"
#include "kernels.hpp"

namespace dasdn {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Column-major dense storage used internally by the factorizations.
struct ColMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  ColMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }
};

struct HouseholderQr {
  ColMatrix reflectors;  // column k holds v_k in rows k..m-1
  std::vector<double> scale;  // 2 / (v^T v), zero for identity reflectors
  ColMatrix r;           // n x n upper triangle
};

// a is tall (rows >= cols), column-major.
HouseholderQr householder_qr(ColMatrix a) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  HouseholderQr qr{ColMatrix(m, n), std::vector<double>(n, 0.0), ColMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    double* x = a.col(k) + k;
    const std::size_t len = m - k;
    const double norm = std::sqrt(dot(x, x, len));
    double* v = qr.reflectors.col(k) + k;
    if (norm == 0.0) {
      continue;
    }
    const double alpha = x[0] >= 0.0 ? -norm : norm;
    std::copy(x, x + len, v);
    v[0] -= alpha;
    const double vnorm2 = dot(v, v, len);
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    qr.scale[k] = beta;
    x[0] = alpha;
    std::fill(x + 1, x + len, 0.0);
    for (std::size_t j = k + 1; j < n; ++j) {
      double* y = a.col(j) + k;
      const double w = beta * dot(v, y, len);
      for (std::size_t i = 0; i < len; ++i) y[i] -= w * v[i];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) qr.r.col(j)[i] = a.col(j)[i];
  }
  return qr;
}

// Applies Q (product of reflectors) to the m x c matrix whose top n rows are b.
ColMatrix apply_q(const HouseholderQr& qr, const ColMatrix& b) {
  const std::size_t m = qr.reflectors.rows;
  const std::size_t n = qr.reflectors.cols;
  ColMatrix out(m, b.cols);
  for (std::size_t j = 0; j < b.cols; ++j) std::copy(b.col(j), b.col(j) + b.rows, out.col(j));
  for (std::size_t kk = n; kk-- > 0;) {
    const double beta = qr.scale[kk];
    if (beta == 0.0) continue;
    const double* v = qr.reflectors.col(kk) + kk;
    const std::size_t len = m - kk;
    for (std::size_t j = 0; j < out.cols; ++j) {
      double* y = out.col(j) + kk;
      const double w = beta * dot(v, y, len);
      for (std::size_t i = 0; i < len; ++i) y[i] -= w * v[i];
    }
  }
  return out;
}

struct JacobiResult {
  ColMatrix w;  // columns = sigma_j * u_j (unsorted)
  ColMatrix v;  // accumulated rotations
};

// One-sided Jacobi on a square matrix.
JacobiResult one_sided_jacobi(ColMatrix w, const JacobiOptions& opts) {
  const std::size_t n = w.cols;
  const std::size_t m = w.rows;
  ColMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v.col(i)[i] = 1.0;

  const double total = dot(w.data.data(), w.data.data(), w.data.size());
  const double negligible = total * std::numeric_limits<double>::epsilon() *
                            std::numeric_limits<double>::epsilon();
  const double rotate_above = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* wp = w.col(p);
        double* wq = w.col(q);
        const double a = dot(wp, wp, m);
        const double b = dot(wq, wq, m);
        if (a <= negligible || b <= negligible) continue;
        const double c = dot(wp, wq, m);
        const double off = std::abs(c) / std::sqrt(a * b);
        max_off = std::max(max_off, off);
        if (off <= rotate_above) continue;
        const double zeta = (b - a) / (2.0 * c);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = wp[i];
          const double xq = wq[i];
          wp[i] = cs * xp - sn * xq;
          wq[i] = sn * xp + cs * xq;
        }
        double* vp = v.col(p);
        double* vq = v.col(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = vp[i];
          const double xq = vq[i];
          vp[i] = cs * xp - sn * xq;
          vq[i] = sn * xp + cs * xq;
        }
      }
    }
    if (max_off <= opts.tolerance) return {std::move(w), std::move(v)};
  }
  throw NumericError("one-sided Jacobi SVD did not converge within " +
                     std::to_string(opts.max_sweeps) + " sweeps");
}

// Replaces columns flagged in `missing` with unit vectors orthogonal to every other column.
void complete_orthonormal(ColMatrix& u, const std::vector<bool>& missing) {
  const std::size_t n = u.rows;
  std::size_t candidate = 0;
  for (std::size_t j = 0; j < u.cols; ++j) {
    if (!missing[j]) continue;
    while (candidate < n) {
      std::vector<double> e(n, 0.0);
      e[candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < u.cols; ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          const double proj = dot(u.col(k), e.data(), n);
          for (std::size_t i = 0; i < n; ++i) e[i] -= proj * u.col(k)[i];
        }
      }
      const double norm = std::sqrt(dot(e.data(), e.data(), n));
      if (norm > 1e-6) {
        for (std::size_t i = 0; i < n; ++i) u.col(j)[i] = e[i] / norm;
        break;
      }
    }
  }
}

struct Thin {
  ColMatrix u;  // tall side, m x r (only when requested)
  std::vector<double> s;
  ColMatrix v;  // n x r
};

// SVD of a tall column-major matrix (rows >= cols), truncated to r.
Thin tall_svd(ColMatrix a, std::size_t r, bool want_u, const JacobiOptions& opts) {
  const std::size_t n = a.cols;
  HouseholderQr qr = householder_qr(std::move(a));
  JacobiResult jac = one_sided_jacobi(std::move(qr.r), opts);

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(jac.w.col(j), jac.w.col(j), n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = sigma[order[0]];
  const double zero_below = smax * static_cast<double>(n) * std::numeric_limits<double>::epsilon();

  Thin out{ColMatrix(0, 0), std::vector<double>(r), ColMatrix(n, r)};
  ColMatrix ur(n, r);
  std::vector<bool> missing(r, false);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t j = order[k];
    out.s[k] = sigma[j];
    std::copy(jac.v.col(j), jac.v.col(j) + n, out.v.col(k));
    if (sigma[j] <= zero_below || sigma[j] == 0.0) {
      missing[k] = true;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) ur.col(k)[i] = jac.w.col(j)[i] / sigma[j];
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
    complete_orthonormal(ur, missing);
  }
  if (want_u) out.u = apply_q(qr, ur);
  return out;
}

ColMatrix to_col_major(const Matrix& m) {
  ColMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) c.col(j)[i] = m(i, j);
  }
  return c;
}

// Row-major data of m reinterpreted as the column-major storage of m^T.
ColMatrix transpose_to_col_major(const Matrix& m) {
  ColMatrix c(m.cols(), m.rows());
  std::copy(m.data().begin(), m.data().end(), c.data.begin());
  return c;
}

Matrix to_row_major(const ColMatrix& c) {
  Matrix m(c.rows, c.cols);
  for (std::size_t j = 0; j < c.cols; ++j) {
    for (std::size_t i = 0; i < c.rows; ++i) m(i, j) = c.col(j)[i];
  }
  return m;
}

void check_rank(const Matrix& m, std::size_t r) {
  const std::size_t limit = std::min(m.rows(), m.cols());
  if (r < 1 || r > limit) {
    throw std::invalid_argument("truncated_svd: rank " + std::to_string(r) +
                                " outside [1, " + std::to_string(limit) + "]");
  }
}

void fix_signs(Matrix& u, Matrix* v) {
  for (std::size_t k = 0; k < u.cols(); ++k) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, k)) > best) {
        best = std::abs(u(i, k));
        arg = i;
      }
    }
    if (u(arg, k) < 0.0) {
      for (std::size_t i = 0; i < u.rows(); ++i) u(i, k) = -u(i, k);
      if (v != nullptr) {
        for (std::size_t i = 0; i < v->rows(); ++i) (*v)(i, k) = -(*v)(i, k);
      }
    }
  }
}

}  // namespace

SvdResult truncated_svd(const Matrix& m, std::size_t r, const JacobiOptions& opts) {
  check_rank(m, r);
  SvdResult res;
  if (m.rows() >= m.cols()) {
    Thin t = tall_svd(to_col_major(m), r, true, opts);
    res = {to_row_major(t.u), std::move(t.s), to_row_major(t.v)};
  } else {
    Thin t = tall_svd(transpose_to_col_major(m), r, true, opts);
    res = {to_row_major(t.v), std::move(t.s), to_row_major(t.u)};
  }
  fix_signs(res.u, &res.v);
  return res;
}

Matrix left_singular_vectors(const Matrix& m, std::size_t r, const JacobiOptions& opts) {
  check_rank(m, r);
  Matrix u;
  if (m.rows() >= m.cols()) {
    u = to_row_major(tall_svd(to_col_major(m), r, true, opts).u);
  } else {
    u = to_row_major(tall_svd(transpose_to_col_major(m), r, false, opts).v);
  }
  fix_signs(u, nullptr);
  return u;
}

Matrix svd_reconstruct(const SvdResult& svd) {
  Matrix us = svd.u;
  for (std::size_t i = 0; i < us.rows(); ++i) {
    for (std::size_t k = 0; k < us.cols(); ++k) us(i, k) *= svd.s[k];
  }
  Matrix out(svd.u.rows(), svd.v.rows());
  detail::gemm(false, true, us.rows(), svd.v.rows(), us.cols(), 1.0, us.data().data(),
               svd.v.data().data(), 0.0, out.data().data());
  return out;
}

}  // namespace dasdn
