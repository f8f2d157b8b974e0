#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cpkernel/compensated.hpp"
#include "cpkernel/errors.hpp"

namespace cpkernel {

/// Lower-triangular array kernel (a_{n-j}^n), 1 <= j <= n <= N.
///
/// Row n holds the n values (a_{n-1}^n, ..., a_1^n, a_0^n).  Two index views
/// are provided:
///   at(n, j)  - "column" view, at(n, j) = a_{n-j}^n for 1 <= j <= n,
///   coef(n, k) - subscript view, coef(n, k) = a_k^n for 0 <= k <= n-1.
/// All operations below are documented against the column view, under which
/// the pseudo-convolution is plain multiplication of the associated
/// lower-triangular matrices.
class TriKernel {
public:
  TriKernel() = default;

  explicit TriKernel(std::size_t n_rows)
      : n_(n_rows), v_(n_rows * (n_rows + 1) / 2, 0.0) {}

  std::size_t rows() const { return n_; }

  double& at(std::size_t n, std::size_t j) { return v_[base(n) + (j - 1)]; }
  double at(std::size_t n, std::size_t j) const { return v_[base(n) + (j - 1)]; }

  double& coef(std::size_t n, std::size_t k) { return at(n, n - k); }
  double coef(std::size_t n, std::size_t k) const { return at(n, n - k); }

  /// Row n as (a_{n-1}^n, ..., a_0^n).
  std::span<double> row(std::size_t n) { return {v_.data() + base(n), n}; }
  std::span<const double> row(std::size_t n) const { return {v_.data() + base(n), n}; }

  bool all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
  }

  /// Leading M-row sub-kernel.  By construction every operation on the first
  /// M rows only reads the first M rows, so truncation commutes with the
  /// algebra.
  TriKernel truncated(std::size_t m) const {
    TriKernel out(m);
    for (std::size_t n = 1; n <= m; ++n) {
      auto src = row(n);
      std::copy(src.begin(), src.end(), out.row(n).begin());
    }
    return out;
  }

  friend bool operator==(const TriKernel&, const TriKernel&) = default;

private:
  static std::size_t base(std::size_t n) { return (n - 1) * n / 2; }

  std::size_t n_ = 0;
  std::vector<double> v_;
};

inline void check_same_size(const TriKernel& a, const TriKernel& b) {
  if (a.rows() != b.rows()) throw SizeMismatch(a.rows(), b.rows());
}

/// Identity kernel: a_0^n = 1, everything else 0.
inline TriKernel identity(std::size_t n_rows) {
  TriKernel k(n_rows);
  for (std::size_t n = 1; n <= n_rows; ++n) k.at(n, n) = 1.0;
  return k;
}

/// L: all entries 1.  Acts on vectors as the prefix sum.
inline TriKernel lower_ones(std::size_t n_rows) {
  TriKernel k(n_rows);
  for (std::size_t n = 1; n <= n_rows; ++n) {
    for (std::size_t j = 1; j <= n; ++j) k.at(n, j) = 1.0;
  }
  return k;
}

/// L^(-1): unit diagonal, -1 on the first subdiagonal.  Acts on vectors as
/// the backward difference.
inline TriKernel lower_ones_inverse(std::size_t n_rows) {
  TriKernel k(n_rows);
  for (std::size_t n = 1; n <= n_rows; ++n) {
    k.at(n, n) = 1.0;
    if (n >= 2) k.at(n, n - 1) = -1.0;
  }
  return k;
}

/// Pseudo-convolution C = A (*) B:  c_{n-k}^n = sum_{j=k}^n a_{n-j}^n b_{j-k}^j.
/// Row n of the result depends only on row n of A and rows <= n of B.
inline TriKernel pseudo_convolve(const TriKernel& a, const TriKernel& b) {
  check_same_size(a, b);
  const std::size_t N = a.rows();
  TriKernel c(N);
  for (std::size_t n = 1; n <= N; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      KahanSum s;
      for (std::size_t j = k; j <= n; ++j) s.add(a.at(n, j) * b.at(j, k));
      c.at(n, k) = s.value();
    }
  }
  return c;
}

/// Kernel-vector product y_n = sum_{j=1}^n a_{n-j}^n x_j.  x is 1-based in
/// the array-kernel convention: x[0] holds x_1.
inline std::vector<double> pseudo_convolve_vec(const TriKernel& a,
                                               std::span<const double> x) {
  if (a.rows() != x.size()) throw SizeMismatch(a.rows(), x.size());
  std::vector<double> y(x.size());
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    KahanSum s;
    for (std::size_t j = 1; j <= n; ++j) s.add(a.at(n, j) * x[j - 1]);
    y[n - 1] = s.value();
  }
  return y;
}

/// Smallest |a_0^n| accepted by the inversion recursion.
inline constexpr double kSingularDiagonalThreshold = 1e-300;

/// Two-sided inverse B with A (*) B = B (*) A = I, by the forward recursion
///   b_0^n = 1/a_0^n,
///   b_{n-k}^n = -(a_0^n)^{-1} sum_{j=k}^{n-1} a_{n-j}^n b_{j-k}^j.
/// Row n uses only rows < n of B, so failures are reported with the exact n.
inline TriKernel inverse(const TriKernel& a) {
  const std::size_t N = a.rows();
  TriKernel b(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const double diag = a.at(n, n);
    if (!(std::abs(diag) > kSingularDiagonalThreshold)) throw SingularDiagonal(n);
    const double inv_diag = 1.0 / diag;
    b.at(n, n) = inv_diag;
    for (std::size_t k = 1; k < n; ++k) {
      KahanSum s;
      for (std::size_t j = k; j < n; ++j) s.add(a.at(n, j) * b.at(j, k));
      b.at(n, k) = -inv_diag * s.value();
    }
  }
  return b;
}

/// Entrywise alpha*A + B.
inline TriKernel axpy(double alpha, const TriKernel& a, const TriKernel& b) {
  check_same_size(a, b);
  TriKernel c(a.rows());
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    for (std::size_t j = 1; j <= n; ++j) c.at(n, j) = alpha * a.at(n, j) + b.at(n, j);
  }
  return c;
}

inline double max_abs_entry(const TriKernel& a) {
  double m = 0.0;
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    for (double v : a.row(n)) m = std::max(m, std::abs(v));
  }
  return m;
}

inline double max_abs_diff(const TriKernel& a, const TriKernel& b) {
  check_same_size(a, b);
  double m = 0.0;
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    for (std::size_t j = 1; j <= n; ++j) m = std::max(m, std::abs(a.at(n, j) - b.at(n, j)));
  }
  return m;
}

}  // namespace cpkernel
