#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cpkernel/compensated.hpp"
#include "cpkernel/errors.hpp"
#include "cpkernel/kernel_algebra.hpp"
#include "cpkernel/resolvent.hpp"

namespace cpkernel {

/// Sequence kernel (a_0, ..., a_N) of the uniform-mesh theory.
using SeqKernel = std::vector<double>;

/// One-sided convolution truncated to the common length:
/// (a * b)_n = sum_{j=0}^n a_{n-j} b_j.
inline SeqKernel conv_seq(const SeqKernel& a, const SeqKernel& b) {
  if (a.size() != b.size()) throw SizeMismatch(a.size(), b.size());
  SeqKernel c(a.size(), 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    KahanSum s;
    for (std::size_t j = 0; j <= n; ++j) s.add(a[n - j] * b[j]);
    c[n] = s.value();
  }
  return c;
}

/// Convolutional inverse: b with a * b = delta_d.  Same recursion (and the
/// same summation order) as the array-kernel inverse, so constant-diagonal
/// array kernels invert to bit-identical values.
inline SeqKernel inverse_seq(const SeqKernel& a) {
  if (a.empty()) throw SizeMismatch(0, 1);
  if (!(std::abs(a[0]) > kSingularDiagonalThreshold)) throw SingularLeadingEntry();
  SeqKernel b(a.size(), 0.0);
  const double inv0 = 1.0 / a[0];
  b[0] = inv0;
  for (std::size_t m = 1; m < a.size(); ++m) {
    KahanSum s;
    for (std::size_t i = 0; i < m; ++i) s.add(a[m - i] * b[i]);
    b[m] = -inv0 * s.value();
  }
  return b;
}

enum class CpCondition {
  DiagonalNotPositive,       // b_0^n (or b_0) fails to be positive
  OffDiagonalPositive,       // some b_{n-j}^n (j < n) / b_j (j >= 1) is positive
  PartialSumNegative,        // row sum / partial sum dips below zero
  ResolventDiagonalOutOfRange,  // (R_lambda)_0^n outside (0, 1)
  ResolventEntryNegative,       // off-diagonal resolvent entry below -tol
  ResolventRowSumExceedsOne,    // sum_j (R_lambda)_{n-j}^n above 1 + tol
};

inline const char* to_string(CpCondition c) {
  switch (c) {
    case CpCondition::DiagonalNotPositive: return "diagonal_not_positive";
    case CpCondition::OffDiagonalPositive: return "off_diagonal_positive";
    case CpCondition::PartialSumNegative: return "partial_sum_negative";
    case CpCondition::ResolventDiagonalOutOfRange: return "resolvent_diagonal_out_of_range";
    case CpCondition::ResolventEntryNegative: return "resolvent_entry_negative";
    case CpCondition::ResolventRowSumExceedsOne: return "resolvent_row_sum_exceeds_one";
  }
  return "?";
}

struct CpFailure {
  CpCondition condition;
  double lambda;   // 0 for inverse-based checks
  std::size_t n;   // row (or sequence index for uniform checks)
  std::ptrdiff_t k;  // column subscript, -1 where not applicable
  double magnitude;  // offending value
};

struct CpReport {
  enum class Verdict { CompletelyPositive, NotCompletelyPositive };

  Verdict verdict = Verdict::CompletelyPositive;
  std::vector<CpFailure> failures;
  double tol = 0.0;
  /// Smallest signed distance to a decision boundary over every quantity
  /// checked (positive values mean "satisfied with this much slack").
  double min_margin = std::numeric_limits<double>::infinity();

  bool completely_positive() const { return verdict == Verdict::CompletelyPositive; }

  void note(double margin) { min_margin = std::min(min_margin, margin); }
  void fail(CpCondition c, double lambda, std::size_t n, std::ptrdiff_t k, double magnitude) {
    failures.push_back({c, lambda, n, k, magnitude});
    verdict = Verdict::NotCompletelyPositive;
  }
  void sort_failures() {
    std::sort(failures.begin(), failures.end(), [](const CpFailure& a, const CpFailure& b) {
      if (a.lambda != b.lambda) return a.lambda < b.lambda;
      if (a.n != b.n) return a.n < b.n;
      return a.k < b.k;
    });
  }
};

/// Uniform-mesh criterion: a is completely positive iff b = a^(-1) has
/// b_0 > 0, b_j <= 0 for j >= 1, and all partial sums sum_{j<=n} b_j >= 0.
/// Sign conditions are checked with +-tol slack around zero.
inline CpReport check_cp_uniform(const SeqKernel& a, double tol = 1e-12) {
  const SeqKernel b = inverse_seq(a);
  CpReport rep;
  rep.tol = tol;
  rep.note(b[0]);
  if (!(b[0] > tol)) rep.fail(CpCondition::DiagonalNotPositive, 0.0, 0, -1, b[0]);
  for (std::size_t j = 1; j < b.size(); ++j) {
    rep.note(-b[j]);
    if (b[j] > tol) rep.fail(CpCondition::OffDiagonalPositive, 0.0, j, -1, b[j]);
  }
  KahanSum partial;
  partial.add(b[0]);
  for (std::size_t n = 1; n < b.size(); ++n) {
    partial.add(b[n]);
    rep.note(partial.value());
    if (partial.value() < -tol)
      rep.fail(CpCondition::PartialSumNegative, 0.0, n, -1, partial.value());
  }
  rep.sort_failures();
  return rep;
}

/// Sign certificate on a kernel B itself: positive diagonal, nonpositive
/// off-diagonal entries, nonnegative row sums.
inline CpReport check_sign_certificate(const TriKernel& b, double tol = 1e-12) {
  CpReport rep;
  rep.tol = tol;
  for (std::size_t n = 1; n <= b.rows(); ++n) {
    const double diag = b.at(n, n);
    rep.note(diag);
    if (!(diag > tol)) rep.fail(CpCondition::DiagonalNotPositive, 0.0, n, 0, diag);
    KahanSum row_sum;
    for (std::size_t j = 1; j < n; ++j) {
      const double v = b.at(n, j);
      rep.note(-v);
      if (v > tol)
        rep.fail(CpCondition::OffDiagonalPositive, 0.0, n, std::ptrdiff_t(n - j), v);
      row_sum.add(v);
    }
    row_sum.add(diag);
    rep.note(row_sum.value());
    if (row_sum.value() < -tol)
      rep.fail(CpCondition::PartialSumNegative, 0.0, n, -1, row_sum.value());
  }
  rep.sort_failures();
  return rep;
}

/// Nonuniform criterion: A is completely positive iff B = A^(-1) carries the
/// sign certificate.
inline CpReport check_cp_nonuniform(const TriKernel& a, double tol = 1e-12) {
  return check_sign_certificate(inverse(a), tol);
}

/// Log-spaced default grid 1e-3 ... 1e6 (10 points).
inline std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -3; e <= 6; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

/// Definitional scan: for each lambda checks 0 < (R_lambda)_0^n < 1,
/// (R_lambda)_{n-j}^n >= -tol and row sums <= 1 + tol.  This samples the
/// all-lambda definition on a finite grid, so it can only falsify; the
/// inverse criterion above is the finite certificate.
inline CpReport brute_cp_scan(const TriKernel& a, std::span<const double> lambda_grid,
                              double tol = 1e-12) {
  if (lambda_grid.empty()) throw DomainError("brute_cp_scan: empty lambda grid");
  CpReport rep;
  rep.tol = tol;
  for (double lambda : lambda_grid) {
    const ResolventKernel rk = resolvent(a, lambda);
    for (std::size_t n = 1; n <= rk.R.rows(); ++n) {
      const double diag = rk.R.at(n, n);
      rep.note(diag);
      rep.note(1.0 - diag);
      if (!(diag > 0.0) || !(diag < 1.0))
        rep.fail(CpCondition::ResolventDiagonalOutOfRange, lambda, n, 0, diag);
      KahanSum row_sum;
      for (std::size_t j = 1; j < n; ++j) {
        const double v = rk.R.at(n, j);
        rep.note(v);
        if (v < -tol)
          rep.fail(CpCondition::ResolventEntryNegative, lambda, n, std::ptrdiff_t(n - j), v);
        row_sum.add(v);
      }
      row_sum.add(diag);
      rep.note(1.0 - row_sum.value());
      if (row_sum.value() > 1.0 + tol)
        rep.fail(CpCondition::ResolventRowSumExceedsOne, lambda, n, -1, row_sum.value());
    }
  }
  rep.sort_failures();
  return rep;
}

}  // namespace cpkernel
