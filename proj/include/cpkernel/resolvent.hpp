#pragma once

#include <cmath>
#include <cstddef>

#include "cpkernel/errors.hpp"
#include "cpkernel/kernel_algebra.hpp"

namespace cpkernel {

/// Resolvent kernel of A: R_lambda + lambda R_lambda (*) A = lambda A.
struct ResolventKernel {
  double lambda = 0.0;
  TriKernel R;
};

/// R_lambda = I - (I + lambda A)^(-1).  One triangular inversion; the
/// defining relation then holds by the two-sidedness of the inverse.
inline ResolventKernel resolvent(const TriKernel& a, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("resolvent: lambda must be positive and finite");
  }
  const TriKernel inv = inverse(axpy(lambda, a, identity(a.rows())));
  TriKernel r(a.rows());
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    for (std::size_t j = 1; j < n; ++j) r.at(n, j) = -inv.at(n, j);
    r.at(n, n) = 1.0 - inv.at(n, n);
  }
  return {lambda, r};
}

/// Max-entry defect of the defining relation R + lambda R (*) A - lambda A,
/// relative to the magnitude of lambda A.
inline double resolvent_defining_defect(const TriKernel& a, const ResolventKernel& rk) {
  const TriKernel ra = pseudo_convolve(rk.R, a);
  double defect = 0.0;
  const double scale = std::max(1.0, rk.lambda * max_abs_entry(a));
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double d = rk.R.at(n, j) + rk.lambda * ra.at(n, j) - rk.lambda * a.at(n, j);
      defect = std::max(defect, std::abs(d) / scale);
    }
  }
  return defect;
}

/// Max-entry value of R (*) A - A (*) R (zero in exact arithmetic).
inline double commutation_defect(const TriKernel& a, const ResolventKernel& rk) {
  return max_abs_diff(pseudo_convolve(rk.R, a), pseudo_convolve(a, rk.R));
}

/// C_R = A^(-1) (*) L, the kernel with A (*) C_R = L.
inline TriKernel right_complementary(const TriKernel& a) {
  return pseudo_convolve(inverse(a), lower_ones(a.rows()));
}

/// C_L = L (*) A^(-1), the kernel with C_L (*) A = L.
inline TriKernel left_complementary(const TriKernel& a) {
  return pseudo_convolve(lower_ones(a.rows()), inverse(a));
}

/// Max-entry defect of R_lambda (*) (lambda^-1 C_R + L) = L.
inline double resolvent_right_complementary_check(const TriKernel& a, double lambda) {
  const ResolventKernel rk = resolvent(a, lambda);
  const TriKernel cr = right_complementary(a);
  const TriKernel combo = axpy(1.0 / lambda, cr, lower_ones(a.rows()));
  return max_abs_diff(pseudo_convolve(rk.R, combo), lower_ones(a.rows()));
}

/// Max-entry value of lambda (I - R_lambda) - A^(-1); decays like 1/lambda.
inline double asymptotic_defect(const TriKernel& a, double lambda) {
  const ResolventKernel rk = resolvent(a, lambda);
  const TriKernel ainv = inverse(a);
  double defect = 0.0;
  for (std::size_t n = 1; n <= a.rows(); ++n) {
    for (std::size_t j = 1; j < n; ++j) {
      defect = std::max(defect, std::abs(-lambda * rk.R.at(n, j) - ainv.at(n, j)));
    }
    defect = std::max(defect,
                      std::abs(lambda * (1.0 - rk.R.at(n, n)) - ainv.at(n, n)));
  }
  return defect;
}

}  // namespace cpkernel
