#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "cpkernel/compensated.hpp"
#include "cpkernel/errors.hpp"

namespace cpkernel {

namespace detail {

/// Lanczos approximation (g = 7, 9 terms), relative error ~1e-15 for x > 0.
inline double lanczos_gamma(double x) {
  static constexpr double kG = 7.0;
  static constexpr double kCoef[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection; only reached for x in (0, 0.5)
    return M_PI / (std::sin(M_PI * x) * lanczos_gamma(1.0 - x));
  }
  const double xm1 = x - 1.0;
  double a = kCoef[0];
  for (int i = 1; i < 9; ++i) a += kCoef[i] / (xm1 + i);
  const double t = xm1 + kG + 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, xm1 + 0.5) * std::exp(-t) * a;
}

struct BranchResult {
  double value;
  double error_bound;
};

// Both expansions cancel heavily, so they are evaluated in long double:
// the certificates below are computed from LDBL_EPSILON and degrade
// gracefully where long double is no wider than double.

/// Power series sum_{k>=0} z^k / Gamma(alpha k + 1), Kahan-summed, with a
/// cancellation certificate.  Valid for z <= 0.
inline BranchResult ml_series(double alpha, double z) {
  constexpr long double kEps = std::numeric_limits<long double>::epsilon();
  if (z == 0.0) return {1.0, 0.0};
  const long double a = alpha;
  const long double logz = std::log(-(long double)z);
  BasicKahanSum<long double> sum;
  sum.add(1.0L);
  long double weighted_abs = 1.0L;  // sum of |t_k| (4 + |log t_k|)
  long double lt_prev = 0.0L;
  long double term = 1.0L;
  for (std::size_t k = 1; k <= 200000; ++k) {
    const long double lt = (long double)k * logz - std::lgamma(a * k + 1.0L);
    if (lt > 11000.0L) return {std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::infinity()};
    term = std::exp(lt);
    if (k & 1u) term = -term;
    sum.add(term);
    weighted_abs += std::abs(term) * (4.0L + std::abs(lt));
    const bool past_hump = lt < lt_prev;
    if (past_hump && lt < -45.0L) break;
    lt_prev = lt;
  }
  return {double(sum.value()), double(kEps * weighted_abs + std::abs(term))};
}

/// Large-argument expansion -sum_{k>=1} z^-k / Gamma(1 - alpha k) truncated at
/// the smallest term.  1/Gamma(1 - alpha k) is evaluated by reflection.  The
/// certificate carries a x3 safety on the first omitted term (the remainder
/// at optimal truncation was observed up to ~2x that term).
inline BranchResult ml_asymptotic(double alpha, double z) {
  constexpr long double kEps = std::numeric_limits<long double>::epsilon();
  const long double a = alpha;
  const long double logz = std::log(-(long double)z);
  const long double logpi = std::log((long double)M_PI);
  BasicKahanSum<long double> sum;
  long double weighted_abs = 0.0L;
  long double env_prev = std::numeric_limits<long double>::infinity();
  long double env = env_prev;
  for (std::size_t k = 1; k <= 100000; ++k) {
    env = std::lgamma(a * k) - (long double)k * logz - logpi;
    if (env > env_prev) break;  // smallest-term truncation
    const long double sgn = (k & 1u) ? 1.0L : -1.0L;  // from -(-1)^k
    const long double sinpi = std::sin(M_PI * std::fmod(a * k, 2.0L));
    const long double term = sgn * std::exp(env) * sinpi;
    sum.add(term);
    weighted_abs += std::abs(term) * (4.0L + std::abs(env));
    env_prev = env;
    if (env < -11000.0L) {  // terms vanished; series effectively converged
      env = -std::numeric_limits<long double>::infinity();
      break;
    }
  }
  return {double(sum.value()),
          double(3.0L * std::exp(std::min(env, 700.0L)) + kEps * weighted_abs)};
}

}  // namespace detail

/// Gamma function on (0, 3), relative error <= 1e-13.
inline double gamma(double x) {
  if (!(x > 0.0) || !(x < 3.0)) {
    throw DomainError("gamma: argument " + std::to_string(x) + " outside (0, 3)");
  }
  return detail::lanczos_gamma(x);
}

struct MlQuery {
  double alpha;
  double z;
  double accuracy = 1e-10;
};

/// Mittag-Leffler function E_alpha(z) for alpha in (0, 1], z <= 0.
///
/// |z| <= 5 is served by the power series, z < -5 by the asymptotic
/// expansion; each branch certifies its own error bound and the other branch
/// is consulted before giving up.  alpha = 1 reduces to exp exactly.
inline double mittag_leffler(const MlQuery& q) {
  if (!(q.alpha > 0.0) || !(q.alpha <= 1.0)) {
    throw DomainError("mittag_leffler: alpha must be in (0, 1]");
  }
  if (!(q.z <= 0.0) || !std::isfinite(q.z)) {
    throw DomainError("mittag_leffler: z must be real and <= 0");
  }
  if (!(q.accuracy >= 1e-13)) {
    throw DomainError("mittag_leffler: requested accuracy below 1e-13");
  }
  if (q.alpha == 1.0) return std::exp(q.z);
  if (q.z == 0.0) return 1.0;

  const bool series_first = q.z >= -5.0;
  const auto primary = series_first ? detail::ml_series(q.alpha, q.z)
                                    : detail::ml_asymptotic(q.alpha, q.z);
  if (primary.error_bound <= q.accuracy) return primary.value;
  const auto secondary = series_first ? detail::ml_asymptotic(q.alpha, q.z)
                                      : detail::ml_series(q.alpha, q.z);
  if (secondary.error_bound <= q.accuracy) return secondary.value;
  throw AccuracyNotReached(q.accuracy,
                           std::min(primary.error_bound, secondary.error_bound));
}

}  // namespace cpkernel
