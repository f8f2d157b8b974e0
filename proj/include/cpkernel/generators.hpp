#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "cpkernel/kernel_algebra.hpp"
#include "cpkernel/mesh.hpp"

namespace cpkernel {

/// Deterministic random source.  mt19937_64 output is pinned by the
/// standard and the mapping to doubles below avoids std::*_distribution,
/// whose streams differ between standard libraries; reports produced from a
/// seed are therefore reproducible byte-for-byte everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::size_t index(std::size_t n) {  // uniform in [0, n)
    return std::size_t(uniform01() * double(n)) % n;
  }

private:
  std::mt19937_64 eng_;
};

/// Generic dense test kernel: off-diagonal entries U[lo, hi], diagonal
/// U[diag_lo, diag_hi] (bounded away from zero).
inline TriKernel random_kernel(Rng& rng, std::size_t n_rows, double lo = -1.0,
                               double hi = 1.0, double diag_lo = 0.5,
                               double diag_hi = 1.5) {
  TriKernel k(n_rows);
  for (std::size_t n = 1; n <= n_rows; ++n) {
    for (std::size_t j = 1; j < n; ++j) k.at(n, j) = rng.uniform(lo, hi);
    k.at(n, n) = rng.uniform(diag_lo, diag_hi);
  }
  return k;
}

struct CpSample {
  TriKernel B;  // satisfies the sign certificate by construction
  TriKernel A;  // = B^(-1), the completely positive kernel under test
};

/// Constructs B directly from the sign certificate: diagonal U[0.5, 1.5],
/// off-diagonal -p with p >= 0 scaled so the row sum stays nonnegative
/// (a random fraction s of the diagonal is spent on the off-diagonal mass).
inline CpSample random_cp_pair(Rng& rng, std::size_t n_rows) {
  TriKernel b(n_rows);
  for (std::size_t n = 1; n <= n_rows; ++n) {
    const double diag = rng.uniform(0.5, 1.5);
    b.at(n, n) = diag;
    if (n == 1) continue;
    double total = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      b.at(n, j) = rng.uniform01();
      total += b.at(n, j);
    }
    const double spend = rng.uniform(0.0, 0.999) * diag;
    const double scale = total > 0.0 ? spend / total : 0.0;
    for (std::size_t j = 1; j < n; ++j) b.at(n, j) *= -scale;
  }
  TriKernel a = inverse(b);
  return {std::move(b), std::move(a)};
}

enum class CpViolation { OffDiagonalSign, RowSum, Diagonal };

struct CpViolationSample {
  TriKernel B;
  TriKernel A;
  CpViolation kind;
  std::size_t n;  // perturbed row
  double delta;   // violation magnitude
};

/// Starts from a certificate-satisfying B and breaks exactly one condition in
/// one row.  delta is log-uniform in [1e-6, 1e-1]: large enough that the
/// resolvent scan on the default grid sees it, far above the checker
/// tolerance.
inline CpViolationSample random_cp_violation(Rng& rng, std::size_t n_rows,
                                             CpViolation kind) {
  CpSample base = random_cp_pair(rng, n_rows);
  TriKernel b = std::move(base.B);
  const double delta = rng.log_uniform(1e-6, 1e-1);
  const std::size_t n = 2 + rng.index(n_rows - 1);  // row with off-diagonal entries
  switch (kind) {
    case CpViolation::OffDiagonalSign: {
      const std::size_t j = 1 + rng.index(n - 1);
      b.at(n, j) = delta;
      break;
    }
    case CpViolation::RowSum: {
      KahanSum row;
      for (std::size_t j = 1; j <= n; ++j) row.add(b.at(n, j));
      const std::size_t j = 1 + rng.index(n - 1);
      b.at(n, j) -= row.value() + delta * b.at(n, n);
      break;
    }
    case CpViolation::Diagonal: {
      b.at(n, n) = -rng.uniform(0.5, 1.5);
      break;
    }
  }
  TriKernel a = inverse(b);
  return {std::move(b), std::move(a), kind, n, delta};
}

/// Mesh with step sizes log-uniform over `decades` decades, normalized to
/// the horizon T.
inline Mesh random_mesh_loguniform(Rng& rng, std::size_t n_steps, double decades = 3.0,
                                   double T = 1.0) {
  std::vector<double> pts(n_steps + 1, 0.0);
  double acc = 0.0;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    acc += std::pow(10.0, rng.uniform(0.0, decades));
    pts[n] = acc;
  }
  for (std::size_t n = 1; n < n_steps; ++n) pts[n] *= T / acc;
  pts[n_steps] = T;
  return Mesh(std::move(pts));
}

}  // namespace cpkernel
