#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cpkernel/compensated.hpp"
#include "cpkernel/cp_check.hpp"
#include "cpkernel/errors.hpp"
#include "cpkernel/kernel_algebra.hpp"
#include "cpkernel/mesh.hpp"
#include "cpkernel/resolvent.hpp"
#include "cpkernel/special_functions.hpp"

namespace cpkernel {

namespace detail {

/// x^p - y^p for x > y >= 0, p in (0, 1), avoiding the cancellation that the
/// direct difference suffers when x - y << y.
inline double power_diff(double x, double y, double p) {
  if (y == 0.0) return std::pow(x, p);
  const double d = x - y;
  if (d < 0.5 * y) return std::pow(y, p) * std::expm1(p * std::log1p(d / y));
  return std::pow(x, p) - std::pow(y, p);
}

}  // namespace detail

/// L1 coefficients c_{n-j}^n = [(t_n - t_{j-1})^{1-a} - (t_n - t_j)^{1-a}]
/// / (tau_j Gamma(2-a)), the exact integral of (t_n - s)^{-a} over the j-th
/// interval.  Entries are positive and decrease along each row as n-j grows.
inline TriKernel l1_coefficients(const Mesh& mesh, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw AlphaOutOfRange(alpha);
  const std::size_t N = mesh.num_steps();
  const double p = 1.0 - alpha;
  const double g2 = gamma(2.0 - alpha);
  TriKernel c(N);
  for (std::size_t n = 1; n <= N; ++n) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double tau = mesh.step(j);
      c.at(n, j) =
          detail::power_diff(mesh.t(n) - mesh.t(j - 1), mesh.t(n) - mesh.t(j), p) /
          (tau * g2);
    }
  }
  return c;
}

/// L1 discretization of the Caputo derivative on a mesh: the coefficient
/// kernel C, the difference form B = C (*) L^(-1), and its inverse A.
struct L1Operator {
  Mesh mesh;
  double alpha;
  TriKernel C;
  TriKernel B;
  TriKernel A;
};

/// Assembles C, B, A and checks that B satisfies the completely-positive sign
/// certificate (positive diagonal, nonpositive off-diagonal, nonnegative row
/// sums).  A violation beyond tol would contradict the structure of the L1
/// coefficients and aborts construction.
inline L1Operator build_l1_operator(const Mesh& mesh, double alpha, double tol = 1e-12) {
  TriKernel c = l1_coefficients(mesh, alpha);
  TriKernel b = pseudo_convolve(c, lower_ones_inverse(mesh.num_steps()));
  for (std::size_t n = 1; n <= b.rows(); ++n) {
    if (!(c.at(n, n) > 0.0)) throw PropertyBViolated(n, n, c.at(n, n));
    KahanSum row;
    for (std::size_t j = 1; j < n; ++j) {
      if (b.at(n, j) > tol) throw PropertyBViolated(n, j, b.at(n, j));
      row.add(b.at(n, j));
    }
    if (!(b.at(n, n) > tol)) throw PropertyBViolated(n, n, b.at(n, n));
    row.add(b.at(n, n));
    if (row.value() < -tol) throw PropertyBViolated(n, 0, row.value());
  }
  TriKernel a = inverse(b);
  return {mesh, alpha, std::move(c), std::move(b), std::move(a)};
}

using State = std::vector<double>;

/// Discrete Caputo derivative of a state sequence u_0..u_N:
/// (D u)_n = sum_{j<=n} c_{n-j}^n (u_j - u_{j-1}),  n = 1..N.
inline std::vector<State> apply_l1_derivative(const L1Operator& op,
                                              const std::vector<State>& u) {
  const std::size_t N = op.C.rows();
  if (u.size() != N + 1) throw SizeMismatch(u.size(), N + 1);
  const std::size_t dim = u[0].size();
  for (const auto& s : u)
    if (s.size() != dim) throw SizeMismatch(s.size(), dim);
  std::vector<State> d(N, State(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t n = 1; n <= N; ++n) {
      KahanSum s;
      for (std::size_t j = 1; j <= n; ++j) s.add(op.C.at(n, j) * (u[j][i] - u[j - 1][i]));
      d[n - 1][i] = s.value();
    }
  }
  return d;
}

inline std::vector<double> apply_l1_derivative(const L1Operator& op,
                                               const std::vector<double>& u_scalar) {
  std::vector<State> u(u_scalar.size());
  for (std::size_t i = 0; i < u_scalar.size(); ++i) u[i] = {u_scalar[i]};
  auto d = apply_l1_derivative(op, u);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i][0];
  return out;
}

// ---------------------------------------------------------------------------
// Accretive operators and the implicit solver
// ---------------------------------------------------------------------------

struct LinearScalar {
  double rate = 0.0;  // A(u) = rate * u, rate >= 0
};

struct ScalarMonotone {
  std::function<double(double)> beta;             // nondecreasing, beta(0) = 0
  std::function<double(double)> dbeta = nullptr;  // optional; enables Newton
};

struct DiffusionReaction1D {
  std::size_t m = 0;   // interior grid points
  double ell = 1.0;    // domain length; homogeneous Dirichlet ends
  std::function<double(double)> beta;
  std::function<double(double)> dbeta;
};

struct FodeProblem {
  std::variant<LinearScalar, ScalarMonotone, DiffusionReaction1D> op;
  State initial;

  std::size_t dim() const { return initial.size(); }
};

inline FodeProblem make_linear_scalar(double rate, double u0) {
  if (!(rate >= 0.0)) throw DomainError("linear scalar problem needs rate >= 0");
  return {LinearScalar{rate}, {u0}};
}

inline FodeProblem make_scalar_monotone(std::function<double(double)> beta,
                                        std::function<double(double)> dbeta, double u0) {
  return {ScalarMonotone{std::move(beta), std::move(dbeta)}, {u0}};
}

inline FodeProblem make_diffusion_reaction(std::size_t m, double ell,
                                           std::function<double(double)> beta,
                                           std::function<double(double)> dbeta,
                                           State u0) {
  if (m == 0) throw DomainError("diffusion problem needs m >= 1");
  if (!(ell > 0.0)) throw DomainError("diffusion problem needs ell > 0");
  if (u0.size() != m) throw SizeMismatch(u0.size(), m);
  return {DiffusionReaction1D{m, ell, std::move(beta), std::move(dbeta)}, std::move(u0)};
}

namespace detail {

inline void neg_laplacian_1d(const State& w, double h, State& out) {
  const std::size_t m = w.size();
  const double ih2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = (i > 0) ? w[i - 1] : 0.0;
    const double right = (i + 1 < m) ? w[i + 1] : 0.0;
    out[i] = (2.0 * w[i] - left - right) * ih2;
  }
}

/// Tridiagonal solve with constant off-diagonal entries (Thomas algorithm).
inline void solve_tridiagonal(const State& diag, double off, State& rhs) {
  const std::size_t m = diag.size();
  static thread_local State c_prime;
  c_prime.assign(m, 0.0);
  double d = diag[0];
  c_prime[0] = off / d;
  rhs[0] /= d;
  for (std::size_t i = 1; i < m; ++i) {
    d = diag[i] - off * c_prime[i - 1];
    c_prime[i] = off / d;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / d;
  }
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= c_prime[i] * rhs[i + 1];
}

}  // namespace detail

/// A(u) as a plain function evaluation (used for residual reporting).
inline State apply_accretive(const FodeProblem& p, const State& u) {
  State out(u.size());
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, LinearScalar>) {
          out[0] = op.rate * u[0];
        } else if constexpr (std::is_same_v<T, ScalarMonotone>) {
          out[0] = op.beta(u[0]);
        } else {
          const double h = op.ell / double(op.m + 1);
          detail::neg_laplacian_1d(u, h, out);
          for (std::size_t i = 0; i < op.m; ++i) out[i] += op.beta(u[i]);
        }
      },
      p.op);
  return out;
}

inline constexpr int kResolventIterationBudget = 500;

/// Resolvent J_mu of the accretive operator: solves w + mu A(w) = f.
///
/// Residual targets (infinity norm) when residual_tol <= 0:
///   LinearScalar     exact division
///   ScalarMonotone   1e-13 * (1 + |f|), safeguarded Newton / bisection
///   DiffusionReaction1D  1e-11, damped Newton with tridiagonal solves
inline State resolvent_apply(const FodeProblem& p, double mu, const State& f,
                             double residual_tol = -1.0) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("resolvent_apply: mu must be positive");
  if (f.size() != p.dim()) throw SizeMismatch(f.size(), p.dim());
  State w(f.size(), 0.0);
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, LinearScalar>) {
          w[0] = f[0] / (1.0 + mu * op.rate);
        } else if constexpr (std::is_same_v<T, ScalarMonotone>) {
          const double tol =
              residual_tol > 0.0 ? residual_tol : 1e-13 * (1.0 + std::abs(f[0]));
          // g(w) = w + mu beta(w) - f is increasing with a root in [lo, hi].
          double lo = std::min(0.0, f[0]);
          double hi = std::max(0.0, f[0]);
          double x = f[0];
          for (int it = 0; it < kResolventIterationBudget; ++it) {
            const double g = x + mu * op.beta(x) - f[0];
            if (std::abs(g) <= tol) {
              w[0] = x;
              return;
            }
            (g > 0.0 ? hi : lo) = x;
            double next = std::numeric_limits<double>::quiet_NaN();
            if (op.dbeta) {
              const double dg = 1.0 + mu * op.dbeta(x);
              if (dg > 0.0) next = x - g / dg;
            }
            if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
            if (next == x) {  // interval exhausted at machine resolution
              w[0] = x;
              return;
            }
            x = next;
          }
          throw NoConvergence(kResolventIterationBudget);
        } else {
          const double tol = residual_tol > 0.0 ? residual_tol : 1e-11;
          const double h = op.ell / double(op.m + 1);
          const double off = -mu / (h * h);
          w = f;
          State g(op.m), lap(op.m), diag(op.m), trial(op.m);
          auto residual = [&](const State& v, State& out) {
            detail::neg_laplacian_1d(v, h, lap);
            double norm = 0.0;
            for (std::size_t i = 0; i < op.m; ++i) {
              out[i] = v[i] + mu * lap[i] + mu * op.beta(v[i]) - f[i];
              norm = std::max(norm, std::abs(out[i]));
            }
            return norm;
          };
          double gnorm = residual(w, g);
          for (int it = 0; it < kResolventIterationBudget; ++it) {
            if (gnorm <= tol) return;
            for (std::size_t i = 0; i < op.m; ++i) {
              diag[i] = 1.0 - 2.0 * off + mu * op.dbeta(w[i]);
            }
            State step = g;
            for (double& s : step) s = -s;
            detail::solve_tridiagonal(diag, off, step);
            double damping = 1.0;
            for (int half = 0; half < 40; ++half) {
              for (std::size_t i = 0; i < op.m; ++i) trial[i] = w[i] + damping * step[i];
              const double tnorm = residual(trial, g);
              if (tnorm < gnorm || tnorm <= tol) {
                w = trial;
                gnorm = tnorm;
                break;
              }
              damping *= 0.5;
              if (half == 39) throw NoConvergence(it);
            }
          }
          if (gnorm > tol) throw NoConvergence(kResolventIterationBudget);
        }
      },
      p.op);
  return w;
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

enum class Stepper { Direct, Yosida };

struct SolveOptions {
  Stepper stepper = Stepper::Direct;
  /// Yosida regularization parameter; <= 0 selects 1e-3 * (min tau)^alpha.
  double yosida_lambda = 0.0;
  /// Infinity-norm bound enforced on the residual of the discrete relation
  /// (direct stepper).  The Yosida stepper solves the regularized relation
  /// and records its residual instead.
  double residual_tol = 1e-10;
};

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
  /// Contraction factor (R_{1/lambda})_0^n of the Yosida fixed-point
  /// iteration; NaN for the direct stepper.
  double contraction = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  Mesh mesh;
  std::vector<State> states;  // u_0..u_N
  std::vector<StepStats> step_stats;  // per step n = 1..N

  double min_entry() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : states)
      for (double v : s) m = std::min(m, v);
    return m;
  }
};

namespace detail {

/// Residual of the discrete relation  B (*) (u - u_0)|_n + A(u_n)  at step n.
inline double discrete_residual(const L1Operator& op, const FodeProblem& p,
                                const std::vector<State>& u, std::size_t n) {
  const std::size_t dim = p.dim();
  const State au = apply_accretive(p, u[n]);
  double norm = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    KahanSum s;
    for (std::size_t j = 1; j <= n; ++j) s.add(op.B.at(n, j) * (u[j][i] - u[0][i]));
    s.add(au[i]);
    norm = std::max(norm, std::abs(s.value()));
  }
  return norm;
}

}  // namespace detail

/// Implicit L1 stepper for D^alpha u = -A(u), u(0) = u_0.
///
/// Direct mode: one resolvent solve per step,
///   u_n = J_{1/b_0^n}( (1/b_0^n) [ (sum_j b_{n-j}^n) u_0 - sum_{j<n} b_{n-j}^n u_j ] ),
/// where every history weight is nonnegative whenever B satisfies the sign
/// certificate, which is what propagates nonnegativity of u_0.
///
/// Yosida mode replaces A by its Yosida approximation A_lambda and runs the
/// fixed-point iteration w <- f + (R_{1/lambda})_0^n J_lambda(w), whose
/// contraction factor is checked to lie in (0, 1) at every step.
inline Trajectory solve_fode(const L1Operator& op, const FodeProblem& p,
                             const SolveOptions& options = {}) {
  const std::size_t N = op.B.rows();
  const std::size_t dim = p.dim();
  if (p.initial.size() != dim) throw SizeMismatch(p.initial.size(), dim);

  Trajectory traj{op.mesh, {}, {}};
  traj.states.assign(N + 1, State(dim, 0.0));
  traj.states[0] = p.initial;
  traj.step_stats.assign(N, StepStats{});

  if (options.stepper == Stepper::Direct) {
    State f(dim), hist(dim);
    for (std::size_t n = 1; n <= N; ++n) {
      const double b0 = op.B.at(n, n);
      KahanSum row_sum;
      for (std::size_t j = 1; j <= n; ++j) row_sum.add(op.B.at(n, j));
      for (std::size_t i = 0; i < dim; ++i) {
        KahanSum s;
        for (std::size_t j = 1; j < n; ++j) s.add(-op.B.at(n, j) * traj.states[j][i]);
        s.add(row_sum.value() * traj.states[0][i]);
        f[i] = s.value() / b0;
      }
      const double inner_tol = 0.45 * options.residual_tol / b0;
      traj.states[n] = resolvent_apply(p, 1.0 / b0, f, inner_tol);
      const double res = detail::discrete_residual(op, p, traj.states, n);
      if (!(res <= options.residual_tol)) {
        throw Error("solve_fode: step " + std::to_string(n) + " residual " +
                    std::to_string(res) + " exceeds tolerance");
      }
      traj.step_stats[n - 1].residual = res;
      traj.step_stats[n - 1].iterations = 1;
    }
    return traj;
  }

  // Yosida validation mode.
  double lambda = options.yosida_lambda;
  if (!(lambda > 0.0)) {
    double min_tau = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= N; ++n) min_tau = std::min(min_tau, op.mesh.step(n));
    lambda = 1e-3 * std::pow(min_tau, op.alpha);
  }
  const ResolventKernel rk = resolvent(op.A, 1.0 / lambda);
  std::vector<State> jlam(N + 1);  // J_lambda(u_j), filled as steps complete
  jlam[0] = resolvent_apply(p, lambda, traj.states[0]);
  State f(dim);
  for (std::size_t n = 1; n <= N; ++n) {
    const double q = rk.R.at(n, n);
    if (!(q > 0.0) || !(q < 1.0)) {
      throw Error("solve_fode: contraction factor " + std::to_string(q) +
                  " outside (0,1) at step " + std::to_string(n));
    }
    KahanSum row_sum;
    for (std::size_t j = 1; j <= n; ++j) row_sum.add(rk.R.at(n, j));
    for (std::size_t i = 0; i < dim; ++i) {
      KahanSum s;
      for (std::size_t j = 1; j < n; ++j) s.add(rk.R.at(n, j) * jlam[j][i]);
      s.add((1.0 - row_sum.value()) * traj.states[0][i]);
      f[i] = s.value();
    }
    double fnorm = 0.0;
    for (double v : f) fnorm = std::max(fnorm, std::abs(v));
    const double fp_tol = 1e-12 * (1.0 + fnorm) * (1.0 - q);
    // contraction by q per sweep; budget sized from the factor itself
    const long max_iters = std::min<long>(
        5'000'000, std::max<long>(1000, long(std::ceil(80.0 / -std::log(q)))));
    State w = traj.states[n - 1];
    State jw(dim);
    long it = 0;
    for (;; ++it) {
      if (it >= max_iters) throw NoConvergence(int(std::min<long>(max_iters, INT32_MAX)));
      jw = resolvent_apply(p, lambda, w);
      double diff = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double next = f[i] + q * jw[i];
        diff = std::max(diff, std::abs(next - w[i]));
        w[i] = next;
      }
      if (diff <= fp_tol) break;
    }
    traj.states[n] = w;
    jlam[n] = resolvent_apply(p, lambda, w);
    // residual of the regularized relation u_0 = u_n + sum_j a_{n-j}^n A_lambda(u_j)
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      KahanSum s;
      for (std::size_t j = 1; j <= n; ++j) {
        s.add(op.A.at(n, j) * (traj.states[j][i] - jlam[j][i]) / lambda);
      }
      s.add(traj.states[n][i] - traj.states[0][i]);
      res = std::max(res, std::abs(s.value()));
    }
    traj.step_stats[n - 1] = {int(it + 1), res, q};
  }
  return traj;
}

}  // namespace cpkernel
