#pragma once

#include <algorithm>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

#include "cpkernel/cp_check.hpp"
#include "cpkernel/generators.hpp"
#include "cpkernel/kernel_algebra.hpp"
#include "cpkernel/l1_fode.hpp"
#include "cpkernel/resolvent.hpp"

namespace cpkernel {

struct CheckResult {
  std::string name;
  bool pass = false;
  /// Worst defect (for identity checks) or smallest margin (for sign checks).
  double measure = 0.0;
  std::string detail;
};

namespace verify_detail {

inline double rel_diff(const TriKernel& x, const TriKernel& y) {
  double worst = 0.0;
  for (std::size_t n = 1; n <= x.rows(); ++n) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double l = x.at(n, j), r = y.at(n, j);
      worst = std::max(worst,
                       std::abs(l - r) / std::max({1.0, std::abs(l), std::abs(r)}));
    }
  }
  return worst;
}

inline CheckResult check_associativity(std::uint64_t seed) {
  Rng rng(seed ^ 0x61u);
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const auto a = random_kernel(rng, 30);
    const auto b = random_kernel(rng, 30);
    const auto c = random_kernel(rng, 30);
    worst = std::max(worst, rel_diff(pseudo_convolve(pseudo_convolve(a, b), c),
                                     pseudo_convolve(a, pseudo_convolve(b, c))));
    worst = std::max(worst, rel_diff(pseudo_convolve(axpy(1.0, a, b), c),
                                     axpy(1.0, pseudo_convolve(a, c), pseudo_convolve(b, c))));
    worst = std::max(worst, rel_diff(pseudo_convolve(a, axpy(1.0, b, c)),
                                     axpy(1.0, pseudo_convolve(a, b), pseudo_convolve(a, c))));
  }
  return {"algebra_associativity", worst <= 1e-12, worst, "max relative law defect"};
}

inline CheckResult check_inverse(std::uint64_t seed) {
  Rng rng(seed ^ 0x62u);
  double worst = 0.0;
  const TriKernel id = identity(40);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_kernel(rng, 40);
    const auto b = inverse(a);
    worst = std::max(worst, max_abs_diff(pseudo_convolve(a, b), id));
    worst = std::max(worst, max_abs_diff(pseudo_convolve(b, a), id));
  }
  return {"algebra_inverse_two_sided", worst <= 1e-10, worst, "max |A*B - I| both sides"};
}

inline CheckResult check_resolvent(std::uint64_t seed) {
  Rng rng(seed ^ 0x63u);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto a = random_kernel(rng, 30);
    for (double lambda : {0.01, 1.0, 100.0}) {
      const auto rk = resolvent(a, lambda);
      worst = std::max(worst, resolvent_defining_defect(a, rk));
      worst = std::max(worst, commutation_defect(a, rk));
      worst = std::max(worst, resolvent_right_complementary_check(a, lambda));
    }
  }
  return {"resolvent_identities", worst <= 1e-10, worst, "max defect of identities (a)-(c)"};
}

inline CheckResult check_cp_differential(std::uint64_t seed) {
  Rng rng(seed ^ 0x64u);
  const auto grid = default_lambda_grid();
  int counted = 0, skipped = 0, disagreements = 0;
  constexpr double kGuard = 1e-11;
  const CpViolation kinds[] = {CpViolation::OffDiagonalSign, CpViolation::RowSum,
                               CpViolation::Diagonal};
  for (int t = 0; t < 120; ++t) {
    const std::size_t n_rows = 3 + rng.index(22);
    TriKernel a;
    if (t % 2 == 0) {
      a = random_cp_pair(rng, n_rows).A;
    } else {
      a = random_cp_violation(rng, n_rows, kinds[rng.index(3)]).A;
    }
    const CpReport direct = check_cp_nonuniform(a);
    const CpReport scan = brute_cp_scan(a, grid);
    if (std::min(std::abs(direct.min_margin), std::abs(scan.min_margin)) <= kGuard) {
      ++skipped;
      continue;
    }
    ++counted;
    if (direct.completely_positive() != scan.completely_positive()) ++disagreements;
  }
  return {"cp_differential", disagreements == 0, double(disagreements),
          std::to_string(counted) + " counted, " + std::to_string(skipped) +
              " under margin guard"};
}

inline CheckResult check_l1_property_b(std::uint64_t seed) {
  Rng rng(seed ^ 0x65u);
  double min_margin = std::numeric_limits<double>::infinity();
  try {
    for (double alpha : {0.25, 0.5, 0.75}) {
      for (int t = 0; t < 3; ++t) {
        const Mesh mesh = random_mesh_loguniform(rng, 60);
        const L1Operator op = build_l1_operator(mesh, alpha);
        min_margin = std::min(min_margin, check_sign_certificate(op.B).min_margin);
      }
    }
  } catch (const PropertyBViolated&) {
    return {"l1_property_b", false, -1.0, "sign certificate violated"};
  }
  return {"l1_property_b", min_margin > 0.0, min_margin, "min sign-certificate margin"};
}

inline CheckResult check_positivity(std::uint64_t seed) {
  (void)seed;
  const Mesh mesh = make_graded_mesh(1.0, 48, 2.0);
  const L1Operator op = build_l1_operator(mesh, 0.5);
  const std::size_t m = 24;
  State u0(m);
  for (std::size_t i = 0; i < m; ++i) {
    u0[i] = std::max(std::sin(M_PI * double(i + 1) / double(m + 1)), 0.0);
  }
  const FodeProblem prob = make_diffusion_reaction(
      m, 1.0, [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
      u0);
  const Trajectory traj = solve_fode(op, prob);
  const double lo = traj.min_entry();
  return {"positivity_run", lo >= -1e-10, lo, "min state entry over the run"};
}

}  // namespace verify_detail

/// Runs the property suite.  Checks are independent and may run in parallel
/// (capped at `threads`); results are reported sorted by name and depend only
/// on `seed`.
inline std::vector<CheckResult> run_verify(std::uint64_t seed, unsigned threads) {
  using Fn = CheckResult (*)(std::uint64_t);
  const Fn checks[] = {
      verify_detail::check_associativity, verify_detail::check_inverse,
      verify_detail::check_resolvent,     verify_detail::check_cp_differential,
      verify_detail::check_l1_property_b, verify_detail::check_positivity,
  };
  constexpr std::size_t n_checks = std::size(checks);
  std::vector<CheckResult> results;
  if (threads <= 1) {
    for (Fn fn : checks) results.push_back(fn(seed));
  } else {
    for (std::size_t begin = 0; begin < n_checks; begin += threads) {
      const std::size_t end = std::min(n_checks, begin + threads);
      std::vector<std::future<CheckResult>> futures;
      for (std::size_t i = begin; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, checks[i], seed));
      }
      for (auto& f : futures) results.push_back(f.get());
    }
  }
  std::sort(results.begin(), results.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  return results;
}

}  // namespace cpkernel
