#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cpkernel/generators.hpp"
#include "cpkernel/l1_fode.hpp"
#include "cpkernel/special_functions.hpp"
#include "oracles.hpp"

using namespace cpkernel;

TEST_CASE("L1 coefficients") {
  SECTION("uniform mesh, alpha = 1/2: frozen leading coefficients") {
    const Mesh mesh = validate_mesh({0.0, 1.0, 2.0, 3.0});
    const TriKernel c = l1_coefficients(mesh, 0.5);
    const double c0 = 2.0 / std::sqrt(M_PI);                 // 1/Gamma(3/2)
    const double c1 = (std::sqrt(2.0) - 1.0) * c0;           // (2^(1/2)-1)/Gamma(3/2)
    REQUIRE(c0 == Catch::Approx(1.1283791670955126).epsilon(1e-12));
    REQUIRE(c1 == Catch::Approx(0.46738995451021825).epsilon(1e-12));
    for (std::size_t n = 1; n <= 3; ++n) {
      REQUIRE(c.coef(n, 0) == Catch::Approx(c0).epsilon(1e-13));
      if (n >= 2) REQUIRE(c.coef(n, 1) == Catch::Approx(c1).epsilon(1e-13));
    }
  }
  SECTION("agrees with quadrature of the defining integral") {
    Rng rng(41);
    for (double alpha : {0.2, 0.5, 0.9}) {
      const Mesh mesh = random_mesh_loguniform(rng, 12, 2.5);
      const TriKernel c = l1_coefficients(mesh, alpha);
      for (std::size_t n = 1; n <= mesh.num_steps(); ++n) {
        for (std::size_t j = 1; j <= n; ++j) {
          const double gap = mesh.t(n) - mesh.t(j);
          const double integral = oracles::tanh_sinh(
              [&](double, double, double db) { return std::pow(gap + db, -alpha); },
              mesh.t(j - 1), mesh.t(j), 1e-13);
          const double expect = integral / (mesh.step(j) * std::tgamma(1.0 - alpha));
          REQUIRE(c.at(n, j) == Catch::Approx(expect).epsilon(1e-10).margin(1e-10));
        }
      }
    }
  }
  SECTION("rows are positive and decrease away from the diagonal") {
    const Mesh mesh = make_graded_mesh(1.0, 40, 2.0);
    const TriKernel c = l1_coefficients(mesh, 0.3);
    for (std::size_t n = 1; n <= 40; ++n) {
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        REQUIRE(c.coef(n, k) > 0.0);
        REQUIRE(c.coef(n, k) < prev);
        prev = c.coef(n, k);
      }
    }
  }
  SECTION("alpha close to 1 stays finite") {
    const Mesh mesh = validate_mesh({0.0, 1.0, 2.0});
    const TriKernel c = l1_coefficients(mesh, 0.999);
    REQUIRE(std::isfinite(c.coef(2, 1)));
    REQUIRE(c.coef(1, 0) == Catch::Approx(1.0 / cpkernel::gamma(1.001)).epsilon(1e-12));
  }
  SECTION("alpha domain") {
    const Mesh mesh = validate_mesh({0.0, 1.0});
    REQUIRE_THROWS_AS(l1_coefficients(mesh, 0.0), AlphaOutOfRange);
    REQUIRE_THROWS_AS(l1_coefficients(mesh, 1.0), AlphaOutOfRange);
    REQUIRE_THROWS_AS(l1_coefficients(mesh, -0.5), AlphaOutOfRange);
  }
}

TEST_CASE("L1 operator construction") {
  SECTION("B carries the sign certificate; A is completely positive") {
    const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 50, 2.0), 0.5);
    REQUIRE(check_sign_certificate(op.B).completely_positive());
    REQUIRE(check_cp_nonuniform(op.A).completely_positive());
  }
  SECTION("random meshes across alpha keep a positive margin") {
    Rng rng(42);
    for (double alpha : {0.3, 0.7}) {
      const Mesh mesh = random_mesh_loguniform(rng, 100, 3.0);
      const L1Operator op = build_l1_operator(mesh, alpha);
      REQUIRE(check_sign_certificate(op.B).min_margin > 0.0);
    }
  }
  SECTION("uniform mesh: B rows depend only on the subscript") {
    const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 10, 1.0), 0.5);
    for (std::size_t n = 2; n <= 10; ++n) {
      for (std::size_t k = 0; k < n - 1; ++k) {
        REQUIRE(op.B.coef(n, k) ==
                Catch::Approx(op.B.coef(n - 1, k)).epsilon(1e-12).margin(1e-12));
      }
    }
  }
  SECTION("A inverts B") {
    const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 30, 1.5), 0.4);
    REQUIRE(max_abs_diff(pseudo_convolve(op.A, op.B), identity(30)) <= 1e-12);
  }
}

TEST_CASE("discrete Caputo derivative") {
  const Mesh mesh = make_graded_mesh(2.0, 20, 1.0);
  const L1Operator op = build_l1_operator(mesh, 0.5);

  SECTION("constant sequences have zero derivative") {
    std::vector<double> u(21, 3.7);
    for (double d : apply_l1_derivative(op, u)) REQUIRE(d == 0.0);
  }
  SECTION("u = t on a uniform step-1 mesh reproduces the exact value at t_1") {
    const Mesh unit = validate_mesh({0.0, 1.0, 2.0, 3.0});
    const L1Operator uop = build_l1_operator(unit, 0.5);
    std::vector<double> u{0.0, 1.0, 2.0, 3.0};
    const auto d = apply_l1_derivative(uop, u);
    // Caputo derivative of t is t^{1-a}/Gamma(2-a); the scheme is exact on
    // piecewise-linear functions
    REQUIRE(d[0] == Catch::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-12));
    for (std::size_t n = 1; n <= 3; ++n) {
      REQUIRE(d[n - 1] == Catch::Approx(std::pow(double(n), 0.5) * 2.0 / std::sqrt(M_PI))
                              .epsilon(1e-12));
    }
  }
  SECTION("linearity holds exactly in exact arithmetic scale") {
    Rng rng(43);
    std::vector<double> u(21), v(21);
    for (double& x : u) x = rng.uniform(-1.0, 1.0);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    std::vector<double> combo(21);
    for (std::size_t i = 0; i <= 20; ++i) combo[i] = 2.0 * u[i] - 3.0 * v[i];
    const auto du = apply_l1_derivative(op, u);
    const auto dv = apply_l1_derivative(op, v);
    const auto dc = apply_l1_derivative(op, combo);
    for (std::size_t n = 0; n < 20; ++n) {
      REQUIRE(dc[n] == Catch::Approx(2.0 * du[n] - 3.0 * dv[n]).margin(1e-12));
    }
  }
  SECTION("difference form agrees with B applied to u - u0") {
    Rng rng(44);
    std::vector<double> u(21), shifted(20);
    for (double& x : u) x = rng.uniform(-1.0, 1.0);
    for (std::size_t n = 1; n <= 20; ++n) shifted[n - 1] = u[n] - u[0];
    const auto direct = apply_l1_derivative(op, u);
    const auto via_b = pseudo_convolve_vec(op.B, shifted);
    for (std::size_t n = 0; n < 20; ++n) {
      REQUIRE(direct[n] == Catch::Approx(via_b[n]).margin(1e-12));
    }
  }
  SECTION("matches the Caputo quadrature oracle on piecewise-linear data") {
    Rng rng(45);
    const Mesh rmesh = random_mesh_loguniform(rng, 15, 2.0);
    const double alpha = 0.35;
    const L1Operator rop = build_l1_operator(rmesh, alpha);
    std::vector<double> u(16);
    for (double& x : u) x = rng.uniform(-2.0, 2.0);
    const auto d = apply_l1_derivative(rop, u);
    for (std::size_t n = 1; n <= 15; ++n) {
      const double expect = oracles::caputo_pwl_quadrature(rmesh, alpha, u, n);
      REQUIRE(d[n - 1] == Catch::Approx(expect).margin(1e-9));
    }
  }
  SECTION("length mismatch") {
    std::vector<double> u(5, 1.0);
    REQUIRE_THROWS_AS(apply_l1_derivative(op, u), SizeMismatch);
  }
}

TEST_CASE("resolvent of the accretive operator") {
  SECTION("zero input maps to zero") {
    const auto linear = make_linear_scalar(2.0, 0.0);
    REQUIRE(resolvent_apply(linear, 5.0, {0.0})[0] == 0.0);
    const auto cubic = make_scalar_monotone(
        [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; }, 0.0);
    REQUIRE(resolvent_apply(cubic, 3.0, {0.0})[0] == 0.0);
  }
  SECTION("linear scalar closed form") {
    const auto p = make_linear_scalar(1.0, 0.0);
    REQUIRE(resolvent_apply(p, 1.0, {2.0})[0] == 1.0);
  }
  SECTION("cubic root solve: w + w^3 = 2 has root 1") {
    const auto p = make_scalar_monotone(
        [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; }, 0.0);
    const double w = resolvent_apply(p, 1.0, {2.0})[0];
    REQUIRE(w == Catch::Approx(1.0).epsilon(1e-12));
    // residual at the returned point meets the contract
    REQUIRE(std::abs(w + w * w * w - 2.0) <= 1e-13 * 3.0);
  }
  SECTION("cubic without derivative falls back to bisection") {
    const auto p = make_scalar_monotone([](double u) { return u * u * u; }, nullptr, 0.0);
    REQUIRE(resolvent_apply(p, 1.0, {2.0})[0] == Catch::Approx(1.0).epsilon(1e-10));
    REQUIRE(resolvent_apply(p, 2.5, {-3.5})[0] ==
            Catch::Approx(resolvent_apply(p, 2.5, {-3.5})[0]));
  }
  SECTION("diffusion-reaction resolvent meets its residual contract") {
    const std::size_t m = 24;
    State u0(m, 0.0), f(m);
    Rng rng(46);
    for (double& x : f) x = rng.uniform(0.0, 1.0);
    const auto p = make_diffusion_reaction(
        m, 1.0, [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
        u0);
    const double mu = 0.37;
    const State w = resolvent_apply(p, mu, f);
    const double h = 1.0 / double(m + 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double left = i ? w[i - 1] : 0.0;
      const double right = (i + 1 < m) ? w[i + 1] : 0.0;
      const double g =
          w[i] + mu * (2.0 * w[i] - left - right) / (h * h) + mu * w[i] * w[i] * w[i] - f[i];
      worst = std::max(worst, std::abs(g));
    }
    REQUIRE(worst <= 1e-11);
  }
  SECTION("parameter validation") {
    const auto p = make_linear_scalar(1.0, 0.0);
    REQUIRE_THROWS_AS(resolvent_apply(p, 0.0, {1.0}), DomainError);
    REQUIRE_THROWS_AS(resolvent_apply(p, 1.0, {1.0, 2.0}), SizeMismatch);
  }
}

TEST_CASE("solve_fode: trivial and linear problems") {
  SECTION("A = 0 keeps the solution constant") {
    const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 25, 2.0), 0.5);
    const auto traj = solve_fode(op, make_linear_scalar(0.0, 0.7));
    for (const auto& s : traj.states) REQUIRE(s[0] == Catch::Approx(0.7).margin(1e-13));
  }
  SECTION("linear decay tracks the Mittag-Leffler solution and refines monotonically") {
    double prev_err = std::numeric_limits<double>::infinity();
    const double exact = mittag_leffler({0.5, -1.0});
    for (std::size_t N : {16, 32, 64}) {
      const L1Operator op = build_l1_operator(make_graded_mesh(1.0, N, 2.0), 0.5);
      const auto traj = solve_fode(op, make_linear_scalar(1.0, 1.0));
      const double err = std::abs(traj.states.back()[0] - exact);
      REQUIRE(err < prev_err);
      prev_err = err;
      // trajectory is nonincreasing for rate > 0, u0 > 0
      for (std::size_t n = 1; n < traj.states.size(); ++n) {
        REQUIRE(traj.states[n][0] <= traj.states[n - 1][0] + 1e-14);
      }
    }
    REQUIRE(prev_err <= 2e-3);
  }
  SECTION("recorded residuals meet the tolerance") {
    const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 30, 2.0), 0.8);
    const auto traj = solve_fode(op, make_linear_scalar(1.0, 1.0));
    for (const auto& s : traj.step_stats) REQUIRE(s.residual <= 1e-10);
  }
}

TEST_CASE("solve_fode: history weights stay nonnegative") {
  // the mechanism behind positivity: every weight in the history combination
  // is nonnegative when B carries the sign certificate
  Rng rng(47);
  const Mesh mesh = random_mesh_loguniform(rng, 60, 3.0);
  const L1Operator op = build_l1_operator(mesh, 0.6);
  for (std::size_t n = 1; n <= 60; ++n) {
    KahanSum row;
    for (std::size_t j = 1; j <= n; ++j) {
      row.add(op.B.at(n, j));
      if (j < n) REQUIRE(-op.B.at(n, j) >= 0.0);
    }
    REQUIRE(row.value() >= 0.0);
    REQUIRE(op.B.at(n, n) > 0.0);
  }
}

TEST_CASE("solve_fode: positivity on the diffusion-reaction problem") {
  const std::size_t m = 16;
  State u0(m);
  for (std::size_t i = 0; i < m; ++i) {
    u0[i] = std::max(std::sin(M_PI * double(i + 1) / double(m + 1)), 0.0);
  }
  const auto problem = make_diffusion_reaction(
      m, 1.0, [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
      u0);
  const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 40, 2.0), 0.5);

  SECTION("direct stepper") {
    const auto traj = solve_fode(op, problem);
    REQUIRE(traj.min_entry() >= -1e-10);
    for (const auto& s : traj.step_stats) REQUIRE(s.residual <= 1e-10);
  }
  SECTION("yosida stepper contracts and preserves the cone") {
    SolveOptions options;
    options.stepper = Stepper::Yosida;
    // lambda at the scale of the largest diagonal of A keeps the contraction
    // factor around 1/2
    double a0max = 0.0;
    for (std::size_t n = 1; n <= op.A.rows(); ++n) a0max = std::max(a0max, op.A.at(n, n));
    options.yosida_lambda = a0max;
    const auto traj = solve_fode(op, problem, options);
    REQUIRE(traj.min_entry() >= -1e-10);
    for (const auto& s : traj.step_stats) {
      REQUIRE(s.contraction > 0.0);
      REQUIRE(s.contraction < 1.0);
      REQUIRE(s.iterations >= 1);
    }
  }
}

TEST_CASE("solve_fode: yosida regularization converges on the linear problem") {
  const L1Operator op = build_l1_operator(make_graded_mesh(1.0, 24, 1.0), 0.5);
  const auto problem = make_linear_scalar(1.0, 1.0);
  const auto direct = solve_fode(op, problem);

  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-1, 1e-2, 1e-3}) {
    SolveOptions options;
    options.stepper = Stepper::Yosida;
    options.yosida_lambda = lambda;
    const auto traj = solve_fode(op, problem, options);
    double dist = 0.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      dist = std::max(dist, std::abs(traj.states[n][0] - direct.states[n][0]));
    }
    REQUIRE(dist < prev);
    prev = dist;
  }
  REQUIRE(prev <= 1e-3);  // O(lambda) regularization error at lambda = 1e-3
}
