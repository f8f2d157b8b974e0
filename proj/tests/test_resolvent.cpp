#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cpkernel/generators.hpp"
#include "cpkernel/resolvent.hpp"

using namespace cpkernel;

TEST_CASE("resolvent of a diagonal kernel has the scalar closed form") {
  const double c = 0.7;
  TriKernel a = identity(12);
  for (std::size_t n = 1; n <= 12; ++n) a.at(n, n) = c;
  for (double lambda : {0.5, 1.0, 37.0}) {
    const ResolventKernel rk = resolvent(a, lambda);
    const double expect = lambda * c / (1.0 + lambda * c);
    for (std::size_t n = 1; n <= 12; ++n) {
      REQUIRE(rk.R.at(n, n) == Catch::Approx(expect).epsilon(1e-15));
      for (std::size_t j = 1; j < n; ++j) REQUIRE(rk.R.at(n, j) == 0.0);
    }
  }
}

TEST_CASE("small-lambda limit: R is O(lambda)") {
  Rng rng(21);
  const TriKernel a = random_kernel(rng, 20);
  const ResolventKernel rk = resolvent(a, 1e-8);
  REQUIRE(max_abs_entry(rk.R) <= 1e-7 * max_abs_entry(a));
}

TEST_CASE("defining relation R + lambda R*A = lambda A") {
  Rng rng(22);
  for (int t = 0; t < 5; ++t) {
    const TriKernel a = random_kernel(rng, 30);
    const ResolventKernel rk = resolvent(a, 1.0);
    REQUIRE(resolvent_defining_defect(a, rk) <= 1e-11);
  }
  REQUIRE_THROWS_AS(resolvent(identity(4), 0.0), DomainError);
  REQUIRE_THROWS_AS(resolvent(identity(4), -2.0), DomainError);
}

TEST_CASE("commutation R*A = A*R") {
  Rng rng(23);
  SECTION("exact for diagonal kernels") {
    TriKernel a = identity(10);
    for (std::size_t n = 1; n <= 10; ++n) a.at(n, n) = rng.uniform(0.5, 2.0);
    REQUIRE(commutation_defect(a, resolvent(a, 2.0)) == 0.0);
  }
  SECTION("random kernels") {
    for (int t = 0; t < 5; ++t) {
      const TriKernel a = random_kernel(rng, 30);
      REQUIRE(commutation_defect(a, resolvent(a, 3.0)) <= 1e-11);
    }
  }
  SECTION("all-ones kernel at N = 50") {
    const TriKernel l = lower_ones(50);
    REQUIRE(commutation_defect(l, resolvent(l, 1.0)) <= 1e-11);
  }
}

TEST_CASE("complementary kernels") {
  SECTION("identity has C_R = C_L = L") {
    REQUIRE(max_abs_diff(right_complementary(identity(15)), lower_ones(15)) == 0.0);
    REQUIRE(max_abs_diff(left_complementary(identity(15)), lower_ones(15)) == 0.0);
  }
  SECTION("L has C_R = C_L = I") {
    REQUIRE(max_abs_diff(right_complementary(lower_ones(15)), identity(15)) == 0.0);
    REQUIRE(max_abs_diff(left_complementary(lower_ones(15)), identity(15)) == 0.0);
  }
  SECTION("defining products on random kernels") {
    Rng rng(24);
    for (int t = 0; t < 5; ++t) {
      const TriKernel a = random_kernel(rng, 25);
      REQUIRE(max_abs_diff(pseudo_convolve(a, right_complementary(a)), lower_ones(25)) <=
              1e-10);
      REQUIRE(max_abs_diff(pseudo_convolve(left_complementary(a), a), lower_ones(25)) <=
              1e-10);
    }
  }
}

TEST_CASE("right complementary kernel of the resolvent") {
  SECTION("identity at lambda 1: R = I/2, lambda^-1 C_R + L = 2L") {
    REQUIRE(resolvent_right_complementary_check(identity(10), 1.0) <= 1e-15);
  }
  SECTION("random kernels at small and large lambda") {
    Rng rng(25);
    for (double lambda : {0.1, 10.0}) {
      for (int t = 0; t < 4; ++t) {
        const TriKernel a = random_kernel(rng, 25);
        REQUIRE(resolvent_right_complementary_check(a, lambda) <= 1e-10);
      }
    }
  }
  SECTION("all-ones kernel") {
    REQUIRE(resolvent_right_complementary_check(lower_ones(25), 1.0) <= 1e-12);
  }
}

TEST_CASE("resolvent asymptotics") {
  SECTION("identity kernel: defect is 1/(1+lambda)") {
    const double d = asymptotic_defect(identity(10), 1e3);
    REQUIRE(d == Catch::Approx(1.0 / 1001.0).epsilon(1e-9));
  }
  SECTION("defect decays like 1/lambda on random kernels") {
    Rng rng(26);
    for (int t = 0; t < 5; ++t) {
      const TriKernel a = random_kernel(rng, 30);
      const double ratio = asymptotic_defect(a, 1e4) / asymptotic_defect(a, 1e3);
      REQUIRE(ratio >= 0.05);
      REQUIRE(ratio <= 0.2);
    }
  }
  SECTION("all-ones kernel: defect decreases monotonically beyond lambda = 10") {
    const TriKernel l = lower_ones(20);
    double prev = asymptotic_defect(l, 10.0);
    REQUIRE(prev > 0.0);
    for (double lambda = 100.0; lambda <= 1e6; lambda *= 10.0) {
      const double d = asymptotic_defect(l, lambda);
      REQUIRE(d < prev);
      prev = d;
    }
  }
}

TEST_CASE("two-sidedness and the remaining basic identities") {
  Rng rng(27);
  for (int t = 0; t < 5; ++t) {
    const TriKernel a = random_kernel(rng, 30);
    const double lambda = rng.log_uniform(0.05, 20.0);
    const ResolventKernel rk = resolvent(a, lambda);
    const TriKernel i_plus = axpy(lambda, a, identity(30));
    TriKernel i_minus = axpy(-1.0, rk.R, identity(30));
    REQUIRE(max_abs_diff(pseudo_convolve(i_minus, i_plus), identity(30)) <= 1e-10);
    REQUIRE(max_abs_diff(pseudo_convolve(i_plus, i_minus), identity(30)) <= 1e-10);

    const TriKernel ainv = inverse(a);
    REQUIRE(max_abs_diff(pseudo_convolve(rk.R, ainv), pseudo_convolve(ainv, rk.R)) <=
            1e-10);
    // I - R = lambda^-1 R (*) A^(-1)
    const TriKernel rhs = pseudo_convolve(rk.R, ainv);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 30; ++n) {
      for (std::size_t j = 1; j <= n; ++j) {
        const double lhs = (j == n ? 1.0 : 0.0) - rk.R.at(n, j);
        worst = std::max(worst, std::abs(lhs - rhs.at(n, j) / lambda));
      }
    }
    REQUIRE(worst <= 1e-10);
  }
}
