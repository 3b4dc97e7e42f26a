#include <doctest.h>

#include <cmath>
#include <random>

#include "degreelab/ergodic.hpp"
#include "fixtures.hpp"

using namespace degreelab;

TEST_CASE("exact exponents are log-moduli of the eigenvalues of A") {
  const auto r = lyapunov_exponents(fixtures::torus_example(), 10000, 4, 1);
  CHECK(std::abs(r.exact.chi_plus - std::log(1 + std::sqrt(3.0))) < 1e-12);
  CHECK(std::abs(r.exact.chi_minus - std::log(std::sqrt(3.0) - 1)) < 1e-12);
  CHECK(r.hyperbolic);
  CHECK(std::abs(r.monte_carlo.chi_plus - r.exact.chi_plus) < 1e-3);
  CHECK(std::abs(r.monte_carlo.chi_minus - r.exact.chi_minus) < 1e-3);
  CHECK(exponent_sum_check(r.exact, 4).pass);
  CHECK(exponent_sum_check(r.monte_carlo, 4).pass);
}

TEST_CASE("degenerate exponent cases") {
  const auto id = lyapunov_exponents(fixtures::torus_identity(), 100, 2, 1);
  CHECK(std::abs(id.exact.chi_plus) < 1e-15);
  CHECK(std::abs(id.monte_carlo.chi_minus) < 1e-12);
  CHECK_FALSE(id.hyperbolic);
  const auto two = lyapunov_exponents(fixtures::torus_double(), 100, 2, 1);
  CHECK(std::abs(two.exact.chi_plus - std::log(2.0)) < 1e-14);
  const auto sum = exponent_sum_check(two.exact, 16);
  CHECK(sum.pass);
  CHECK(sum.lhs == doctest::Approx(2 * std::log(2.0)));
}

TEST_CASE("Monte Carlo exponents are deterministic in the seed") {
  const auto a = lyapunov_exponents(fixtures::torus_example(), 500, 3, 42);
  const auto b = lyapunov_exponents(fixtures::torus_example(), 500, 3, 42);
  CHECK(a.monte_carlo.chi_plus == b.monte_carlo.chi_plus);
  CHECK(a.monte_carlo.chi_minus == b.monte_carlo.chi_minus);
}

TEST_CASE("exponent sum rule over random Gaussian-integer matrices") {
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<int> e(-3, 3);
  int tested = 0;
  while (tested < 25) {
    const auto a = fixtures::mat(Complex(e(rng), e(rng)), Complex(e(rng), e(rng)), Complex(e(rng), e(rng)),
                                 Complex(e(rng), e(rng)));
    if (std::abs(a.determinant()) < 0.5) continue;
    const auto m = fixtures::torus(a);
    const auto r = lyapunov_exponents(m, 2000, 2, 9);
    CHECK(exponent_sum_check(r.exact, static_cast<double>(m.lambda2)).pass);
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(a);
    const double m0 = std::abs(es.eigenvalues()(0)), m1 = std::abs(es.eigenvalues()(1));
    if (std::abs(m0 - m1) > 1e-3) CHECK(exponent_sum_check(r.monte_carlo, static_cast<double>(m.lambda2)).pass);
    ++tested;
  }
}

TEST_CASE("non-torus families are unsupported") {
  CHECK_THROWS_AS(lyapunov_exponents(fixtures::skew_quadratic(), 100, 1, 1), Error);
}

TEST_CASE("Haar invariance by counting") {
  const auto h = haar_invariance_check(fixtures::torus_example(), 3);
  CHECK(h.points == 81);
  CHECK(h.distinct_images == 81);
  CHECK(h.bijective);
  CHECK(haar_invariance_check(fixtures::torus_identity(), 4).bijective);
  Eigen::Vector2cd v;
  v << Complex(1.0 / 3.0, 0), Complex(0, 2.0 / 3.0);
  CHECK(haar_invariance_check(fixtures::torus(fixtures::mat(0, 1, 2, 2), v), 3).bijective);
  try {
    haar_invariance_check(fixtures::torus_example(), 2);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionError);
  }
}

TEST_CASE("Jacobian constancy") {
  const auto t = jacobian_constancy(fixtures::torus_example(), 50, 1);
  CHECK(t.constant);
  CHECK(t.equals_lambda2);
  CHECK(t.min_value == doctest::Approx(4.0));
  const auto id = jacobian_constancy(fixtures::torus_identity(), 20, 1);
  CHECK(id.min_value == doctest::Approx(1.0));
  const auto skew = jacobian_constancy(fixtures::skew_quadratic(), 50, 1);
  CHECK(skew.constant);
  CHECK_FALSE(skew.structurally_constant);
  // Q = y^2 + xy gives det Df = -y
  const auto varying = jacobian_constancy(fixtures::skew({{0, 0, 1}, {0, 1}}), 50, 1);
  CHECK_FALSE(varying.constant);
}
