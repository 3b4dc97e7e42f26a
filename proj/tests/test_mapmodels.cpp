#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace degreelab;

namespace {

std::array<Complex, 2> xy(const SurfacePoint& p) {
  const auto a = affine_coords(p);
  REQUIRE(a.has_value());
  return *a;
}

Complex horner_direct(const std::vector<Complex>& p, Complex z) {
  Complex acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

TEST_CASE("skew map evaluates as (y, Q(x, y))") {
  const auto m = fixtures::skew_quadratic();
  CHECK(m.lambda2 == 1);
  CHECK(m.pullback_matrix(0, 0) == 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 50; ++k) {
    const Complex x(u(rng), u(rng)), y(u(rng), u(rng));
    const auto image = xy(evaluate(m, affine_plane_point(x, y)));
    CHECK(std::abs(image[0] - y) < 1e-12);
    CHECK(std::abs(image[1] - (y * y + x)) < 1e-11);
  }
}

TEST_CASE("skew preimages map back to the target") {
  const auto m = fixtures::skew_cubic();
  CHECK(m.lambda2 == 2);
  CHECK(m.pullback_matrix(0, 0) == 3);
  const SurfacePoint target = affine_plane_point(Complex(0.4, -0.3), Complex(1.2, 0.7));
  const auto pre = preimages(m, target);
  CHECK(pre.total_multiplicity() == 2);
  for (const auto& w : pre.points) CHECK(distance(evaluate(m, w.point), target) < 1e-10);
}

TEST_CASE("skew indeterminacy and exceptional data") {
  const auto m = fixtures::skew_cubic();
  REQUIRE(m.indeterminacy.size() == 1);
  CHECK(distance(m.indeterminacy[0].point, SurfacePoint(normalized({Complex(1), Complex(0), Complex(0)}))) < 1e-12);
  REQUIRE(m.exceptional.size() == 1);
  CHECK(distance(m.exceptional[0].image, SurfacePoint(normalized({Complex(0), Complex(1), Complex(0)}))) < 1e-12);
  CHECK_THROWS_AS(evaluate(m, m.indeterminacy[0].point), Error);
}

TEST_CASE("skew parameter invariants are enforced") {
  // nonzero x^2 coefficient in degree 2
  CHECK_THROWS_AS(fixtures::skew({{0, 0, 1}, {0}, {1}}), Error);
  // missing y^d term
  CHECK_THROWS_AS(fixtures::skew({{0, 1}, {0, 1}}), Error);
}

TEST_CASE("secant map evaluates the secant step") {
  for (int d = 2; d <= 5; ++d) {
    const auto m = fixtures::secant_degree(d);
    std::vector<Complex> p(static_cast<std::size_t>(d + 1), 0.0);
    p[static_cast<std::size_t>(d)] = 1.0;
    if (d == 2) p[0] = -1.0; else p[1] = -1.0;
    std::mt19937_64 rng(static_cast<std::uint64_t>(d));
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 20; ++k) {
      const Complex x(u(rng), u(rng)), y(u(rng), u(rng));
      const Complex expected = (x * horner_direct(p, y) - y * horner_direct(p, x)) / (horner_direct(p, y) - horner_direct(p, x));
      const auto image = xy(evaluate(m, affine_product_point(x, y)));
      CHECK(std::abs(image[0] - y) < 1e-12);
      CHECK(std::abs(image[1] - expected) < 1e-9 * (1 + std::abs(expected)));
    }
  }
}

TEST_CASE("secant preimage count equals d - 1") {
  for (int d = 2; d <= 6; ++d) {
    const auto m = fixtures::secant_degree(d);
    CHECK(m.lambda2 == d - 1);
    CHECK(m.pullback_matrix(0, 0) == 0);
    CHECK(m.pullback_matrix(0, 1) == d - 1);
    CHECK(m.pullback_matrix(1, 0) == 1);
    CHECK(m.pullback_matrix(1, 1) == d - 1);
    const auto est = topological_degree_mc(m, 200, 11);
    CHECK(est.modal_count == d - 1);
    CHECK(est.agrees);
  }
}

TEST_CASE("secant rejects polynomials with repeated roots") {
  try {
    fixtures::secant({0, 0, -1, 1});
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ModelRejected);
    CHECK(std::string(e.what()).find("repeated root") != std::string::npos);
  }
}

TEST_CASE("secant indeterminacy points vanish on the lift") {
  const auto m = fixtures::secant_degree(3);
  CHECK_FALSE(m.indeterminacy.empty());
  for (const auto& e : m.indeterminacy) {
    CHECK(lift_residual(m, e.point) < 1e-8);
    if (e.exact_point) CHECK(is_indeterminate_exact(m, *e.exact_point));
  }
  // the roots (r, s) with r != s of P are in I_f
  bool found = false;
  for (const auto& e : m.indeterminacy)
    if (distance(e.point, SurfacePoint(affine_product_point(1.0, -1.0))) < 1e-9) found = true;
  CHECK(found);
}

TEST_CASE("torus endomorphism") {
  const auto m = fixtures::torus_example();
  CHECK(m.lambda2 == 4);
  CHECK(m.torus_cosets.size() == 4);
  CHECK(m.indeterminacy.empty());
  const TorusPoint p = reduced({Complex(0.3, 0.1), Complex(0.7, 0.45)});
  const auto image = std::get<TorusPoint>(evaluate(m, p));
  const Complex w1 = p.z[1], w2 = 2.0 * p.z[0] + 2.0 * p.z[1];
  const auto expected = reduced({w1, w2});
  CHECK(distance(SurfacePoint(image), SurfacePoint(expected)) < 1e-12);
  const auto pre = preimages(m, p);
  CHECK(pre.total_multiplicity() == 4);
  for (const auto& w : pre.points) CHECK(distance(evaluate(m, w.point), SurfacePoint(p)) < 1e-10);
  CHECK(topological_degree_mc(fixtures::torus_double(), 100, 3).modal_count == 16);
}

TEST_CASE("torus rejects non-integral or singular matrices") {
  CHECK_THROWS_AS(fixtures::torus(fixtures::mat(0.5, 0, 0, 1)), Error);
  CHECK_THROWS_AS(fixtures::torus(fixtures::mat(1, 2, 2, 4)), Error);
}

TEST_CASE("lattice cosets enumerate the quotient") {
  IntMatrix m = IntMatrix::Zero(4, 4);
  m(0, 0) = 2; m(1, 1) = 3; m(2, 2) = 1; m(3, 3) = 1; m(0, 1) = 1;
  CHECK(lattice_cosets(m).size() == 6);
}

TEST_CASE("composite maps") {
  SUBCASE("sigma squared is the identity in degree 1") {
    const auto m = fixtures::cremona({fixtures::involution(), fixtures::involution()});
    CHECK(m.lift_degree == 1);
    CHECK(m.indeterminacy.empty());
  }
  SUBCASE("sigma has the three coordinate vertices as indeterminacy") {
    const auto m = fixtures::sigma();
    CHECK(m.lambda2 == 1);
    CHECK(m.indeterminacy.size() == 3);
    CHECK(m.exceptional.size() == 3);
    const auto p = affine_plane_point(Complex(2.0), Complex(-0.5));
    const auto image = xy(evaluate(m, p));
    CHECK(std::abs(image[0] - 0.5) < 1e-12);
    CHECK(std::abs(image[1] + 2.0) < 1e-12);
  }
  SUBCASE("the squaring map has topological degree 4") {
    const auto m = fixtures::squaring();
    CHECK(m.lambda2 == 4);
    CHECK(topological_degree_mc(m, 200, 5).modal_count == 4);
  }
  SUBCASE("linear conjugation keeps degrees") {
    const auto m = fixtures::cremona({fixtures::linear({1, 1, 0, 0, 1, 0, 0, 0, 1}), fixtures::power(2)});
    CHECK(m.lift_degree == 2);
    CHECK(m.lambda2 == 4);
  }
}

TEST_CASE("Monte Carlo degree is deterministic in the seed") {
  const auto m = fixtures::skew_cubic();
  const auto a = topological_degree_mc(m, 300, 99);
  const auto b = topological_degree_mc(m, 300, 99);
  CHECK(a.histogram == b.histogram);
  CHECK(a.modal_count == 2);
}
