#include <doctest.h>

#include <cmath>
#include <random>

#include "degreelab/contraction.hpp"
#include "fixtures.hpp"

using namespace degreelab;

namespace {

RatMatrix rat(std::initializer_list<std::initializer_list<long>> rows) {
  RatMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (long v : r) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("self-intersections of invariant classes") {
  const auto skew = self_intersections(fixtures::skew_cubic());
  CHECK(skew.alpha_plus_sq == doctest::Approx(1.0));
  const auto torus = self_intersections(fixtures::torus_example());
  CHECK(std::abs(torus.alpha_plus_sq) < 1e-9);
  CHECK(std::abs(torus.alpha_minus_sq) < 1e-9);
  const auto sec = self_intersections(fixtures::secant_degree(3));
  // alpha+ is proportional to (2, 1 + sqrt 3); with <alpha+, omega> = 1 for omega = (1, 1)
  const double a = 2.0, b = 1.0 + std::sqrt(3.0);
  const double scale = 1.0 / (a + b);
  CHECK(sec.alpha_plus_sq == doctest::Approx(2 * a * b * scale * scale).epsilon(1e-12));
  CHECK(sec.alpha_plus_sq > 0);
}

TEST_CASE("zero class checks on the torus example") {
  const auto z = zero_class_checks(fixtures::torus_example());
  REQUIRE(z.applicable);
  CHECK(std::abs(z.observed - (4 - 2 * std::sqrt(3.0))) < 1e-8);
  CHECK(std::abs(z.observed - 4.0 / (4.0 + 2.0 * std::sqrt(3.0))) < 1e-12);
  CHECK(z.pass);
  CHECK(z.image_classes.empty());
  CHECK(z.image_classes_pass);
  CHECK_FALSE(zero_class_checks(fixtures::skew_cubic()).applicable);
}

TEST_CASE("vanishing self-intersections go together on torus maps") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> e(-3, 3);
  int tested = 0;
  while (tested < 20) {
    const auto a = fixtures::mat(Complex(e(rng), e(rng)), Complex(e(rng), e(rng)), Complex(e(rng), e(rng)),
                                 Complex(e(rng), e(rng)));
    if (std::abs(a.determinant()) < 0.5) continue;
    SurfaceMapModel m = fixtures::torus(a);
    try {
      const auto s = self_intersections(m);
      CHECK((std::abs(s.alpha_minus_sq) < 1e-9) == (std::abs(s.alpha_plus_sq) < 1e-9));
      ++tested;
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::HypothesisViolation);
    }
  }
}

TEST_CASE("integrality is decided exactly") {
  const auto torus = fixtures::torus_example();
  const IntPoly torus_poly = characteristic_polynomial(to_rational(torus.pullback_matrix));
  const auto t = integrality_check(torus_poly, 4 + 2 * std::sqrt(3.0), Rational(4));
  CHECK_FALSE(t.lambda1_integer);
  CHECK_FALSE(t.conclusion.empty());
  const auto sq = integrality_check(IntPoly{-2, 1}, 2.0, Rational(4));
  CHECK(sq.lambda1_integer);
  CHECK(sq.ratio_integer);
  const auto sec = integrality_check(IntPoly{-2, -2, 1}, 1 + std::sqrt(3.0), Rational(2));
  CHECK_FALSE(sec.lambda1_integer);
  // a locator slightly off an integer root still finds it
  CHECK(integrality_check(IntPoly{-3, 1}, 3.0000000001, Rational(9)).ratio_integer);
}

TEST_CASE("orbit closure and negative definiteness") {
  SUBCASE("synthetic negative definite lattice") {
    IntMatrix gram(2, 2);
    gram << -1, 0, 0, -2;
    RatVector kahler(2);
    kahler << Rational(1), Rational(1);
    const auto lat = custom_lattice(gram, {"a", "b"}, {}, kahler);
    const std::vector<ExactClass> classes{make_class<Rational>(lat, {1, 0}), make_class<Rational>(lat, {0, 1})};
    const auto c = exceptional_orbit_closure(lat, rat({{1, 0}, {0, 1}}), classes);
    REQUIRE(c.gram_negative_definite.has_value());
    CHECK(*c.gram_negative_definite);
    // idempotent on its own output
    const auto again = exceptional_orbit_closure(lat, rat({{1, 0}, {0, 1}}), c.classes);
    CHECK(again.classes.size() == c.classes.size());
  }
  SUBCASE("torus has nothing to close") {
    const auto c = exceptional_orbit_closure(fixtures::torus_example());
    CHECK(c.classes.empty());
    CHECK_FALSE(c.gram_negative_definite.has_value());
  }
  SUBCASE("skew span contains H") {
    const auto c = exceptional_orbit_closure(fixtures::skew_cubic());
    CHECK(c.full_rank);
    REQUIRE(c.gram_negative_definite.has_value());
    CHECK_FALSE(*c.gram_negative_definite);
  }
  SUBCASE("definiteness is basis independent") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> e(-3, 3);
    const RatMatrix g = rat({{-2, 1, 0}, {1, -3, 1}, {0, 1, -2}});
    for (int k = 0; k < 20; ++k) {
      RatMatrix u = RatMatrix::Identity(3, 3);
      u(0, 1) = Rational(e(rng));
      u(0, 2) = Rational(e(rng));
      u(1, 2) = Rational(e(rng));
      RatMatrix lower = RatMatrix::Identity(3, 3);
      lower(2, 0) = Rational(e(rng));
      const RatMatrix basis = u * lower;
      CHECK(negative_definite(basis.transpose() * g * basis));
    }
    CHECK_FALSE(negative_definite(rat({{-1, 2}, {2, -1}})));
  }
}

TEST_CASE("spurious indeterminacy") {
  SUBCASE("skew point is not spurious") {
    const auto s = spurious_points(fixtures::skew_cubic());
    REQUIRE(s.size() == 1);
    CHECK(s[0].status == Classification::NonZero);
  }
  SUBCASE("torus has none") { CHECK(spurious_points(fixtures::torus_example()).empty()); }
  SUBCASE("synthetic orthogonal image class") {
    const auto lat = product_lattice();
    const RealClass alpha = make_class<double>(lat, {1.0, 0.0});
    const std::vector<std::pair<std::string, std::optional<ExactClass>>> pts{
        {"p", make_class<Rational>(lat, {1, 0})}, {"q", make_class<Rational>(lat, {0, 1})}, {"r", std::nullopt}};
    const auto s = spurious_points(alpha, pts);
    REQUIRE(s.size() == 3);
    CHECK(s[0].status == Classification::Zero);
    CHECK(s[1].status == Classification::NonZero);
    CHECK(s[2].status == Classification::Unknown);
  }
}

TEST_CASE("contraction report ties the torus checks together") {
  const auto r = contraction_report(fixtures::torus_example());
  CHECK(r.zero_case);
  CHECK(r.zero_checks.pass);
  CHECK_FALSE(r.integrality.lambda1_integer);
  CHECK(r.spurious.empty());
}
