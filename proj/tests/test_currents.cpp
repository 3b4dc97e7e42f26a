#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <sstream>

#include "degreelab/currents.hpp"
#include "fixtures.hpp"

using namespace degreelab;
using HighFloat = boost::multiprecision::cpp_bin_float_50;

namespace {

struct HighComplex {
  HighFloat re = 0, im = 0;
};

HighComplex operator+(const HighComplex& a, const HighComplex& b) { return {a.re + b.re, a.im + b.im}; }
HighComplex operator*(const HighComplex& a, const HighComplex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
HighFloat norm2(const HighComplex& a) { return a.re * a.re + a.im * a.im; }

// Iterates the lift [yz : y^2 + xz : z^2] without renormalization and
// telescopes: g_n = 2^-n 1/2 log |F^n(p)|^2 - 1/2 log |p|^2 for sup-normalized p.
double telescoped_green(Complex x, Complex y, int n) {
  std::array<Complex, 3> v{x, y, 1.0};
  double sup = 0;
  for (const auto& c : v) sup = std::max(sup, std::abs(c));
  std::array<HighComplex, 3> p;
  for (int i = 0; i < 3; ++i) p[static_cast<std::size_t>(i)] = {HighFloat(v[static_cast<std::size_t>(i)].real() / sup), HighFloat(v[static_cast<std::size_t>(i)].imag() / sup)};
  const HighFloat base = norm2(p[0]) + norm2(p[1]) + norm2(p[2]);
  for (int k = 0; k < n; ++k) {
    const HighComplex a = p[1] * p[2];
    const HighComplex b = p[1] * p[1] + p[0] * p[2];
    const HighComplex c = p[2] * p[2];
    p = {a, b, c};
  }
  const HighFloat total = norm2(p[0]) + norm2(p[1]) + norm2(p[2]);
  const HighFloat g = log(total) / (2 * pow(HighFloat(2), n)) - log(base) / 2;
  return g.convert_to<double>();
}

}  // namespace

TEST_CASE("gamma plus on the squaring map") {
  const auto m = fixtures::squaring();
  CHECK(gamma_plus(m, normalized({Complex(1), Complex(0), Complex(0)})) == doctest::Approx(0.0));
  CHECK(gamma_plus(m, normalized({Complex(1), Complex(1), Complex(1)})) ==
        doctest::Approx(-std::log(3.0) / 4.0).epsilon(1e-14));
}

TEST_CASE("green plus of the squaring map at its fixed point") {
  const auto m = fixtures::squaring();
  const auto g = green_plus(m, normalized({Complex(1), Complex(1), Complex(1)}), 1e-12, 60);
  CHECK(std::abs(g.value + std::log(3.0) / 2.0) < 1e-11);
  CHECK_FALSE(g.orbit_hit_indeterminacy);
  const auto zero = green_plus(m, normalized({Complex(1), Complex(0), Complex(0)}), 1e-12, 60);
  CHECK(std::abs(zero.value) < 1e-15);
}

TEST_CASE("green plus agrees with a telescoped high-precision oracle") {
  const auto m = fixtures::skew_quadratic();
  const std::vector<std::array<Complex, 2>> points{
      {Complex(0.3, -0.7), Complex(1.1, 0.2)},
      {Complex(-1.4, 0.1), Complex(0.05, -0.6)},
      {Complex(0.0, 0.0), Complex(0.0, 0.0)},
      {Complex(1.9, 1.2), Complex(-0.8, 1.7)}};
  for (const auto& xy : points) {
    const auto g = green_plus(m, affine_plane_point(xy[0], xy[1]), 0.0, 20);
    REQUIRE(g.partials.size() == 20);
    CHECK(std::abs(g.partials.back() - telescoped_green(xy[0], xy[1], 20)) < 1e-12);
  }
}

TEST_CASE("partial sums telescope term by term") {
  const auto m = fixtures::skew_quadratic();
  const SurfacePoint p = affine_plane_point(Complex(0.2, 0.4), Complex(-0.9, 0.3));
  const auto g = green_plus(m, p, 0.0, 25);
  SurfacePoint q = p;
  double previous = 0.0;
  for (int n = 0; n < 25; ++n) {
    const double term = gamma_plus(m, q) / std::pow(2.0, n);
    CHECK(g.partials[static_cast<std::size_t>(n)] - previous == doctest::Approx(term).epsilon(1e-9));
    previous = g.partials[static_cast<std::size_t>(n)];
    q = evaluate(m, q);
  }
}

TEST_CASE("functional equation residual") {
  SUBCASE("squaring map") {
    const auto m = fixtures::squaring();
    std::mt19937_64 rng(4);
    std::vector<SurfacePoint> s;
    for (int i = 0; i < 100; ++i) s.push_back(random_point(m, rng));
    const auto r = functional_equation_residual(m, s, 1e-12, 60);
    CHECK(r.residual < 1e-6);
    CHECK(r.used == 100);
  }
  SUBCASE("torus vanishes identically") {
    const auto m = fixtures::torus_example();
    std::mt19937_64 rng(4);
    std::vector<SurfacePoint> s;
    for (int i = 0; i < 10; ++i) s.push_back(random_point(m, rng));
    CHECK(functional_equation_residual(m, s, 1e-9, 10).residual == 0.0);
  }
  SUBCASE("secant is unsupported") {
    const auto m = fixtures::secant_degree(3);
    CHECK_THROWS_AS(gamma_plus(m, affine_product_point(0.5, 0.25)), Error);
  }
}

TEST_CASE("pushforward of constants scales by lambda2 / lambda1") {
  const auto m = fixtures::skew_cubic();
  const auto g = green_minus_partial(m, affine_plane_point(Complex(0.3, 0.2), Complex(-0.4, 0.9)), 5, 2.5);
  REQUIRE(g.constant_scaling.size() == 5);
  for (const auto& lvl : g.constant_scaling) {
    const double expected = 2.5 * std::pow(2.0 / 3.0, lvl.level);
    CHECK(lvl.expected == doctest::Approx(expected).epsilon(1e-15));
    CHECK(std::abs(lvl.observed - expected) <= 1e-13 * expected);
  }
  CHECK(g.monotone);
  CHECK(g.leaves == 32);
}

TEST_CASE("quadratic skew backward orbit converges geometrically") {
  const auto m = fixtures::skew_quadratic();
  const auto g = green_minus_partial(m, affine_plane_point(Complex(0.1, 0.2), Complex(0.3, -0.1)), 12);
  CHECK(g.leaves == 1);
  // direct summation along the unique backward orbit (x, y) <- (y' , x) with y' = y - x^2
  auto u = [](Complex x, Complex y) { return 0.5 * std::log1p(std::norm(x) + std::norm(y)); };
  Complex x(0.1, 0.2), y(0.3, -0.1);
  double sum = 0.0;
  for (int j = 0; j < 12; ++j) {
    const Complex px = y - x * x, py = x;
    const double gamma_minus = u(px, py) / 2.0 - u(x, y);
    sum += gamma_minus / std::pow(2.0, j);
    CHECK(g.partials[static_cast<std::size_t>(j)] == doctest::Approx(sum).epsilon(1e-10));
    x = px;
    y = py;
  }
}

TEST_CASE("grids") {
  GridSlice slice;
  slice.origin = {Complex(0), Complex(0)};
  slice.u = {Complex(1), Complex(0)};
  slice.v = {Complex(0), Complex(1)};
  SUBCASE("squaring map in the affine chart") {
    const auto grid = export_grid(fixtures::squaring(), slice, 65, 65, GreenWhich::Plus, {1e-12, 60});
    // node spacing is 1/16, so (0, 0), (1, 0) and (1, 1) are nodes
    const double log2v = std::log(2.0), log3v = std::log(3.0);
    CHECK(std::abs(grid.at(32, 32)) < 1e-12);
    CHECK(std::abs(grid.at(48, 32) + log2v / 2) < 1e-9);
    CHECK(std::abs(grid.at(48, 48) + log3v / 2) < 1e-9);
  }
  SUBCASE("torus grid vanishes") {
    const auto grid = export_grid(fixtures::torus_example(), slice, 9, 9, GreenWhich::Plus);
    for (double v : grid.values) CHECK(v == 0.0);
  }
  SUBCASE("cells on indeterminate orbits are masked") {
    // the origin is a vertex of the coordinate triangle, where sigma is undefined
    const auto grid = export_grid(fixtures::sigma(), slice, 5, 5, GreenWhich::Plus);
    CHECK(grid.mask[2 * 5 + 2]);
    CHECK(std::isnan(grid.at(2, 2)));
    CHECK_FALSE(grid.mask[0]);
    std::ostringstream csv;
    write_grid_csv(grid, csv);
    CHECK(csv.str().rfind("x,y,value\n", 0) == 0);
    CHECK(csv.str().find("0,0,NaN\n") != std::string::npos);
  }
  SUBCASE("deterministic") {
    const auto a = export_grid(fixtures::skew_quadratic(), slice, 17, 17, GreenWhich::Plus);
    const auto b = export_grid(fixtures::skew_quadratic(), slice, 17, 17, GreenWhich::Plus);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "NaN");
  CHECK(std::stod(format_double(std::log(3.0))) == std::log(3.0));
}
