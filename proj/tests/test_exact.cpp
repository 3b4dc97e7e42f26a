#include <doctest.h>

#include <cmath>

#include "degreelab/lattice.hpp"
#include "degreelab/polynomial.hpp"

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

TEST_CASE("characteristic polynomial of small integer matrices") {
  CHECK(characteristic_polynomial(rat({{0, 1}, {2, 2}})) == IntPoly{-2, -2, 1});
  CHECK(characteristic_polynomial(rat({{2}})) == IntPoly{-2, 1});
  // companion matrix of x^3 - 2x + 5 recovers the polynomial
  CHECK(characteristic_polynomial(rat({{0, 0, -5}, {1, 0, 2}, {0, 1, 0}})) == IntPoly{5, -2, 0, 1});
}

TEST_CASE("square-free decomposition separates repeated factors") {
  const IntPoly p = IntPoly{-1, 1} * IntPoly{-1, 1} * IntPoly{2, 1};
  const auto parts = squarefree_decomposition(p);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].first == IntPoly{2, 1});
  CHECK(parts[0].second == 1);
  CHECK(parts[1].first == IntPoly{-1, 1});
  CHECK(parts[1].second == 2);
  CHECK_FALSE(is_squarefree(p));
  CHECK(is_squarefree(IntPoly{-1, 0, 1}));
}

TEST_CASE("exact roots carry multiplicities") {
  const IntPoly p = IntPoly{-3, 1} * IntPoly{-3, 1} * IntPoly{-2, 0, 1};
  const auto roots = exact_roots(p);
  int total = 0;
  bool found_double = false;
  for (const auto& r : roots) {
    total += r.multiplicity;
    if (std::abs(r.value - Complex(3.0)) < 1e-12) found_double = r.multiplicity == 2;
  }
  CHECK(total == 4);
  CHECK(found_double);
}

TEST_CASE("rational roots are found only when they exist") {
  const auto three = rational_root_near(IntPoly{-6, 1, 1}, 2.0000001);
  REQUIRE(three.has_value());
  CHECK(*three == Rational(2));
  CHECK_FALSE(rational_root_near(IntPoly{4, -8, 1}, 4 + 2 * std::sqrt(3.0)).has_value());
  const auto half = rational_root_near(IntPoly{-1, 2}, 0.5);
  REQUIRE(half.has_value());
  CHECK(*half == Rational(1, 2));
}

TEST_CASE("exact determinant and inverse agree") {
  const RatMatrix m = rat({{2, 1, 0}, {1, 3, 1}, {0, 1, 4}});
  CHECK(exact_determinant(m) == Rational(18));
  RatMatrix inv;
  REQUIRE(exact_inverse(m, inv));
  const RatMatrix id = m * inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(id(i, j) == Rational(i == j ? 1 : 0));
  RatMatrix singular = rat({{1, 2}, {2, 4}});
  RatMatrix dummy;
  CHECK_FALSE(exact_inverse(singular, dummy));
}

TEST_CASE("column span basis has the rank of the input") {
  const RatMatrix cols = rat({{1, 2, 3}, {0, 0, 0}, {1, 2, 4}});
  CHECK(column_span_basis(cols).cols() == 2);
}
