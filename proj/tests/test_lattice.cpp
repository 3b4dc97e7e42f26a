#include <doctest.h>

#include <cmath>
#include <random>

#include "degreelab/lattice.hpp"
#include "fixtures.hpp"

using namespace degreelab;

namespace {

RatVector random_rational(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 17);
  RatVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Rational(num(rng), den(rng));
  return v;
}

Rational pairing(const IntersectionLattice& lat, const RatVector& a, const RatVector& b) {
  Rational acc = 0;
  for (int i = 0; i < lat.rank; ++i)
    for (int j = 0; j < lat.rank; ++j) acc += a(i) * Rational(lat.gram(i, j)) * b(j);
  return acc;
}

std::vector<SurfaceMapModel> builtins() {
  using namespace fixtures;
  std::vector<SurfaceMapModel> out{skew_quadratic(), skew_cubic(), torus_example(), torus_double(),
                                   torus_identity(), squaring(), sigma()};
  for (int d = 2; d <= 6; ++d) out.push_back(secant_degree(d));
  return out;
}

}  // namespace

TEST_CASE("lattice pairings have the expected signatures") {
  CHECK(projective_plane_lattice()->gram(0, 0) == 1);
  const auto prod = product_lattice();
  CHECK(prod->gram(0, 1) == 1);
  CHECK(prod->gram(0, 0) == 0);
  // the torus pairing polarizes the determinant of a Hermitian matrix
  const auto tor = torus_lattice();
  Vector<double> h(4);
  h << 2.0, 0.5, -1.0, 3.0;
  const double det = 2.0 * 3.0 - (0.25 + 1.0);
  CHECK(pair(*tor, h, h) == doctest::Approx(2.0 * det));
}

TEST_CASE("pushforward is the exact adjoint of pullback on random rational classes") {
  std::mt19937_64 rng(20240611);
  for (const auto& m : builtins()) {
    const RatMatrix pull = to_rational(m.pullback_matrix);
    const RatMatrix push = adjoint_pushforward(pull, *m.lattice);
    for (int k = 0; k < 1000; ++k) {
      const RatVector a = random_rational(m.lattice->rank, rng);
      const RatVector b = random_rational(m.lattice->rank, rng);
      const RatVector pa = pull * a;
      const RatVector qb = push * b;
      REQUIRE(pairing(*m.lattice, pa, b) == pairing(*m.lattice, a, qb));
    }
  }
}

TEST_CASE("secant spectral radius matches the closed form") {
  for (int d = 2; d <= 6; ++d) {
    const auto m = fixtures::secant_degree(d);
    CHECK(m.lambda2 == d - 1);
    const double r = d - 1;
    const double expected = (r + std::sqrt(r * (r + 4.0))) / 2.0;
    const auto rep = spectral_analysis(to_rational(m.pullback_matrix), Rational(m.lambda2), m.lattice);
    CHECK(std::abs(rep.r1 - expected) < 1e-12);
    CHECK(rep.simple_root);
    CHECK(rep.alpha_nef);
  }
}

TEST_CASE("torus spectral radius is the squared modulus of the leading eigenvalue") {
  const auto m = fixtures::torus_example();
  const auto rep = spectral_analysis(to_rational(m.pullback_matrix), Rational(m.lambda2), m.lattice);
  const double nu = 1.0 + std::sqrt(3.0);
  CHECK(std::abs(rep.r1 - nu * nu) < 1e-12);
  CHECK(rep.char_poly == IntPoly{4, -8, 1} * IntPoly{2, 1} * IntPoly{2, 1});
  CHECK(rep.second_modulus <= std::sqrt(4.0) + 1e-9);
}

TEST_CASE("the torus pullback conjugates Hermitian matrices") {
  const Eigen::Matrix2cd a = fixtures::mat(Complex(1, 2), 3, Complex(0, -1), Complex(2, 1));
  const IntMatrix pull = hermitian_pullback_matrix(a);
  Vector<double> h(4);
  h << 1.5, -0.25, 0.75, 2.0;
  const Eigen::Matrix2cd direct = a.adjoint() * hermitian_from_coords(h) * a;
  const Vector<double> via = to_double(to_rational(pull)) * h;
  CHECK((hermitian_from_coords(via) - direct).norm() < 1e-12);
  // det(A* h A) = |det A|^2 det h
  const double scale = std::norm(a.determinant());
  CHECK(pair(*torus_lattice(), via, via) == doctest::Approx(scale * pair(*torus_lattice(), h, h)));
}

TEST_CASE("subleading moduli never exceed the square root of lambda2") {
  for (const auto& m : builtins()) {
    auto eig = exact_eigenvalues(to_rational(m.pullback_matrix));
    std::vector<double> moduli;
    for (const auto& r : eig)
      for (int k = 0; k < r.multiplicity; ++k) moduli.push_back(std::abs(r.value));
    std::sort(moduli.rbegin(), moduli.rend());
    for (std::size_t i = 1; i < moduli.size(); ++i)
      CHECK(moduli[i] <= std::sqrt(static_cast<double>(m.lambda2)) + 1e-9);
  }
}

TEST_CASE("pushpull defect") {
  SUBCASE("vanishes for the torus and the squaring map") {
    for (const auto& m : {fixtures::torus_example(), fixtures::squaring()}) {
      const RatMatrix d = pushpull_defect(to_rational(m.pullback_matrix), *m.lattice, Rational(m.lambda2));
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) CHECK(d(i, j) == 0);
    }
  }
  SUBCASE("is [3] for the quadratic skew map") {
    const auto m = fixtures::skew_quadratic();
    const RatMatrix d = pushpull_defect(to_rational(m.pullback_matrix), *m.lattice, Rational(m.lambda2));
    REQUIRE(d.rows() == 1);
    CHECK(d(0, 0) == 3);
  }
  SUBCASE("the expansion form is positive semidefinite on every built-in") {
    for (const auto& m : builtins()) {
      const auto q = pullback_expansion_form(to_rational(m.pullback_matrix), *m.lattice, Rational(m.lambda2));
      CHECK(q.positive_semidefinite);
    }
  }
}

TEST_CASE("invariant classes are nef and normalized against the Kahler class") {
  const auto m = fixtures::secant_degree(3);
  const RealClass omega = to_real(kahler_class(m.lattice));
  const auto ic = invariant_classes(to_rational(m.pullback_matrix), Rational(m.lambda2), m.lattice, omega);
  CHECK(pair(ic.alpha_plus, omega) == doctest::Approx(1.0));
  CHECK(pair(ic.alpha_minus, omega) == doctest::Approx(1.0));
  CHECK(nef_member(ic.alpha_plus));
  CHECK(nef_member(ic.alpha_minus));
  CHECK(ic.cross_pairing_positive);
  // the pullback eigenvector for [[0,2],[1,2]] is proportional to (2, 1 + sqrt 3)
  const double ratio = ic.alpha_plus.coords(1) / ic.alpha_plus.coords(0);
  CHECK(ratio == doctest::Approx((1 + std::sqrt(3.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("the identity violates the spectral gap hypothesis") {
  const auto m = fixtures::torus_identity();
  CHECK_THROWS_AS(spectral_analysis(to_rational(m.pullback_matrix), Rational(1), m.lattice), Error);
}
