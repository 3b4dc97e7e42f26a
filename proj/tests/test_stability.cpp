#include <doctest.h>

#include <cmath>

#include "degreelab/stability.hpp"
#include "fixtures.hpp"

using namespace degreelab;

TEST_CASE("secant maps are stable to the horizon") {
  for (int d = 2; d <= 5; ++d) {
    const auto r = check_one_stability(fixtures::secant_degree(d), 50);
    CHECK(r.stable_up_to_horizon());
    CHECK(r.verdict() == "NoObstructionUpTo(50)");
  }
}

TEST_CASE("skew maps are stable: the exceptional image is a fixed point off I_f") {
  const auto r = check_one_stability(fixtures::skew_cubic(), 30);
  CHECK(r.stable_up_to_horizon());
  for (const auto& e : r.orbit_log) CHECK_FALSE(e.hit_indeterminacy);
}

TEST_CASE("sigma is not stable: its exceptional lines collapse onto I_f") {
  const auto r = check_one_stability(fixtures::sigma(), 10);
  REQUIRE(r.collision_step.has_value());
  CHECK(*r.collision_step == 0);
  CHECK(r.verdict() == "CollisionAt(0)");
}

TEST_CASE("a linear twist can move the collision later") {
  // sigma after a permutation of coordinates still sends lines to vertices
  const auto m = fixtures::cremona({fixtures::linear({0, 1, 0, 0, 0, 1, 1, 0, 0}), fixtures::involution()});
  const auto r = check_one_stability(m, 10);
  CHECK(r.collision_step.has_value());
}

TEST_CASE("symbolic degree sequences") {
  SUBCASE("quadratic skew doubles") {
    const auto ds = symbolic_degree_sequence(fixtures::skew_quadratic(), 3);
    CHECK(ds.degrees == std::vector<int>{2, 4, 8});
    const auto predicted = matrix_degree_prediction(fixtures::skew_quadratic(), 3);
    CHECK(predicted == std::vector<long long>{2, 4, 8});
  }
  SUBCASE("sigma drops degree on its second iterate") {
    const auto ds = symbolic_degree_sequence(fixtures::sigma(), 2);
    CHECK(ds.degrees == std::vector<int>{2, 1});
    CHECK(ds.naive_degrees == std::vector<int>{2, 4});
    CHECK(matrix_degree_prediction(fixtures::sigma(), 2) == std::vector<long long>{2, 4});
  }
  SUBCASE("cubic skew triples") {
    const auto ds = symbolic_degree_sequence(fixtures::skew_cubic(), 3);
    CHECK(ds.degrees == std::vector<int>{3, 9, 27});
    const auto est = lambda1_estimate(ds);
    CHECK(est.estimate == doctest::Approx(3.0));
    CHECK(est.consistent_with(3.0));
  }
}

TEST_CASE("degree sequence guards") {
  CHECK_THROWS_AS(symbolic_degree_sequence(fixtures::torus_example(), 2), Error);
  CHECK_THROWS_AS(symbolic_degree_sequence(fixtures::skew_cubic(), 6), Error);
}
