#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "degreelab/mapmodels.hpp"

namespace fixtures {

using namespace degreelab;

inline SurfaceMapModel skew(std::vector<std::vector<Complex>> q) { return build_model(SkewParams{std::move(q)}); }

// Q = y^2 + x and Q = y^3 + x^2
inline SurfaceMapModel skew_quadratic() { return skew({{0, 0, 1}, {1}}); }
inline SurfaceMapModel skew_cubic() { return skew({{0, 0, 0, 1}, {0}, {1}}); }

inline SurfaceMapModel secant(std::vector<Complex> p) { return build_model(SecantParams{std::move(p)}); }

// z^d - z, squarefree for every d >= 2
inline SurfaceMapModel secant_degree(int d) {
  std::vector<Complex> p(static_cast<std::size_t>(d + 1), 0.0);
  p[static_cast<std::size_t>(d)] = 1.0;
  p[1] = d == 2 ? 0.0 : -1.0;
  if (d == 2) p[0] = -1.0;
  return secant(std::move(p));
}

inline SurfaceMapModel torus(Eigen::Matrix2cd a, Eigen::Vector2cd v = Eigen::Vector2cd::Zero()) {
  return build_model(TorusParams{a, v});
}

inline Eigen::Matrix2cd mat(Complex a, Complex b, Complex c, Complex d) {
  Eigen::Matrix2cd m;
  m << a, b, c, d;
  return m;
}

inline SurfaceMapModel torus_example() { return torus(mat(0, 1, 2, 2)); }
inline SurfaceMapModel torus_double() { return torus(mat(2, 0, 0, 2)); }
inline SurfaceMapModel torus_identity() { return torus(mat(1, 0, 0, 1)); }

inline CremonaFactor involution() { return {CremonaFactor::Kind::Involution, 2, {}}; }
inline CremonaFactor power(int k) { return {CremonaFactor::Kind::Power, k, {}}; }
inline CremonaFactor linear(std::initializer_list<long> entries) {
  RatMatrix m(3, 3);
  auto it = entries.begin();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = Rational(*it++);
  return {CremonaFactor::Kind::Linear, 2, m};
}

inline SurfaceMapModel cremona(std::vector<CremonaFactor> factors) {
  return build_model(CremonaParams{std::move(factors)});
}

inline SurfaceMapModel squaring() { return cremona({power(2)}); }
inline SurfaceMapModel sigma() { return cremona({involution()}); }

}  // namespace fixtures
