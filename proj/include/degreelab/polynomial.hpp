#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degreelab/exact.hpp"

namespace degreelab {

/// Dense univariate polynomial over Z, constant term first. The zero
/// polynomial has an empty coefficient vector and degree -1.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<BigInt> coeffs);
  IntPoly(std::initializer_list<long> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  const BigInt& operator[](std::size_t i) const { return coeffs_[i]; }
  const BigInt& leading() const { return coeffs_.back(); }

  Rational eval(const Rational& x) const;
  Complex eval(Complex x) const;
  std::vector<Complex> to_complex() const;

  IntPoly derivative() const;
  BigInt content() const;
  /// Divides out the content and makes the leading coefficient positive.
  IntPoly primitive() const;

  std::string str(char var = 'x') const;

  friend bool operator==(const IntPoly&, const IntPoly&) = default;
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

/// Scales a rational coefficient vector to a primitive integer polynomial
/// with the same roots.
IntPoly primitive_from_rational(const std::vector<Rational>& coeffs);

/// Primitive gcd in Z[x] (equivalently, the monic gcd in Q[x] up to scale).
IntPoly poly_gcd(const IntPoly& a, const IntPoly& b);

/// Quotient a / b in Q[x], scaled to a primitive integer polynomial.
/// Throws NumericalFailure if b does not divide a.
IntPoly divide_exact(const IntPoly& a, const IntPoly& b);

/// Yun square-free decomposition: pairs (factor, multiplicity) with
/// primitive, pairwise coprime, square-free factors.
std::vector<std::pair<IntPoly, int>> squarefree_decomposition(const IntPoly& p);

bool is_squarefree(const IntPoly& p);

/// Characteristic polynomial det(x I - M), computed exactly
/// (Faddeev-LeVerrier over Q) and scaled to a primitive integer polynomial.
IntPoly characteristic_polynomial(const RatMatrix& m);

/// Exact check for a rational root near a numeric locator. Only
/// denominators dividing the leading coefficient are tried.
std::optional<Rational> rational_root_near(const IntPoly& p, double locator);

struct Root {
  Complex value;
  int multiplicity = 1;
};

/// Roots of a polynomial with complex coefficients (constant term first)
/// from the balanced companion matrix, each polished by Newton steps on the
/// input polynomial. Leading zeros must be trimmed by the caller.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

/// Groups roots lying within `radius` of each other; the representative is
/// the cluster mean.
std::vector<Root> cluster_roots(const std::vector<Complex>& roots, double radius);

/// Roots of an exact polynomial with exact multiplicities: the polynomial is
/// split square-free first and each factor's simple roots are isolated
/// numerically and refined by Newton on that exact factor.
std::vector<Root> exact_roots(const IntPoly& p);

Complex horner(std::span<const Complex> coeffs, Complex x);

}  // namespace degreelab
