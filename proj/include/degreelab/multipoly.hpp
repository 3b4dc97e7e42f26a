#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "degreelab/errors.hpp"
#include "degreelab/exact.hpp"

namespace degreelab {

using Exponent = std::array<int, 3>;

namespace detail {
template <typename T>
T coeff_cast(const BigInt& c) {
  if constexpr (std::is_same_v<T, Complex>)
    return Complex(to_double(c), 0.0);
  else
    return T(c);
}
template <typename T>
T coeff_cast(const Rational& c) {
  if constexpr (std::is_same_v<T, Complex>)
    return Complex(to_double(c), 0.0);
  else
    return T(c);
}
template <typename T>
T coeff_cast(const Complex& c) {
  return T(c);
}
}  // namespace detail

/// Sparse polynomial in three variables (x, y, z). Terms are kept in
/// lexicographically descending order so the first term is the leading term.
template <typename Scalar>
class Poly3 {
 public:
  using Terms = std::map<Exponent, Scalar, std::greater<>>;

  Poly3() = default;

  static Poly3 constant(const Scalar& c) { return monomial({0, 0, 0}, c); }
  static Poly3 variable(int index) {
    Exponent e{0, 0, 0};
    e[index] = 1;
    return monomial(e, Scalar(1));
  }
  static Poly3 monomial(const Exponent& e, const Scalar& c) {
    Poly3 p;
    p.add_term(e, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }

  bool is_homogeneous() const {
    const int d = total_degree();
    for (const auto& [e, c] : terms_)
      if (e[0] + e[1] + e[2] != d) return false;
    return true;
  }

  /// Largest power of `var` dividing every term.
  int valuation(int var) const {
    int v = -1;
    for (const auto& [e, c] : terms_) v = (v < 0) ? e[var] : std::min(v, e[var]);
    return std::max(v, 0);
  }

  void add_term(const Exponent& e, const Scalar& c) {
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  Poly3& operator+=(const Poly3& other) {
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
  }
  Poly3& operator-=(const Poly3& other) {
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
  }
  friend Poly3 operator+(Poly3 a, const Poly3& b) { return a += b; }
  friend Poly3 operator-(Poly3 a, const Poly3& b) { return a -= b; }
  friend Poly3 operator*(const Poly3& a, const Poly3& b) {
    Poly3 out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_)
        out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return out;
  }
  friend Poly3 operator*(const Scalar& s, const Poly3& a) {
    Poly3 out;
    for (const auto& [e, c] : a.terms_) out.add_term(e, s * c);
    return out;
  }
  friend bool operator==(const Poly3& a, const Poly3& b) { return a.terms_ == b.terms_; }

  Poly3 pow(int k) const {
    Poly3 result = constant(Scalar(1));
    for (int i = 0; i < k; ++i) result = result * *this;
    return result;
  }

  /// Evaluates at a point whose coordinate type T accepts Scalar coefficients.
  template <typename T>
  T eval(const std::array<T, 3>& point) const {
    const int d = std::max(total_degree(), 0);
    std::array<std::vector<T>, 3> powers;
    for (int v = 0; v < 3; ++v) {
      powers[v].assign(static_cast<std::size_t>(d + 1), T(1));
      for (int k = 1; k <= d; ++k) powers[v][k] = powers[v][k - 1] * point[v];
    }
    T acc = T(0);
    for (const auto& [e, c] : terms_)
      acc += detail::coeff_cast<T>(c) * powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]];
    return acc;
  }

  /// Substitutes g[i] for variable i. Throws ResourceExceeded when an
  /// intermediate polynomial exceeds `max_terms`.
  Poly3 compose(const std::array<Poly3, 3>& g, std::size_t max_terms = 1000000) const {
    const int d = std::max(total_degree(), 0);
    std::array<std::vector<Poly3>, 3> powers;
    for (int v = 0; v < 3; ++v) {
      powers[v].push_back(constant(Scalar(1)));
      for (int k = 1; k <= d; ++k) {
        powers[v].push_back(powers[v].back() * g[v]);
        if (powers[v].back().size() > max_terms)
          throw Error(ErrorKind::ResourceExceeded, "Poly3::compose: monomial budget exceeded");
      }
    }
    Poly3 out;
    for (const auto& [e, c] : terms_) {
      Poly3 term = c * (powers[0][e[0]] * powers[1][e[1]]);
      term = term * powers[2][e[2]];
      out += term;
      if (out.size() > max_terms)
        throw Error(ErrorKind::ResourceExceeded, "Poly3::compose: monomial budget exceeded");
    }
    return out;
  }

  template <typename To, typename F>
  Poly3<To> map_coeffs(F&& f) const {
    Poly3<To> out;
    for (const auto& [e, c] : terms_) out.add_term(e, f(c));
    return out;
  }

  std::string str() const;

 private:
  Terms terms_;
};

template <typename Scalar>
std::string Poly3<Scalar>::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  const char* names = "xyz";
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    std::string coeff;
    if constexpr (std::is_same_v<Scalar, Complex>)
      coeff = "(" + std::to_string(c.real()) + "," + std::to_string(c.imag()) + ")";
    else
      coeff = c.str();
    const bool unit_monomial = e[0] + e[1] + e[2] == 0;
    if (unit_monomial || coeff != "1") out += coeff;
    for (int v = 0; v < 3; ++v) {
      if (e[v] == 0) continue;
      out += names[v];
      if (e[v] > 1) out += "^" + std::to_string(e[v]);
    }
  }
  return out;
}

using IntPoly3 = Poly3<BigInt>;
using RatPoly3 = Poly3<Rational>;
using ComplexPoly3 = Poly3<Complex>;

/// A projective self-map of P^2 given by three homogeneous components.
template <typename Scalar>
using HomogeneousTriple = std::array<Poly3<Scalar>, 3>;

/// Greatest common divisor in Z[x,y,z] of homogeneous polynomials (zero
/// entries are ignored). The result includes the common integer content.
IntPoly3 homogeneous_gcd(const std::vector<IntPoly3>& polys);

/// Exact quotient a / b in Z[x,y,z]; throws NumericalFailure when b does
/// not divide a.
IntPoly3 divide_exact(const IntPoly3& a, const IntPoly3& b);

struct ReducedTriple {
  HomogeneousTriple<BigInt> components;
  IntPoly3 removed_factor;
  int naive_degree = 0;
  int degree = 0;
};

/// Divides the three components by their gcd.
ReducedTriple reduce_triple(const HomogeneousTriple<BigInt>& triple);

/// outer o inner, without reduction.
HomogeneousTriple<BigInt> compose_triples(const HomogeneousTriple<BigInt>& outer,
                                          const HomogeneousTriple<BigInt>& inner,
                                          std::size_t max_terms = 1000000);

/// Clears denominators of a rational triple (one common scale).
HomogeneousTriple<BigInt> integer_triple(const HomogeneousTriple<Rational>& triple);

HomogeneousTriple<Complex> complex_triple(const HomogeneousTriple<Rational>& triple);

}  // namespace degreelab
