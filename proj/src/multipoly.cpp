#include "degreelab/multipoly.hpp"

#include <algorithm>

#include "degreelab/polynomial.hpp"

namespace degreelab {

namespace {

// Exact quotient in Z[x]; the remainder must vanish and the quotient must be
// integral.
IntPoly div_zx(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero()) return {};
  const int da = a.degree();
  const int db = b.degree();
  if (db < 0 || da < db) throw Error(ErrorKind::NumericalFailure, "div_zx: not divisible");
  std::vector<BigInt> r = a.coeffs();
  std::vector<BigInt> q(static_cast<std::size_t>(da - db + 1), BigInt(0));
  const BigInt& lead = b.leading();
  for (int k = da; k >= db; --k) {
    if (r[k] == 0) continue;
    if (r[k] % lead != 0) throw Error(ErrorKind::NumericalFailure, "div_zx: not divisible");
    const BigInt factor = r[k] / lead;
    q[k - db] = factor;
    for (int j = 0; j <= db; ++j) r[k - db + j] -= factor * b[j];
  }
  for (int k = 0; k < db; ++k)
    if (r[k] != 0) throw Error(ErrorKind::NumericalFailure, "div_zx: not divisible");
  return IntPoly(std::move(q));
}

IntPoly positive_leading(IntPoly p) {
  if (!p.is_zero() && p.leading() < 0) p = IntPoly({-1}) * p;
  return p;
}

// gcd in Z[x] including integer content, positive leading coefficient.
IntPoly gcd_zx(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero()) return positive_leading(b);
  if (b.is_zero()) return positive_leading(a);
  const BigInt c = gcd(a.content(), b.content());
  return IntPoly(std::vector<BigInt>{c}) * poly_gcd(a, b);
}

// Polynomial in y whose coefficients live in Z[x].
using BiPoly = std::vector<IntPoly>;

void trim(BiPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int degree(const BiPoly& p) { return static_cast<int>(p.size()) - 1; }

IntPoly content(const BiPoly& p) {
  IntPoly g;
  for (const auto& c : p) g = gcd_zx(g, c);
  return g;
}

BiPoly primitive_part(const BiPoly& p, const IntPoly& c) {
  BiPoly out;
  out.reserve(p.size());
  for (const auto& coeff : p) out.push_back(div_zx(coeff, c));
  return out;
}

BiPoly pseudo_remainder(BiPoly a, const BiPoly& b) {
  const int n = degree(b);
  const IntPoly& lead = b.back();
  while (degree(a) >= n && !a.empty()) {
    const int shift = degree(a) - n;
    const IntPoly top = a.back();
    for (auto& c : a) c = c * lead;
    for (int j = 0; j <= n; ++j) a[shift + j] = a[shift + j] - top * b[j];
    trim(a);
  }
  return a;
}

BiPoly bivariate_gcd(BiPoly a, BiPoly b) {
  trim(a);
  trim(b);
  if (a.empty()) return b;
  if (b.empty()) return a;
  const IntPoly ca = content(a);
  const IntPoly cb = content(b);
  const IntPoly c = gcd_zx(ca, cb);
  a = primitive_part(a, ca);
  b = primitive_part(b, cb);
  if (degree(a) < degree(b)) std::swap(a, b);
  while (!b.empty()) {
    if (degree(b) == 0) {
      a = BiPoly{IntPoly({1})};
      break;
    }
    BiPoly r = pseudo_remainder(a, b);
    a = std::move(b);
    if (r.empty()) break;
    b = primitive_part(r, content(r));
  }
  a = primitive_part(a, content(a));
  for (auto& coeff : a) coeff = coeff * c;
  if (!a.empty() && a.back().leading() < 0)
    for (auto& coeff : a) coeff = IntPoly({-1}) * coeff;
  return a;
}

BiPoly dehomogenize(const IntPoly3& p) {
  int max_y = 0;
  int max_x = 0;
  for (const auto& [e, c] : p.terms()) {
    max_y = std::max(max_y, e[1]);
    max_x = std::max(max_x, e[0]);
  }
  std::vector<std::vector<BigInt>> dense(static_cast<std::size_t>(max_y + 1),
                                         std::vector<BigInt>(static_cast<std::size_t>(max_x + 1), BigInt(0)));
  for (const auto& [e, c] : p.terms()) dense[e[1]][e[0]] += c;
  BiPoly out;
  for (auto& row : dense) out.emplace_back(std::move(row));
  trim(out);
  return out;
}

IntPoly3 homogenize(const BiPoly& p) {
  int d = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (!p[j].is_zero()) d = std::max(d, static_cast<int>(j) + p[j].degree());
  IntPoly3 out;
  for (std::size_t j = 0; j < p.size(); ++j)
    for (int i = 0; i <= p[j].degree(); ++i)
      out.add_term({i, static_cast<int>(j), d - i - static_cast<int>(j)}, p[j][i]);
  return out;
}

}  // namespace

IntPoly3 homogeneous_gcd(const std::vector<IntPoly3>& polys) {
  int z_power = -1;
  BiPoly g;
  bool any = false;
  for (const auto& p : polys) {
    if (p.is_zero()) continue;
    any = true;
    const int v = p.valuation(2);
    z_power = (z_power < 0) ? v : std::min(z_power, v);
    g = bivariate_gcd(g, dehomogenize(p));
  }
  if (!any) throw Error(ErrorKind::NumericalFailure, "homogeneous_gcd: all polynomials are zero");
  return homogenize(g) * IntPoly3::monomial({0, 0, z_power}, BigInt(1));
}

IntPoly3 divide_exact(const IntPoly3& a, const IntPoly3& b) {
  if (b.is_zero()) throw Error(ErrorKind::NumericalFailure, "divide_exact: division by zero");
  IntPoly3 remainder = a;
  IntPoly3 quotient;
  const auto& [lead_exp, lead_coeff] = *b.terms().begin();
  while (!remainder.is_zero()) {
    const auto [exp, coeff] = *remainder.terms().begin();
    Exponent shift{exp[0] - lead_exp[0], exp[1] - lead_exp[1], exp[2] - lead_exp[2]};
    if (shift[0] < 0 || shift[1] < 0 || shift[2] < 0 || coeff % lead_coeff != 0)
      throw Error(ErrorKind::NumericalFailure, "divide_exact: polynomial is not a divisor");
    const IntPoly3 term = IntPoly3::monomial(shift, coeff / lead_coeff);
    quotient += term;
    remainder -= term * b;
  }
  return quotient;
}

ReducedTriple reduce_triple(const HomogeneousTriple<BigInt>& triple) {
  ReducedTriple out;
  for (const auto& c : triple) out.naive_degree = std::max(out.naive_degree, c.total_degree());
  out.removed_factor = homogeneous_gcd({triple[0], triple[1], triple[2]});
  for (int i = 0; i < 3; ++i) out.components[i] = divide_exact(triple[i], out.removed_factor);
  // Normalize the overall sign by the first nonzero leading coefficient.
  for (const auto& c : out.components) {
    if (c.is_zero()) continue;
    if (c.terms().begin()->second < 0)
      for (auto& comp : out.components) comp = BigInt(-1) * comp;
    break;
  }
  for (const auto& c : out.components) out.degree = std::max(out.degree, c.total_degree());
  return out;
}

HomogeneousTriple<BigInt> compose_triples(const HomogeneousTriple<BigInt>& outer,
                                          const HomogeneousTriple<BigInt>& inner,
                                          std::size_t max_terms) {
  HomogeneousTriple<BigInt> out;
  for (int i = 0; i < 3; ++i) out[i] = outer[i].compose(inner, max_terms);
  return out;
}

HomogeneousTriple<BigInt> integer_triple(const HomogeneousTriple<Rational>& triple) {
  BigInt common = 1;
  for (const auto& p : triple)
    for (const auto& [e, c] : p.terms()) common = lcm(common, denominator(c));
  HomogeneousTriple<BigInt> out;
  for (int i = 0; i < 3; ++i)
    out[i] = triple[i].map_coeffs<BigInt>(
        [&](const Rational& c) { return BigInt(numerator(c) * (common / denominator(c))); });
  return out;
}

HomogeneousTriple<Complex> complex_triple(const HomogeneousTriple<Rational>& triple) {
  HomogeneousTriple<Complex> out;
  for (int i = 0; i < 3; ++i)
    out[i] = triple[i].map_coeffs<Complex>([](const Rational& c) { return Complex(to_double(c), 0.0); });
  return out;
}

}  // namespace degreelab
