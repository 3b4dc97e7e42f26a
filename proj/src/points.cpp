#include "degreelab/points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degreelab/errors.hpp"

namespace degreelab {

namespace {

template <std::size_t N>
std::array<Complex, N> scale_to_unit(const std::array<Complex, N>& c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (std::abs(c[i]) > std::abs(c[best])) best = i;
  if (c[best] == Complex(0.0)) throw Error(ErrorKind::Indeterminate, "homogeneous coordinates are all zero");
  std::array<Complex, N> out;
  const Complex s = c[best];
  for (std::size_t i = 0; i < N; ++i) out[i] = (i == best) ? Complex(1.0) : c[i] / s;
  return out;
}

template <std::size_t N>
double projective_sine(const std::array<Complex, N>& a, const std::array<Complex, N>& b) {
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  double wedge = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) wedge += std::norm(a[i] * b[j] - a[j] * b[i]);
  return std::sqrt(wedge / (na * nb));
}

double wrap(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

double circle_gap(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

template <std::size_t N>
std::array<Rational, N> primitive_integer(const std::array<Rational, N>& c) {
  BigInt common = 1;
  for (const auto& q : c) common = lcm(common, denominator(q));
  std::array<BigInt, N> ints;
  BigInt g = 0;
  for (std::size_t i = 0; i < N; ++i) {
    ints[i] = numerator(c[i]) * (common / denominator(c[i]));
    g = gcd(g, ints[i]);
  }
  if (g == 0) throw Error(ErrorKind::Indeterminate, "homogeneous coordinates are all zero");
  for (const auto& z : ints)
    if (z != 0) {
      if (z < 0) g = -g;
      break;
    }
  std::array<Rational, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = Rational(ints[i] / g);
  return out;
}

}  // namespace

ProjPoint normalized(const std::array<Complex, 3>& coords) { return {scale_to_unit(coords)}; }

ProjPoint affine_plane_point(Complex x, Complex y) { return normalized(std::array<Complex, 3>{x, y, 1.0}); }

BiProjPoint normalized(const std::array<Complex, 2>& x, const std::array<Complex, 2>& y) {
  return {scale_to_unit(x), scale_to_unit(y)};
}

BiProjPoint affine_product_point(Complex x, Complex y) {
  return normalized(std::array<Complex, 2>{x, 1.0}, std::array<Complex, 2>{y, 1.0});
}

TorusPoint reduced(const std::array<Complex, 2>& z) {
  TorusPoint out;
  for (int i = 0; i < 2; ++i) out.z[i] = Complex(wrap(z[i].real()), wrap(z[i].imag()));
  return out;
}

std::optional<std::array<Complex, 2>> affine_coords(const SurfacePoint& p) {
  if (const auto* q = std::get_if<ProjPoint>(&p)) {
    if (q->coords[2] == Complex(0.0)) return std::nullopt;
    return std::array<Complex, 2>{q->coords[0] / q->coords[2], q->coords[1] / q->coords[2]};
  }
  if (const auto* q = std::get_if<BiProjPoint>(&p)) {
    if (q->x[1] == Complex(0.0) || q->y[1] == Complex(0.0)) return std::nullopt;
    return std::array<Complex, 2>{q->x[0] / q->x[1], q->y[0] / q->y[1]};
  }
  return std::get<TorusPoint>(p).z;
}

double distance(const SurfacePoint& a, const SurfacePoint& b) {
  if (a.index() != b.index()) return std::numeric_limits<double>::infinity();
  if (const auto* p = std::get_if<ProjPoint>(&a)) return projective_sine(p->coords, std::get<ProjPoint>(b).coords);
  if (const auto* p = std::get_if<BiProjPoint>(&a)) {
    const auto& q = std::get<BiProjPoint>(b);
    return std::max(projective_sine(p->x, q.x), projective_sine(p->y, q.y));
  }
  const auto& p = std::get<TorusPoint>(a);
  const auto& q = std::get<TorusPoint>(b);
  double d = 0.0;
  for (int i = 0; i < 2; ++i) {
    d = std::max(d, circle_gap(p.z[i].real(), q.z[i].real()));
    d = std::max(d, circle_gap(p.z[i].imag(), q.z[i].imag()));
  }
  return d;
}

namespace {

std::string fmt(Complex c) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  return os.str();
}

}  // namespace

std::string describe(const SurfacePoint& p) {
  std::ostringstream os;
  if (const auto* q = std::get_if<ProjPoint>(&p)) {
    os << "[" << fmt(q->coords[0]) << ":" << fmt(q->coords[1]) << ":" << fmt(q->coords[2]) << "]";
  } else if (const auto* q = std::get_if<BiProjPoint>(&p)) {
    os << "([" << fmt(q->x[0]) << ":" << fmt(q->x[1]) << "],[" << fmt(q->y[0]) << ":" << fmt(q->y[1]) << "])";
  } else {
    const auto& t = std::get<TorusPoint>(p);
    os << "(" << fmt(t.z[0]) << "," << fmt(t.z[1]) << ") mod Z[i]^2";
  }
  return os.str();
}

ExactProjPoint normalized(const std::array<Rational, 3>& coords) { return {primitive_integer(coords)}; }

ExactBiProjPoint normalized(const std::array<Rational, 2>& x, const std::array<Rational, 2>& y) {
  return {primitive_integer(x), primitive_integer(y)};
}

SurfacePoint to_float(const ExactPoint& p) {
  if (const auto* q = std::get_if<ExactProjPoint>(&p)) {
    std::array<Complex, 3> c;
    for (int i = 0; i < 3; ++i) c[i] = to_double(q->coords[i]);
    return normalized(c);
  }
  const auto& q = std::get<ExactBiProjPoint>(p);
  return normalized(std::array<Complex, 2>{to_double(q.x[0]), to_double(q.x[1])},
                    std::array<Complex, 2>{to_double(q.y[0]), to_double(q.y[1])});
}

bool operator==(const ExactProjPoint& a, const ExactProjPoint& b) { return a.coords == b.coords; }
bool operator==(const ExactBiProjPoint& a, const ExactBiProjPoint& b) { return a.x == b.x && a.y == b.y; }

std::size_t bit_size(const ExactPoint& p) {
  std::size_t bits = 0;
  auto visit = [&](const Rational& q) {
    const BigInt n = abs(numerator(q));
    if (n != 0) bits = std::max(bits, static_cast<std::size_t>(msb(n)) + 1);
  };
  if (const auto* q = std::get_if<ExactProjPoint>(&p)) {
    for (const auto& c : q->coords) visit(c);
  } else {
    const auto& b = std::get<ExactBiProjPoint>(p);
    for (const auto& c : b.x) visit(c);
    for (const auto& c : b.y) visit(c);
  }
  return bits;
}

std::string describe(const ExactPoint& p) {
  std::ostringstream os;
  if (const auto* q = std::get_if<ExactProjPoint>(&p)) {
    os << "[" << q->coords[0] << ":" << q->coords[1] << ":" << q->coords[2] << "]";
  } else {
    const auto& b = std::get<ExactBiProjPoint>(p);
    os << "([" << b.x[0] << ":" << b.x[1] << "],[" << b.y[0] << ":" << b.y[1] << "])";
  }
  return os.str();
}

}  // namespace degreelab
