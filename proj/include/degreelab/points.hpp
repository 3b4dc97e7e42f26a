#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "degreelab/exact.hpp"

namespace degreelab {

/// Point of P^2; the largest-modulus coordinate is scaled to exactly 1.
struct ProjPoint {
  std::array<Complex, 3> coords{};
};

/// Point of P^1 x P^1 as two homogeneous pairs [x0:x1], [y0:y1] with affine
/// coordinates x = x0/x1, y = y0/y1. Each pair is scaled like ProjPoint.
struct BiProjPoint {
  std::array<Complex, 2> x{};
  std::array<Complex, 2> y{};
};

/// Point of C^2 / Z[i]^2 with real and imaginary parts reduced to [0, 1).
struct TorusPoint {
  std::array<Complex, 2> z{};
};

using SurfacePoint = std::variant<ProjPoint, BiProjPoint, TorusPoint>;

ProjPoint normalized(const std::array<Complex, 3>& coords);
ProjPoint affine_plane_point(Complex x, Complex y);
BiProjPoint normalized(const std::array<Complex, 2>& x, const std::array<Complex, 2>& y);
BiProjPoint affine_product_point(Complex x, Complex y);
TorusPoint reduced(const std::array<Complex, 2>& z);

/// Affine coordinates (x, y) in the standard chart when the point lies in it.
std::optional<std::array<Complex, 2>> affine_coords(const SurfacePoint& p);

/// Phase-invariant distance: the sine of the angle between homogeneous lifts
/// on each projective factor (max over factors); the sup-norm distance modulo
/// the lattice for torus points. Infinite when the variants differ.
double distance(const SurfacePoint& a, const SurfacePoint& b);

std::string describe(const SurfacePoint& p);

// Exact rational points, used for orbit tracking with rational data.
// Coordinates are kept as primitive integer vectors with a positive first
// nonzero entry.
struct ExactProjPoint {
  std::array<Rational, 3> coords;
};
struct ExactBiProjPoint {
  std::array<Rational, 2> x;
  std::array<Rational, 2> y;
};
using ExactPoint = std::variant<ExactProjPoint, ExactBiProjPoint>;

ExactProjPoint normalized(const std::array<Rational, 3>& coords);
ExactBiProjPoint normalized(const std::array<Rational, 2>& x, const std::array<Rational, 2>& y);
SurfacePoint to_float(const ExactPoint& p);
bool operator==(const ExactProjPoint& a, const ExactProjPoint& b);
bool operator==(const ExactBiProjPoint& a, const ExactBiProjPoint& b);
/// Bits in the largest coordinate numerator.
std::size_t bit_size(const ExactPoint& p);
std::string describe(const ExactPoint& p);

}  // namespace degreelab
