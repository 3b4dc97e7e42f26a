#pragma once

// Self-intersections of the invariant classes, the zero self-intersection
// checks, integrality obstructions, the exceptional orbit span and spurious
// indeterminacy points.

#include <optional>
#include <string>
#include <vector>

#include "degreelab/lattice.hpp"
#include "degreelab/mapmodels.hpp"

namespace degreelab {

/// Invariant classes of the model with the default reference class.
InvariantClasses model_invariant_classes(const SurfaceMapModel& m, double tol = 1e-9);

struct SelfIntersections {
  double alpha_plus_sq = 0.0;
  double alpha_minus_sq = 0.0;
};

SelfIntersections self_intersections(const InvariantClasses& classes);
SelfIntersections self_intersections(const SurfaceMapModel& m, double tol = 1e-9);

enum class Classification { Zero, NonZero, Unknown };

std::string_view to_string(Classification c);

struct ImageClassCheck {
  std::string point;
  std::optional<double> pairing;  // <alpha+, class of f(p)>
  Classification status = Classification::Unknown;
};

struct ZeroClassChecks {
  bool applicable = false;  // (alpha+)^2 vanishes within tol
  double expected = 0.0;    // lambda2 / lambda1
  double observed = 0.0;    // <M_push alpha+, omega> / <alpha+, omega>
  double residual = 0.0;    // sup |M_push alpha+ - expected alpha+|
  bool pass = false;
  std::vector<ImageClassCheck> image_classes;
  bool image_classes_pass = false;  // every known pairing vanishes
  bool image_classes_complete = true;
};

ZeroClassChecks zero_class_checks(const SurfaceMapModel& m, double tol = 1e-9);

struct IntegralityReport {
  bool lambda1_integer = false;
  bool ratio_integer = false;
  std::optional<Rational> lambda1_exact;
  std::string conclusion;
};

/// Decided on the exact characteristic polynomial; r1 only locates the root.
IntegralityReport integrality_check(const IntPoly& char_poly, double r1, const Rational& lambda2);

struct OrbitClosure {
  std::vector<ExactClass> classes;  // basis of the stabilized span
  int iterations = 0;
  bool stabilized = false;
  bool full_rank = false;
  /// Empty when the span is empty (not applicable).
  std::optional<bool> gram_negative_definite;
  RatMatrix restricted_gram;
};

/// Span of the given classes closed under pull and its adjoint, with an exact
/// negative-definiteness test of the restricted intersection form.
OrbitClosure exceptional_orbit_closure(const LatticeRef& lattice, const RatMatrix& pull,
                                       const std::vector<ExactClass>& classes, int cap = 32);
OrbitClosure exceptional_orbit_closure(const SurfaceMapModel& m, int cap = 32);

/// Exact Sylvester test: every leading principal minor of -G is positive.
bool negative_definite(const RatMatrix& gram);

struct SpuriousEntry {
  std::string point;
  std::optional<double> pairing;
  Classification status = Classification::Unknown;  // Zero means spurious
};

std::vector<SpuriousEntry> spurious_points(const RealClass& alpha_plus,
                                           const std::vector<std::pair<std::string, std::optional<ExactClass>>>& points,
                                           double tol = 1e-9);
std::vector<SpuriousEntry> spurious_points(const SurfaceMapModel& m, double tol = 1e-9);

struct ContractionReport {
  SelfIntersections squares;
  bool zero_case = false;
  ZeroClassChecks zero_checks;
  IntegralityReport integrality;
  OrbitClosure orbit_closure;
  std::vector<SpuriousEntry> spurious;
};

ContractionReport contraction_report(const SurfaceMapModel& m, int cap = 32, double tol = 1e-9);

}  // namespace degreelab
