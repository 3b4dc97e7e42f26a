#include "degreelab/contraction.hpp"

#include <cmath>

#include "degreelab/errors.hpp"

namespace degreelab {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Zero: return "zero";
    case Classification::NonZero: return "nonzero";
    case Classification::Unknown: return "Unknown";
  }
  return "Unknown";
}

InvariantClasses model_invariant_classes(const SurfaceMapModel& m, double tol) {
  return invariant_classes(to_rational(m.pullback_matrix), Rational(m.lambda2), m.lattice,
                           to_real(kahler_class(m.lattice)), tol);
}

SelfIntersections self_intersections(const InvariantClasses& classes) {
  return {pair(classes.alpha_plus, classes.alpha_plus), pair(classes.alpha_minus, classes.alpha_minus)};
}

SelfIntersections self_intersections(const SurfaceMapModel& m, double tol) {
  return self_intersections(model_invariant_classes(m, tol));
}

namespace {

ZeroClassChecks zero_checks_from(const SurfaceMapModel& m, const InvariantClasses& classes, double tol) {
  ZeroClassChecks out;
  const SelfIntersections sq = self_intersections(classes);
  out.applicable = std::abs(sq.alpha_plus_sq) < tol;
  if (!out.applicable) return out;
  const Matrix<double> push = to_double(adjoint_pushforward(m.pullback_matrix, *m.lattice));
  const Vector<double>& a = classes.alpha_plus.coords;
  const Vector<double> image = push * a;
  const Vector<double> omega = to_real(kahler_class(m.lattice)).coords;
  out.expected = static_cast<double>(m.lambda2) / classes.pull.r1;
  out.observed = pair(*m.lattice, image, omega) / pair(*m.lattice, a, omega);
  out.residual = (image - out.expected * a).cwiseAbs().maxCoeff();
  out.pass = out.residual < 1e-8;

  out.image_classes_pass = true;
  for (const auto& entry : m.indeterminacy) {
    ImageClassCheck c;
    c.point = describe(entry.point);
    if (entry.image_class) {
      const double p = pair(classes.alpha_plus, to_real(*entry.image_class));
      c.pairing = p;
      c.status = std::abs(p) < tol ? Classification::Zero : Classification::NonZero;
      if (c.status != Classification::Zero) out.image_classes_pass = false;
    } else {
      out.image_classes_complete = false;
    }
    out.image_classes.push_back(c);
  }
  return out;
}

}  // namespace

ZeroClassChecks zero_class_checks(const SurfaceMapModel& m, double tol) {
  return zero_checks_from(m, model_invariant_classes(m, tol), tol);
}

IntegralityReport integrality_check(const IntPoly& char_poly, double r1, const Rational& lambda2) {
  IntegralityReport out;
  if (auto q = rational_root_near(char_poly, r1)) {
    out.lambda1_exact = *q;
    out.lambda1_integer = denominator(*q) == 1;
    if (*q != 0) {
      const Rational ratio = lambda2 / *q;
      out.ratio_integer = denominator(ratio) == 1;
    }
  }
  if (out.lambda1_integer && out.ratio_integer)
    out.conclusion = "lambda1 and lambda2/lambda1 are integers; no integrality obstruction";
  else if (!out.lambda1_exact)
    out.conclusion =
        "lambda1 is irrational, so alpha+ is not the class of an effective divisor with zero self-intersection";
  else
    out.conclusion = std::string(out.lambda1_integer ? "lambda2/lambda1" : "lambda1") +
                     " is not an integer, so alpha+ is not the class of an effective divisor with zero "
                     "self-intersection";
  return out;
}

bool negative_definite(const RatMatrix& gram) {
  const Eigen::Index n = gram.rows();
  for (Eigen::Index k = 1; k <= n; ++k) {
    const RatMatrix minor = -gram.topLeftCorner(k, k);
    if (exact_determinant(minor) <= 0) return false;
  }
  return true;
}

OrbitClosure exceptional_orbit_closure(const LatticeRef& lattice, const RatMatrix& pull,
                                       const std::vector<ExactClass>& classes, int cap) {
  OrbitClosure out;
  const int r = lattice->rank;
  if (pull.rows() != r || pull.cols() != r)
    throw Error(ErrorKind::DimensionMismatch, "exceptional_orbit_closure: matrix size does not match lattice rank");
  if (classes.empty()) {
    out.stabilized = true;
    return out;
  }
  const RatMatrix push = adjoint_pushforward(pull, *lattice);
  RatMatrix columns(r, static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].coords.size() != r)
      throw Error(ErrorKind::DimensionMismatch, "exceptional_orbit_closure: class dimension mismatch");
    columns.col(static_cast<Eigen::Index>(i)) = classes[i].coords;
  }
  RatMatrix basis = column_span_basis(columns);
  for (out.iterations = 0; out.iterations < cap; ++out.iterations) {
    RatMatrix grown(r, 3 * basis.cols());
    grown << basis, pull * basis, push * basis;
    RatMatrix next = column_span_basis(grown);
    if (next.cols() == basis.cols()) {
      out.stabilized = true;
      break;
    }
    basis = next;
  }
  for (Eigen::Index j = 0; j < basis.cols(); ++j) out.classes.push_back({basis.col(j), lattice});
  out.full_rank = basis.cols() == r;
  if (basis.cols() > 0) {
    out.restricted_gram = basis.transpose() * to_rational(lattice->gram) * basis;
    out.gram_negative_definite = negative_definite(out.restricted_gram);
  }
  return out;
}

OrbitClosure exceptional_orbit_closure(const SurfaceMapModel& m, int cap) {
  return exceptional_orbit_closure(m.lattice, to_rational(m.pullback_matrix), m.exceptional_image_classes(), cap);
}

std::vector<SpuriousEntry> spurious_points(const RealClass& alpha_plus,
                                           const std::vector<std::pair<std::string, std::optional<ExactClass>>>& points,
                                           double tol) {
  std::vector<SpuriousEntry> out;
  for (const auto& [label, cls] : points) {
    SpuriousEntry e;
    e.point = label;
    if (cls) {
      const double p = pair(alpha_plus, to_real(*cls));
      e.pairing = p;
      e.status = std::abs(p) < tol ? Classification::Zero : Classification::NonZero;
    }
    out.push_back(e);
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, std::optional<ExactClass>>> labelled_points(const SurfaceMapModel& m) {
  std::vector<std::pair<std::string, std::optional<ExactClass>>> out;
  for (const auto& e : m.indeterminacy) out.emplace_back(describe(e.point), e.image_class);
  return out;
}

}  // namespace

std::vector<SpuriousEntry> spurious_points(const SurfaceMapModel& m, double tol) {
  if (m.indeterminacy.empty()) return {};
  return spurious_points(model_invariant_classes(m, tol).alpha_plus, labelled_points(m), tol);
}

ContractionReport contraction_report(const SurfaceMapModel& m, int cap, double tol) {
  const InvariantClasses classes = model_invariant_classes(m, tol);
  ContractionReport out;
  out.squares = self_intersections(classes);
  out.zero_case = std::abs(out.squares.alpha_plus_sq) < tol;
  out.zero_checks = zero_checks_from(m, classes, tol);
  out.integrality = integrality_check(classes.pull.char_poly, classes.pull.r1, Rational(m.lambda2));
  out.orbit_closure = exceptional_orbit_closure(m, cap);
  out.spurious = spurious_points(classes.alpha_plus, labelled_points(m), tol);
  return out;
}

}  // namespace degreelab
