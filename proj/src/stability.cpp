#include "degreelab/stability.hpp"

#include <cmath>

#include "degreelab/errors.hpp"

namespace degreelab {

std::string StabilityReport::verdict() const {
  if (collision_step) return "CollisionAt(" + std::to_string(*collision_step) + ")";
  return "NoObstructionUpTo(" + std::to_string(horizon) + ")";
}

namespace {

bool finite_point(const SurfacePoint& p) {
  bool ok = true;
  auto check = [&](Complex c) { ok = ok && std::isfinite(c.real()) && std::isfinite(c.imag()); };
  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, ProjPoint>) {
          for (auto c : q.coords) check(c);
        } else if constexpr (std::is_same_v<T, BiProjPoint>) {
          for (auto c : q.x) check(c);
          for (auto c : q.y) check(c);
        } else {
          for (auto c : q.z) check(c);
        }
      },
      p);
  return ok;
}

bool float_member(const SurfaceMapModel& m, const SurfacePoint& p, double tol) {
  for (const auto& e : m.indeterminacy)
    if (distance(e.point, p) < tol) return true;
  return lift_residual(m, p) < tol;
}

}  // namespace

StabilityReport check_one_stability(const SurfaceMapModel& m, int horizon, const StabilityOptions& options) {
  if (horizon < 0) throw Error(ErrorKind::PreconditionError, "check_one_stability: horizon must be >= 0");
  StabilityReport report;
  report.horizon = horizon;
  report.membership_tol = options.membership_tol;
  if (m.exceptional.empty()) report.notes.push_back("no exceptional curves: the criterion holds vacuously");
  if (!m.exceptional_complete) report.notes.push_back("exceptional table is not certified complete");
  if (!m.indeterminacy_complete) report.notes.push_back("indeterminacy table is not certified complete");

  for (std::size_t s = 0; s < m.exceptional.size(); ++s) {
    const auto& seed = m.exceptional[s];
    std::optional<ExactPoint> exact;
    if (seed.exact_image && m.has_exact_data()) exact = seed.exact_image;
    SurfacePoint point = seed.image;
    for (int n = 0; n <= horizon; ++n) {
      if (exact && bit_size(*exact) > options.max_exact_bits) {
        report.notes.push_back("orbit of seed " + std::to_string(s) + " switched to floating point at step " +
                               std::to_string(n));
        point = to_float(*exact);
        exact.reset();
      }
      OrbitEntry entry;
      entry.seed = static_cast<int>(s);
      entry.n = n;
      entry.exact = exact.has_value();
      entry.point = exact ? to_float(*exact) : point;
      if (!finite_point(entry.point))
        throw Error(ErrorKind::NumericalFailure,
                    "check_one_stability: orbit left the numerical range at step " + std::to_string(n));
      entry.hit_indeterminacy =
          exact ? is_indeterminate_exact(m, *exact) : float_member(m, point, options.membership_tol);
      report.orbit_log.push_back(entry);
      if (entry.hit_indeterminacy) {
        if (!report.collision_step || n < *report.collision_step) report.collision_step = n;
        break;
      }
      if (n == horizon) break;
      if (exact)
        exact = evaluate_exact(m, *exact);
      else
        point = evaluate(m, point);
    }
  }
  return report;
}

DegreeSequence symbolic_degree_sequence(const SurfaceMapModel& m, int n_max, std::size_t max_terms,
                                        int max_degree) {
  if (!m.exact_lift)
    throw Error(ErrorKind::Unsupported,
                "symbolic_degree_sequence: model has no rational homogeneous lift on P^2");
  if (n_max < 1) throw Error(ErrorKind::PreconditionError, "symbolic_degree_sequence: n_max must be >= 1");
  const HomogeneousTriple<BigInt> f = integer_triple(*m.exact_lift);
  const ReducedTriple first = reduce_triple(f);
  DegreeSequence ds;
  ds.degrees.push_back(first.degree);
  ds.naive_degrees.push_back(first.naive_degree);
  HomogeneousTriple<BigInt> current = first.components;
  for (int n = 2; n <= n_max; ++n) {
    const int naive = first.degree * ds.degrees.back();
    if (naive > max_degree)
      throw Error(ErrorKind::PreconditionError, "symbolic_degree_sequence: step " + std::to_string(n) +
                                                    " would reach degree " + std::to_string(naive) + " > " +
                                                    std::to_string(max_degree));
    HomogeneousTriple<BigInt> composed;
    try {
      composed = compose_triples(first.components, current, max_terms);
    } catch (const Error&) {
      throw Error(ErrorKind::ResourceExceeded,
                  "symbolic_degree_sequence: monomial budget exhausted at step " + std::to_string(n));
    }
    std::size_t terms = composed[0].size() + composed[1].size() + composed[2].size();
    if (terms > max_terms)
      throw Error(ErrorKind::ResourceExceeded,
                  "symbolic_degree_sequence: monomial budget exhausted at step " + std::to_string(n));
    const ReducedTriple r = reduce_triple(composed);
    ds.naive_degrees.push_back(r.naive_degree);
    ds.degrees.push_back(r.degree);
    current = r.components;
  }
  return ds;
}

std::vector<long long> matrix_degree_prediction(const SurfaceMapModel& m, int n_max) {
  if (m.pullback_matrix.rows() != 1)
    throw Error(ErrorKind::Unsupported, "matrix_degree_prediction: only defined on the P^2 lattice");
  std::vector<long long> out;
  long long d = 1;
  for (int n = 1; n <= n_max; ++n) {
    d *= m.pullback_matrix(0, 0);
    out.push_back(d);
  }
  return out;
}

bool Lambda1Estimate::consistent_with(double r1, double rel) const {
  return std::abs(estimate - r1) <= rel * std::abs(r1);
}

Lambda1Estimate lambda1_estimate(const DegreeSequence& ds) {
  if (ds.degrees.size() < 2)
    throw Error(ErrorKind::PreconditionError, "lambda1_estimate: need at least two degrees");
  const auto n = ds.degrees.size();
  Lambda1Estimate out;
  out.estimate = static_cast<double>(ds.degrees[n - 1]) / static_cast<double>(ds.degrees[n - 2]);
  out.nth_root = std::pow(static_cast<double>(ds.degrees[n - 1]), 1.0 / static_cast<double>(n));
  return out;
}

}  // namespace degreelab
