#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "degreelab/cli.hpp"
#include "degreelab/contraction.hpp"
#include "degreelab/ergodic.hpp"
#include "degreelab/lattice.hpp"
#include "degreelab/stability.hpp"

namespace degreelab::cli {

namespace {

bool is_hard(ErrorKind k) {
  return k == ErrorKind::NumericalFailure || k == ErrorKind::ResourceExceeded || k == ErrorKind::StructuralFailure ||
         k == ErrorKind::Indeterminate;
}

struct SectionFailure {
  std::string section;
  Error error;
};

// ---------------------------------------------------------------------------
// Value encoders.

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json rational_json(const Rational& q) {
  if (denominator(q) == 1 && abs(numerator(q)) < BigInt(1) << 62) return numerator(q).convert_to<long long>();
  return q.str();
}

Json matrix_json(const RatMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(rational_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

Json matrix_json(const IntMatrix& m) { return matrix_json(to_rational(m)); }

Json vector_json(const Vector<double>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json class_json(const ExactClass& c) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < c.coords.size(); ++i) out.push_back(rational_json(c.coords(i)));
  return out;
}

Json poly_json(const IntPoly& p) {
  Json coeffs = Json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back(rational_json(Rational(c)));
  return {{"coefficients_low_to_high", coeffs}, {"text", p.str('x')}};
}

Json point_json(const SurfacePoint& p) {
  Json out;
  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, ProjPoint>) {
          out["surface"] = "P2";
          out["coords"] = Json::array({complex_json(q.coords[0]), complex_json(q.coords[1]), complex_json(q.coords[2])});
        } else if constexpr (std::is_same_v<T, BiProjPoint>) {
          out["surface"] = "P1xP1";
          out["x"] = Json::array({complex_json(q.x[0]), complex_json(q.x[1])});
          out["y"] = Json::array({complex_json(q.y[0]), complex_json(q.y[1])});
        } else {
          out["surface"] = "torus";
          out["z"] = Json::array({complex_json(q.z[0]), complex_json(q.z[1])});
        }
      },
      p);
  return out;
}

Json exact_point_json(const ExactPoint& p) { return describe(p); }

Json roots_json(std::vector<Root> roots) {
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  Json out = Json::array();
  for (const auto& r : roots)
    out.push_back({{"value", complex_json(r.value)}, {"modulus", std::abs(r.value)}, {"multiplicity", r.multiplicity}});
  return out;
}

Json tolerances_json(const Tolerances& t) {
  return {{"spectral", t.spectral},   {"nef", t.nef},   {"membership", t.membership},
          {"green", t.green},         {"cluster_radius", t.cluster_radius},
          {"zero", t.zero},           {"residual", t.residual}};
}

// ---------------------------------------------------------------------------
// Sections.

struct Context {
  const RunConfig& cfg;
  SurfaceMapModel model;
  Json not_applicable = Json::object();
};

SurfaceMapModel build(const RunConfig& cfg) {
  ModelOptions options;
  options.cluster_radius = cfg.tolerances.cluster_radius;
  return build_model(cfg.params, options);
}

Json model_section(const Context& ctx) {
  const auto& m = ctx.model;
  Json out;
  out["family"] = std::string(to_string(m.family));
  out["lambda2"] = m.lambda2;
  out["pullback_matrix"] = matrix_json(m.pullback_matrix);
  out["lattice"] = {{"name", m.lattice->name},
                    {"rank", m.lattice->rank},
                    {"gram", matrix_json(m.lattice->gram)},
                    {"basis_labels", m.lattice->basis_labels},
                    {"nef_rule", std::string(to_string(m.lattice->nef_rule))}};
  Json ind = Json::array();
  for (const auto& e : m.indeterminacy) {
    Json j{{"point", point_json(e.point)}, {"note", e.note}};
    j["exact_point"] = e.exact_point ? exact_point_json(*e.exact_point) : Json(nullptr);
    j["image_class"] = e.image_class ? class_json(*e.image_class) : Json("Unknown");
    ind.push_back(j);
  }
  out["indeterminacy"] = ind;
  out["indeterminacy_complete"] = m.indeterminacy_complete;
  Json exc = Json::array();
  for (const auto& e : m.exceptional) {
    Json j{{"curve", e.curve_label}, {"curve_class", class_json(e.curve_class)}, {"image", point_json(e.image)}};
    j["exact_image"] = e.exact_image ? exact_point_json(*e.exact_image) : Json(nullptr);
    exc.push_back(j);
  }
  out["exceptional"] = exc;
  out["exceptional_complete"] = m.exceptional_complete;
  out["notes"] = m.notes;
  if (m.lift_degree > 0) out["algebraic_degree"] = m.lift_degree;
  return out;
}

double spectral_radius(const SurfaceMapModel& m) {
  double r = 0.0;
  for (const auto& root : exact_eigenvalues(to_rational(m.pullback_matrix))) r = std::max(r, std::abs(root.value));
  return r;
}

int feasible_degree_steps(int degree, int requested) {
  int steps = 1;
  long long d = degree;
  while (steps < requested && d * degree <= 200) {
    d *= degree;
    ++steps;
  }
  return steps;
}

Json degrees_section(const Context& ctx) {
  const auto& m = ctx.model;
  const auto& cfg = ctx.cfg;
  Json out;
  out["lambda2"] = {{"value", m.lambda2}, {"method", "family formula"}, {"exact", true}};
  const RatMatrix pull = to_rational(m.pullback_matrix);
  const double r1 = spectral_radius(m);
  out["pullback_matrix"] = matrix_json(m.pullback_matrix);
  out["char_poly"] = poly_json(characteristic_polynomial(pull));
  out["eigenvalues"] = roots_json(exact_eigenvalues(pull));
  out["lambda1"] = {{"value", r1},
                    {"method", "spectral radius of the pullback matrix via the exact characteristic polynomial"},
                    {"tolerance", cfg.tolerances.spectral},
                    {"assumes", "1-stability (see the stability section)"}};
  out["small_topological_degree"] = static_cast<double>(m.lambda2) < r1;

  const DegreeEstimate mc = topological_degree_mc(m, cfg.mc_samples, cfg.seed);
  Json hist = Json::object();
  for (const auto& [count, hits] : mc.histogram) hist[std::to_string(count)] = hits;
  out["topological_degree"] = {{"modal_count", mc.modal_count},
                               {"agreement", mc.agreement},
                               {"agrees", mc.agrees},
                               {"threshold", 0.99},
                               {"histogram", hist},
                               {"samples", mc.n_samples},
                               {"seed", cfg.seed},
                               {"method", "Monte Carlo preimage count"}};

  if (m.exact_lift) {
    const int steps = feasible_degree_steps(m.lift_degree, cfg.degree_steps);
    const DegreeSequence ds = symbolic_degree_sequence(m, steps);
    Json seq{{"degrees", ds.degrees},
             {"naive_degrees", ds.naive_degrees},
             {"steps_requested", cfg.degree_steps},
             {"steps_used", steps},
             {"symbolic", true},
             {"method", "exact composition of integer lifts with gcd removal"}};
    if (m.pullback_matrix.rows() == 1) {
      const auto predicted = matrix_degree_prediction(m, steps);
      seq["matrix_prediction"] = predicted;
      bool match = true;
      for (int i = 0; i < steps; ++i) match = match && predicted[static_cast<std::size_t>(i)] == ds.degrees[static_cast<std::size_t>(i)];
      seq["matches_matrix"] = match;
    }
    if (ds.degrees.size() >= 2) {
      const Lambda1Estimate est = lambda1_estimate(ds);
      seq["lambda1_estimate"] = {{"last_ratio", est.estimate},
                                 {"nth_root", est.nth_root},
                                 {"consistent_with_r1", est.consistent_with(r1)},
                                 {"relative_tolerance", 0.1}};
    }
    out["degree_sequence"] = seq;
  }
  return out;
}

Json spectral_section(const Context& ctx) {
  const auto& m = ctx.model;
  const auto& cfg = ctx.cfg;
  const RatMatrix pull = to_rational(m.pullback_matrix);
  const RatMatrix push = adjoint_pushforward(pull, *m.lattice);
  Json out;
  out["method"] = "exact characteristic polynomial, square-free split, Newton-refined roots";
  out["tolerance"] = cfg.tolerances.spectral;
  out["pullback_matrix"] = matrix_json(pull);
  out["pushforward_matrix"] = matrix_json(push);
  out["char_poly"] = poly_json(characteristic_polynomial(pull));
  out["char_poly_pushforward_equal"] = characteristic_polynomial(pull) == characteristic_polynomial(push);
  const auto eig = exact_eigenvalues(pull);
  out["eigenvalues"] = roots_json(eig);
  const double sqrt_l2 = std::sqrt(static_cast<double>(m.lambda2));
  try {
    const RealClass omega = to_real(kahler_class(m.lattice));
    const InvariantClasses ic =
        invariant_classes(pull, Rational(m.lambda2), m.lattice, omega, cfg.tolerances.nef);
    out["verdict"] = "ok";
    out["r1"] = ic.pull.r1;
    out["lambda1"] = ic.pull.r1;
    out["simple_root"] = ic.pull.simple_root;
    out["r1_multiplicity"] = ic.pull.r1_multiplicity;
    out["second_modulus"] = ic.pull.second_modulus;
    out["sqrt_lambda2"] = sqrt_l2;
    out["sqrt_lambda2_bound_ok"] = ic.pull.sqrt_lambda2_bound_ok;
    out["omega"] = vector_json(omega.coords);
    out["alpha_plus"] = vector_json(ic.alpha_plus.coords);
    out["alpha_minus"] = vector_json(ic.alpha_minus.coords);
    out["alpha_plus_nef"] = ic.pull.alpha_nef;
    out["alpha_minus_nef"] = ic.push.alpha_nef;
    out["pairings"] = {{"alpha_plus_omega", pair(ic.alpha_plus, omega)},
                       {"alpha_minus_omega", pair(ic.alpha_minus, omega)},
                       {"alpha_plus_alpha_minus", ic.cross_pairing}};
    out["cross_pairing_positive"] = ic.cross_pairing_positive;
    out["normalization"] = "<alpha+, omega> = <alpha-, omega> = 1; <alpha+, alpha-> is reported, not imposed";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::HypothesisViolation && e.kind() != ErrorKind::StructuralFailure) throw;
    out["verdict"] = std::string(to_string(e.kind()));
    out["message"] = e.what();
    double second = 0.0;
    for (const auto& r : eig) second = std::max(second, std::abs(r.value));
    out["spectral_radius"] = second;
    out["sqrt_lambda2"] = sqrt_l2;
    out["all_moduli_within_sqrt_lambda2"] = second <= sqrt_l2 + cfg.tolerances.spectral;
  }
  return out;
}

Json pushpull_section(const Context& ctx) {
  const auto& m = ctx.model;
  const RatMatrix pull = to_rational(m.pullback_matrix);
  const RatMatrix defect = pushpull_defect(pull, *m.lattice, Rational(m.lambda2));
  const ExpansionForm q = pullback_expansion_form(pull, *m.lattice, Rational(m.lambda2), ctx.cfg.tolerances.spectral);
  bool zero = true;
  for (Eigen::Index i = 0; i < defect.rows(); ++i)
    for (Eigen::Index j = 0; j < defect.cols(); ++j) zero = zero && defect(i, j) == 0;
  return {{"defect", matrix_json(defect)},
          {"defect_zero", zero},
          {"method", "exact rational arithmetic"},
          {"expansion_form", matrix_json(q.form)},
          {"expansion_form_min_eigenvalue", q.min_eigenvalue},
          {"expansion_form_psd", q.positive_semidefinite},
          {"tolerance", ctx.cfg.tolerances.spectral}};
}

Json stability_json(const StabilityReport& r) {
  Json log = Json::array();
  for (const auto& e : r.orbit_log)
    log.push_back({{"seed", e.seed},
                   {"n", e.n},
                   {"point", point_json(e.point)},
                   {"exact", e.exact},
                   {"hit_indeterminacy", e.hit_indeterminacy}});
  Json out{{"verdict", r.verdict()},
           {"horizon", r.horizon},
           {"membership_tolerance", r.membership_tol},
           {"method", "forward orbits of f(E_f); exact membership for rational data"},
           {"orbit_log", log},
           {"notes", r.notes},
           {"scope", "a clean verdict covers only the stated horizon; no general decision procedure is known"}};
  out["collision_step"] = r.collision_step ? Json(*r.collision_step) : Json(nullptr);
  return out;
}

StabilityReport stability_of(const Context& ctx) {
  StabilityOptions options;
  options.membership_tol = ctx.cfg.tolerances.membership;
  return check_one_stability(ctx.model, ctx.cfg.horizon, options);
}

Json stability_section(const Context& ctx) { return stability_json(stability_of(ctx)); }

int tree_depth_for(const SurfaceMapModel& m, int requested) {
  int depth = requested;
  while (depth > 1 && std::pow(static_cast<double>(m.lambda2), depth) > 1e5) --depth;
  return depth;
}

Json green_section(const Context& ctx, RunResult& result) {
  const auto& m = ctx.model;
  const auto& cfg = ctx.cfg;
  const double lambda1 = potential_lambda1(m);
  if (m.family != Family::TorusEndo && !(lambda1 > 1.0))
    throw Error(ErrorKind::HypothesisViolation, "green: lambda1 = " + format_double(lambda1) + " must exceed 1");
  const StabilityReport stab = stability_of(ctx);
  if (stab.collision_step)
    throw Error(ErrorKind::NumericalFailure, "green: indeterminacy collision at step " +
                                                 std::to_string(*stab.collision_step) +
                                                 "; potentials are refused for maps that are not 1-stable");
  Json out;
  out["lambda1"] = lambda1;
  out["stability_verdict"] = stab.verdict();
  out["chart"] = m.family == Family::TorusEndo
                     ? "flat reference form; gamma+ and the chart potential vanish identically"
                     : "unit sup-norm homogeneous lifts with Euclidean norms; u = 1/2 log(1 + |x|^2 + |y|^2)";

  std::mt19937_64 rng(cfg.seed);
  std::vector<SurfacePoint> samples;
  for (int i = 0; i < cfg.residual_samples; ++i) samples.push_back(random_point(m, rng));
  const ResidualReport res = functional_equation_residual(m, samples, cfg.tolerances.green, cfg.n_max);
  out["functional_equation"] = {{"residual", res.residual},
                                {"used", res.used},
                                {"skipped", res.skipped},
                                {"pass", res.residual < cfg.tolerances.residual},
                                {"tolerance", cfg.tolerances.residual},
                                {"series_tolerance", cfg.tolerances.green},
                                {"n_max", cfg.n_max},
                                {"seed", cfg.seed},
                                {"method", "partial sums with geometric tail bound"}};

  if (m.family == Family::PolynomialSkew || m.family == Family::TorusEndo) {
    const int depth = tree_depth_for(m, cfg.tree_depth);
    bool monotone = true, partial = false, critical = false;
    double scaling_error = 0.0;
    Json values = Json::array();
    const int count = std::min<int>(10, static_cast<int>(samples.size()));
    for (int i = 0; i < count; ++i) {
      const GreenMinusEvaluation g = green_minus_partial(m, samples[static_cast<std::size_t>(i)], depth);
      monotone = monotone && g.monotone;
      partial = partial || g.partial;
      critical = critical || g.critical_value;
      for (const auto& lvl : g.constant_scaling)
        scaling_error = std::max(scaling_error, std::abs(lvl.observed - lvl.expected) / std::abs(lvl.expected));
      values.push_back(g.value);
    }
    out["green_minus"] = {{"depth", depth},
                          {"depth_requested", cfg.tree_depth},
                          {"values", values},
                          {"monotone_after_offset", monotone},
                          {"partial", partial},
                          {"critical_value_met", critical},
                          {"constant_scaling_max_relative_error", scaling_error},
                          {"method", "pushforward over the preimage tree"},
                          {"offset", "C * sum_{i<k} (lambda2/lambda1)^i with C the max of gamma- on the tree"}};
  }

  GridOptions gopt;
  gopt.tol = cfg.tolerances.green;
  gopt.n_max = cfg.which == GreenWhich::Plus ? cfg.n_max : tree_depth_for(m, cfg.tree_depth);
  if (cfg.which == GreenWhich::Minus && m.family != Family::PolynomialSkew && m.family != Family::TorusEndo)
    throw Error(ErrorKind::Unsupported, "green: the minus grid is implemented for polynomial skew and torus models");
  GreenGrid grid = export_grid(m, cfg.slice, cfg.nx, cfg.ny, cfg.which, gopt);
  const auto masked = std::count(grid.mask.begin(), grid.mask.end(), true);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < grid.values.size(); ++k)
    if (!grid.mask[k]) {
      lo = std::min(lo, grid.values[k]);
      hi = std::max(hi, grid.values[k]);
    }
  const Json slice{{"origin", Json::array({complex_json(cfg.slice.origin[0]), complex_json(cfg.slice.origin[1])})},
                   {"u", Json::array({complex_json(cfg.slice.u[0]), complex_json(cfg.slice.u[1])})},
                   {"v", Json::array({complex_json(cfg.slice.v[0]), complex_json(cfg.slice.v[1])})},
                   {"s_range", cfg.slice.s_range},
                   {"t_range", cfg.slice.t_range}};
  out["grid"] = {{"file", "grid.csv"},
                 {"which", cfg.which == GreenWhich::Plus ? "plus" : "minus"},
                 {"resolution", Json::array({cfg.nx, cfg.ny})},
                 {"masked_cells", masked},
                 {"min", lo},
                 {"max", hi}};
  result.grid_meta = {{"slice", slice},
                      {"resolution", Json::array({cfg.nx, cfg.ny})},
                      {"which", cfg.which == GreenWhich::Plus ? "plus" : "minus"},
                      {"model_hash", model_hash(cfg.model)},
                      {"tolerances", tolerances_json(cfg.tolerances)},
                      {"terms", gopt.n_max},
                      {"layout", "row-major, t outer and s inner; node (i, j) at s_i = s0 + (s1 - s0) i / (nx - 1)"},
                      {"mask", "cells whose orbit meets I_f are written as NaN"}};
  result.grid = std::move(grid);
  return out;
}

Json ergodic_section(const Context& ctx) {
  const auto& m = ctx.model;
  const auto& cfg = ctx.cfg;
  const LyapunovResult ly = lyapunov_exponents(m, cfg.lyapunov_steps, cfg.lyapunov_samples, cfg.seed);
  auto exponents = [](const ExponentReport& r) {
    return Json{{"chi_plus", r.chi_plus},
                {"chi_minus", r.chi_minus},
                {"method", std::string(to_string(r.method))},
                {"n_steps", r.n_steps},
                {"n_samples", r.n_samples},
                {"seed", r.seed}};
  };
  auto sum = [](const SumCheck& s) {
    return Json{{"lhs", s.lhs}, {"rhs", s.rhs}, {"tolerance", s.tolerance}, {"pass", s.pass}};
  };
  const double l2 = static_cast<double>(m.lambda2);
  Json out;
  out["exponents_exact"] = exponents(ly.exact);
  out["exponents_monte_carlo"] = exponents(ly.monte_carlo);
  out["hyperbolic"] = ly.hyperbolic;
  out["monte_carlo_deviation"] = ly.max_deviation;
  out["monte_carlo_within_tolerance"] = ly.max_deviation < 1e-3;
  out["monte_carlo_tolerance"] = 1e-3;
  out["sum_check_exact"] = sum(exponent_sum_check(ly.exact, l2));
  out["sum_check_monte_carlo"] = sum(exponent_sum_check(ly.monte_carlo, l2));
  out["sum_check"] = {{"pass", exponent_sum_check(ly.exact, l2).pass && exponent_sum_check(ly.monte_carlo, l2).pass}};
  out["chi_plus_vs_half_log_r1"] = {{"chi_plus", ly.exact.chi_plus},
                                    {"half_log_r1", 0.5 * std::log(spectral_radius(m))},
                                    {"tolerance", 1e-9}};
  try {
    const HaarReport h = haar_invariance_check(m, cfg.haar_n);
    out["haar"] = {{"n", h.n},
                   {"points", h.points},
                   {"distinct_images", h.distinct_images},
                   {"min_fiber", h.min_fiber},
                   {"max_fiber", h.max_fiber},
                   {"bijective", h.bijective},
                   {"method", "exact counting on the N-torsion grid"}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PreconditionError) throw;
    out["haar"] = {{"verdict", "PreconditionError"}, {"message", e.what()}, {"n", cfg.haar_n}};
  }
  const JacobianReport jac = jacobian_constancy(m, 100, cfg.seed);
  out["jacobian"] = {{"min", jac.min_value},
                     {"max", jac.max_value},
                     {"relative_variation", jac.relative_variation},
                     {"constant", jac.constant},
                     {"equals_lambda2", jac.equals_lambda2},
                     {"structurally_constant", jac.structurally_constant},
                     {"note", jac.note},
                     {"samples", jac.samples},
                     {"tolerance", 1e-10}};
  return out;
}

Json contraction_json(const ContractionReport& r) {
  Json out;
  out["alpha_plus_sq"] = r.squares.alpha_plus_sq;
  out["alpha_minus_sq"] = r.squares.alpha_minus_sq;
  out["zero_case"] = r.zero_case;
  if (r.zero_checks.applicable) {
    Json images = Json::array();
    for (const auto& c : r.zero_checks.image_classes) {
      Json j{{"point", c.point}, {"status", std::string(to_string(c.status))}};
      j["pairing"] = c.pairing ? Json(*c.pairing) : Json(nullptr);
      images.push_back(j);
    }
    out["pushforward_eigen_check"] = {{"expected", r.zero_checks.expected},
                                      {"observed", r.zero_checks.observed},
                                      {"residual", r.zero_checks.residual},
                                      {"pass", r.zero_checks.pass},
                                      {"tolerance", 1e-8}};
    out["image_class_pairings"] = {{"entries", images},
                                   {"pass", r.zero_checks.image_classes_pass},
                                   {"complete", r.zero_checks.image_classes_complete}};
    out["conditions_checked"] = "(1) to (3); the condition over all modifications has no finite certificate";
  } else {
    out["pushforward_eigen_check"] = "NotApplicable";
  }
  Json integ{{"lambda1_integer", r.integrality.lambda1_integer},
             {"ratio_integer", r.integrality.ratio_integer},
             {"conclusion", r.integrality.conclusion},
             {"method", "rational-root test on the exact characteristic polynomial"}};
  integ["lambda1_exact"] = r.integrality.lambda1_exact ? rational_json(*r.integrality.lambda1_exact) : Json(nullptr);
  out["integrality"] = integ;
  Json classes = Json::array();
  for (const auto& c : r.orbit_closure.classes) classes.push_back(class_json(c));
  Json closure{{"classes", classes},
               {"rank", r.orbit_closure.classes.size()},
               {"iterations", r.orbit_closure.iterations},
               {"stabilized", r.orbit_closure.stabilized},
               {"full_rank", r.orbit_closure.full_rank}};
  if (r.orbit_closure.gram_negative_definite) {
    closure["gram_negative_definite"] = *r.orbit_closure.gram_negative_definite;
    closure["restricted_gram"] = matrix_json(r.orbit_closure.restricted_gram);
  } else {
    closure["gram_negative_definite"] = "NotApplicable";
  }
  out["orbit_closure"] = closure;
  Json spurious = Json::array();
  for (const auto& s : r.spurious) {
    Json j{{"point", s.point},
           {"classification", s.status == Classification::Zero      ? "spurious"
                              : s.status == Classification::NonZero ? "not spurious"
                                                                    : "Unknown"}};
    j["pairing"] = s.pairing ? Json(*s.pairing) : Json(nullptr);
    spurious.push_back(j);
  }
  out["spurious"] = spurious;
  out["tolerance"] = 1e-9;
  return out;
}

Json contraction_section(const Context& ctx, bool only_zero_case) {
  const ContractionReport r = contraction_report(ctx.model, 32, ctx.cfg.tolerances.zero);
  if (only_zero_case && !r.zero_case)
    throw Error(ErrorKind::PreconditionError, "contraction: (alpha+)^2 = " + format_double(r.squares.alpha_plus_sq) +
                                                  " is not zero, so the zero self-intersection analysis does not apply");
  return contraction_json(r);
}

Json header(const RunConfig& cfg, std::string_view command) {
  return {{"library", {{"name", "degreelab"}, {"version", kLibraryVersion}}},
          {"command", std::string(command)},
          {"model", cfg.model},
          {"model_hash", model_hash(cfg.model)},
          {"seed", cfg.seed},
          {"tolerances", tolerances_json(cfg.tolerances)},
          {"parameters",
           {{"horizon", cfg.horizon},
            {"n_max", cfg.n_max},
            {"degree_steps", cfg.degree_steps},
            {"tree_depth", cfg.tree_depth},
            {"mc_samples", cfg.mc_samples},
            {"residual_samples", cfg.residual_samples},
            {"lyapunov_steps", cfg.lyapunov_steps},
            {"lyapunov_samples", cfg.lyapunov_samples},
            {"haar_n", cfg.haar_n},
            {"resolution", Json::array({cfg.nx, cfg.ny})}}}};
}

Json failure_record(const std::string& section, const Error& e) {
  return {{"section", section}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

using SectionFn = std::function<Json(Context&, RunResult&)>;

struct Section {
  std::string name;
  SectionFn fn;
};

// Runs sections in order. Soft failures mark the section as not applicable;
// the first hard failure aborts with exit code 3 and a partial marker.
RunResult run_sections(const RunConfig& cfg, std::string_view command, const std::vector<Section>& sections,
                       bool soft_as_absent) {
  RunResult result;
  result.report = header(cfg, command);
  Context ctx{cfg, SurfaceMapModel{}};
  try {
    ctx.model = build(cfg);
  } catch (const Error& e) {
    result.exit_code = e.kind() == ErrorKind::ModelRejected ? 2 : 3;
    result.report["status"] = e.kind() == ErrorKind::ModelRejected ? "invalid_config" : "failure";
    result.report["failure"] = failure_record("model", e);
    result.report["partial"] = true;
    return result;
  }
  result.report["sections"]["model"] = model_section(ctx);
  for (const auto& s : sections) {
    try {
      result.report["sections"][s.name] = s.fn(ctx, result);
    } catch (const Error& e) {
      if (is_hard(e.kind())) {
        result.exit_code = 3;
        result.report["status"] = "failure";
        result.report["failure"] = failure_record(s.name, e);
        result.report["partial"] = true;
        result.grid.reset();
        return result;
      }
      const Json note{{"verdict", std::string(to_string(e.kind()))}, {"message", e.what()}};
      if (soft_as_absent)
        ctx.not_applicable[s.name] = note;
      else
        result.report["sections"][s.name] = note;
    }
  }
  if (soft_as_absent) result.report["not_applicable"] = ctx.not_applicable;
  result.report["status"] = "ok";
  result.report["partial"] = false;
  return result;
}

Section section_for(Command c) {
  switch (c) {
    case Command::Degrees: return {"degrees", [](Context& x, RunResult&) { return degrees_section(x); }};
    case Command::Stability: return {"stability", [](Context& x, RunResult&) { return stability_section(x); }};
    case Command::Spectral: return {"spectral", [](Context& x, RunResult&) { return spectral_section(x); }};
    case Command::Green: return {"green", [](Context& x, RunResult& r) { return green_section(x, r); }};
    case Command::Ergodic: return {"ergodic", [](Context& x, RunResult&) { return ergodic_section(x); }};
    case Command::Contraction:
      return {"contraction", [](Context& x, RunResult&) { return contraction_section(x, false); }};
    default: break;
  }
  throw Error(ErrorKind::Unsupported, "no single section for this command");
}

}  // namespace

RunResult run(Command command, const RunConfig& config) {
  if (command == Command::Report) return report_all(config);
  if (command == Command::Validate) return validate(config);
  std::vector<Section> sections{section_for(command)};
  if (command == Command::Spectral)
    sections.push_back({"pushpull", [](Context& x, RunResult&) { return pushpull_section(x); }});
  return run_sections(config, to_string(command), sections, false);
}

RunResult report_all(const RunConfig& config) {
  const std::vector<Section> sections{
      section_for(Command::Degrees),
      section_for(Command::Spectral),
      {"pushpull", [](Context& x, RunResult&) { return pushpull_section(x); }},
      section_for(Command::Stability),
      section_for(Command::Green),
      section_for(Command::Ergodic),
      {"contraction", [](Context& x, RunResult&) { return contraction_section(x, true); }},
  };
  return run_sections(config, "report", sections, true);
}

RunResult validate(const RunConfig& config) {
  RunResult result;
  result.report = header(config, "validate");
  try {
    Context ctx{config, build(config)};
    result.report["status"] = "ok";
    result.report["diagnostics"] = ctx.model.notes;
    result.report["sections"]["model"] = model_section(ctx);
  } catch (const Error& e) {
    result.exit_code = e.kind() == ErrorKind::ModelRejected ? 2 : 3;
    result.report["status"] = e.kind() == ErrorKind::ModelRejected ? "rejected" : "failure";
    result.report["failure"] = failure_record("model", e);
  }
  return result;
}

namespace {

void write_atomic(const std::filesystem::path& target, const std::string& content) {
  const std::filesystem::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (result.grid) {
    std::ostringstream csv;
    write_grid_csv(*result.grid, csv);
    write_atomic(dir / "grid.csv", csv.str());
    write_atomic(dir / "grid.meta.json", dump_json(result.grid_meta));
  }
  write_atomic(dir / "report.json", dump_json(result.report));
}

int main_entry(int argc, char** argv) {
  CLI::App app{"degreelab: invariants of meromorphic surface maps"};
  std::string command_name;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command_name,
                 "degrees | stability | spectral | green | ergodic | contraction | report | validate")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--seed", seed, "overrides the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto fail_config = [&](const std::string& field, const std::string& message) {
    std::cerr << "invalid config: " << message << "\n";
    Json report{{"status", "invalid_config"},
                {"failure", {{"kind", "InvalidConfig"}, {"field", field}, {"message", message}}},
                {"library", {{"name", "degreelab"}, {"version", kLibraryVersion}}}};
    try {
      write_outputs(RunResult{2, report, std::nullopt, Json()}, out_dir);
    } catch (const std::exception&) {
    }
    return 2;
  };

  const auto command = parse_command(command_name);
  if (!command) return fail_config("command", "command: unknown command '" + command_name + "'");
  RunConfig config;
  try {
    config = load_config(config_path);
    if (config.command && *config.command != *command)
      throw ConfigError("command", "config declares '" + std::string(to_string(*config.command)) +
                                       "' but the command line asks for '" + command_name + "'");
  } catch (const ConfigError& e) {
    return fail_config(e.field(), e.what());
  }
  if (seed) config.seed = *seed;

  RunResult result;
  try {
    result = run(*command, config);
  } catch (const Error& e) {
    result.exit_code = 3;
    result.report = {{"status", "failure"}, {"failure", failure_record("run", e)}, {"partial", true}};
  }
  try {
    write_outputs(result, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << "\n";
    return 3;
  }
  if (result.exit_code != 0 && result.report.contains("failure"))
    std::cerr << result.report["failure"].value("message", std::string("failure")) << "\n";
  return result.exit_code;
}

}  // namespace degreelab::cli
