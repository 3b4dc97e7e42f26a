#include "degreelab/currents.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "degreelab/errors.hpp"
#include "degreelab/lattice.hpp"
#include "degreelab/parallel.hpp"

namespace degreelab {

namespace {

bool is_plane(const SurfaceMapModel& m) {
  return m.family == Family::PolynomialSkew || m.family == Family::CremonaComposite;
}

void require_potential_family(const SurfaceMapModel& m, const char* what) {
  if (!is_plane(m) && m.family != Family::TorusEndo)
    throw Error(ErrorKind::Unsupported, std::string(what) + ": potentials are implemented on P^2 and the torus only");
}

double norm2(const std::array<Complex, 3>& v) { return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]); }

// gamma+ at a normalized plane point together with the normalized image.
double plane_gamma(const SurfaceMapModel& m, const ProjPoint& p, ProjPoint* image) {
  const std::array<Complex, 3> f{m.lift->at(0).eval(p.coords), m.lift->at(1).eval(p.coords),
                                 m.lift->at(2).eval(p.coords)};
  const double nf = norm2(f);
  if (std::sqrt(nf) <= m.options.indeterminacy_tol * m.lift_scale)
    throw Error(ErrorKind::Indeterminate, "gamma_plus: " + describe(SurfacePoint(p)) + " lies in I_f");
  const double delta = m.lift_degree;
  if (image) *image = normalized(f);
  return 0.5 * (std::log(nf) - delta * std::log(norm2(p.coords))) / delta;
}

}  // namespace

double potential_lambda1(const SurfaceMapModel& m) {
  require_potential_family(m, "potential_lambda1");
  if (is_plane(m)) return m.lift_degree;
  double r = 0.0;
  for (const auto& root : exact_eigenvalues(to_rational(m.pullback_matrix))) r = std::max(r, std::abs(root.value));
  return r;
}

double gamma_plus(const SurfaceMapModel& m, const SurfacePoint& p) {
  require_potential_family(m, "gamma_plus");
  if (m.family == Family::TorusEndo) return 0.0;
  const auto* q = std::get_if<ProjPoint>(&p);
  if (!q) throw Error(ErrorKind::PreconditionError, "gamma_plus: point does not lie on P^2");
  return plane_gamma(m, normalized(q->coords), nullptr);
}

GreenEvaluation green_plus(const SurfaceMapModel& m, const SurfacePoint& p, double tol, int n_max) {
  require_potential_family(m, "green_plus");
  if (n_max < 1) throw Error(ErrorKind::PreconditionError, "green_plus: n_max must be >= 1");
  GreenEvaluation out;
  if (m.family == Family::TorusEndo) {
    out.n_used = 1;
    out.partials.push_back(0.0);
    return out;
  }
  const double lambda = m.lift_degree;
  if (lambda <= 1.0) throw Error(ErrorKind::PreconditionError, "green_plus: lambda1 must exceed 1");
  const auto* q = std::get_if<ProjPoint>(&p);
  if (!q) throw Error(ErrorKind::PreconditionError, "green_plus: point does not lie on P^2");
  ProjPoint current = normalized(q->coords);
  double weight = 1.0;
  for (int j = 0; j < n_max; ++j) {
    double g = 0.0;
    ProjPoint next;
    try {
      g = plane_gamma(m, current, &next);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Indeterminate) throw;
      out.orbit_hit_indeterminacy = true;
      out.tail_bound = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value += weight * g;
    out.gamma_sup = std::max(out.gamma_sup, std::abs(g));
    out.partials.push_back(out.value);
    ++out.n_used;
    weight /= lambda;
    out.tail_bound = out.gamma_sup * weight / (1.0 - 1.0 / lambda);
    current = next;
    if (out.tail_bound < tol) break;
  }
  return out;
}

ResidualReport functional_equation_residual(const SurfaceMapModel& m, const std::vector<SurfacePoint>& samples,
                                            double tol, int n_max) {
  require_potential_family(m, "functional_equation_residual");
  ResidualReport out;
  const double lambda = potential_lambda1(m);
  for (const auto& p : samples) {
    try {
      const GreenEvaluation here = green_plus(m, p, tol, n_max);
      if (here.orbit_hit_indeterminacy) {
        ++out.skipped;
        continue;
      }
      const GreenEvaluation there = green_plus(m, evaluate(m, p), tol, n_max);
      if (there.orbit_hit_indeterminacy) {
        ++out.skipped;
        continue;
      }
      const double r = std::abs(there.value - lambda * (here.value - gamma_plus(m, p)));
      out.residual = std::max(out.residual, r);
      ++out.used;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Indeterminate) throw;
      ++out.skipped;
    }
  }
  if (out.used == 0)
    throw Error(ErrorKind::PreconditionError, "functional_equation_residual: every sample orbit meets I_f");
  return out;
}

double chart_potential(const SurfaceMapModel& m, const SurfacePoint& p) {
  if (m.family == Family::TorusEndo) return 0.0;
  const auto a = affine_coords(p);
  if (!a) return std::numeric_limits<double>::infinity();
  return 0.5 * std::log1p(std::norm((*a)[0]) + std::norm((*a)[1]));
}

GreenMinusEvaluation green_minus_partial(const SurfaceMapModel& m, const SurfacePoint& p, int n, double constant,
                                         std::size_t max_leaves) {
  if (m.family != Family::PolynomialSkew && m.family != Family::TorusEndo)
    throw Error(ErrorKind::Unsupported, "green_minus_partial: implemented for polynomial skew and torus models");
  if (n < 1) throw Error(ErrorKind::PreconditionError, "green_minus_partial: n must be >= 1");
  const double lambda1 = potential_lambda1(m);
  const double lambda2 = static_cast<double>(m.lambda2);
  if (std::pow(lambda2, n) > static_cast<double>(max_leaves))
    throw Error(ErrorKind::ResourceExceeded, "green_minus_partial: lambda2^n exceeds the preimage-tree budget");

  GreenMinusEvaluation out;
  struct Node {
    SurfacePoint point;
    double weight;       // product of multiplicities along the path
    std::size_t parent;  // index on the previous level
  };
  // levels[j] = f^{-j}(p); depth n is needed to evaluate gamma- on level n-1.
  std::vector<std::vector<Node>> levels{{Node{p, 1.0, 0}}};
  int depth = 0;
  for (; depth < n; ++depth) {
    std::vector<Node> next;
    bool truncated = false;
    const auto& current = levels.back();
    for (std::size_t k = 0; k < current.size(); ++k) {
      try {
        const PreimageResult r = preimages(m, current[k].point);
        for (const auto& w : r.points) {
          if (w.multiplicity > 1) out.critical_value = true;
          next.push_back({w.point, current[k].weight * w.multiplicity, k});
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PreconditionError) throw;
        truncated = true;
      }
    }
    if (truncated) {
      out.partial = true;
      break;
    }
    levels.push_back(std::move(next));
  }
  out.leaves = levels.back().size();

  // gamma-(w) for nodes on levels 0..depth-1, with children on the next level.
  const double ratio = lambda2 / lambda1;
  double sum = 0.0;
  double scale = 1.0;
  std::vector<double> level_sums;
  for (int j = 0; j < depth; ++j) {
    const auto& parents = levels[j];
    const auto& children = levels[j + 1];
    // (f_* u)(w) for each parent w, summed over its children with multiplicity.
    std::vector<double> pushed(parents.size(), 0.0);
    for (const auto& c : children)
      pushed[c.parent] += (c.weight / parents[c.parent].weight) * chart_potential(m, c.point);
    double level_sum = 0.0;
    double constant_sum = 0.0;
    for (std::size_t k = 0; k < parents.size(); ++k) {
      const double gamma = pushed[k] / lambda1 - chart_potential(m, parents[k].point);
      out.gamma_max = (j == 0 && k == 0) ? gamma : std::max(out.gamma_max, gamma);
      level_sum += parents[k].weight * gamma;
      constant_sum += parents[k].weight * constant;
    }
    sum += scale * level_sum;
    out.partials.push_back(sum);
    out.constant_scaling.push_back({j, scale * constant_sum, std::pow(ratio, j) * constant});
    scale /= lambda1;
  }
  out.n_used = depth;
  out.value = out.partials.empty() ? 0.0 : out.partials.back();

  double offset = 0.0;
  for (int k = 0; k < depth; ++k) {
    offset += out.gamma_max * std::pow(ratio, k);
    out.adjusted.push_back(out.partials[k] - offset);
    if (k > 0 && out.adjusted[k] > out.adjusted[k - 1] + 1e-12 * (1.0 + std::abs(out.adjusted[k - 1])))
      out.monotone = false;
  }
  return out;
}

double GreenGrid::s_at(int i) const {
  return nx == 1 ? slice.s_range[0] : slice.s_range[0] + (slice.s_range[1] - slice.s_range[0]) * i / (nx - 1);
}

double GreenGrid::t_at(int j) const {
  return ny == 1 ? slice.t_range[0] : slice.t_range[0] + (slice.t_range[1] - slice.t_range[0]) * j / (ny - 1);
}

SurfacePoint slice_point(const SurfaceMapModel& m, const GridSlice& slice, double s, double t) {
  const Complex x = slice.origin[0] + s * slice.u[0] + t * slice.v[0];
  const Complex y = slice.origin[1] + s * slice.u[1] + t * slice.v[1];
  switch (m.family) {
    case Family::TorusEndo: return reduced({x, y});
    case Family::Secant: return affine_product_point(x, y);
    default: return affine_plane_point(x, y);
  }
}

GreenGrid export_grid(const SurfaceMapModel& m, const GridSlice& slice, int nx, int ny, GreenWhich which,
                      const GridOptions& options) {
  if (nx < 1 || ny < 1) throw Error(ErrorKind::PreconditionError, "export_grid: resolution must be positive");
  if (static_cast<long long>(nx) * ny > 4096LL * 4096LL)
    throw Error(ErrorKind::ResourceExceeded, "export_grid: resolution exceeds 4096^2 cells");
  GreenGrid grid;
  grid.slice = slice;
  grid.nx = nx;
  grid.ny = ny;
  grid.which = which;
  grid.options = options;
  const std::size_t cells = static_cast<std::size_t>(nx) * ny;
  grid.values.assign(cells, 0.0);
  std::vector<char> mask(cells, 0);
  parallel_for(cells, [&](std::size_t k) {
    const int i = static_cast<int>(k % nx);
    const int j = static_cast<int>(k / nx);
    const SurfacePoint p = slice_point(m, slice, grid.s_at(i), grid.t_at(j));
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      if (which == GreenWhich::Plus) {
        const GreenEvaluation g = green_plus(m, p, options.tol, options.n_max);
        if (!g.orbit_hit_indeterminacy) value = g.value;
      } else {
        const GreenMinusEvaluation g = green_minus_partial(m, p, options.n_max);
        if (!g.partial) value = g.value;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Indeterminate && e.kind() != ErrorKind::PreconditionError) throw;
    }
    grid.values[k] = value;
    mask[k] = std::isnan(value) ? 1 : 0;
  });
  grid.mask.assign(mask.begin(), mask.end());
  return grid;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_grid_csv(const GreenGrid& grid, std::ostream& out) {
  out << "x,y,value\n";
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * grid.nx + i;
      out << format_double(grid.s_at(i)) << ',' << format_double(grid.t_at(j)) << ','
          << (grid.mask[k] ? std::string("NaN") : format_double(grid.values[k])) << '\n';
    }
}

}  // namespace degreelab
