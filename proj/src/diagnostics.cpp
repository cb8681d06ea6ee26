#include "perfhom/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "perfhom/capacity.hpp"
#include "perfhom/error.hpp"
#include "perfhom/format.hpp"
#include "perfhom/quadrature.hpp"
#include "perfhom/solver.hpp"

namespace perfhom {

double hole_capacity(const Hole& hole, int dim) {
  if (hole.empty()) return 0.0;
  if (hole.is_ball()) return capacity_ball(dim, hole.radius).value;
  return hole.shape->reference_capacity * std::pow(hole.scale, dim - 2);
}

AssumptionReport assumption_quantities(const std::vector<Hole>& holes, const SeparationParams& seps,
                                       const std::vector<Cell>& cells, const Box& domain) {
  if (holes.size() != cells.size()) {
    fail(ErrorKind::Structural, "assumption_quantities: " + std::to_string(holes.size()) +
                                    " holes for " + std::to_string(cells.size()) + " cells");
  }
  AssumptionReport rep;
  rep.epsilon = seps.epsilon;
  rep.cells = cells.size();
  if (!cells.empty()) rep.dim = cells.front().dim();
  const int d = rep.dim;
  for (std::size_t i = 0; i < holes.size(); ++i) {
    const Hole& hole = holes[i];
    const Cell& cell = cells[i];
    if (hole.cell_index != cell.index) {
      fail(ErrorKind::Structural, "hole " + std::to_string(i) + " is not aligned with its cell");
    }
    const double R = seps.R(hole);
    const double a = hole.radius;
    const double ad2 = std::pow(a, d - 2);
    rep.max_R = std::max(rep.max_R, R);
    rep.sup_a_over_R = std::max(rep.sup_a_over_R, a / R);
    rep.sum_A2 += ad2 * ad2 * std::pow(R, 2 - d);
    rep.sup_A3 = std::max(rep.sup_A3, cell.measure() * std::pow(R, -d));
    rep.sum_A4 += ad2 * cell.diameter();
    rep.sum_A6 += ad2;
    rep.diam_over_R = std::max(rep.diam_over_R, cell.diameter() / R);
    if (!hole.empty()) ++rep.nonempty_holes;
    if (!cell.inside(domain)) {
      ++rep.boundary_cells;
      rep.boundary_sum_A6 += ad2;
    }
  }
  return rep;
}

double hminus1_norm(const GridField& nu, double tol) {
  for (double v : nu.values) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidParameter, "hminus1_norm: non-finite node value");
  }
  GridField phi(nu.grid);
  CgOptions opts;
  opts.tol = tol;
  solve_dirichlet(nu.grid, {}, {}, nu.values, phi.values, opts);
  const double e = l2_inner(nu.grid, nu.values, phi.values);
  return std::sqrt(std::max(e, 0.0));
}

GridField capacity_density_field(const std::vector<Hole>& holes, const TilingSpec& spec,
                                 const Grid& grid) {
  spec.validate();
  const int d = grid.dim;
  GridField field(grid);
  if (holes.empty()) return field;
  // Dense table over the index range of the holes.
  std::vector<std::int64_t> first(static_cast<std::size_t>(d), INT64_MAX), last(first.size(), INT64_MIN);
  for (const auto& h : holes) {
    for (int k = 0; k < d; ++k) {
      first[k] = std::min(first[k], h.cell_index[k]);
      last[k] = std::max(last[k], h.cell_index[k]);
    }
  }
  std::vector<std::size_t> extent(first.size()), tstride(first.size());
  std::size_t total = 1;
  for (int k = d - 1; k >= 0; --k) {
    extent[k] = static_cast<std::size_t>((last[k] - first[k]) / 2 + 1);
    tstride[k] = total;
    total *= extent[k];
  }
  const double cell_measure = std::pow(2.0 * spec.epsilon, d);
  std::vector<double> table(total, 0.0);
  for (const auto& h : holes) {
    std::size_t t = 0;
    for (int k = 0; k < d; ++k) t += static_cast<std::size_t>((h.cell_index[k] - first[k]) / 2) * tstride[k];
    table[t] = hole_capacity(h, d) / cell_measure;
  }
  // Per-axis cell index of every node coordinate.
  std::vector<std::int64_t> axis_cell(grid.n);
  std::vector<double> probe(static_cast<std::size_t>(d), 0.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    std::fill(probe.begin(), probe.end(), grid.coord(j));
    axis_cell[j] = cell_of_point(spec, probe).index[0];
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t rest = i, t = 0;
    bool inside = true;
    for (int k = d - 1; k >= 0; --k) {
      const std::int64_t c = axis_cell[rest % grid.n];
      rest /= grid.n;
      if (c < first[k] || c > last[k]) {
        inside = false;
        break;
      }
      t += static_cast<std::size_t>((c - first[k]) / 2) * tstride[k];
    }
    if (inside) field.values[i] = table[t];
  }
  return field;
}

double ldc_deviation(const std::vector<Hole>& holes, const Potential& mu, const TilingSpec& spec,
                     const Grid& grid, const QuadratureSpec& quad, double tol) {
  GridField diff = capacity_density_field(holes, spec, grid);
  const LumpedMeasure lumped = lump_measure(mu, grid, quad);
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= lumped.weights[i];
  return hminus1_norm(diff, tol);
}

double BumpFunction::operator()(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < center.size(); ++k) {
    const double diff = x[k] - center[k];
    s += diff * diff;
  }
  s /= radius * radius;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s));
}

double BumpFunction::lipschitz() const {
  // Radial profile psi(rho); |psi'| sampled densely, with a margin for the
  // sampling gap (|psi''| is bounded on [0, r]).
  const int samples = 20000;
  double best = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double u = static_cast<double>(i) / samples;  // rho / r
    const double s = u * u;
    const double psi = std::exp(1.0 - 1.0 / (1.0 - s));
    const double dpsi = psi * 2.0 * u / ((1.0 - s) * (1.0 - s));
    best = std::max(best, dpsi);
  }
  return 1.01 * best / radius;
}

void BumpFunction::require_inside(const Box& domain) const {
  if (!(radius > 0.0)) fail(ErrorKind::InvalidParameter, "test function radius must be positive");
  for (std::size_t k = 0; k < center.size(); ++k) {
    if (center[k] - radius <= domain.lo[k] || center[k] + radius >= domain.hi[k]) {
      fail(ErrorKind::InvalidParameter, "invalid test function: support leaves the domain");
    }
  }
}

double dprime_pairing(const GridField& nu, const BumpFunction& g) {
  const Grid& grid = nu.grid;
  Box domain;
  domain.lo.assign(static_cast<std::size_t>(grid.dim), grid.lower);
  domain.hi.assign(static_cast<std::size_t>(grid.dim), grid.lower + grid.h * static_cast<double>(grid.n + 1));
  g.require_inside(domain);
  const GridField gv = GridField::sample(grid, [&](std::span<const double> x) { return g(x); });
  return l2_inner(grid, nu.values, gv.values);
}

double dprime_pairing(const Potential& mu, const BumpFunction& g, const Box& domain,
                      const QuadratureSpec& quad, int subdivisions) {
  g.require_inside(domain);
  const int d = domain.dim();
  const auto s = static_cast<std::size_t>(std::max(1, subdivisions));
  const ScalarFn gf = [&](std::span<const double> x) { return g(x); };
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> lo(idx.size()), hi(idx.size());
  double total = 0.0;
  while (true) {
    bool touches = true;
    for (int k = 0; k < d; ++k) {
      const double w = (domain.hi[k] - domain.lo[k]) / static_cast<double>(s);
      lo[k] = domain.lo[k] + w * static_cast<double>(idx[k]);
      hi[k] = idx[k] + 1 == s ? domain.hi[k] : lo[k] + w;
      touches = touches && hi[k] > g.center[k] - g.radius && lo[k] < g.center[k] + g.radius;
    }
    if (touches) total += integrate(mu, lo, hi, quad, gf);
    int k = d - 1;
    while (k >= 0) {
      if (++idx[k] < s) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return total;
}

double capacity_density_pairing(const std::vector<Hole>& holes, const std::vector<Cell>& cells,
                                const BumpFunction& g, const Box& domain, const QuadratureSpec& quad) {
  if (holes.size() != cells.size()) fail(ErrorKind::Structural, "holes and cells are not aligned");
  g.require_inside(domain);
  const ScalarFn gf = [&](std::span<const double> x) { return g(x); };
  double total = 0.0;
  for (std::size_t i = 0; i < holes.size(); ++i) {
    if (holes[i].empty()) continue;
    const Cell& cell = cells[i];
    std::vector<double> lo(cell.center.size()), hi(cell.center.size());
    for (int k = 0; k < cell.dim(); ++k) {
      lo[k] = std::max(cell.lower(k), domain.lo[k]);
      hi[k] = std::min(cell.upper(k), domain.hi[k]);
    }
    // Unit density on the cell: integrates g over cell and domain.
    const double integral = integrate(Potential::constant(1.0), lo, hi, quad, gf);
    total += hole_capacity(holes[i], cell.dim()) / cell.measure() * integral;
  }
  return total;
}

double hole_density_pairing(const std::vector<Hole>& holes, const BumpFunction& g, const Box& domain) {
  g.require_inside(domain);
  double total = 0.0;
  for (const auto& hole : holes) {
    if (hole.empty()) continue;
    const int d = static_cast<int>(hole.center.size());
    // Degree-3 symmetric ball rule: centre weight 2/(d+2), 2d axis points at
    // distance a with weight 1/(2(d+2)) each.
    double avg = 2.0 / (d + 2) * g(hole.center);
    Point x = hole.center;
    for (int k = 0; k < d; ++k) {
      for (double sgn : {-1.0, 1.0}) {
        x[k] = hole.center[k] + sgn * hole.radius;
        avg += g(x) / (2.0 * (d + 2));
      }
      x[k] = hole.center[k];
    }
    total += hole_capacity(hole, d) * avg;
  }
  return total;
}

}  // namespace perfhom
