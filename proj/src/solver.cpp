#include "perfhom/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "perfhom/capacity.hpp"
#include "perfhom/error.hpp"
#include "perfhom/format.hpp"
#include "perfhom/parallel.hpp"
#include "perfhom/quadrature.hpp"

namespace perfhom {

double LumpedMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s * grid.cell_volume();
}

std::vector<std::uint8_t> hole_mask(const Grid& grid, const std::vector<Hole>& holes,
                                    bool override_tiny_holes, std::vector<std::string>* warnings) {
  const int d = grid.dim;
  double min_radius = std::numeric_limits<double>::infinity();
  for (const auto& hole : holes) {
    if (hole.empty()) continue;
    if (!hole.is_ball()) {
      fail(ErrorKind::InvalidParameter, "solver accepts ball holes only, got template '" +
                                            hole.shape->shape_id + "'");
    }
    if (static_cast<int>(hole.center.size()) != d) {
      fail(ErrorKind::Structural, "hole dimension does not match the grid");
    }
    min_radius = std::min(min_radius, hole.radius);
  }
  if (min_radius < 2.0 * grid.h && !override_tiny_holes) {
    fail(ErrorKind::Resolution, "smallest hole radius " + format_g17(min_radius) +
                                    " is below 2h = " + format_g17(2.0 * grid.h) +
                                    " (h = " + format_g17(grid.h) + ")");
  }

  std::vector<std::uint8_t> mask(grid.size(), 0);
  std::vector<std::size_t> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  std::size_t tiny = 0;
  for (const auto& hole : holes) {
    if (hole.empty()) continue;
    bool any = true;
    const bool nearest = hole.radius < 2.0 * grid.h;
    for (int k = 0; k < d; ++k) {
      const double s = (hole.center[k] - grid.lower) / grid.h - 1.0;
      double a = nearest ? std::round(s) : std::ceil(s - hole.radius / grid.h);
      double b = nearest ? std::round(s) : std::floor(s + hole.radius / grid.h);
      a = std::max(a, 0.0);
      b = std::min(b, static_cast<double>(grid.n) - 1.0);
      if (a > b) {
        any = false;
        break;
      }
      lo[k] = static_cast<std::size_t>(a);
      hi[k] = static_cast<std::size_t>(b);
    }
    if (nearest) ++tiny;
    if (!any) continue;
    std::vector<std::size_t> j(lo);
    while (true) {
      double r2 = 0.0;
      std::size_t idx = 0;
      for (int k = 0; k < d; ++k) {
        const double diff = grid.coord(j[k]) - hole.center[k];
        r2 += diff * diff;
        idx += j[k] * grid.stride(k);
      }
      if (nearest || r2 <= hole.radius * hole.radius) mask[idx] = 1;
      int k = d - 1;
      while (k >= 0) {
        if (++j[k] <= hi[k]) break;
        j[k] = lo[k];
        --k;
      }
      if (k < 0) break;
    }
  }
  if (tiny > 0 && warnings) {
    warnings->push_back(std::to_string(tiny) + " hole(s) below 2h mapped to their nearest node");
  }
  return mask;
}

SolveResult solve_perforated(const GridField& f, const std::vector<Hole>& holes,
                             const PerforatedOptions& options) {
  const Grid& grid = f.grid;
  grid.validate();
  SolveResult result;
  const auto mask = hole_mask(grid, holes, options.override_tiny_holes, &result.warnings);
  result.u = GridField(grid);
  CgOptions cg;
  cg.tol = options.tol;
  result.stats = solve_dirichlet(grid, mask, {}, f.values, result.u.values, cg);
  result.dirichlet_nodes = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
  return result;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Clip {
  std::vector<double> lo, hi;
};

void lump_into(const Potential& mu, const Grid& grid, const QuadratureSpec& quad, const Clip& clip,
               std::vector<double>& w);

void lump_density(const DensityPart& part, const Grid& grid, const QuadratureSpec& quad,
                  const Clip& clip, std::vector<double>& w) {
  const int d = grid.dim;
  const double inv_vol = 1.0 / grid.cell_volume();
  parallel_for(grid.size(), [&](std::size_t i0, std::size_t i1) {
    std::vector<double> x(static_cast<std::size_t>(d)), lo(x.size()), hi(x.size());
    const Potential single{part, ""};
    for (std::size_t i = i0; i < i1; ++i) {
      grid.node(i, x);
      bool empty = false;
      bool clipped = false;
      double fraction = 1.0;
      for (int k = 0; k < d; ++k) {
        lo[k] = x[k] - 0.5 * grid.h;
        hi[k] = x[k] + 0.5 * grid.h;
        if (lo[k] < clip.lo[k] || hi[k] > clip.hi[k]) {
          clipped = true;
          lo[k] = std::max(lo[k], clip.lo[k]);
          hi[k] = std::min(hi[k], clip.hi[k]);
          fraction *= (hi[k] - lo[k]) / grid.h;
        }
        empty = empty || !(hi[k] > lo[k]);
      }
      if (empty) continue;
      if (part.constant) {
        // Exact for unclipped dual cells: w_j = c.
        w[i] += *part.constant * (clipped ? fraction : 1.0);
        continue;
      }
      w[i] += integrate(single, lo, hi, quad) * inv_vol;
    }
  });
}

// Graph measures are lumped column by column: each footprint sample lands in
// exactly one dual cell of the column, so no sample is counted twice.
void lump_graph(const GraphPart& part, const Grid& grid, const QuadratureSpec& quad,
                const Clip& clip, std::vector<double>& w) {
  const int d = grid.dim;
  const std::size_t m = static_cast<std::size_t>(d - 1);
  const std::size_t n = grid.n;
  const auto R = static_cast<std::size_t>(quad.surface_refine);
  const double inv_vol = 1.0 / grid.cell_volume();
  const double h = grid.h;
  parallel_for(grid.lines(), [&](std::size_t c0, std::size_t c1) {
    std::vector<double> flo(m), fhi(m), width(m), xp(m), grad(m);
    std::vector<std::size_t> idx(m);
    for (std::size_t col = c0; col < c1; ++col) {
      std::size_t rest = col;
      bool empty = false;
      double sub_area = 1.0;
      for (std::size_t k = m; k-- > 0;) {
        const double xc = grid.coord(rest % n);
        rest /= n;
        flo[k] = std::max(xc - 0.5 * h, clip.lo[k]);
        fhi[k] = std::min(xc + 0.5 * h, clip.hi[k]);
        empty = empty || !(fhi[k] > flo[k]);
        width[k] = (fhi[k] - flo[k]) / static_cast<double>(R);
        sub_area *= width[k];
      }
      if (empty) continue;
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        for (std::size_t k = 0; k < m; ++k) {
          xp[k] = flo[k] + width[k] * (static_cast<double>(idx[k]) + 0.5);
        }
        const double z = part.s(xp);
        if (z > clip.lo[m] && z <= clip.hi[m]) {
          // node t with z in (x_t - h/2, x_t + h/2]
          auto t = static_cast<std::ptrdiff_t>(std::ceil((z - grid.lower) / h - 1.5));
          while (t > -2 && z <= grid.lower + h * (static_cast<double>(t) + 0.5)) --t;
          while (z > grid.lower + h * (static_cast<double>(t) + 1.5)) ++t;
          if (t >= 0 && t < static_cast<std::ptrdiff_t>(n)) {
            part.grad_s(xp, grad);
            double g2 = 0.0;
            for (double gk : grad) g2 += gk * gk;
            const double weight = part.weight(xp);
            if (!std::isfinite(weight) || weight < 0.0 || !std::isfinite(g2)) {
              fail(ErrorKind::Evaluation, "graph weight or slope is not finite and nonnegative");
            }
            w[col * n + static_cast<std::size_t>(t)] +=
                weight * std::sqrt(1.0 + g2) * sub_area * inv_vol;
          }
        }
        std::size_t k = m;
        bool done = true;
        while (k > 0) {
          --k;
          if (++idx[k] < R) {
            done = false;
            break;
          }
          idx[k] = 0;
        }
        if (done) break;
      }
    }
  });
}

void lump_into(const Potential& mu, const Grid& grid, const QuadratureSpec& quad, const Clip& clip,
               std::vector<double>& w) {
  std::visit(
      [&](const auto& part) {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, DensityPart>) {
          lump_density(part, grid, quad, clip, w);
        } else if constexpr (std::is_same_v<T, GraphPart>) {
          lump_graph(part, grid, quad, clip, w);
        } else if constexpr (std::is_same_v<T, SumPart>) {
          for (const auto& p : part.parts) lump_into(p, grid, quad, clip, w);
        } else {
          Clip inner = clip;
          for (std::size_t k = 0; k < inner.lo.size(); ++k) {
            inner.lo[k] = std::max(inner.lo[k], part.box.lo[k]);
            inner.hi[k] = std::min(inner.hi[k], part.box.hi[k]);
          }
          lump_into(*part.inner, grid, quad, inner, w);
        }
      },
      mu.kind);
}

}  // namespace

LumpedMeasure lump_measure(const Potential& mu, const Grid& grid, const QuadratureSpec& quad) {
  grid.validate();
  quad.validate();
  LumpedMeasure lumped{grid, std::vector<double>(grid.size(), 0.0)};
  Clip clip{std::vector<double>(static_cast<std::size_t>(grid.dim), -kInf),
            std::vector<double>(static_cast<std::size_t>(grid.dim), kInf)};
  lump_into(mu, grid, quad, clip, lumped.weights);
  return lumped;
}

SolveResult solve_limit(const GridField& f, const LumpedMeasure& mu, double tol) {
  if (!(f.grid == mu.grid)) fail(ErrorKind::Structural, "solve_limit: measure lumped on another grid");
  for (double w : mu.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::InvalidParameter, "invalid measure: lumped weights must be finite and >= 0");
    }
  }
  SolveResult result;
  result.u = GridField(f.grid);
  CgOptions cg;
  cg.tol = tol;
  result.stats = solve_dirichlet(f.grid, {}, mu.weights, f.values, result.u.values, cg);
  return result;
}

double cutoff(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double s = 2.0 * t - 1.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

const char* cutoff_name() { return "quintic smoothstep on [1/2, 1]"; }

namespace {

// S_d * int_0^R phi((rho - a)/r)^2 H(rho)^2 rho^{d-1} drho for a ball hole.
double radial_l2_sq(double a, double R, int d) {
  const double r = R - a;
  const double Sd = sphere_area(d);
  // [0, a]: V = 1.
  double total = std::pow(a, d) / d;
  // [a, a + r/2]: phi = 1, V = (a/rho)^{d-2}.
  const double b = a + 0.5 * r;
  const double c = std::pow(a, 2 * (d - 2));
  if (d == 4) {
    total += c * std::log(b / a);
  } else {
    total += c * (std::pow(b, 4 - d) - std::pow(a, 4 - d)) / (4 - d);
  }
  // [a + r/2, R]: smooth, composite Gauss.
  const GaussRule& rule = gauss_legendre(10);
  const int pieces = 8;
  const double width = (R - b) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = b + p * width;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double rho = lo + 0.5 * width * (1.0 + rule.nodes[q]);
      const double v = cutoff((rho - a) / r) * std::pow(a / rho, d - 2);
      total += 0.5 * width * rule.weights[q] * v * v * std::pow(rho, d - 1);
    }
  }
  return Sd * total;
}

double corrector_value(const Hole& hole, double R, int d, std::span<const double> x) {
  double rho2 = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = x[k] - hole.center[k];
    rho2 += diff * diff;
  }
  if (rho2 >= R * R) return 0.0;
  const double rho = std::sqrt(rho2);
  const double phi = cutoff((rho - hole.radius) / (R - hole.radius));
  return phi * potential_ball(x, hole.center, hole.radius, d);
}

}  // namespace

double corrector_hole_l2_sq(const Hole& hole, double R, int dim, const Box& domain) {
  if (hole.empty()) return 0.0;
  const double tol = 1e-12 * R;
  double factor = 1.0;
  bool general = false;
  for (int k = 0; k < dim; ++k) {
    const double c = hole.center[k];
    const bool below_ok = c - R >= domain.lo[k] - tol;
    const bool above_ok = c + R <= domain.hi[k] + tol;
    if (c + R <= domain.lo[k] || c - R >= domain.hi[k]) return 0.0;
    if (below_ok && above_ok) continue;
    if ((std::abs(c - domain.lo[k]) <= tol && above_ok) ||
        (std::abs(c - domain.hi[k]) <= tol && below_ok)) {
      factor *= 0.5;
      continue;
    }
    general = true;
  }
  if (!general) return factor * radial_l2_sq(hole.radius, R, dim);

  // Arbitrary clipping: composite tensor Gauss over the clipped bounding box.
  const GaussRule& rule = gauss_legendre(4);
  const std::size_t q = rule.nodes.size();
  const std::size_t subs = 12;
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> lo(d), hi(d), x(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = std::max(hole.center[k] - R, domain.lo[k]);
    hi[k] = std::min(hole.center[k] + R, domain.hi[k]);
  }
  const std::size_t per_axis = subs * q;
  std::vector<std::size_t> idx(d, 0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double width = (hi[k] - lo[k]) / static_cast<double>(subs);
      const double half = 0.5 * width;
      x[k] = lo[k] + width * static_cast<double>(idx[k] / q) + half * (1.0 + rule.nodes[idx[k] % q]);
      w *= half * rule.weights[idx[k] % q];
    }
    const double v = corrector_value(hole, R, dim, x);
    total += w * v * v;
    std::size_t k = d;
    bool done = true;
    while (k > 0) {
      --k;
      if (++idx[k] < per_axis) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
    if (done) break;
  }
  return total;
}

CorrectorResult corrector_field(const std::vector<Hole>& holes, const SeparationParams& seps,
                                const Grid& grid) {
  grid.validate();
  const int d = grid.dim;
  const auto check = disjointness_check(holes, seps);
  if (!check.disjoint) {
    const auto [i, j] = check.overlapping.front();
    fail(ErrorKind::Geometry, "separation balls of holes " + std::to_string(i) + " and " +
                                  std::to_string(j) + " overlap");
  }
  for (const auto& hole : holes) {
    if (!hole.empty() && !(seps.r(hole) > 0.0)) {
      fail(ErrorKind::Geometry, "hole radius " + format_g17(hole.radius) +
                                    " leaves no cutoff annulus (r = R - a <= 0)");
    }
  }

  CorrectorResult result;
  result.w = GridField(grid, 1.0);
  Box domain;
  domain.lo.assign(static_cast<std::size_t>(d), grid.lower);
  domain.hi.assign(static_cast<std::size_t>(d), grid.lower + grid.h * static_cast<double>(grid.n + 1));

  std::vector<double> parts(holes.size(), 0.0);
  std::vector<std::size_t> lo(static_cast<std::size_t>(d)), hi(lo.size()), j(lo.size());
  std::vector<double> x(lo.size());
  for (std::size_t hidx = 0; hidx < holes.size(); ++hidx) {
    const Hole& hole = holes[hidx];
    if (hole.empty()) continue;
    const double R = seps.R(hole);
    parts[hidx] = corrector_hole_l2_sq(hole, R, d, domain);
    bool any = true;
    for (int k = 0; k < d; ++k) {
      const double s = (hole.center[k] - grid.lower) / grid.h - 1.0;
      const double a = std::max(std::ceil(s - R / grid.h), 0.0);
      const double b = std::min(std::floor(s + R / grid.h), static_cast<double>(grid.n) - 1.0);
      if (a > b) {
        any = false;
        break;
      }
      lo[k] = static_cast<std::size_t>(a);
      hi[k] = static_cast<std::size_t>(b);
    }
    if (!any) continue;
    j = lo;
    while (true) {
      std::size_t idx = 0;
      for (int k = 0; k < d; ++k) {
        x[k] = grid.coord(j[k]);
        idx += j[k] * grid.stride(k);
      }
      result.w.values[idx] -= corrector_value(hole, R, d, x);
      int k = d - 1;
      while (k >= 0) {
        if (++j[k] <= hi[k]) break;
        j[k] = lo[k];
        --k;
      }
      if (k < 0) break;
    }
  }
  double total = 0.0;
  for (double p : parts) total += p;
  result.v_l2 = std::sqrt(total);

  GridField v(grid);
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = 1.0 - result.w.values[i];
  result.v_l2_nodal = l2_norm(v);
  return result;
}

double weak_witness(const GridField& u1, const GridField& u2, const GridField& g) {
  if (!(u1.grid == u2.grid) || !(u1.grid == g.grid)) {
    fail(ErrorKind::Structural, "weak_witness: fields live on different grids");
  }
  std::vector<double> diff(u1.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u1.values[i] - u2.values[i];
  return gradient_pairing(u1.grid, diff, g.values);
}

double l2_distance(const GridField& u1, const GridField& u2) {
  if (!(u1.grid == u2.grid)) fail(ErrorKind::Structural, "l2_distance: fields live on different grids");
  std::vector<double> diff(u1.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u1.values[i] - u2.values[i];
  return std::sqrt(l2_inner(u1.grid, diff, diff));
}

double l2_norm(const GridField& u) { return std::sqrt(l2_inner(u.grid, u.values, u.values)); }

}  // namespace perfhom
