#include "perfhom/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "perfhom/error.hpp"
#include "perfhom/format.hpp"
#include "perfhom/parallel.hpp"
#include "perfhom/quadrature.hpp"

namespace perfhom {

Potential Potential::zero() { return Potential{SumPart{}, "zero()"}; }

Potential Potential::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    fail(ErrorKind::InvalidParameter, "constant potential must be finite and >= 0");
  }
  DensityPart part;
  part.f = [c](std::span<const double>) { return c; };
  part.constant = c;
  return Potential{std::move(part), "constant(" + format_shortest(c) + ")"};
}

Potential Potential::sine_density(double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    fail(ErrorKind::InvalidParameter, "sine_density amplitude must be finite and >= 0");
  }
  DensityPart part;
  part.f = [amplitude](std::span<const double> x) {
    double prod = 1.0;
    for (double xk : x) prod *= std::sin(std::numbers::pi * xk);
    return amplitude * (1.0 + prod);
  };
  return Potential{std::move(part), "sine_density(" + format_shortest(amplitude) + ")"};
}

Potential Potential::density(ScalarFn f, std::string description, double integrability) {
  DensityPart part;
  part.f = std::move(f);
  part.integrability = integrability;
  return Potential{std::move(part), std::move(description)};
}

Potential Potential::plane(double z0, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    fail(ErrorKind::InvalidParameter, "plane weight must be finite and >= 0");
  }
  GraphPart part;
  part.s = [z0](std::span<const double>) { return z0; };
  part.grad_s = [](std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
  };
  part.weight = [weight](std::span<const double>) { return weight; };
  part.lipschitz = 0.0;
  part.weight_bound = weight;
  return Potential{std::move(part),
                   "plane(" + format_shortest(z0) + ", " + format_shortest(weight) + ")"};
}

Potential Potential::graph(double weight, double c0, std::vector<double> linear,
                           std::vector<double> quadratic) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    fail(ErrorKind::InvalidParameter, "graph weight must be finite and >= 0");
  }
  if (!quadratic.empty() && quadratic.size() != linear.size()) {
    fail(ErrorKind::InvalidParameter, "graph: quadratic coefficients must match linear ones");
  }
  quadratic.resize(linear.size(), 0.0);
  double lip2 = 0.0;  // on the unit cube footprint
  for (std::size_t k = 0; k < linear.size(); ++k) {
    const double bound = std::max(std::abs(linear[k]), std::abs(linear[k] + 2.0 * quadratic[k]));
    lip2 += bound * bound;
  }
  std::string desc = "graph(" + format_shortest(weight) + ", " + format_shortest(c0);
  for (double c : linear) desc += ", " + format_shortest(c);
  for (double q : quadratic) desc += ", " + format_shortest(q);
  desc += ")";
  GraphPart part;
  part.s = [c0, linear, quadratic](std::span<const double> xp) {
    double v = c0;
    for (std::size_t k = 0; k < linear.size(); ++k) v += linear[k] * xp[k] + quadratic[k] * xp[k] * xp[k];
    return v;
  };
  part.grad_s = [linear, quadratic](std::span<const double> xp, std::span<double> g) {
    for (std::size_t k = 0; k < linear.size(); ++k) g[k] = linear[k] + 2.0 * quadratic[k] * xp[k];
  };
  part.weight = [weight](std::span<const double>) { return weight; };
  part.lipschitz = std::sqrt(lip2);
  part.weight_bound = weight;
  return Potential{std::move(part), std::move(desc)};
}

Potential Potential::graph(ScalarFn s, GradientFn grad_s, ScalarFn weight, double lipschitz,
                           double weight_bound, std::string description) {
  GraphPart part{std::move(s), std::move(grad_s), std::move(weight), lipschitz, weight_bound};
  return Potential{std::move(part), std::move(description)};
}

Potential Potential::sum(std::vector<Potential> parts) {
  std::string desc = "sum(";
  for (std::size_t i = 0; i < parts.size(); ++i) desc += (i ? ", " : "") + parts[i].description;
  desc += ")";
  return Potential{SumPart{std::move(parts)}, std::move(desc)};
}

Potential Potential::restrict_to(Potential inner, Box box) {
  std::string desc = "restrict(" + inner.description + ")";
  return Potential{RestrictedPart{std::make_shared<const Potential>(std::move(inner)), std::move(box)},
                   std::move(desc)};
}

bool Potential::absolutely_continuous() const {
  return std::visit(
      [](const auto& part) -> bool {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, DensityPart>) {
          return true;
        } else if constexpr (std::is_same_v<T, GraphPart>) {
          return false;
        } else if constexpr (std::is_same_v<T, SumPart>) {
          return std::all_of(part.parts.begin(), part.parts.end(),
                             [](const Potential& p) { return p.absolutely_continuous(); });
        } else {
          return part.inner->absolutely_continuous();
        }
      },
      kind);
}

double Potential::density_at(std::span<const double> x) const {
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, DensityPart>) {
          return part.f(x);
        } else if constexpr (std::is_same_v<T, GraphPart>) {
          fail(ErrorKind::Evaluation, "surface measure has no pointwise density");
        } else if constexpr (std::is_same_v<T, SumPart>) {
          double v = 0.0;
          for (const auto& p : part.parts) v += p.density_at(x);
          return v;
        } else {
          return part.box.contains_open(x) ? part.inner->density_at(x) : 0.0;
        }
      },
      kind);
}

void QuadratureSpec::validate() const {
  if (volume_order < 1 || surface_refine < 1) {
    fail(ErrorKind::InvalidParameter, "quadrature orders must be >= 1");
  }
}

namespace {

double integrate_density(const DensityPart& part, std::span<const double> lo,
                         std::span<const double> hi, const QuadratureSpec& quad, const ScalarFn& g) {
  const std::size_t d = lo.size();
  if (part.constant && !g) {
    double vol = 1.0;
    for (std::size_t k = 0; k < d; ++k) vol *= hi[k] - lo[k];
    return *part.constant * vol;
  }
  const GaussRule& rule = gauss_legendre(quad.volume_order);
  const std::size_t q = rule.nodes.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double half = 0.5 * (hi[k] - lo[k]);
      x[k] = lo[k] + half * (1.0 + rule.nodes[idx[k]]);
      w *= half * rule.weights[idx[k]];
    }
    const double f = part.f(x);
    if (!std::isfinite(f) || f < 0.0) {
      fail(ErrorKind::Evaluation, "density is not a finite nonnegative value at a quadrature point");
    }
    total += w * f * (g ? g(x) : 1.0);
    std::size_t k = d;
    bool done = true;
    while (k > 0) {
      --k;
      if (++idx[k] < q) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
    if (done) return total;
  }
}

double integrate_graph(const GraphPart& part, std::span<const double> lo,
                       std::span<const double> hi, const QuadratureSpec& quad, const ScalarFn& g) {
  const std::size_t d = lo.size();
  const std::size_t m = d - 1;
  const auto R = static_cast<std::size_t>(quad.surface_refine);
  std::vector<double> width(m);
  double sub_area = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    width[k] = (hi[k] - lo[k]) / static_cast<double>(R);
    sub_area *= width[k];
  }
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> xp(m), grad(m), x(d);
  double total = 0.0;
  while (true) {
    for (std::size_t k = 0; k < m; ++k) xp[k] = lo[k] + width[k] * (static_cast<double>(idx[k]) + 0.5);
    const double z = part.s(xp);
    if (z > lo[m] && z <= hi[m]) {
      part.grad_s(xp, grad);
      double g2 = 0.0;
      for (double gk : grad) g2 += gk * gk;
      const double w = part.weight(xp);
      if (!std::isfinite(w) || w < 0.0 || !std::isfinite(g2)) {
        fail(ErrorKind::Evaluation, "graph weight or slope is not finite and nonnegative");
      }
      double gv = 1.0;
      if (g) {
        std::copy(xp.begin(), xp.end(), x.begin());
        x[m] = z;
        gv = g(x);
      }
      total += w * std::sqrt(1.0 + g2) * sub_area * gv;
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
    if (done) return total;
  }
}

}  // namespace

double integrate(const Potential& mu, std::span<const double> lo, std::span<const double> hi,
                 const QuadratureSpec& quad, const ScalarFn& g) {
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(hi[k] > lo[k])) return 0.0;
  }
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, DensityPart>) {
          return integrate_density(part, lo, hi, quad, g);
        } else if constexpr (std::is_same_v<T, GraphPart>) {
          return integrate_graph(part, lo, hi, quad, g);
        } else if constexpr (std::is_same_v<T, SumPart>) {
          double v = 0.0;
          for (const auto& p : part.parts) v += integrate(p, lo, hi, quad, g);
          return v;
        } else {
          std::vector<double> clo(lo.begin(), lo.end()), chi(hi.begin(), hi.end());
          for (std::size_t k = 0; k < clo.size(); ++k) {
            clo[k] = std::max(clo[k], part.box.lo[k]);
            chi[k] = std::min(chi[k], part.box.hi[k]);
          }
          return integrate(*part.inner, clo, chi, quad, g);
        }
      },
      mu.kind);
}

double cell_mass(const Potential& mu, const Cell& cell, const QuadratureSpec& quad) {
  quad.validate();
  std::vector<double> lo(cell.center.size()), hi(cell.center.size());
  for (int k = 0; k < cell.dim(); ++k) {
    lo[k] = cell.lower(k);
    hi[k] = cell.upper(k);
  }
  return integrate(mu, lo, hi, quad);
}

std::vector<CellValue> cell_average_field(const Potential& mu, const TilingSpec& spec,
                                          const Box& domain, const QuadratureSpec& quad) {
  auto cells = cells_intersecting(spec, domain);
  std::vector<CellValue> field(cells.size());
  parallel_for(cells.size(), [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      field[i].cell = cells[i];
      field[i].mass = cell_mass(mu, cells[i], quad);
      field[i].value = field[i].mass / cells[i].measure();
    }
  });
  return field;
}

double lp_distance(const std::vector<CellValue>& field, const Potential& mu, const Box& domain,
                   double p, const QuadratureSpec& quad, int subdivisions) {
  if (!(p >= 1.0)) fail(ErrorKind::InvalidParameter, "lp_distance needs p >= 1");
  if (!mu.absolutely_continuous()) {
    fail(ErrorKind::InvalidParameter, "lp_distance needs an absolutely continuous potential");
  }
  const GaussRule& rule = gauss_legendre(quad.volume_order);
  const std::size_t q = rule.nodes.size();
  const auto s = static_cast<std::size_t>(std::max(1, subdivisions));
  std::vector<double> parts(field.size(), 0.0);
  parallel_for(field.size(), [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const Cell& cell = field[i].cell;
      const std::size_t d = cell.center.size();
      std::vector<double> lo(d), hi(d);
      bool empty = false;
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = std::max(cell.lower(static_cast<int>(k)), domain.lo[k]);
        hi[k] = std::min(cell.upper(static_cast<int>(k)), domain.hi[k]);
        empty = empty || !(hi[k] > lo[k]);
      }
      if (empty) continue;
      // Tensor product over s^d sub-boxes, q^d Gauss points each.
      const std::size_t per_axis = s * q;
      std::vector<std::size_t> idx(d, 0);
      std::vector<double> x(d);
      double acc = 0.0;
      while (true) {
        double w = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
          const std::size_t sub = idx[k] / q, node = idx[k] % q;
          const double width = (hi[k] - lo[k]) / static_cast<double>(s);
          const double half = 0.5 * width;
          x[k] = lo[k] + width * static_cast<double>(sub) + half * (1.0 + rule.nodes[node]);
          w *= half * rule.weights[node];
        }
        acc += w * std::pow(std::abs(field[i].value - mu.density_at(x)), p);
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
      parts[i] = acc;
    }
  });
  double total = 0.0;
  for (double v : parts) total += v;
  return std::pow(total, 1.0 / p);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorKind::InsufficientData, "slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) fail(ErrorKind::InsufficientData, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

ScalingFit max_cell_mass_scaling(const Potential& mu, int dim, const Box& domain,
                                 const std::vector<double>& eps_list, const QuadratureSpec& quad) {
  if (eps_list.size() < 3) {
    fail(ErrorKind::InvalidParameter, "scaling fit needs at least three values of epsilon");
  }
  ScalingFit fit;
  std::vector<double> xs, ys;
  for (double eps : eps_list) {
    const TilingSpec spec{dim, eps};
    double best = 0.0;
    for (const auto& cv : cell_average_field(mu, spec, domain, quad)) best = std::max(best, cv.mass);
    fit.epsilon.push_back(eps);
    fit.max_mass.push_back(best);
    if (best > 0.0) {
      xs.push_back(eps);
      ys.push_back(best);
    }
  }
  if (xs.size() < 2) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = loglog_slope(xs, ys);
  return fit;
}

}  // namespace perfhom
