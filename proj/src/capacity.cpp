#include "perfhom/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "perfhom/error.hpp"
#include "perfhom/format.hpp"

namespace perfhom {

const char* to_string(BallBoundary boundary) {
  return boundary == BallBoundary::NodeMask ? "node-mask" : "cut-edge";
}

const char* to_string(CapacityMethod method) {
  switch (method) {
    case CapacityMethod::Exact: return "exact";
    case CapacityMethod::Variational: return "variational";
    case CapacityMethod::Extrapolated: return "extrapolated";
  }
  return "unknown";
}


double sphere_area(int d) {
  if (d < 2) fail(ErrorKind::InvalidParameter, "sphere_area needs d >= 2, got " + std::to_string(d));
  // S_{d+2} = 2 pi S_d / d from S_2 = 2 pi and S_3 = 4 pi; equal to
  // 2 pi^{d/2} / Gamma(d/2) without the rounding of pow and sqrt.
  double s = (d % 2 == 0) ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  for (int k = (d % 2 == 0) ? 2 : 3; k < d; k += 2) s = 2.0 * std::numbers::pi * s / k;
  return s;
}

CapacityResult capacity_ball(int d, double a) {
  if (d < 3) fail(ErrorKind::InvalidParameter, "Newtonian capacity needs d >= 3");
  if (!(a >= 0.0) || !std::isfinite(a)) fail(ErrorKind::InvalidParameter, "ball radius must be >= 0");
  CapacityResult r;
  r.dim = d;
  r.method = CapacityMethod::Exact;
  r.value = (d - 2) * sphere_area(d) * std::pow(a, d - 2);
  return r;
}

double potential_ball(std::span<const double> x, std::span<const double> center, double a, int d) {
  if (a <= 0.0) return 0.0;
  double dist2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - center[k];
    dist2 += diff * diff;
  }
  if (dist2 <= a * a) return 1.0;
  return std::pow(a / std::sqrt(dist2), d - 2);
}

CapacityResult capacity_variational(int d, double a, double L, double h, double tol,
                                    BallBoundary boundary) {
  if (d < 3) fail(ErrorKind::InvalidParameter, "Newtonian capacity needs d >= 3");
  CapacityResult result;
  result.dim = d;
  result.method = CapacityMethod::Variational;
  result.truncation = L;
  result.grid_h = h;
  result.boundary = boundary;
  if (a == 0.0) return result;
  if (!(a > 0.0) || !(h > 0.0)) fail(ErrorKind::InvalidParameter, "radius and spacing must be positive");
  if (a >= L) {
    fail(ErrorKind::Geometry, "ball radius " + format_g17(a) + " does not fit in truncation " +
                                  format_g17(L));
  }
  if (h >= a / 2.0) {
    fail(ErrorKind::Resolution, "spacing " + format_g17(h) + " does not resolve radius " +
                                    format_g17(a) + " (need h < a/2)");
  }
  const double intervals = 2.0 * L / h;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * rounded || rounded < 2.0) {
    fail(ErrorKind::InvalidParameter, "2L/h must be an integer");
  }

  Grid grid;
  grid.dim = d;
  grid.n = static_cast<std::size_t>(rounded) - 1;
  grid.h = h;
  grid.lower = -L;
  grid.validate();

  const std::size_t N = grid.size();
  std::vector<std::uint8_t> fixed(N, 0);
  std::vector<double> v(N, 0.0), rhs(N, 0.0);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < N; ++i) {
    grid.node(i, x);
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    if (r2 <= a * a) {
      fixed[i] = 1;
      v[i] = 1.0;
    }
  }
  // Cut edges: extra conductance (1/theta - 1)/h^2 towards the value 1.
  std::vector<double> extra;
  if (boundary == BallBoundary::CutEdge) {
    constexpr double kThetaMin = 1e-3;
    extra.assign(N, 0.0);
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < N; ++i) {
      if (fixed[i]) continue;
      grid.node(i, x);
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      if (r2 > (a + h) * (a + h)) continue;
      for (int k = 0; k < d; ++k) {
        for (double s : {-1.0, 1.0}) {
          double n2 = 0.0;
          for (int m = 0; m < d; ++m) {
            const double c = x[m] + (m == k ? s * h : 0.0);
            n2 += c * c;
          }
          if (n2 > a * a) continue;
          const double p = s * x[k];
          const double disc = std::max(p * p - r2 + a * a, 0.0);
          const double theta = std::clamp((-p - std::sqrt(disc)) / h, kThetaMin, 1.0);
          extra[i] += (1.0 / theta - 1.0) * inv_h2;
        }
      }
      rhs[i] = extra[i];
    }
  }
  CgOptions opts;
  opts.tol = tol;
  result.stats = solve_dirichlet(grid, fixed, extra, rhs, v, opts);
  result.value = gradient_pairing(grid, v, v);
  if (!extra.empty()) {
    // Energy of the cut edges beyond their unit-conductance part.
    double add = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (extra[i] != 0.0) add += extra[i] * (1.0 - v[i]) * (1.0 - v[i]);
    }
    result.value += add * std::pow(h, d);
  }
  return result;
}

CapacityResult capacity_extrapolate(const CapacityResult& near, const CapacityResult& far) {
  if (near.dim != far.dim || near.dim < 3) {
    fail(ErrorKind::InvalidParameter, "extrapolation needs two results in the same dimension d >= 3");
  }
  if (!(near.truncation > 0.0) || !(far.truncation >= 2.0 * near.truncation)) {
    fail(ErrorKind::InvalidParameter, "extrapolation needs L2 >= 2 L1 > 0");
  }
  if (!(near.value > 0.0) || !(far.value > 0.0)) {
    fail(ErrorKind::Extrapolation, "extrapolation needs positive capacities");
  }
  if (far.value > near.value) {
    fail(ErrorKind::Extrapolation, "capacity increased with truncation size (" +
                                       format_g17(near.value) + " -> " + format_g17(far.value) + ")");
  }
  const int e = near.dim - 2;
  const double t1 = std::pow(near.truncation, -e);
  const double t2 = std::pow(far.truncation, -e);
  // 1/cap = alpha - beta t; alpha = 1/cap_inf.
  const double beta = (1.0 / far.value - 1.0 / near.value) / (t1 - t2);
  const double alpha = 1.0 / far.value + beta * t2;
  CapacityResult r;
  r.dim = near.dim;
  r.method = CapacityMethod::Extrapolated;
  r.truncation = far.truncation;
  r.grid_h = far.grid_h;
  r.value = 1.0 / alpha;
  return r;
}

}  // namespace perfhom
