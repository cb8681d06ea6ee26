#pragma once

#include <vector>

#include "perfhom/grid.hpp"
#include "perfhom/holes.hpp"
#include "perfhom/potential.hpp"

namespace perfhom {

/// Separation and capacity quantities of a hole family at one epsilon.
/// Sums run over the cells meeting the domain.
struct AssumptionReport {
  int dim = 3;
  double epsilon = 0.0;
  double max_R = 0.0;         // sup_i R_i
  double sup_a_over_R = 0.0;  // sup_i a_i / R_i
  double sum_A2 = 0.0;        // sum_i a_i^{2(d-2)} R_i^{2-d}
  double sup_A3 = 0.0;        // sup_i |A_i| R_i^{-d}
  double sum_A4 = 0.0;        // sum_i a_i^{d-2} diam A_i
  double sum_A6 = 0.0;        // sum_i a_i^{d-2}
  double diam_over_R = 0.0;   // sup_i diam A_i / R_i
  std::size_t cells = 0;
  std::size_t nonempty_holes = 0;
  std::size_t boundary_cells = 0;     // cells not contained in the domain
  double boundary_sum_A6 = 0.0;       // part of sum_A6 from boundary cells
};

/// `holes[i]` must belong to `cells[i]`; throws a structural error otherwise.
AssumptionReport assumption_quantities(const std::vector<Hole>& holes, const SeparationParams& seps,
                                       const std::vector<Cell>& cells, const Box& domain);

/// cap(K) for a ball or template-scaled hole.
double hole_capacity(const Hole& hole, int dim);

/// Discrete H^{-1} norm: solve -Delta_h phi = nu with zero boundary values,
/// return sqrt(sum nu_j phi_j h^d).
double hminus1_norm(const GridField& nu, double tol = 1e-10);

/// Nodal samples of sum_i cap(K_i)/|A_i| 1_{A_i}.
GridField capacity_density_field(const std::vector<Hole>& holes, const TilingSpec& spec,
                                 const Grid& grid);

/// ||capacity density - lumped mu||_{H^{-1}} on the grid.
double ldc_deviation(const std::vector<Hole>& holes, const Potential& mu, const TilingSpec& spec,
                     const Grid& grid, const QuadratureSpec& quad, double tol = 1e-10);

/// Smooth bump exp(1 - 1/(1 - |x-c|^2/r^2)) supported in the closed ball B(c, r).
struct BumpFunction {
  Point center;
  double radius = 0.0;

  double operator()(std::span<const double> x) const;
  /// Upper bound on the Lipschitz constant.
  double lipschitz() const;
  /// Throws invalid-parameter unless the support lies inside the open box.
  void require_inside(const Box& domain) const;
};

/// <nu, g> for a nodal density on the grid.
double dprime_pairing(const GridField& nu, const BumpFunction& g);
/// <mu, g> by quadrature over `subdivisions`^d boxes of the domain.
double dprime_pairing(const Potential& mu, const BumpFunction& g, const Box& domain,
                      const QuadratureSpec& quad, int subdivisions = 16);
/// <sum_i cap(K_i)/|A_i| 1_{A_i}, g> by cellwise quadrature.
double capacity_density_pairing(const std::vector<Hole>& holes, const std::vector<Cell>& cells,
                                const BumpFunction& g, const Box& domain, const QuadratureSpec& quad);
/// <sum_i cap(K_i)/|K_i| 1_{K_i}, g> with a degree-3 ball cubature per hole.
double hole_density_pairing(const std::vector<Hole>& holes, const BumpFunction& g, const Box& domain);

}  // namespace perfhom
