#pragma once

#include <string>
#include <vector>

#include "perfhom/grid.hpp"
#include "perfhom/holes.hpp"
#include "perfhom/potential.hpp"

namespace perfhom {

/// Node weights w_j = mu(V_j) / h^d over the half-open dual cubes V_j.
struct LumpedMeasure {
  Grid grid;
  std::vector<double> weights;

  double total_mass() const;
};

struct SolveResult {
  GridField u;
  SolveStats stats;
  std::size_t dirichlet_nodes = 0;
  std::vector<std::string> warnings;
};

struct PerforatedOptions {
  double tol = 1e-8;
  /// Map holes with radius < 2h to their nearest node instead of failing.
  bool override_tiny_holes = false;
};

/// Dirichlet flags for nodes inside some closed hole ball. Enforces the
/// a >= 2h resolution rule unless `override_tiny_holes` is set.
std::vector<std::uint8_t> hole_mask(const Grid& grid, const std::vector<Hole>& holes,
                                    bool override_tiny_holes, std::vector<std::string>* warnings);

/// -Delta u = f in the grid domain minus the holes, u = 0 on holes and boundary.
SolveResult solve_perforated(const GridField& f, const std::vector<Hole>& holes,
                             const PerforatedOptions& options = {});

LumpedMeasure lump_measure(const Potential& mu, const Grid& grid, const QuadratureSpec& quad);

/// (-Delta + mu) u = f with the lumped measure on the diagonal.
SolveResult solve_limit(const GridField& f, const LumpedMeasure& mu, double tol = 1e-8);

/// C^2 cutoff: 1 for t <= 1/2, 0 for t >= 1, quintic smoothstep between.
double cutoff(double t);
const char* cutoff_name();

struct CorrectorResult {
  GridField w;            // 1 - sum_i phi_i H_i at the nodes
  double v_l2 = 0.0;      // ||V||_{L^2(domain)}, V = 1 - w, by radial quadrature per hole
  double v_l2_nodal = 0.0;  // the same norm from nodal values (sum V_j^2 h^d)^{1/2}
};

/// Corrector w = 1 - sum_i phi((|x - x_i| - a_i)/r_i) H_i(x) on the grid.
/// Throws a geometry error when separation balls overlap or r_i <= 0.
CorrectorResult corrector_field(const std::vector<Hole>& holes, const SeparationParams& seps,
                                const Grid& grid);

/// Squared L^2 norm of phi_i H_i over B(x_i, R_i) clipped to the box.
double corrector_hole_l2_sq(const Hole& hole, double R, int dim, const Box& domain);

/// Discrete H^1_0 pairing sum D(u1 - u2) . D g h^d with forward differences.
double weak_witness(const GridField& u1, const GridField& u2, const GridField& g);

double l2_distance(const GridField& u1, const GridField& u2);
double l2_norm(const GridField& u);

}  // namespace perfhom
