#pragma once

#include <iosfwd>
#include <vector>

#include "perfhom/holes.hpp"
#include "perfhom/potential.hpp"

namespace perfhom {

/// Holes realising a target potential, one per cell meeting the domain.
struct ConstructionReport {
  int dim = 3;
  double epsilon = 0.0;
  double c1 = 1.0;
  std::vector<Hole> holes;
  std::vector<double> masses;  // mu(A_i^eps), aligned with holes
  double max_radius_ratio = 0.0;  // max_i a_i / (c1 eps)
  double total_mass = 0.0;
  std::vector<LatticeIndex> skipped;  // zero-mass cells (empty holes)

  SeparationParams separation() const { return {c1, epsilon}; }
};

/// Radius a with (d-2) S_d a^{d-2} = mass.
double radius_for_capacity(int d, double mass);

/// Closed balls centred at the cell centres with cap(K_i) = mu(A_i^eps).
/// Throws a construction error when a ball would leave its cell (a >= eps).
ConstructionReport construct_holes(const Potential& mu, const TilingSpec& spec, const Box& domain,
                                   const QuadratureSpec& quad);

/// Holes congruent to (mu(A_i)/cap(K))^{1/(d-2)} K for a template K; the
/// recorded radius is the scaled enclosing-ball radius of K.
ConstructionReport construct_holes_template(const Potential& mu, const TilingSpec& spec,
                                            const Box& domain, const QuadratureSpec& quad,
                                            const HoleTemplate& shape);

/// JSON header {epsilon, c1, max_radius_ratio, total_mass, dim, holes}.
void write_construction_json(std::ostream& out, const ConstructionReport& report);

}  // namespace perfhom
