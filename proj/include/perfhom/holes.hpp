#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perfhom/tiling.hpp"

namespace perfhom {

/// Reference shape K for template-scaled holes; only "ball" is solvable.
struct HoleTemplate {
  std::string shape_id = "ball";
  double reference_capacity = 0.0;
  double enclosing_radius = 1.0;  // radius of the minimal ball around K
};

/// Hole K_i: the closed ball B(center, radius), or a scaled copy of a
/// template enclosed by that ball. radius == 0 is the empty hole.
struct Hole {
  LatticeIndex cell_index;
  Point center;
  double radius = 0.0;
  std::optional<HoleTemplate> shape;  // nullopt: plain ball
  double scale = 1.0;                 // template scale factor

  bool empty() const { return radius <= 0.0; }
  bool is_ball() const { return !shape || shape->shape_id == "ball"; }
  /// Diameter of the closed ball (Jung: radius <= diam <= 2 radius).
  double diameter() const { return 2.0 * radius; }
};

/// Separation balls B(x_i, R_i) with R_i = c1 * epsilon for every hole.
struct SeparationParams {
  double c1 = 1.0;
  double epsilon = 1.0;

  double R(const Hole&) const { return c1 * epsilon; }
  double r(const Hole& h) const { return R(h) - h.radius; }
};

struct DisjointnessReport {
  bool disjoint = true;   // separation balls pairwise disjoint
  bool contained = true;  // B(x_i, c1 eps) inside the owning cell
  std::vector<std::pair<std::size_t, std::size_t>> overlapping;
  std::vector<std::size_t> escaping;

  bool ok() const { return disjoint && contained; }
};

DisjointnessReport disjointness_check(const std::vector<Hole>& holes,
                                      const SeparationParams& seps);

/// CSV with header i1..id, cx1..cxd, radius; 17 significant digits.
void write_holes_csv(std::ostream& out, const std::vector<Hole>& holes);
std::vector<Hole> read_holes_csv(std::istream& in);

}  // namespace perfhom
