#include "perfhom/inverse.hpp"

#include <cmath>
#include <json.hpp>
#include <ostream>
#include <string>

#include "perfhom/capacity.hpp"
#include "perfhom/error.hpp"
#include "perfhom/format.hpp"

namespace perfhom {

double radius_for_capacity(int d, double mass) {
  if (mass <= 0.0) return 0.0;
  return std::pow(mass / ((d - 2) * sphere_area(d)), 1.0 / (d - 2));
}

namespace {

std::string describe(const LatticeIndex& idx) {
  std::string s = "(";
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "," : "") + std::to_string(idx[k]);
  return s + ")";
}

ConstructionReport build(const Potential& mu, const TilingSpec& spec, const Box& domain,
                         const QuadratureSpec& quad, const HoleTemplate* shape) {
  if (spec.dim < 3) fail(ErrorKind::InvalidParameter, "hole construction needs d >= 3");
  const auto field = cell_average_field(mu, spec, domain, quad);
  ConstructionReport report;
  report.dim = spec.dim;
  report.epsilon = spec.epsilon;
  report.c1 = 1.0;
  const double limit = report.c1 * spec.epsilon;
  for (const auto& cv : field) {
    Hole hole;
    hole.cell_index = cv.cell.index;
    hole.center = cv.cell.center;
    if (shape) {
      hole.shape = *shape;
      hole.scale = cv.mass > 0.0
                       ? std::pow(cv.mass / shape->reference_capacity, 1.0 / (spec.dim - 2))
                       : 0.0;
      hole.radius = hole.scale * shape->enclosing_radius;
    } else {
      hole.radius = radius_for_capacity(spec.dim, cv.mass);
    }
    if (hole.radius >= limit) {
      fail(ErrorKind::Construction,
           "hole in cell " + describe(cv.cell.index) + " has radius " + format_g17(hole.radius) +
               " >= c1*eps = " + format_g17(limit) + "; lower eps or the potential");
    }
    if (cv.mass <= 0.0) report.skipped.push_back(cv.cell.index);
    report.max_radius_ratio = std::max(report.max_radius_ratio, hole.radius / limit);
    report.total_mass += cv.mass;
    report.masses.push_back(cv.mass);
    report.holes.push_back(std::move(hole));
  }
  return report;
}

}  // namespace

ConstructionReport construct_holes(const Potential& mu, const TilingSpec& spec, const Box& domain,
                                   const QuadratureSpec& quad) {
  return build(mu, spec, domain, quad, nullptr);
}

ConstructionReport construct_holes_template(const Potential& mu, const TilingSpec& spec,
                                            const Box& domain, const QuadratureSpec& quad,
                                            const HoleTemplate& shape) {
  if (!(shape.reference_capacity > 0.0)) {
    fail(ErrorKind::InvalidParameter, "template capacity must be positive");
  }
  if (!(shape.enclosing_radius > 0.0)) {
    fail(ErrorKind::InvalidParameter, "template enclosing radius must be positive");
  }
  return build(mu, spec, domain, quad, &shape);
}

void write_construction_json(std::ostream& out, const ConstructionReport& report) {
  nlohmann::ordered_json j;
  j["dim"] = report.dim;
  j["epsilon"] = report.epsilon;
  j["c1"] = report.c1;
  j["max_radius_ratio"] = report.max_radius_ratio;
  j["total_mass"] = report.total_mass;
  j["holes"] = report.holes.size();
  j["empty_holes"] = report.skipped.size();
  out << j.dump(2) << '\n';
}

}  // namespace perfhom
