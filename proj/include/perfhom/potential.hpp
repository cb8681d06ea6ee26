#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "perfhom/tiling.hpp"

namespace perfhom {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

struct Potential;

/// Lebesgue density f >= 0; `constant` short-circuits quadrature when set.
struct DensityPart {
  ScalarFn f;
  double integrability = std::numeric_limits<double>::infinity();  // p with f in L^p_loc
  std::optional<double> constant;
};

/// weight * surface measure of the graph x_d = s(x'), x' in R^{d-1}.
struct GraphPart {
  ScalarFn s;
  GradientFn grad_s;
  ScalarFn weight;
  double lipschitz = 0.0;     // sup |grad s|
  double weight_bound = 0.0;  // sup weight
};

struct SumPart {
  std::vector<Potential> parts;
};

/// The inner measure restricted to an open box.
struct RestrictedPart {
  std::shared_ptr<const Potential> inner;
  Box box;
};

/// Nonnegative Borel measure on R^d built from densities and weighted graph
/// surface measures.
struct Potential {
  std::variant<DensityPart, GraphPart, SumPart, RestrictedPart> kind;
  std::string description;

  static Potential zero();
  static Potential constant(double c);
  /// amplitude * (1 + prod_k sin(pi x_k)).
  static Potential sine_density(double amplitude);
  static Potential density(ScalarFn f, std::string description, double integrability);
  /// weight * delta of the hyperplane x_d = z0.
  static Potential plane(double z0, double weight);
  /// weight * delta of the graph s(x') = c0 + sum_k c_k x'_k + sum_k q_k x'_k^2.
  static Potential graph(double weight, double c0, std::vector<double> linear,
                         std::vector<double> quadratic);
  static Potential graph(ScalarFn s, GradientFn grad_s, ScalarFn weight, double lipschitz,
                         double weight_bound, std::string description);
  static Potential sum(std::vector<Potential> parts);
  static Potential restrict_to(Potential inner, Box box);

  /// True when the measure has a pointwise density (no surface parts).
  bool absolutely_continuous() const;
  /// Pointwise density; throws evaluation error when a surface part is present.
  double density_at(std::span<const double> x) const;
};

struct QuadratureSpec {
  int volume_order = 4;     // Gauss points per axis per box
  int surface_refine = 16;  // footprint subdivisions per axis

  void validate() const;
};

/// Integral of g (1 when empty) against mu over the half-open box (lo, hi].
double integrate(const Potential& mu, std::span<const double> lo, std::span<const double> hi,
                 const QuadratureSpec& quad, const ScalarFn& g = {});

/// mu(A_i^eps).
double cell_mass(const Potential& mu, const Cell& cell, const QuadratureSpec& quad);

struct CellValue {
  Cell cell;
  double mass = 0.0;
  double value = 0.0;  // mass / |cell|
};

/// Piecewise-constant field sum_i mu(A_i)/|A_i| 1_{A_i} over the cells meeting the domain.
std::vector<CellValue> cell_average_field(const Potential& mu, const TilingSpec& spec,
                                          const Box& domain, const QuadratureSpec& quad);

/// L^p(domain) distance between a cell-average field and an absolutely
/// continuous mu, by tensor Gauss quadrature on every cell/domain overlap.
double lp_distance(const std::vector<CellValue>& field, const Potential& mu, const Box& domain,
                   double p, const QuadratureSpec& quad, int subdivisions = 2);

struct ScalingFit {
  std::vector<double> epsilon;
  std::vector<double> max_mass;
  double slope = 0.0;
  bool degenerate = false;  // all masses zero: no slope
};

/// max_i mu(A_i^eps) over the cells meeting the domain, and the least-squares
/// log-log slope against eps.
ScalingFit max_cell_mass_scaling(const Potential& mu, int dim, const Box& domain,
                                 const std::vector<double>& eps_list, const QuadratureSpec& quad);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace perfhom
