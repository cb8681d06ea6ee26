#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "perfhom/potential.hpp"

namespace perfhom {

/// Decimal number or a fraction "p/q".
double parse_number(std::string_view text);
/// Comma-separated numbers.
std::vector<double> parse_number_list(std::string_view text);

/// Potentials:
///   zero() | constant(c) | sine_density(A) | plane(z0, w)
///   graph(w, c0, c_1..c_{d-1} [, q_1..q_{d-1}]) | sum(p, p, ...) | sum([p, p, ...])
Potential parse_potential(std::string_view text, int dim);

/// Right-hand sides: zero() | constant(c) | sine(A, k_1..k_d) = A prod sin(k_j pi x_j).
struct Source {
  ScalarFn f;
  std::string description;
};
Source parse_source(std::string_view text, int dim);

}  // namespace perfhom
