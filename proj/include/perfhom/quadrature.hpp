#pragma once

#include <vector>

namespace perfhom {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule, n >= 1.
const GaussRule& gauss_legendre(int n);

}  // namespace perfhom
