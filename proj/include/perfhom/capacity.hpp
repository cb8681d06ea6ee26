#pragma once

#include <span>

#include "perfhom/grid.hpp"

namespace perfhom {

enum class CapacityMethod { Exact, Variational, Extrapolated };

/// Ball boundary in the variational solve. NodeMask fixes every node with
/// |x| <= a (staircase, O(h) bias). CutEdge also fixes those nodes but gives
/// each grid edge crossing the sphere the conductance 1/theta, theta h being
/// the distance from the free node to the sphere along the edge (symmetric
/// second-order Dirichlet treatment of Gibou et al., JCP 176, 2002).
enum class BallBoundary { NodeMask, CutEdge };

struct CapacityResult {
  double value = 0.0;
  CapacityMethod method = CapacityMethod::Exact;
  int dim = 3;
  double truncation = 0.0;  // half-width L of the truncation cube (numerical only)
  double grid_h = 0.0;
  BallBoundary boundary = BallBoundary::CutEdge;
  SolveStats stats;
};

const char* to_string(CapacityMethod method);
const char* to_string(BallBoundary boundary);

/// Surface area S_d = 2 pi^{d/2} / Gamma(d/2) of the unit sphere in R^d.
double sphere_area(int d);

/// Newtonian capacity (d-2) S_d a^{d-2} of the closed ball of radius a.
CapacityResult capacity_ball(int d, double a);

/// Equilibrium potential of the ball: 1 on the closed ball, (a/|x-c|)^{d-2} outside.
double potential_ball(std::span<const double> x, std::span<const double> center, double a, int d);

/// Minimum discrete Dirichlet energy over grid functions equal to 1 on the
/// ball and 0 on the boundary of the cube [-L, L]^d (spacing h). This is the
/// relative capacity of the ball in the cube; it decreases towards the
/// Newtonian capacity as L grows.
CapacityResult capacity_variational(int d, double a, double L, double h, double tol = 1e-10,
                                    BallBoundary boundary = BallBoundary::CutEdge);

/// Removes truncation bias from two variational results for the same set via
/// 1/cap_L = 1/cap_inf - beta / L^{d-2}, fitting cap_inf and beta to the pair.
CapacityResult capacity_extrapolate(const CapacityResult& near, const CapacityResult& far);

}  // namespace perfhom
