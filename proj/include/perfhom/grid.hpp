#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "perfhom/tiling.hpp"

namespace perfhom {

/// Uniform tensor grid of n^d interior nodes on the cube (lower, lower + (n+1)h)^d.
/// Node j (per axis, 0-based) sits at lower + h (j + 1); the boundary carries zero.
struct Grid {
  int dim = 3;
  std::size_t n = 0;
  double h = 0.0;
  double lower = 0.0;

  /// Grid on (0,1)^d with h = 1/(n+1).
  static Grid unit(int dim, std::size_t n);

  std::size_t size() const;
  std::size_t lines() const { return size() / n; }
  std::size_t stride(int axis) const;
  double coord(std::size_t j) const { return lower + h * static_cast<double>(j + 1); }
  double cell_volume() const;
  void node(std::size_t linear, std::span<double> x) const;
  void validate() const;
};

bool operator==(const Grid& a, const Grid& b);

/// Values at interior nodes, lexicographic order with the last axis fastest.
struct GridField {
  Grid grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const Grid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  static GridField sample(const Grid& g, const std::function<double(std::span<const double>)>& f);
};

struct SolveStats {
  std::size_t iterations = 0;
  double residual = 0.0;  // relative, ||b - A x|| / ||b||
  double wall_seconds = 0.0;
};

struct CgOptions {
  double tol = 1e-8;
  std::size_t max_iterations = 0;  // 0: chosen from the grid size
};

/// Solves (-Delta_h + diag(weights)) x = rhs on the free nodes with
/// Jacobi-preconditioned conjugate gradients. Nodes flagged in `fixed` keep
/// the value they have in `x` on entry; the outer boundary is zero. `fixed`
/// and `weights` may be empty.
SolveStats solve_dirichlet(const Grid& grid, std::span<const std::uint8_t> fixed,
                           std::span<const double> weights, std::span<const double> rhs,
                           std::span<double> x, const CgOptions& options);

/// y = (-Delta_h + diag(weights)) x with zero outer boundary, no masking.
void apply_operator(const Grid& grid, std::span<const double> weights,
                    std::span<const double> x, std::span<double> y);

/// Sum over all grid edges (boundary edges included) of forward differences
/// D u . D g, times h^d.
double gradient_pairing(const Grid& grid, std::span<const double> u,
                        std::span<const double> g);

/// Sum u_j g_j h^d.
double l2_inner(const Grid& grid, std::span<const double> u, std::span<const double> g);

/// Restriction by nodal injection from a nested finer grid ((n_f + 1) = 2^k (n_c + 1)).
GridField inject(const GridField& fine, const Grid& coarse);

/// Multilinear interpolation at an arbitrary point (zero outside / on the boundary).
double interpolate(const GridField& field, std::span<const double> x);

/// Binary layout: text line "d n h\n", then n^d little-endian float64 values.
void write_field_binary(std::ostream& out, const GridField& field);
GridField read_field_binary(std::istream& in);

/// CSV "t,x1..xd,value" sampled at `count` equispaced points from p0 to p1.
void write_line_csv(std::ostream& out, const GridField& field, std::span<const double> p0,
                    std::span<const double> p1, std::size_t count);

}  // namespace perfhom
