#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace perfhom {

using Point = std::vector<double>;
using LatticeIndex = std::vector<std::int64_t>;

/// Axis-aligned open box (lo, hi) in R^d.
struct Box {
  Point lo;
  Point hi;

  static Box unit_cube(int dim);
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains_open(std::span<const double> x) const;
};

/// Lattice tiling of R^d by the cells eps * ((-1,1]^d + i), i in 2Z^d.
struct TilingSpec {
  int dim = 3;
  double epsilon = 1.0;

  /// Throws invalid-parameter unless dim >= 1 and epsilon > 0.
  void validate() const;
};

/// One tile. Faces are half-open: lower faces excluded, upper faces included.
struct Cell {
  LatticeIndex index;  // entries are even
  Point center;        // epsilon * index
  double half_width = 0.0;

  int dim() const { return static_cast<int>(center.size()); }
  double lower(int axis) const;
  double upper(int axis) const;
  double measure() const;
  double diameter() const;
  bool contains(std::span<const double> x) const;
  /// Closure of the cell lies inside the open box.
  bool inside(const Box& box) const;
};

Cell make_cell(const TilingSpec& spec, const LatticeIndex& index);

/// Cells meeting the open box, in lexicographic index order.
std::vector<Cell> cells_intersecting(const TilingSpec& spec, const Box& domain);

/// The unique cell containing x.
Cell cell_of_point(const TilingSpec& spec, std::span<const double> x);

}  // namespace perfhom
