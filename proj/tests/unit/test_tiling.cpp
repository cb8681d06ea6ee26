#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "perfhom/error.hpp"
#include "perfhom/tiling.hpp"

using namespace perfhom;

TEST(Tiling, HalfEpsilonUnitCubeHasEightCells) {
  const auto cells = cells_intersecting({3, 0.5}, Box::unit_cube(3));
  ASSERT_EQ(cells.size(), 8u);
  std::set<std::vector<double>> centers;
  for (const auto& c : cells) {
    for (auto i : c.index) EXPECT_TRUE(i == 0 || i == 2);
    centers.insert(c.center);
  }
  EXPECT_EQ(centers.size(), 8u);
  for (const auto& c : centers) {
    for (double x : c) EXPECT_TRUE(x == 0.0 || x == 1.0);
  }
  // Lexicographic order.
  EXPECT_EQ(cells.front().index, (LatticeIndex{0, 0, 0}));
  EXPECT_EQ(cells[1].index, (LatticeIndex{0, 0, 2}));
  EXPECT_EQ(cells.back().index, (LatticeIndex{2, 2, 2}));
}

TEST(Tiling, UnitEpsilonSingleCell) {
  const auto cells = cells_intersecting({3, 1.0}, Box::unit_cube(3));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].index, (LatticeIndex{0, 0, 0}));
}

TEST(Tiling, CellGeometry) {
  const Cell c = make_cell({3, 0.25}, {2, 0, 4});
  EXPECT_DOUBLE_EQ(c.measure(), 0.125);
  EXPECT_DOUBLE_EQ(c.diameter(), 0.5 * std::sqrt(3.0));
  EXPECT_EQ(c.center, (Point{0.5, 0.0, 1.0}));
  EXPECT_TRUE(c.contains(c.center));
  EXPECT_DOUBLE_EQ(c.lower(0), 0.25);
  EXPECT_DOUBLE_EQ(c.upper(0), 0.75);
}

TEST(Tiling, InvalidEpsilon) {
  EXPECT_THROW(cells_intersecting({3, 0.0}, Box::unit_cube(3)), Error);
  EXPECT_THROW(cells_intersecting({3, -1.0}, Box::unit_cube(3)), Error);
  try {
    cells_intersecting({3, 0.0}, Box::unit_cube(3));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
}

TEST(Tiling, HalfOpenFaces) {
  const TilingSpec s{3, 0.5};
  EXPECT_EQ(cell_of_point(s, Point{0, 0, 0}).index, (LatticeIndex{0, 0, 0}));
  EXPECT_EQ(cell_of_point(s, Point{0.5, 0, 0}).index, (LatticeIndex{0, 0, 0}));
  EXPECT_EQ(cell_of_point(s, Point{0.5 + 1e-12, 0, 0}).index, (LatticeIndex{2, 0, 0}));
  EXPECT_EQ(cell_of_point(s, Point{-0.5, 0, 0}).index, (LatticeIndex{-2, 0, 0}));
}

// Every sample point lies in exactly one cell of the intersecting family.
TEST(TilingProperty, PartitionOfWindow) {
  std::mt19937_64 rng(7);
  for (double eps : {0.5, 0.3, 0.125, 0.07}) {
    const TilingSpec s{3, eps};
    const auto cells = cells_intersecting(s, Box::unit_cube(3));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
      Point x{u(rng), u(rng), u(rng)};
      if (t % 10 == 0) x[0] = eps * 3;  // on a face
      int hits = 0;
      for (const auto& c : cells) hits += c.contains(x) ? 1 : 0;
      ASSERT_EQ(hits, 1);
      const Cell own = cell_of_point(s, x);
      EXPECT_TRUE(own.contains(x));
    }
  }
}

TEST(TilingProperty, VolumeBounds) {
  const Box dom = Box::unit_cube(3);
  for (double eps : {0.5, 0.25, 0.2, 0.1, 1.0 / 32}) {
    const auto cells = cells_intersecting({3, eps}, dom);
    std::size_t inside = 0;
    for (const auto& c : cells) inside += c.inside(dom) ? 1 : 0;
    const double m = std::pow(2 * eps, 3);
    EXPECT_LE(m * static_cast<double>(inside), dom.volume() + 1e-12);
    EXPECT_GE(m * static_cast<double>(cells.size()), dom.volume() - 1e-12);
  }
}

TEST(TilingProperty, EachCellOnce) {
  const auto cells = cells_intersecting({4, 0.2}, Box::unit_cube(4));
  std::set<LatticeIndex> seen;
  for (const auto& c : cells) EXPECT_TRUE(seen.insert(c.index).second);
  EXPECT_FALSE(cells.empty());
}
