#include <gtest/gtest.h>

#include <sstream>

#include "perfhom/error.hpp"
#include "perfhom/holes.hpp"

using namespace perfhom;

namespace {
Hole ball(LatticeIndex i, Point c, double r) {
  Hole h;
  h.cell_index = std::move(i);
  h.center = std::move(c);
  h.radius = r;
  return h;
}
}  // namespace

TEST(Holes, EmptyHole) {
  const Hole h = ball({0, 0, 0}, {0, 0, 0}, 0.0);
  EXPECT_TRUE(h.empty());
  EXPECT_TRUE(h.is_ball());
  EXPECT_EQ(h.diameter(), 0.0);
}

TEST(Holes, SeparationRadii) {
  const SeparationParams s{1.0, 0.25};
  const Hole h = ball({0, 0, 0}, {0, 0, 0}, 0.05);
  EXPECT_DOUBLE_EQ(s.R(h), 0.25);
  EXPECT_DOUBLE_EQ(s.r(h), 0.2);
}

TEST(Holes, DisjointLatticeBalls) {
  std::vector<Hole> hs;
  for (int i = 0; i <= 4; i += 2)
    for (int j = 0; j <= 4; j += 2) hs.push_back(ball({i, j, 0}, {0.25 * i, 0.25 * j, 0.0}, 0.1));
  EXPECT_TRUE(disjointness_check(hs, {1.0, 0.25}).ok());
}

TEST(Holes, OverlapDetected) {
  std::vector<Hole> hs{ball({0, 0, 0}, {0, 0, 0}, 0.1), ball({2, 0, 0}, {0.3, 0, 0}, 0.1)};
  const auto rep = disjointness_check(hs, {1.0, 0.25});
  EXPECT_FALSE(rep.disjoint);
  ASSERT_EQ(rep.overlapping.size(), 1u);
  EXPECT_FALSE(rep.ok());
}

TEST(Holes, EscapingBallDetected) {
  std::vector<Hole> hs{ball({0, 0, 0}, {0.1, 0, 0}, 0.01)};
  const auto rep = disjointness_check(hs, {1.0, 0.25});
  EXPECT_FALSE(rep.contained);
  EXPECT_EQ(rep.escaping.size(), 1u);
}

TEST(Holes, CsvRoundTripIsExact) {
  std::vector<Hole> hs{ball({0, 2, -4}, {0.0, 1.0 / 3.0, -2.0 / 3.0}, 1.0 / 7.0),
                       ball({2, 2, 2}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.0)};
  std::stringstream ss;
  write_holes_csv(ss, hs);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "i1,i2,i3,cx1,cx2,cx3,radius");
  const auto back = read_holes_csv(ss);
  ASSERT_EQ(back.size(), hs.size());
  for (std::size_t k = 0; k < hs.size(); ++k) {
    EXPECT_EQ(back[k].cell_index, hs[k].cell_index);
    EXPECT_EQ(back[k].center, hs[k].center);
    EXPECT_EQ(back[k].radius, hs[k].radius);
  }
}

TEST(Holes, MalformedCsv) {
  std::stringstream ss("i1,i2,i3,cx1,cx2,cx3,radius\n0,0,0,0,0\n");
  EXPECT_THROW(read_holes_csv(ss), Error);
}
