#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "perfhom/capacity.hpp"
#include "perfhom/error.hpp"

using namespace perfhom;

// Reference values from 2 pi^{d/2} / Gamma(d/2) evaluated at 30 digits.
TEST(Capacity, SphereAreas) {
  EXPECT_DOUBLE_EQ(sphere_area(2), 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(sphere_area(3), 12.566370614359172954);
  EXPECT_DOUBLE_EQ(sphere_area(4), 19.739208802178717238);
  EXPECT_DOUBLE_EQ(sphere_area(5), 26.318945069571622984);
  EXPECT_DOUBLE_EQ(sphere_area(6), 31.006276680299820175);
}

TEST(Capacity, ExactBall) {
  EXPECT_EQ(capacity_ball(3, 1.0).value, 4 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(capacity_ball(4, 1.0).value, 4 * std::numbers::pi * std::numbers::pi);
  EXPECT_DOUBLE_EQ(capacity_ball(6, 1.0).value, 124.0251067211992807);
  EXPECT_EQ(capacity_ball(3, 0.0).value, 0.0);
  EXPECT_DOUBLE_EQ(capacity_ball(3, 0.5).value, 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(capacity_ball(5, 2.0).value, 8.0 * capacity_ball(5, 1.0).value);
}

TEST(Capacity, InvalidInputs) {
  EXPECT_THROW(capacity_ball(2, 1.0), Error);
  EXPECT_THROW(capacity_ball(3, -1.0), Error);
  EXPECT_THROW(capacity_variational(3, 1.0, 1.0, 0.1), Error);   // a >= L
  EXPECT_THROW(capacity_variational(3, 1.0, 4.0, 0.75), Error);  // h >= a/2
}

TEST(Capacity, BallPotential) {
  const double c[3] = {0, 0, 0};
  const double in[3] = {0.3, 0, 0};
  const double out[3] = {0, 2, 0};
  EXPECT_EQ(potential_ball(in, c, 1.0, 3), 1.0);
  EXPECT_DOUBLE_EQ(potential_ball(out, c, 1.0, 3), 0.5);
  EXPECT_DOUBLE_EQ(potential_ball(out, c, 1.0, 5), 0.125);
}

// Node masking carries an O(h) staircase bias; cut edges converge at second order.
TEST(CapacityProperty, BoundaryTreatmentOrders) {
  std::vector<double> mask, cut;
  for (double h : {0.25, 0.125, 0.0625}) {
    mask.push_back(capacity_variational(3, 1.0, 2.0, h, 1e-10, BallBoundary::NodeMask).value);
    cut.push_back(capacity_variational(3, 1.0, 2.0, h, 1e-10, BallBoundary::CutEdge).value);
  }
  const double rm = (mask[1] - mask[0]) / (mask[2] - mask[1]);
  const double rc = (cut[1] - cut[0]) / (cut[2] - cut[1]);
  EXPECT_GT(rm, 1.5);
  EXPECT_LT(rm, 2.6);
  EXPECT_GT(rc, 3.0);
  // Both approach the continuum value from below.
  EXPECT_LT(mask[2], cut[2]);
}

TEST(CapacityProperty, SubsetMonotone) {
  double prev = 0.0;
  for (double a : {0.5, 0.75, 1.0, 1.25}) {
    const double v = capacity_variational(3, a, 3.0, 0.125).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_LT(capacity_ball(3, 0.5).value, capacity_ball(3, 0.6).value);
}

TEST(Capacity, ZeroRadiusVariational) {
  EXPECT_EQ(capacity_variational(3, 0.0, 2.0, 0.25).value, 0.0);
}

// Relative capacity in a box exceeds the Newtonian value and decreases with L.
TEST(CapacityProperty, VariationalDecreasesWithTruncation) {
  const auto c2 = capacity_variational(3, 1.0, 2.0, 0.25);
  const auto c4 = capacity_variational(3, 1.0, 4.0, 0.25);
  EXPECT_GT(c2.value, c4.value);
  EXPECT_GT(c4.value, 4 * std::numbers::pi * 0.9);
  EXPECT_EQ(c4.method, CapacityMethod::Variational);
}

TEST(Capacity, ExtrapolationRecoversLaw) {
  // Synthetic pair following 1/cap_L = 1/c - beta / L exactly.
  const double c = 4 * std::numbers::pi, beta = 0.05;
  CapacityResult a, b;
  a.method = b.method = CapacityMethod::Variational;
  a.dim = b.dim = 3;
  a.truncation = 5.0;
  b.truncation = 10.0;
  a.value = 1.0 / (1.0 / c - beta / 5.0);
  b.value = 1.0 / (1.0 / c - beta / 10.0);
  const auto r = capacity_extrapolate(a, b);
  EXPECT_NEAR(r.value, c, 1e-12 * c);
  EXPECT_EQ(r.method, CapacityMethod::Extrapolated);
}

TEST(Capacity, ExtrapolationEqualInputs) {
  CapacityResult a, b;
  a.dim = b.dim = 3;
  a.truncation = 5.0;
  b.truncation = 10.0;
  a.value = b.value = 12.0;
  EXPECT_DOUBLE_EQ(capacity_extrapolate(a, b).value, 12.0);
}

TEST(Capacity, ExtrapolationRejectsIncrease) {
  CapacityResult a, b;
  a.dim = b.dim = 3;
  a.truncation = 5.0;
  b.truncation = 10.0;
  a.value = 12.0;
  b.value = 13.0;
  try {
    capacity_extrapolate(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Extrapolation);
  }
}
