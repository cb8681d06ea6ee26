#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "perfhom/error.hpp"
#include "perfhom/grid.hpp"
#include "perfhom/solver.hpp"

using namespace perfhom;

namespace {

constexpr double kPi = std::numbers::pi;

double sines(std::span<const double> x) {
  double p = 1.0;
  for (double v : x) p *= std::sin(kPi * v);
  return p;
}

double max_error(const GridField& u) {
  const GridField exact = GridField::sample(u.grid, sines);
  double e = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) e = std::max(e, std::abs(u.values[i] - exact.values[i]));
  return e;
}

Hole ball(Point c, double r) {
  Hole h;
  h.cell_index = LatticeIndex(c.size(), 0);
  h.center = std::move(c);
  h.radius = r;
  return h;
}

}  // namespace

TEST(Grid, Layout) {
  const Grid g = Grid::unit(3, 7);
  EXPECT_EQ(g.size(), 343u);
  EXPECT_DOUBLE_EQ(g.h, 0.125);
  EXPECT_EQ(g.stride(2), 1u);
  EXPECT_EQ(g.stride(0), 49u);
  std::vector<double> x(3);
  g.node(1 * 49 + 2 * 7 + 3, x);
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], 0.375);
  EXPECT_DOUBLE_EQ(x[2], 0.5);
}

TEST(Grid, BinaryRoundTrip) {
  const GridField f = GridField::sample(Grid::unit(3, 5), sines);
  std::stringstream ss;
  write_field_binary(ss, f);
  const std::string s = ss.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "3 5 0.16666666666666666");
  EXPECT_EQ(s.size(), s.find('\n') + 1 + 125 * 8);
  const GridField back = read_field_binary(ss);
  EXPECT_TRUE(back.grid == f.grid);
  EXPECT_EQ(back.values, f.values);
}

TEST(Grid, InjectionAndInterpolation) {
  const GridField fine = GridField::sample(Grid::unit(3, 15), sines);
  const GridField coarse = inject(fine, Grid::unit(3, 7));
  const GridField direct = GridField::sample(Grid::unit(3, 7), sines);
  EXPECT_EQ(coarse.values, direct.values);
  EXPECT_THROW(inject(fine, Grid::unit(3, 6)), Error);
  const double node[3] = {0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(interpolate(fine, node), 1.0);
  const double edge[3] = {0.0, 0.5, 0.5};
  EXPECT_EQ(interpolate(fine, edge), 0.0);
}

TEST(Grid, LineCsv) {
  const GridField f = GridField::sample(Grid::unit(3, 7), sines);
  const std::vector<double> p0{0, 0.5, 0.5}, p1{1, 0.5, 0.5};
  std::stringstream ss;
  write_line_csv(ss, f, p0, p1, 3);
  std::string header, a, b, c;
  std::getline(ss, header);
  std::getline(ss, a);
  std::getline(ss, b);
  EXPECT_EQ(header, "t,x1,x2,x3,value");
  EXPECT_EQ(b, "0.5,0.5,0.5,0.5,1");
}

// -Delta u = 3 pi^2 prod sin(pi x): second-order convergence of the max error.
TEST(Solver, ManufacturedPoisson) {
  std::vector<double> errs;
  for (std::size_t n : {15u, 31u, 63u}) {
    const Grid g = Grid::unit(3, n);
    const GridField f = GridField::sample(g, [](std::span<const double> x) { return 3 * kPi * kPi * sines(x); });
    const SolveResult r = solve_perforated(f, {});
    EXPECT_LE(r.stats.residual, 1e-8);
    errs.push_back(max_error(r.u));
  }
  for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
    EXPECT_GE(errs[k] / errs[k + 1], 3.5);
    EXPECT_LE(errs[k] / errs[k + 1], 4.5);
  }
}

TEST(Solver, ManufacturedLimitWithConstantPotential) {
  const double m = 40.0;
  std::vector<double> errs;
  for (std::size_t n : {15u, 31u, 63u}) {
    const Grid g = Grid::unit(3, n);
    const GridField f = GridField::sample(g, [&](std::span<const double> x) { return (3 * kPi * kPi + m) * sines(x); });
    const SolveResult r = solve_limit(f, lump_measure(Potential::constant(m), g, {}));
    errs.push_back(max_error(r.u));
  }
  for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
    EXPECT_GE(errs[k] / errs[k + 1], 3.5);
    EXPECT_LE(errs[k] / errs[k + 1], 4.5);
  }
}

TEST(Solver, ZeroPotentialMatchesPlainPoisson) {
  const Grid g = Grid::unit(3, 15);
  const GridField f(g, 1.0);
  const auto a = solve_perforated(f, {});
  const auto b = solve_limit(f, lump_measure(Potential::zero(), g, {}));
  EXPECT_EQ(a.u.values, b.u.values);
}

TEST(Solver, HoleCoveringDomain) {
  const Grid g = Grid::unit(3, 7);
  const auto r = solve_perforated(GridField(g, 1.0), {ball({0.5, 0.5, 0.5}, 1.0)});
  for (double v : r.u.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.dirichlet_nodes, g.size());
}

TEST(Solver, ZeroExtensionAndComparison) {
  const Grid g = Grid::unit(3, 31);
  const GridField f(g, 1.0);
  const std::vector<Hole> holes{ball({0.25, 0.25, 0.25}, 0.1), ball({0.75, 0.5, 0.5}, 0.12)};
  const auto free = solve_perforated(f, {});
  const auto perf = solve_perforated(f, holes);
  const auto mask = hole_mask(g, holes, false, nullptr);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask[i]) EXPECT_EQ(perf.u.values[i], 0.0);
    EXPECT_GE(perf.u.values[i], 0.0);
    EXPECT_LE(perf.u.values[i], free.u.values[i] + 1e-9);
  }
}

TEST(SolverProperty, MonotoneInHoles) {
  const Grid g = Grid::unit(3, 31);
  const GridField f(g, 1.0);
  std::vector<Hole> holes{ball({0.25, 0.25, 0.25}, 0.1)};
  const auto one = solve_perforated(f, holes);
  holes.push_back(ball({0.7, 0.7, 0.3}, 0.1));
  const auto two = solve_perforated(f, holes);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(two.u.values[i], one.u.values[i] + 1e-9);
}

TEST(SolverProperty, RandomNonnegativeWeightsConverge) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  const Grid g = Grid::unit(3, 15);
  for (int t = 0; t < 5; ++t) {
    LumpedMeasure m{g, std::vector<double>(g.size())};
    for (double& w : m.weights) w = u(rng);
    const auto r = solve_limit(GridField(g, 1.0), m);
    EXPECT_LE(r.stats.residual, 1e-8);
    // Doubling the weights lowers the solution nodewise.
    for (double& w : m.weights) w *= 2.0;
    const auto r2 = solve_limit(GridField(g, 1.0), m);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(r2.u.values[i], r.u.values[i] + 1e-10);
  }
}

TEST(Solver, NegativeWeightRejected) {
  const Grid g = Grid::unit(3, 7);
  LumpedMeasure m{g, std::vector<double>(g.size(), 0.0)};
  m.weights[3] = -1.0;
  try {
    solve_limit(GridField(g, 1.0), m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
}

TEST(Solver, UnresolvedHole) {
  const Grid g = Grid::unit(3, 15);  // h = 1/16
  const std::vector<Hole> holes{ball({0.5, 0.5, 0.5}, 0.1)};
  try {
    solve_perforated(GridField(g, 1.0), holes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resolution);
    EXPECT_NE(std::string(e.what()).find("0.0625"), std::string::npos);
  }
  PerforatedOptions o;
  o.override_tiny_holes = true;
  const auto r = solve_perforated(GridField(g, 1.0), holes, o);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_GE(r.dirichlet_nodes, 1u);
}

TEST(Lumping, ConstantAndZero) {
  const Grid g = Grid::unit(3, 9);
  for (double w : lump_measure(Potential::constant(2.5), g, {}).weights) EXPECT_DOUBLE_EQ(w, 2.5);
  for (double w : lump_measure(Potential::zero(), g, {}).weights) EXPECT_EQ(w, 0.0);
}

// Node layer at z = 1/2 (n odd) carries 1/h; total is the area of the
// footprint covered by the dual cells, (1 - h)^2.
TEST(Lumping, PlaneOnNodeLayer) {
  const Grid g = Grid::unit(3, 15);
  const auto m = lump_measure(Potential::plane(0.5, 1.0), g, {});
  std::vector<double> x(3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, x);
    if (x[2] == 0.5) {
      EXPECT_NEAR(m.weights[i], 1.0 / g.h, 1e-12);
    } else {
      EXPECT_EQ(m.weights[i], 0.0);
    }
  }
  EXPECT_NEAR(m.total_mass(), (1 - g.h) * (1 - g.h), 1e-12);
}

TEST(Lumping, TotalMassOfDensity) {
  const Grid g = Grid::unit(3, 15);
  const auto mu = Potential::restrict_to(Potential::constant(3.0), Box::unit_cube(3));
  EXPECT_NEAR(lump_measure(mu, g, {}).total_mass(), 3.0 * std::pow(1 - g.h, 3), 1e-12);
}

TEST(Corrector, CutoffShape) {
  EXPECT_EQ(cutoff(0.0), 1.0);
  EXPECT_EQ(cutoff(0.5), 1.0);
  EXPECT_EQ(cutoff(1.0), 0.0);
  EXPECT_EQ(cutoff(2.0), 0.0);
  EXPECT_DOUBLE_EQ(cutoff(0.75), 0.5);
  for (double t = 0.5; t < 1.0; t += 0.01) EXPECT_LE(cutoff(t + 0.01), cutoff(t) + 1e-15);
}

TEST(Corrector, PlateausAndNorms) {
  const Grid g = Grid::unit(3, 63);
  Hole h = ball({0.5, 0.5, 0.5}, 0.1);
  const SeparationParams s{1.0, 0.25};
  const auto c = corrector_field({h}, s, g);
  std::vector<double> x(3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, x);
    const double r = std::hypot(x[0] - 0.5, x[1] - 0.5, x[2] - 0.5);
    if (r <= 0.1) EXPECT_EQ(c.w.values[i], 0.0);
    if (r > 0.25) EXPECT_EQ(c.w.values[i], 1.0);
  }
  EXPECT_NEAR(c.v_l2_nodal, c.v_l2, 0.03 * c.v_l2);
}

TEST(Corrector, FaceHoleIsHalved) {
  const SeparationParams s{1.0, 0.25};
  const Box dom = Box::unit_cube(3);
  const double inner = corrector_hole_l2_sq(ball({0.5, 0.5, 0.5}, 0.1), 0.25, 3, dom);
  const double face = corrector_hole_l2_sq(ball({0.0, 0.5, 0.5}, 0.1), 0.25, 3, dom);
  const double corner = corrector_hole_l2_sq(ball({0.0, 0.0, 1.0}, 0.1), 0.25, 3, dom);
  EXPECT_NEAR(face, inner / 2, 1e-15);
  EXPECT_NEAR(corner, inner / 8, 1e-15);
  (void)s;
}

TEST(Corrector, OverlapRejected) {
  const Grid g = Grid::unit(3, 15);
  const std::vector<Hole> hs{ball({0.5, 0.5, 0.5}, 0.1), ball({0.6, 0.5, 0.5}, 0.1)};
  EXPECT_THROW(corrector_field(hs, {1.0, 0.25}, g), Error);
}

TEST(Witness, Basics) {
  const Grid g = Grid::unit(3, 15);
  const GridField u = GridField::sample(g, sines);
  const GridField v(g, 0.0);
  EXPECT_EQ(weak_witness(u, u, u), 0.0);
  EXPECT_GT(weak_witness(u, v, u), 0.0);
  EXPECT_EQ(l2_distance(u, u), 0.0);
  // Discrete sine sums are exact: ||u||^2 = (1/2)^3.
  EXPECT_NEAR(l2_norm(u), std::pow(0.5, 1.5), 1e-14);
  GridField twice = u;
  for (double& t : twice.values) t *= 2.0;
  EXPECT_NEAR(l2_distance(twice, u), l2_norm(u), 1e-15);
  EXPECT_DOUBLE_EQ(l2_distance(u, v), l2_distance(v, u));
}
