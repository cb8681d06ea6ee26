#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "perfhom/error.hpp"
#include "perfhom/harness.hpp"

using namespace perfhom;

namespace {

StudyConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_study_config(in);
}

StudyReport synthetic(std::vector<double> values) {
  StudyReport r;
  r.columns = {"epsilon", "x"};
  double eps = 0.5;
  for (double v : values) {
    r.rows.push_back({eps, v});
    eps /= 2;
  }
  return r;
}

const char* kZero = R"([study]
dim = 3
potential = zero()
source = constant(1)
epsilons = 1/4, 1/8
grid_n = 15
witness_modes = 1 1 1; 3 1 1
[checks]
flat = l2_error max_variation 0
)";

}  // namespace

TEST(Config, Parse) {
  const StudyConfig c = parse(R"([study]
dim = 3
potential = plane(0.5, 20)
restrict_to_domain = false
source = sine(1, 1, 1, 1)
epsilons = 1/4, 1/8
grid_n = 63, 127
tolerance = 1e-9
witness_modes = 1 1 1; 3 1 1; 1 1 3
override_tiny_holes = true
[checks]
l2 = rel_l2_error min_ratio 1.2
v = v_l2 strict_decrease
)");
  EXPECT_EQ(c.epsilons, (std::vector<double>{0.25, 0.125}));
  EXPECT_EQ(c.grid_n, (std::vector<std::size_t>{63, 127}));
  EXPECT_EQ(c.n_for(1), 127u);
  EXPECT_FALSE(c.restrict_to_domain);
  EXPECT_TRUE(c.override_tiny_holes);
  EXPECT_EQ(c.tolerance, 1e-9);
  ASSERT_EQ(c.witness_modes.size(), 3u);
  EXPECT_EQ(c.witness_modes[2], (std::vector<int>{1, 1, 3}));
  ASSERT_EQ(c.checks.size(), 2u);
  EXPECT_EQ(c.checks[0].mode, TrendMode::MinRatio);
  EXPECT_EQ(c.checks[0].a, 1.2);
}

TEST(Config, Rejections) {
  const std::string head = "[study]\npotential = zero()\ngrid_n = 15\n";
  for (const std::string& bad : {
           head + "epsilons = 1/8, 1/4\n",             // not decreasing
           head + "epsilons = 1/4, 1/4\n",             // not strict
           head + "epsilons = \n",                     // empty
           head + "epsilons = 1/4\nbogus = 1\n",       // unknown key
           head + "epsilons = 1/4\ndim = 2\n",         // dimension
           std::string("[study]\npotential = zero()\nepsilons = 1/4, 1/8\ngrid_n = 15, 20\n"),  // not nested
           head + "epsilons = 1/4\nwitness_modes = 1 1\n",
           head + "epsilons = 1/4\n[checks]\nx = l2_error sideways\n",
           std::string("[study]\npotential = nope(1)\nepsilons = 1/4\ngrid_n = 15\n"),
       }) {
    try {
      parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Config) << bad;
    }
  }
}

TEST(Trend, StrictDecrease) {
  TrendSpec s;
  s.name = "t";
  s.column = "x";
  EXPECT_TRUE(trend_check(synthetic({3, 2, 1}), s).passed);
  EXPECT_FALSE(trend_check(synthetic({1, 1, 1}), s).passed);
}

TEST(Trend, InsufficientDataAndUnknownColumn) {
  TrendSpec s;
  s.name = "t";
  s.column = "x";
  try {
    trend_check(synthetic({1}), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
  }
  s.column = "missing";
  EXPECT_THROW(trend_check(synthetic({2, 1}), s), Error);
}

TEST(Trend, OtherModes) {
  const auto r = synthetic({8, 4, 2.5});
  EXPECT_TRUE(trend_check(r, parse_trend("a", "x min_ratio 1.5")).passed);
  EXPECT_FALSE(trend_check(r, parse_trend("a", "x min_ratio 1.7")).passed);
  const auto cubic = synthetic({0.125, 0.015625, 0.001953125});
  const auto sl = trend_check(cubic, parse_trend("s", "x slope 3 0.01"));
  EXPECT_NEAR(sl.statistic, 3.0, 1e-12);
  EXPECT_TRUE(sl.passed);
  EXPECT_TRUE(trend_check(synthetic({1.0, 1.02, 0.99}), parse_trend("v", "x max_variation 0.05")).passed);
  EXPECT_FALSE(trend_check(synthetic({1.0, 1.2}), parse_trend("v", "x max_variation 0.05")).passed);
  // NaN rows are skipped.
  const auto gaps = synthetic({std::numeric_limits<double>::quiet_NaN(), 2, 1});
  EXPECT_TRUE(trend_check(gaps, parse_trend("g", "x strict_decrease")).passed);
}

TEST(Trend, Proportional) {
  StudyReport r;
  r.columns = {"epsilon", "v", "w"};
  r.rows = {{0.5, 4.0, 2.0}, {0.25, 1.0, 1.0}, {0.125, 0.4, 0.1}};
  const auto res = trend_check(r, parse_trend("p", "v proportional w 2"));
  EXPECT_DOUBLE_EQ(res.statistic, 2.0);
  EXPECT_TRUE(res.passed);
  r.rows[2][1] = 0.5;
  EXPECT_FALSE(trend_check(r, parse_trend("p", "v proportional w 2")).passed);
}

TEST(Study, ZeroPotentialGivesZeroDeviations) {
  const StudyConfig cfg = parse(kZero);
  const StudyReport r = run_study(cfg);
  ASSERT_FALSE(r.failure.has_value());
  ASSERT_EQ(r.rows.size(), 2u);
  for (const char* c : {"l2_error", "rel_l2_error", "ldc_deviation", "v_l2", "witness_1_1_1", "witness_3_1_1"}) {
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(r.at(i, c), 0.0) << c;
  }
  const auto checks = evaluate_checks(cfg, r);
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_TRUE(checks[0].passed);
}

TEST(Study, Deterministic) {
  const StudyConfig cfg = parse(R"([study]
potential = constant(20)
restrict_to_domain = false
source = constant(1)
epsilons = 1/4
grid_n = 31
witness_modes = 1 1 1
)");
  std::ostringstream a, b;
  write_report_csv(a, run_study(cfg));
  write_report_csv(b, run_study(cfg));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("0.25,31,"), std::string::npos);
}

TEST(Study, PartialRowsOnFailure) {
  const StudyConfig cfg = parse(R"([study]
potential = constant(20)
restrict_to_domain = false
epsilons = 1/4, 1/8
grid_n = 15
[checks]
l2 = l2_error strict_decrease
)");
  const StudyReport r = run_study(cfg);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->stage, "resolve");
  EXPECT_EQ(r.failure->epsilon, 0.125);
  EXPECT_EQ(r.failure->kind, ErrorKind::Resolution);
  EXPECT_EQ(r.rows.size(), 1u);
  std::ostringstream js;
  write_summary_json(js, cfg, r, evaluate_checks(cfg, r));
  const auto j = nlohmann::json::parse(js.str());
  EXPECT_EQ(j["failure"]["stage"], "resolve");
  EXPECT_FALSE(j["all_passed"].get<bool>());
  EXPECT_FALSE(j["checks"][0]["passed"].get<bool>());
}

TEST(Study, ConstructionFailureIsReported) {
  const StudyConfig cfg = parse(R"([study]
potential = constant(40)
epsilons = 1/4, 1/8
grid_n = 127
)");
  const StudyReport r = run_study(cfg);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->stage, "construct");
  EXPECT_EQ(r.failure->kind, ErrorKind::Construction);
  EXPECT_TRUE(r.rows.empty());
}

TEST(ShippedConfigs, AllParseAndValidate) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PERFHOM_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    SCOPED_TRACE(entry.path().string());
    const StudyConfig cfg = load_study_config(entry.path().string());
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_NO_THROW(cfg.potential());
    for (const auto& t : cfg.checks) EXPECT_FALSE(t.column.empty());
    ++count;
  }
  EXPECT_GE(count, 5u);
}
