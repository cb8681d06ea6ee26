#include "perfhom/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "perfhom/diagnostics.hpp"
#include "perfhom/format.hpp"
#include "perfhom/inverse.hpp"
#include "perfhom/solver.hpp"

namespace perfhom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool parse_bool(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::Config, key + ": expected true or false, got '" + std::string(v) + "'");
}

std::size_t parse_size(const std::string& key, std::string_view v) {
  const long long n = parse_int(trim(v));
  if (n < 0) fail(ErrorKind::Config, key + " must be nonnegative");
  return static_cast<std::size_t>(n);
}

bool power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string mode_column(const std::vector<int>& m) {
  std::string s = "witness";
  for (int k : m) s += "_" + std::to_string(k);
  return s;
}

}  // namespace

const char* to_string(TrendMode mode) {
  switch (mode) {
    case TrendMode::StrictDecrease: return "strict_decrease";
    case TrendMode::MinRatio: return "min_ratio";
    case TrendMode::Slope: return "slope";
    case TrendMode::MaxVariation: return "max_variation";
    case TrendMode::Proportional: return "proportional";
  }
  return "unknown";
}

TrendSpec parse_trend(const std::string& name, const std::string& text) {
  std::vector<std::string> tok;
  std::istringstream ss(text);
  for (std::string t; ss >> t;) tok.push_back(t);
  if (tok.size() < 2) fail(ErrorKind::Config, "check '" + name + "': expected 'column mode [args]'");
  TrendSpec spec;
  spec.name = name;
  spec.column = tok[0];
  const std::string& mode = tok[1];
  auto need = [&](std::size_t n) {
    if (tok.size() != n + 2) {
      fail(ErrorKind::Config, "check '" + name + "': mode " + mode + " takes " + std::to_string(n) + " argument(s)");
    }
  };
  if (mode == "strict_decrease") {
    need(0);
    spec.mode = TrendMode::StrictDecrease;
  } else if (mode == "min_ratio") {
    need(1);
    spec.mode = TrendMode::MinRatio;
    spec.a = parse_number(tok[2]);
  } else if (mode == "slope") {
    need(2);
    spec.mode = TrendMode::Slope;
    spec.a = parse_number(tok[2]);
    spec.b = parse_number(tok[3]);
  } else if (mode == "max_variation") {
    need(1);
    spec.mode = TrendMode::MaxVariation;
    spec.a = parse_number(tok[2]);
  } else if (mode == "proportional") {
    need(2);
    spec.mode = TrendMode::Proportional;
    spec.other = tok[2];
    spec.a = parse_number(tok[3]);
  } else {
    fail(ErrorKind::Config, "check '" + name + "': unknown mode '" + mode + "'");
  }
  return spec;
}

StudyConfig parse_study_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.what());
  }
  StudyConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section == "study") {
      for (const auto& [key, node] : body) {
        const std::string v = node.data();
        if (key == "dim") {
          cfg.dim = static_cast<int>(parse_int(trim(v)));
        } else if (key == "potential") {
          cfg.potential_text = std::string(trim(v));
        } else if (key == "source") {
          cfg.source_text = std::string(trim(v));
        } else if (key == "restrict_to_domain") {
          cfg.restrict_to_domain = parse_bool(key, v);
        } else if (key == "epsilons") {
          cfg.epsilons = parse_number_list(v);
        } else if (key == "grid_n") {
          cfg.grid_n.clear();
          for (const auto& item : split(v, ',')) cfg.grid_n.push_back(parse_size(key, item));
        } else if (key == "limit_n") {
          cfg.limit_n = parse_size(key, v);
        } else if (key == "tolerance") {
          cfg.tolerance = parse_number(v);
        } else if (key == "witness_modes") {
          cfg.witness_modes.clear();
          for (const auto& item : split(v, ';')) {
            if (trim(item).empty()) continue;
            std::vector<int> mode;
            std::istringstream ss{std::string(item)};
            for (std::string t; ss >> t;) mode.push_back(static_cast<int>(parse_int(t)));
            cfg.witness_modes.push_back(std::move(mode));
          }
        } else if (key == "compute_ldc") {
          cfg.compute_ldc = parse_bool(key, v);
        } else if (key == "compute_corrector") {
          cfg.compute_corrector = parse_bool(key, v);
        } else if (key == "volume_order") {
          cfg.quad.volume_order = static_cast<int>(parse_int(trim(v)));
        } else if (key == "surface_refine") {
          cfg.quad.surface_refine = static_cast<int>(parse_int(trim(v)));
        } else if (key == "override_tiny_holes") {
          cfg.override_tiny_holes = parse_bool(key, v);
        } else {
          fail(ErrorKind::Config, "unknown key [study] " + key);
        }
      }
    } else if (section == "checks") {
      for (const auto& [key, node] : body) cfg.checks.push_back(parse_trend(key, node.data()));
    } else {
      fail(ErrorKind::Config, "unknown section [" + section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config '" + path + "'");
  return parse_study_config(in);
}

void StudyConfig::validate() const {
  if (dim < 3) fail(ErrorKind::Config, "dim must be >= 3");
  if (epsilons.empty()) fail(ErrorKind::Config, "epsilons: at least one value required");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) fail(ErrorKind::Config, "epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      fail(ErrorKind::Config, "epsilons must be strictly decreasing");
    }
  }
  if (grid_n.empty()) fail(ErrorKind::Config, "grid_n: at least one value required");
  if (grid_n.size() != 1 && grid_n.size() != epsilons.size()) {
    fail(ErrorKind::Config, "grid_n: give one value or one per epsilon");
  }
  std::size_t finest = 0;
  for (std::size_t n : grid_n) {
    if (n == 0) fail(ErrorKind::Config, "grid_n must be positive");
    finest = std::max(finest, n);
  }
  const std::size_t ln = limit_n ? limit_n : finest;
  for (std::size_t n : grid_n) {
    if ((ln + 1) % (n + 1) != 0 || !power_of_two((ln + 1) / (n + 1))) {
      fail(ErrorKind::Config, "grids must nest: (limit_n + 1) / (n + 1) must be a power of two");
    }
  }
  if (!(tolerance > 0.0)) fail(ErrorKind::Config, "tolerance must be positive");
  for (const auto& m : witness_modes) {
    if (m.size() != static_cast<std::size_t>(dim)) {
      fail(ErrorKind::Config, "witness_modes: each mode needs " + std::to_string(dim) + " indices");
    }
    for (int k : m) {
      if (k < 1) fail(ErrorKind::Config, "witness_modes: indices must be >= 1");
    }
  }
  quad.validate();
  // Parse once so that expression errors surface as config errors.
  (void)parse_potential(potential_text, dim);
  (void)parse_source(source_text, dim);
}

std::size_t StudyConfig::n_for(std::size_t row) const {
  return grid_n.size() == 1 ? grid_n.front() : grid_n.at(row);
}

Potential StudyConfig::potential() const {
  Potential p = parse_potential(potential_text, dim);
  if (restrict_to_domain) return Potential::restrict_to(std::move(p), Box::unit_cube(dim));
  return p;
}

Source StudyConfig::source() const { return parse_source(source_text, dim); }

std::size_t StudyReport::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) fail(ErrorKind::InvalidParameter, "unknown report column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> StudyReport::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

double StudyReport::at(std::size_t row, const std::string& name) const {
  return rows.at(row)[column_index(name)];
}

StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  const int d = cfg.dim;
  const Potential mu = cfg.potential();
  const Source src = cfg.source();
  const Box domain = Box::unit_cube(d);

  StudyReport report;
  report.columns = {"epsilon", "n", "h", "cells", "holes", "min_radius", "max_radius",
                    "max_radius_ratio", "total_mass", "max_R", "sup_a_over_R", "sum_A2",
                    "sup_A3", "sum_A4", "sum_A6", "diam_over_R", "boundary_cells",
                    "boundary_sum_A6", "ldc_deviation", "capdens_cauchy", "v_l2", "v_l2_sq",
                    "v_l2_nodal", "l2_error", "rel_l2_error"};
  for (const auto& m : cfg.witness_modes) report.columns.push_back(mode_column(m));
  for (const char* c : {"dirichlet_nodes", "cg_iterations", "cg_residual"}) report.columns.emplace_back(c);

  std::size_t finest = 0;
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) finest = std::max(finest, cfg.n_for(i));
  report.limit_n = cfg.limit_n ? cfg.limit_n : finest;
  const Grid limit_grid = Grid::unit(d, report.limit_n);

  std::optional<GridField> limit;  // solved on first use
  auto limit_on = [&](const Grid& g) {
    if (!limit) {
      const GridField f = GridField::sample(limit_grid, src.f);
      const LumpedMeasure lumped = lump_measure(mu, limit_grid, cfg.quad);
      SolveResult r = solve_limit(f, lumped, cfg.tolerance);
      report.limit_stats = r.stats;
      report.limit_l2 = l2_norm(r.u);
      limit = std::move(r.u);
    }
    return g == limit_grid ? *limit : inject(*limit, g);
  };

  std::vector<Hole> prev_holes;
  std::optional<Grid> prev_grid;
  std::optional<TilingSpec> prev_spec;

  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const double eps = cfg.epsilons[i];
    const TilingSpec spec{d, eps};
    const Grid grid = Grid::unit(d, cfg.n_for(i));
    std::vector<double> row(report.columns.size(), kNaN);
    auto set = [&](const std::string& col, double v) { row[report.column_index(col)] = v; };
    std::string stage;
    try {
      stage = "construct";
      const ConstructionReport cons = construct_holes(mu, spec, domain, cfg.quad);
      const auto& holes = cons.holes;
      set("epsilon", eps);
      set("n", static_cast<double>(grid.n));
      set("h", grid.h);
      double min_r = 0.0, max_r = 0.0;
      std::size_t nonempty = 0;
      for (const auto& h : holes) {
        if (h.empty()) continue;
        min_r = nonempty == 0 ? h.radius : std::min(min_r, h.radius);
        max_r = std::max(max_r, h.radius);
        ++nonempty;
      }
      set("holes", static_cast<double>(nonempty));
      set("min_radius", min_r);
      set("max_radius", max_r);
      set("max_radius_ratio", cons.max_radius_ratio);
      set("total_mass", cons.total_mass);

      stage = "check";
      const SeparationParams seps = cons.separation();
      const DisjointnessReport dj = disjointness_check(holes, seps);
      if (!dj.ok()) fail(ErrorKind::Geometry, "separation balls overlap or leave their cells");
      const auto cells = cells_intersecting(spec, domain);
      const AssumptionReport ar = assumption_quantities(holes, seps, cells, domain);
      set("cells", static_cast<double>(ar.cells));
      set("max_R", ar.max_R);
      set("sup_a_over_R", ar.sup_a_over_R);
      set("sum_A2", ar.sum_A2);
      set("sup_A3", ar.sup_A3);
      set("sum_A4", ar.sum_A4);
      set("sum_A6", ar.sum_A6);
      set("diam_over_R", ar.diam_over_R);
      set("boundary_cells", static_cast<double>(ar.boundary_cells));
      set("boundary_sum_A6", ar.boundary_sum_A6);

      stage = "resolve";
      std::vector<std::string> warnings;
      (void)hole_mask(grid, holes, cfg.override_tiny_holes, &warnings);

      if (cfg.compute_ldc) {
        stage = "ldc";
        set("ldc_deviation", ldc_deviation(holes, mu, spec, grid, cfg.quad));
        if (prev_grid) {
          GridField diff = capacity_density_field(holes, spec, *prev_grid);
          const GridField before = capacity_density_field(prev_holes, *prev_spec, *prev_grid);
          for (std::size_t j = 0; j < diff.values.size(); ++j) diff.values[j] -= before.values[j];
          set("capdens_cauchy", hminus1_norm(diff));
        }
      }

      if (cfg.compute_corrector) {
        stage = "corrector";
        const CorrectorResult cr = corrector_field(holes, seps, grid);
        set("v_l2", cr.v_l2);
        set("v_l2_sq", cr.v_l2 * cr.v_l2);
        set("v_l2_nodal", cr.v_l2_nodal);
      }

      stage = "solve";
      const GridField f = GridField::sample(grid, src.f);
      PerforatedOptions popts;
      popts.tol = cfg.tolerance;
      popts.override_tiny_holes = cfg.override_tiny_holes;
      const SolveResult pr = solve_perforated(f, holes, popts);
      for (const auto& w : pr.warnings) report.warnings.push_back("epsilon " + format_shortest(eps) + ": " + w);
      set("dirichlet_nodes", static_cast<double>(pr.dirichlet_nodes));
      set("cg_iterations", static_cast<double>(pr.stats.iterations));
      set("cg_residual", pr.stats.residual);

      stage = "limit";
      const GridField u = limit_on(grid);

      stage = "metrics";
      const double err = l2_distance(pr.u, u);
      const double norm = l2_norm(u);
      set("l2_error", err);
      set("rel_l2_error", norm > 0.0 ? err / norm : (err == 0.0 ? 0.0 : kNaN));
      for (const auto& m : cfg.witness_modes) {
        const GridField g = GridField::sample(grid, [&m](std::span<const double> x) {
          double p = 1.0;
          for (std::size_t k = 0; k < x.size(); ++k) p *= std::sin(m[k] * std::numbers::pi * x[k]);
          return p;
        });
        set(mode_column(m), std::abs(weak_witness(pr.u, u, g)));
      }

      prev_holes = holes;
      prev_grid = grid;
      prev_spec = spec;
    } catch (const Error& e) {
      report.failure = StudyFailure{stage, eps, e.kind(), e.what()};
      break;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

TrendResult trend_check(const StudyReport& report, const TrendSpec& spec) {
  TrendResult res;
  res.name = spec.name;
  res.column = spec.column;
  res.mode = to_string(spec.mode);
  const std::size_t c = report.column_index(spec.column);
  const std::size_t other = spec.mode == TrendMode::Proportional ? report.column_index(spec.other) : c;
  const std::size_t ec = report.column_index("epsilon");
  std::vector<double> others, eps;
  for (const auto& r : report.rows) {
    if (std::isnan(r[c]) || std::isnan(r[other])) continue;
    res.values.push_back(r[c]);
    others.push_back(r[other]);
    eps.push_back(r[ec]);
  }
  if (res.values.size() < 2) {
    fail(ErrorKind::InsufficientData, "trend check '" + spec.name + "': insufficient data (" +
                                          std::to_string(res.values.size()) + " row(s) in column " +
                                          spec.column + ")");
  }
  const auto& v = res.values;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    res.ratios.push_back(v[k + 1] != 0.0 ? v[k] / v[k + 1] : std::numeric_limits<double>::infinity());
  }
  switch (spec.mode) {
    case TrendMode::StrictDecrease: {
      res.passed = true;
      for (std::size_t k = 0; k + 1 < v.size(); ++k) res.passed = res.passed && v[k + 1] < v[k];
      res.detail = res.passed ? "strictly decreasing" : "not strictly decreasing";
      break;
    }
    case TrendMode::MinRatio: {
      res.passed = true;
      for (std::size_t k = 0; k + 1 < v.size(); ++k) res.passed = res.passed && v[k] >= spec.a * v[k + 1];
      res.statistic = *std::min_element(res.ratios.begin(), res.ratios.end());
      res.detail = "min ratio " + format_shortest(res.statistic) + " vs required " + format_shortest(spec.a);
      break;
    }
    case TrendMode::Slope: {
      for (double x : v) {
        if (!(x > 0.0)) fail(ErrorKind::InvalidParameter, "slope check needs positive values in " + spec.column);
      }
      res.statistic = loglog_slope(eps, v);
      res.passed = std::abs(res.statistic - spec.a) <= spec.b;
      res.detail = "slope " + format_shortest(res.statistic) + " vs " + format_shortest(spec.a) +
                   " +- " + format_shortest(spec.b);
      break;
    }
    case TrendMode::MaxVariation: {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      res.statistic = *hi == *lo ? 0.0 : (*hi - *lo) / std::abs(mean);
      res.passed = res.statistic <= spec.a;
      res.detail = "relative variation " + format_shortest(res.statistic);
      break;
    }
    case TrendMode::Proportional: {
      if (!(others[0] > 0.0)) fail(ErrorKind::InvalidParameter, "proportional check: reference value must be positive");
      res.statistic = v[0] / others[0];
      res.passed = true;
      for (std::size_t k = 1; k < v.size(); ++k) {
        res.passed = res.passed && v[k] <= spec.a * res.statistic * others[k];
      }
      res.detail = "C = " + format_shortest(res.statistic) + " fitted on the first row, slack " +
                   format_shortest(spec.a);
      break;
    }
  }
  return res;
}

std::vector<TrendResult> evaluate_checks(const StudyConfig& cfg, const StudyReport& report) {
  std::vector<TrendResult> out;
  for (const auto& spec : cfg.checks) {
    try {
      out.push_back(trend_check(report, spec));
    } catch (const Error& e) {
      TrendResult r;
      r.name = spec.name;
      r.column = spec.column;
      r.mode = to_string(spec.mode);
      r.detail = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, const StudyReport& report) {
  for (std::size_t c = 0; c < report.columns.size(); ++c) out << (c ? "," : "") << report.columns[c];
  out << '\n';
  for (const auto& r : report.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << (c ? "," : "") << (std::isnan(r[c]) ? std::string("nan") : format_g17(r[c]));
    }
    out << '\n';
  }
}

void write_summary_json(std::ostream& out, const StudyConfig& cfg, const StudyReport& report,
                        const std::vector<TrendResult>& checks) {
  using nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json j;
  j["dim"] = cfg.dim;
  j["potential"] = cfg.potential_text;
  j["restrict_to_domain"] = cfg.restrict_to_domain;
  j["source"] = cfg.source_text;
  j["epsilons"] = cfg.epsilons;
  j["cutoff"] = cutoff_name();
  j["limit"] = {{"n", report.limit_n},
                {"iterations", report.limit_stats.iterations},
                {"residual", num(report.limit_stats.residual)},
                {"l2_norm", num(report.limit_l2)}};
  j["rows_completed"] = report.rows.size();
  if (report.failure) {
    j["failure"] = {{"stage", report.failure->stage},
                    {"epsilon", report.failure->epsilon},
                    {"kind", to_string(report.failure->kind)},
                    {"message", report.failure->message}};
  } else {
    j["failure"] = nullptr;
  }
  j["warnings"] = report.warnings;
  ordered_json arr = ordered_json::array();
  bool all = true;
  for (const auto& c : checks) {
    ordered_json e;
    e["name"] = c.name;
    e["column"] = c.column;
    e["mode"] = c.mode;
    e["passed"] = c.passed;
    e["values"] = ordered_json::array();
    for (double v : c.values) e["values"].push_back(num(v));
    e["ratios"] = ordered_json::array();
    for (double v : c.ratios) e["ratios"].push_back(num(v));
    e["statistic"] = num(c.statistic);
    e["detail"] = c.detail;
    arr.push_back(std::move(e));
    all = all && c.passed;
  }
  j["checks"] = std::move(arr);
  j["all_passed"] = all && !report.failure;
  out << j.dump(2) << '\n';
}

}  // namespace perfhom
