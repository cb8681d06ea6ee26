#include "perfhom/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "perfhom/capacity.hpp"
#include "perfhom/diagnostics.hpp"
#include "perfhom/format.hpp"
#include "perfhom/expr.hpp"
#include "perfhom/harness.hpp"
#include "perfhom/inverse.hpp"
#include "perfhom/parallel.hpp"
#include "perfhom/solver.hpp"

namespace perfhom {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options {
  unsigned threads = 1;
  bool override_tiny = false;
  std::string out_dir;
  std::string config;
  std::optional<std::string> epsilon;
  std::string holes_path;
  bool assert_trends = false;
  int cap_dim = 3;
  double cap_radius = 0.0;
  std::vector<double> numeric;
  bool node_mask = false;
};

std::ofstream open_output(const std::string& dir, const std::string& name, bool binary = false) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) fail(ErrorKind::Config, "cannot write " + path.string());
  return f;
}

StudyConfig load(const Options& o) {
  StudyConfig cfg = load_study_config(o.config);
  if (o.override_tiny) cfg.override_tiny_holes = true;
  return cfg;
}

double chosen_epsilon(const Options& o, const StudyConfig& cfg) {
  const double eps = o.epsilon ? parse_number(*o.epsilon) : cfg.epsilons.front();
  if (!(eps > 0.0)) fail(ErrorKind::InvalidParameter, "epsilon must be positive");
  return eps;
}

ordered_json assumption_json(const AssumptionReport& r, const DisjointnessReport& dj) {
  ordered_json j;
  j["dim"] = r.dim;
  j["epsilon"] = r.epsilon;
  j["cells"] = r.cells;
  j["nonempty_holes"] = r.nonempty_holes;
  j["max_R"] = r.max_R;
  j["sup_a_over_R"] = r.sup_a_over_R;
  j["sum_A2"] = r.sum_A2;
  j["sup_A3"] = r.sup_A3;
  j["sum_A4"] = r.sum_A4;
  j["sum_A6"] = r.sum_A6;
  j["diam_over_R"] = r.diam_over_R;
  j["boundary_cells"] = r.boundary_cells;
  j["boundary_sum_A6"] = r.boundary_sum_A6;
  j["disjoint"] = dj.disjoint;
  j["contained"] = dj.contained;
  return j;
}

int run_capacity(const Options& o, std::ostream& out) {
  out << format_shortest(capacity_ball(o.cap_dim, o.cap_radius).value) << '\n';
  if (!o.numeric.empty()) {
    if (o.numeric.size() != 2) fail(ErrorKind::InvalidParameter, "--numeric takes L and h");
    const CapacityResult r =
        capacity_variational(o.cap_dim, o.cap_radius, o.numeric[0], o.numeric[1], 1e-10,
                             o.node_mask ? BallBoundary::NodeMask : BallBoundary::CutEdge);
    out << "variational " << format_shortest(r.value) << " L=" << format_shortest(r.truncation)
        << " h=" << format_shortest(r.grid_h) << " boundary=" << to_string(r.boundary)
        << " iterations=" << r.stats.iterations << '\n';
  }
  return kExitOk;
}

int run_construct(const Options& o, std::ostream& out) {
  const StudyConfig cfg = load(o);
  const TilingSpec spec{cfg.dim, chosen_epsilon(o, cfg)};
  const ConstructionReport rep = construct_holes(cfg.potential(), spec, Box::unit_cube(cfg.dim), cfg.quad);
  if (o.out_dir.empty()) {
    write_holes_csv(out, rep.holes);
  } else {
    auto csv = open_output(o.out_dir, "holes.csv");
    write_holes_csv(csv, rep.holes);
    auto json = open_output(o.out_dir, "construction.json");
    write_construction_json(json, rep);
  }
  return kExitOk;
}

int run_check(const Options& o, std::ostream& out) {
  const StudyConfig cfg = load(o);
  const TilingSpec spec{cfg.dim, chosen_epsilon(o, cfg)};
  const Box domain = Box::unit_cube(cfg.dim);
  std::vector<Hole> holes;
  if (o.holes_path.empty()) {
    holes = construct_holes(cfg.potential(), spec, domain, cfg.quad).holes;
  } else {
    std::ifstream in(o.holes_path);
    if (!in) fail(ErrorKind::Config, "cannot open holes file '" + o.holes_path + "'");
    holes = read_holes_csv(in);
  }
  const SeparationParams seps{1.0, spec.epsilon};
  const auto cells = cells_intersecting(spec, domain);
  const AssumptionReport ar = assumption_quantities(holes, seps, cells, domain);
  const DisjointnessReport dj = disjointness_check(holes, seps);
  out << assumption_json(ar, dj).dump(2) << '\n';
  return kExitOk;
}

int run_solve(const Options& o, std::ostream& out) {
  const StudyConfig cfg = load(o);
  const double eps = chosen_epsilon(o, cfg);
  const TilingSpec spec{cfg.dim, eps};
  const Grid grid = Grid::unit(cfg.dim, cfg.grid_n.front());
  const Potential mu = cfg.potential();
  const Source src = cfg.source();
  const auto holes = construct_holes(mu, spec, Box::unit_cube(cfg.dim), cfg.quad).holes;
  const GridField f = GridField::sample(grid, src.f);
  PerforatedOptions popts;
  popts.tol = cfg.tolerance;
  popts.override_tiny_holes = cfg.override_tiny_holes;
  const SolveResult pr = solve_perforated(f, holes, popts);
  const SolveResult lr = solve_limit(f, lump_measure(mu, grid, cfg.quad), cfg.tolerance);
  const double err = l2_distance(pr.u, lr.u);
  const double norm = l2_norm(lr.u);

  ordered_json j;
  j["epsilon"] = eps;
  j["n"] = grid.n;
  j["h"] = grid.h;
  j["dirichlet_nodes"] = pr.dirichlet_nodes;
  j["perforated"] = {{"iterations", pr.stats.iterations}, {"residual", pr.stats.residual},
                     {"wall_seconds", pr.stats.wall_seconds}};
  j["limit"] = {{"iterations", lr.stats.iterations}, {"residual", lr.stats.residual},
                {"wall_seconds", lr.stats.wall_seconds}};
  j["l2_error"] = err;
  j["rel_l2_error"] = norm > 0.0 ? err / norm : 0.0;
  j["warnings"] = pr.warnings;
  out << j.dump(2) << '\n';

  if (!o.out_dir.empty()) {
    auto a = open_output(o.out_dir, "u_eps.bin", true);
    write_field_binary(a, pr.u);
    auto b = open_output(o.out_dir, "u_limit.bin", true);
    write_field_binary(b, lr.u);
    const std::vector<double> p0(static_cast<std::size_t>(cfg.dim), 0.0), p1(p0.size(), 1.0);
    auto c = open_output(o.out_dir, "u_eps_diagonal.csv");
    write_line_csv(c, pr.u, p0, p1, 2 * grid.n + 1);
    auto e = open_output(o.out_dir, "u_limit_diagonal.csv");
    write_line_csv(e, lr.u, p0, p1, 2 * grid.n + 1);
  }
  return kExitOk;
}

int run_study_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  const StudyConfig cfg = load(o);
  const StudyReport report = run_study(cfg);
  const auto checks = evaluate_checks(cfg, report);
  if (o.out_dir.empty()) {
    write_report_csv(out, report);
  } else {
    auto csv = open_output(o.out_dir, "report.csv");
    write_report_csv(csv, report);
    auto json = open_output(o.out_dir, "summary.json");
    write_summary_json(json, cfg, report, checks);
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  bool all = true;
  for (const auto& c : checks) {
    err << "check " << c.name << ": " << (c.passed ? "pass" : "FAIL") << " (" << c.detail << ")\n";
    all = all && c.passed;
  }
  if (report.failure) {
    const auto& f = *report.failure;
    err << "study aborted at stage " << f.stage << ", epsilon " << format_shortest(f.epsilon) << ": "
        << f.message << '\n';
    return Error(f.kind, f.message).numerical() ? kExitNumerical : kExitValidation;
  }
  if (o.assert_trends && !all) return kExitTrend;
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Perforated-domain homogenization laboratory", "perfhom"};
  app.require_subcommand(1, 1);
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--override-tiny-holes", o.override_tiny,
               "Map holes smaller than 2h to their nearest node instead of failing");
  app.add_option("--out", o.out_dir, "Output directory");

  auto* cap = app.add_subcommand("capacity", "Capacity of the closed ball of radius a in R^d");
  cap->add_option("d", o.cap_dim)->required();
  cap->add_option("a", o.cap_radius)->required();
  cap->add_option("--numeric", o.numeric, "Also solve the variational problem on [-L,L]^d with spacing h")
      ->expected(2);
  cap->add_flag("--node-mask", o.node_mask, "Staircase ball boundary instead of cut edges");

  auto* cons = app.add_subcommand("construct", "Write the hole CSV for one epsilon");
  auto* chk = app.add_subcommand("check", "Print the assumption quantities for one epsilon");
  auto* sol = app.add_subcommand("solve", "Solve the perforated and limit problems for one epsilon");
  auto* std_ = app.add_subcommand("study", "Run the epsilon sweep");
  for (auto* sub : {cons, chk, sol, std_}) {
    sub->add_option("config", o.config, "Study config file")->required();
    sub->fallthrough();
  }
  for (auto* sub : {cons, chk, sol}) sub->add_option("--epsilon", o.epsilon, "Epsilon, decimal or p/q (default: first in config)");
  chk->add_option("--holes", o.holes_path, "Read holes from CSV instead of constructing them");
  std_->add_flag("--assert", o.assert_trends, "Exit 3 when a registered trend check fails");
  cap->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    set_num_threads(o.threads);
    if (*cap) return run_capacity(o, out);
    if (*cons) return run_construct(o, out);
    if (*chk) return run_check(o, out);
    if (*sol) return run_solve(o, out);
    return run_study_cmd(o, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace perfhom
