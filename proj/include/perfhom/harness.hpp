#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perfhom/error.hpp"
#include "perfhom/expr.hpp"
#include "perfhom/grid.hpp"
#include "perfhom/potential.hpp"

namespace perfhom {

enum class TrendMode { StrictDecrease, MinRatio, Slope, MaxVariation, Proportional };

/// One registered check: `name = column mode [args]` in the [checks] section.
///   strict_decrease | min_ratio r | slope target tol | max_variation tol
///   | proportional other_column slack
struct TrendSpec {
  std::string name;
  std::string column;
  TrendMode mode = TrendMode::StrictDecrease;
  double a = 0.0;
  double b = 0.0;
  std::string other;
};

struct StudyConfig {
  int dim = 3;
  std::string potential_text = "zero()";
  std::string source_text = "constant(1)";
  bool restrict_to_domain = true;
  std::vector<double> epsilons;
  std::vector<std::size_t> grid_n;  // one per epsilon (a single entry is broadcast)
  std::size_t limit_n = 0;          // 0: the finest row grid
  double tolerance = 1e-8;
  std::vector<std::vector<int>> witness_modes;
  bool compute_ldc = true;
  bool compute_corrector = true;
  QuadratureSpec quad;
  bool override_tiny_holes = false;
  std::vector<TrendSpec> checks;

  /// Throws a config error on any violated invariant.
  void validate() const;
  std::size_t n_for(std::size_t row) const;
  Potential potential() const;  // restricted to the unit cube when requested
  Source source() const;
};

StudyConfig parse_study_config(std::istream& in);
StudyConfig load_study_config(const std::string& path);
TrendSpec parse_trend(const std::string& name, const std::string& text);

struct StudyFailure {
  std::string stage;
  double epsilon = 0.0;
  ErrorKind kind = ErrorKind::Config;
  std::string message;
};

/// Per-epsilon rows; values are NaN where a metric is not defined.
struct StudyReport {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<StudyFailure> failure;
  SolveStats limit_stats;
  std::size_t limit_n = 0;
  double limit_l2 = 0.0;
  std::vector<std::string> warnings;

  std::size_t column_index(const std::string& column) const;  // invalid-parameter if unknown
  std::vector<double> column(const std::string& column) const;
  double at(std::size_t row, const std::string& column) const;
};

StudyReport run_study(const StudyConfig& cfg);

struct TrendResult {
  std::string name;
  std::string column;
  std::string mode;
  bool passed = false;
  std::vector<double> values;
  std::vector<double> ratios;  // consecutive v_k / v_{k+1}
  double statistic = 0.0;      // slope, variation or fitted constant
  std::string detail;
};

/// Pure function of the report. Rows with NaN in the column are skipped;
/// fewer than two remaining rows is an insufficient-data error.
TrendResult trend_check(const StudyReport& report, const TrendSpec& spec);
const char* to_string(TrendMode mode);
/// Runs every configured check; a check that throws is reported as failed.
std::vector<TrendResult> evaluate_checks(const StudyConfig& cfg, const StudyReport& report);

void write_report_csv(std::ostream& out, const StudyReport& report);
void write_summary_json(std::ostream& out, const StudyConfig& cfg, const StudyReport& report,
                        const std::vector<TrendResult>& checks);

}  // namespace perfhom
