#include "perfhom/holes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "perfhom/error.hpp"
#include "perfhom/format.hpp"

namespace perfhom {

DisjointnessReport disjointness_check(const std::vector<Hole>& holes,
                                      const SeparationParams& seps) {
  DisjointnessReport report;
  const std::size_t n = holes.size();
  if (n == 0) return report;

  // Sweep along the first axis; open balls are disjoint iff |x_i - x_j| >= R_i + R_j.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return holes[a].center[0] < holes[b].center[0] ||
           (holes[a].center[0] == holes[b].center[0] && a < b);
  });
  double max_r = 0.0;
  for (const auto& h : holes) max_r = std::max(max_r, seps.R(h));

  for (std::size_t s = 0; s < n; ++s) {
    const Hole& a = holes[order[s]];
    const double ra = seps.R(a);
    for (std::size_t t = s + 1; t < n; ++t) {
      const Hole& b = holes[order[t]];
      if (b.center[0] - a.center[0] >= ra + max_r) break;
      double dist2 = 0.0;
      for (std::size_t k = 0; k < a.center.size(); ++k) {
        const double diff = a.center[k] - b.center[k];
        dist2 += diff * diff;
      }
      const double reach = ra + seps.R(b);
      if (std::sqrt(dist2) < reach) {
        report.disjoint = false;
        report.overlapping.emplace_back(std::min(order[s], order[t]),
                                        std::max(order[s], order[t]));
      }
    }
  }
  std::sort(report.overlapping.begin(), report.overlapping.end());

  for (std::size_t i = 0; i < n; ++i) {
    const Hole& h = holes[i];
    const double rho = seps.c1 * seps.epsilon;
    const double slack = 1e-12 * seps.epsilon;
    bool inside = true;
    for (std::size_t k = 0; k < h.center.size(); ++k) {
      const double lo = seps.epsilon * static_cast<double>(h.cell_index[k] - 1);
      const double hi = seps.epsilon * static_cast<double>(h.cell_index[k] + 1);
      if (h.center[k] - rho < lo - slack || h.center[k] + rho > hi + slack) inside = false;
    }
    if (!inside) {
      report.contained = false;
      report.escaping.push_back(i);
    }
  }
  return report;
}

void write_holes_csv(std::ostream& out, const std::vector<Hole>& holes) {
  const std::size_t d = holes.empty() ? 3 : holes.front().center.size();
  for (std::size_t k = 0; k < d; ++k) out << 'i' << (k + 1) << ',';
  for (std::size_t k = 0; k < d; ++k) out << "cx" << (k + 1) << ',';
  out << "radius\n";
  for (const auto& h : holes) {
    for (auto i : h.cell_index) out << i << ',';
    for (double c : h.center) out << format_g17(c) << ',';
    out << format_g17(h.radius) << '\n';
  }
}

std::vector<Hole> read_holes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Config, "hole CSV: missing header");
  const auto header = split(line, ',');
  if (header.size() < 3 || (header.size() - 1) % 2 != 0 || header.back() != "radius") {
    fail(ErrorKind::Config, "hole CSV: unexpected header '" + line + "'");
  }
  const std::size_t d = (header.size() - 1) / 2;
  std::vector<Hole> holes;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      fail(ErrorKind::Config, "hole CSV line " + std::to_string(lineno) + ": wrong field count");
    }
    Hole h;
    h.cell_index.resize(d);
    h.center.resize(d);
    for (std::size_t k = 0; k < d; ++k) h.cell_index[k] = parse_int(fields[k]);
    for (std::size_t k = 0; k < d; ++k) h.center[k] = parse_double(fields[d + k]);
    h.radius = parse_double(fields[2 * d]);
    if (!(h.radius >= 0.0)) {
      fail(ErrorKind::Config, "hole CSV line " + std::to_string(lineno) + ": negative radius");
    }
    holes.push_back(std::move(h));
  }
  return holes;
}

}  // namespace perfhom
