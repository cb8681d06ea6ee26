#include "perfhom/tiling.hpp"

#include <cmath>
#include <string>

#include "perfhom/error.hpp"

namespace perfhom {

Box Box::unit_cube(int dim) {
  return Box{Point(static_cast<std::size_t>(dim), 0.0),
             Point(static_cast<std::size_t>(dim), 1.0)};
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

bool Box::contains_open(std::span<const double> x) const {
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
  }
  return true;
}

void TilingSpec::validate() const {
  if (dim < 1) fail(ErrorKind::InvalidParameter, "tiling dimension must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorKind::InvalidParameter,
         "epsilon must be positive, got " + std::to_string(epsilon));
  }
}

// Bounds are computed as eps * (i -+ 1) everywhere so that membership tests
// and enumeration agree bit for bit.
double Cell::lower(int axis) const {
  return half_width * static_cast<double>(index[axis] - 1);
}

double Cell::upper(int axis) const {
  return half_width * static_cast<double>(index[axis] + 1);
}

double Cell::measure() const { return std::pow(2.0 * half_width, dim()); }

double Cell::diameter() const {
  return 2.0 * half_width * std::sqrt(static_cast<double>(dim()));
}

bool Cell::contains(std::span<const double> x) const {
  for (int k = 0; k < dim(); ++k) {
    if (!(x[k] > lower(k) && x[k] <= upper(k))) return false;
  }
  return true;
}

bool Cell::inside(const Box& box) const {
  for (int k = 0; k < dim(); ++k) {
    if (lower(k) < box.lo[k] || upper(k) >= box.hi[k]) return false;
  }
  return true;
}

Cell make_cell(const TilingSpec& spec, const LatticeIndex& index) {
  Cell c;
  c.index = index;
  c.half_width = spec.epsilon;
  c.center.resize(index.size());
  for (std::size_t k = 0; k < index.size(); ++k) {
    c.center[k] = spec.epsilon * static_cast<double>(index[k]);
  }
  return c;
}

namespace {

// Even lattice coordinate m = 2j with x in (eps(m-1), eps(m+1)].
std::int64_t axis_index(double eps, double x) {
  auto j = static_cast<std::int64_t>(std::ceil((x / eps - 1.0) / 2.0));
  // Repair rounding in x / eps against the exact bound expressions.
  while (x <= eps * static_cast<double>(2 * j - 1)) --j;
  while (x > eps * static_cast<double>(2 * j + 1)) ++j;
  return 2 * j;
}

}  // namespace

std::vector<Cell> cells_intersecting(const TilingSpec& spec, const Box& domain) {
  spec.validate();
  const int d = spec.dim;
  if (domain.dim() != d) fail(ErrorKind::InvalidParameter, "domain dimension mismatch");
  std::vector<std::int64_t> first(d), last(d);
  for (int k = 0; k < d; ++k) {
    if (!(domain.hi[k] > domain.lo[k])) {
      fail(ErrorKind::InvalidParameter, "domain must be a nonempty bounded box");
    }
    const double eps = spec.epsilon;
    // (eps(m-1), eps(m+1)] meets (lo, hi) iff eps(m+1) > lo and eps(m-1) < hi.
    std::int64_t m = axis_index(eps, domain.lo[k]);
    if (!(eps * static_cast<double>(m + 1) > domain.lo[k])) m += 2;
    first[k] = m;
    std::int64_t top = axis_index(eps, domain.hi[k]);
    while (!(eps * static_cast<double>(top - 1) < domain.hi[k])) top -= 2;
    last[k] = top;
  }
  std::vector<Cell> cells;
  LatticeIndex idx(first);
  while (true) {
    cells.push_back(make_cell(spec, idx));
    int k = d - 1;
    while (k >= 0) {
      idx[k] += 2;
      if (idx[k] <= last[k]) break;
      idx[k] = first[k];
      --k;
    }
    if (k < 0) break;
  }
  return cells;
}

Cell cell_of_point(const TilingSpec& spec, std::span<const double> x) {
  spec.validate();
  LatticeIndex idx(static_cast<std::size_t>(spec.dim));
  for (int k = 0; k < spec.dim; ++k) idx[k] = axis_index(spec.epsilon, x[k]);
  return make_cell(spec, idx);
}

}  // namespace perfhom
