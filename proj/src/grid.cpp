#include "perfhom/grid.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "perfhom/error.hpp"
#include "perfhom/format.hpp"
#include "perfhom/parallel.hpp"

namespace perfhom {

namespace {

constexpr std::size_t kReduceBlock = 8192;

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Per-line neighbour layout for the axes other than the contiguous one.
struct LineNeighbours {
  int count = 0;
  std::ptrdiff_t minus[16];
  std::ptrdiff_t plus[16];
  bool has_minus[16];
  bool has_plus[16];
};

LineNeighbours neighbours(const Grid& g, std::size_t line) {
  LineNeighbours nb;
  nb.count = g.dim - 1;
  std::size_t rest = line;
  for (int k = g.dim - 2; k >= 0; --k) {
    const std::size_t digit = rest % g.n;
    rest /= g.n;
    const auto s = static_cast<std::ptrdiff_t>(g.stride(k));
    nb.minus[k] = -s;
    nb.plus[k] = s;
    nb.has_minus[k] = digit > 0;
    nb.has_plus[k] = digit + 1 < g.n;
  }
  return nb;
}

void apply_lines(const Grid& g, std::span<const double> w, const double* x, double* y,
                 std::size_t l0, std::size_t l1) {
  const std::size_t n = g.n;
  const double c1 = 1.0 / (g.h * g.h);
  const double c0 = 2.0 * g.dim * c1;
  for (std::size_t line = l0; line < l1; ++line) {
    const std::size_t b = line * n;
    const double* xb = x + b;
    double* yb = y + b;
    if (w.empty()) {
      for (std::size_t t = 0; t < n; ++t) yb[t] = c0 * xb[t];
    } else {
      const double* wb = w.data() + b;
      for (std::size_t t = 0; t < n; ++t) yb[t] = (c0 + wb[t]) * xb[t];
    }
    for (std::size_t t = 1; t < n; ++t) yb[t] -= c1 * xb[t - 1];
    for (std::size_t t = 0; t + 1 < n; ++t) yb[t] -= c1 * xb[t + 1];
    const LineNeighbours nb = neighbours(g, line);
    for (int k = 0; k < nb.count; ++k) {
      if (nb.has_minus[k]) {
        const double* xm = xb + nb.minus[k];
        for (std::size_t t = 0; t < n; ++t) yb[t] -= c1 * xm[t];
      }
      if (nb.has_plus[k]) {
        const double* xp = xb + nb.plus[k];
        for (std::size_t t = 0; t < n; ++t) yb[t] -= c1 * xp[t];
      }
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return ordered_sum(a.size(), kReduceBlock, [&](std::size_t i0, std::size_t i1) {
    double s = 0.0;
    for (std::size_t i = i0; i < i1; ++i) s += a[i] * b[i];
    return s;
  });
}

}  // namespace

Grid Grid::unit(int dim, std::size_t n) {
  Grid g;
  g.dim = dim;
  g.n = n;
  g.h = 1.0 / static_cast<double>(n + 1);
  g.lower = 0.0;
  g.validate();
  return g;
}

std::size_t Grid::size() const { return ipow(n, dim); }

std::size_t Grid::stride(int axis) const { return ipow(n, dim - 1 - axis); }

double Grid::cell_volume() const { return std::pow(h, dim); }

void Grid::node(std::size_t linear, std::span<double> x) const {
  for (int k = dim - 1; k >= 0; --k) {
    x[k] = coord(linear % n);
    linear /= n;
  }
}

void Grid::validate() const {
  if (dim < 1 || dim > 16) fail(ErrorKind::InvalidParameter, "grid dimension out of range");
  if (n < 1) fail(ErrorKind::InvalidParameter, "grid needs at least one interior node per axis");
  if (!(h > 0.0)) fail(ErrorKind::InvalidParameter, "grid spacing must be positive");
}

bool operator==(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.n == b.n && a.h == b.h && a.lower == b.lower;
}

GridField GridField::sample(const Grid& g,
                            const std::function<double(std::span<const double>)>& f) {
  GridField field(g);
  parallel_for(g.size(), [&](std::size_t i0, std::size_t i1) {
    std::vector<double> x(static_cast<std::size_t>(g.dim));
    for (std::size_t i = i0; i < i1; ++i) {
      g.node(i, x);
      field.values[i] = f(x);
    }
  });
  return field;
}

void apply_operator(const Grid& grid, std::span<const double> weights,
                    std::span<const double> x, std::span<double> y) {
  parallel_for(grid.lines(), [&](std::size_t l0, std::size_t l1) {
    apply_lines(grid, weights, x.data(), y.data(), l0, l1);
  });
}

SolveStats solve_dirichlet(const Grid& grid, std::span<const std::uint8_t> fixed,
                           std::span<const double> weights, std::span<const double> rhs,
                           std::span<double> x, const CgOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  grid.validate();
  const std::size_t N = grid.size();
  if (rhs.size() != N || x.size() != N || (!fixed.empty() && fixed.size() != N) ||
      (!weights.empty() && weights.size() != N)) {
    fail(ErrorKind::Structural, "solve_dirichlet: array sizes do not match the grid");
  }
  if (!(options.tol > 0.0)) fail(ErrorKind::InvalidParameter, "solver tolerance must be positive");
  auto is_fixed = [&](std::size_t i) { return !fixed.empty() && fixed[i] != 0; };

  // Lift the fixed values into the right-hand side.
  std::vector<double> r(N), p(N, 0.0), q(N);
  bool lifted = false;
  for (std::size_t i = 0; i < N && !fixed.empty(); ++i) {
    if (is_fixed(i)) {
      p[i] = x[i];
      lifted = lifted || x[i] != 0.0;
    }
  }
  if (lifted) apply_operator(grid, weights, p, q);
  parallel_for(N, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      if (is_fixed(i)) {
        r[i] = 0.0;
      } else {
        r[i] = rhs[i] - (lifted ? q[i] : 0.0);
        x[i] = 0.0;
      }
    }
  });

  const double c0 = 2.0 * grid.dim / (grid.h * grid.h);
  std::vector<double> minv;
  if (!weights.empty()) {
    minv.resize(N);
    for (std::size_t i = 0; i < N; ++i) minv[i] = 1.0 / (c0 + weights[i]);
  }
  auto precond = [&](std::size_t i) { return minv.empty() ? 1.0 / c0 : minv[i]; };

  SolveStats stats;
  const double bnorm = std::sqrt(dot(r, r));
  if (bnorm == 0.0) {
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
  }
  const std::size_t max_iter = options.max_iterations > 0
                                   ? options.max_iterations
                                   : 1000 + 10 * (grid.n + 1) * static_cast<std::size_t>(grid.dim);

  for (std::size_t i = 0; i < N; ++i) p[i] = r[i] * precond(i);
  double rz = ordered_sum(N, kReduceBlock, [&](std::size_t i0, std::size_t i1) {
    double s = 0.0;
    for (std::size_t i = i0; i < i1; ++i) s += r[i] * r[i] * precond(i);
    return s;
  });

  double rel = 1.0;
  std::size_t it = 0;
  while (true) {
    apply_operator(grid, weights, p, q);
    if (!fixed.empty()) {
      for (std::size_t i = 0; i < N; ++i) {
        if (fixed[i]) q[i] = 0.0;
      }
    }
    const double pq = dot(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      fail(ErrorKind::Solver, "conjugate gradients broke down at iteration " +
                                  std::to_string(it) + " (relative residual " +
                                  format_g17(rel) + ")");
    }
    const double alpha = rz / pq;
    std::vector<double> parts((N + kReduceBlock - 1) / kReduceBlock * 2, 0.0);
    const std::size_t nblocks = (N + kReduceBlock - 1) / kReduceBlock;
    parallel_for(nblocks, [&](std::size_t b0, std::size_t b1) {
      for (std::size_t blk = b0; blk < b1; ++blk) {
        double rr_s = 0.0, rz_s = 0.0;
        const std::size_t i1 = std::min(N, (blk + 1) * kReduceBlock);
        for (std::size_t i = blk * kReduceBlock; i < i1; ++i) {
          x[i] += alpha * p[i];
          r[i] -= alpha * q[i];
          rr_s += r[i] * r[i];
          rz_s += r[i] * r[i] * precond(i);
        }
        parts[2 * blk] = rr_s;
        parts[2 * blk + 1] = rz_s;
      }
    });
    double rr = 0.0, rz_new = 0.0;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      rr += parts[2 * blk];
      rz_new += parts[2 * blk + 1];
    }
    ++it;
    rel = std::sqrt(rr) / bnorm;
    if (rel <= options.tol) break;
    if (it >= max_iter || !std::isfinite(rel)) {
      fail(ErrorKind::Solver, "conjugate gradients did not converge in " + std::to_string(it) +
                                  " iterations (relative residual " + format_g17(rel) + ")");
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    parallel_for(N, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) p[i] = r[i] * precond(i) + beta * p[i];
    });
  }
  stats.iterations = it;
  stats.residual = rel;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

double gradient_pairing(const Grid& grid, std::span<const double> u, std::span<const double> g) {
  const std::size_t n = grid.n;
  const double scale = std::pow(grid.h, grid.dim - 2);
  const double total = ordered_sum(grid.lines(), 16, [&](std::size_t l0, std::size_t l1) {
    double s = 0.0;
    for (std::size_t line = l0; line < l1; ++line) {
      const std::size_t b = line * n;
      const double* ub = u.data() + b;
      const double* gb = g.data() + b;
      // Contiguous axis: n + 1 edges, zero values beyond both ends.
      s += ub[0] * gb[0];
      for (std::size_t t = 1; t < n; ++t) s += (ub[t] - ub[t - 1]) * (gb[t] - gb[t - 1]);
      s += ub[n - 1] * gb[n - 1];
      const LineNeighbours nb = neighbours(grid, line);
      for (int k = 0; k < nb.count; ++k) {
        if (!nb.has_minus[k]) {
          for (std::size_t t = 0; t < n; ++t) s += ub[t] * gb[t];
        }
        if (nb.has_plus[k]) {
          const double* up = ub + nb.plus[k];
          const double* gp = gb + nb.plus[k];
          for (std::size_t t = 0; t < n; ++t) s += (up[t] - ub[t]) * (gp[t] - gb[t]);
        } else {
          for (std::size_t t = 0; t < n; ++t) s += ub[t] * gb[t];
        }
      }
    }
    return s;
  });
  return total * scale;
}

double l2_inner(const Grid& grid, std::span<const double> u, std::span<const double> g) {
  return dot(u, g) * grid.cell_volume();
}

GridField inject(const GridField& fine, const Grid& coarse) {
  const Grid& f = fine.grid;
  if (f.dim != coarse.dim || f.lower != coarse.lower || (f.n + 1) % (coarse.n + 1) != 0) {
    fail(ErrorKind::Structural, "inject: grids are not nested");
  }
  const std::size_t ratio = (f.n + 1) / (coarse.n + 1);
  if (std::abs(coarse.h - f.h * static_cast<double>(ratio)) > 1e-12 * coarse.h) {
    fail(ErrorKind::Structural, "inject: grid spacings are not nested");
  }
  GridField out(coarse);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    std::size_t rest = i, fi = 0;
    for (int k = coarse.dim - 1; k >= 0; --k) {
      const std::size_t j = rest % coarse.n;
      rest /= coarse.n;
      fi += (ratio * (j + 1) - 1) * f.stride(k);
    }
    out.values[i] = fine.values[fi];
  }
  return out;
}

double interpolate(const GridField& field, std::span<const double> x) {
  const Grid& g = field.grid;
  const int d = g.dim;
  std::vector<std::ptrdiff_t> j0(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double s = (x[k] - g.lower) / g.h - 1.0;
    const double fl = std::floor(s);
    j0[k] = static_cast<std::ptrdiff_t>(fl);
    frac[k] = s - fl;
  }
  double value = 0.0;
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    double weight = 1.0;
    std::size_t idx = 0;
    bool outside = false;
    for (int k = 0; k < d; ++k) {
      const bool up = (corner >> k) & 1u;
      const std::ptrdiff_t j = j0[k] + (up ? 1 : 0);
      weight *= up ? frac[k] : 1.0 - frac[k];
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(g.n)) {
        outside = true;
      } else {
        idx += static_cast<std::size_t>(j) * g.stride(k);
      }
    }
    if (!outside && weight != 0.0) value += weight * field.values[idx];
  }
  return value;
}

void write_field_binary(std::ostream& out, const GridField& field) {
  const Grid& g = field.grid;
  out << g.dim << ' ' << g.n << ' ' << format_g17(g.h) << '\n';
  for (double v : field.values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

GridField read_field_binary(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::Config, "field file: missing header");
  const auto parts = split(header, ' ');
  if (parts.size() != 3) fail(ErrorKind::Config, "field file: bad header '" + header + "'");
  Grid g;
  g.dim = static_cast<int>(parse_int(parts[0]));
  g.n = static_cast<std::size_t>(parse_int(parts[1]));
  g.h = parse_double(parts[2]);
  g.validate();
  GridField field(g);
  for (auto& v : field.values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) fail(ErrorKind::Config, "field file: truncated");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v = std::bit_cast<double>(bits);
  }
  return field;
}

void write_line_csv(std::ostream& out, const GridField& field, std::span<const double> p0,
                    std::span<const double> p1, std::size_t count) {
  const int d = field.grid.dim;
  out << 't';
  for (int k = 0; k < d; ++k) out << ",x" << (k + 1);
  out << ",value\n";
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s < count; ++s) {
    const double t = count > 1 ? static_cast<double>(s) / static_cast<double>(count - 1) : 0.0;
    for (int k = 0; k < d; ++k) x[k] = p0[k] + t * (p1[k] - p0[k]);
    out << format_g17(t);
    for (int k = 0; k < d; ++k) out << ',' << format_g17(x[k]);
    out << ',' << format_g17(interpolate(field, x)) << '\n';
  }
}

}  // namespace perfhom
