#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "perfhom/capacity.hpp"
#include "perfhom/diagnostics.hpp"
#include "perfhom/error.hpp"
#include "perfhom/expr.hpp"
#include "perfhom/harness.hpp"
#include "perfhom/inverse.hpp"
#include "perfhom/parallel.hpp"

namespace py = pybind11;
using namespace perfhom;

namespace {

Potential make_potential(const std::string& text, int dim, bool restrict) {
  Potential mu = parse_potential(text, dim);
  return restrict ? Potential::restrict_to(std::move(mu), Box::unit_cube(dim)) : mu;
}

py::array_t<double> points(const std::vector<Point>& pts, int dim) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(dim)});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < dim; ++k) v(i, k) = pts[i][k];
  return out;
}

py::dict capacity_dict(const CapacityResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["method"] = to_string(r.method);
  d["dim"] = r.dim;
  d["truncation"] = r.truncation;
  d["h"] = r.grid_h;
  d["boundary"] = to_string(r.boundary);
  d["iterations"] = r.stats.iterations;
  return d;
}

py::dict construct(const std::string& potential, double epsilon, int dim, bool restrict) {
  const TilingSpec spec{dim, epsilon};
  const Box domain = Box::unit_cube(dim);
  const auto rep = construct_holes(make_potential(potential, dim, restrict), spec, domain, {});
  std::vector<Point> centers;
  std::vector<double> radii;
  for (const auto& h : rep.holes) {
    centers.push_back(h.center);
    radii.push_back(h.radius);
  }
  py::dict d;
  d["epsilon"] = epsilon;
  d["centers"] = points(centers, dim);
  d["radii"] = py::array_t<double>(radii.size(), radii.data());
  d["masses"] = py::array_t<double>(rep.masses.size(), rep.masses.data());
  d["total_mass"] = rep.total_mass;
  d["max_radius_ratio"] = rep.max_radius_ratio;
  return d;
}

py::dict cell_averages(const std::string& potential, double epsilon, int dim, bool restrict) {
  const auto field = cell_average_field(make_potential(potential, dim, restrict), {dim, epsilon},
                                        Box::unit_cube(dim), {});
  std::vector<Point> centers;
  std::vector<double> values;
  for (const auto& c : field) {
    centers.push_back(c.cell.center);
    values.push_back(c.value);
  }
  py::dict d;
  d["centers"] = points(centers, dim);
  d["values"] = py::array_t<double>(values.size(), values.data());
  return d;
}

py::dict assumptions(const std::string& potential, double epsilon, int dim, bool restrict) {
  const TilingSpec spec{dim, epsilon};
  const Box domain = Box::unit_cube(dim);
  const auto rep = construct_holes(make_potential(potential, dim, restrict), spec, domain, {});
  const auto a = assumption_quantities(rep.holes, rep.separation(), cells_intersecting(spec, domain), domain);
  py::dict d;
  d["epsilon"] = a.epsilon;
  d["max_R"] = a.max_R;
  d["sup_a_over_R"] = a.sup_a_over_R;
  d["sum_A2"] = a.sum_A2;
  d["sup_A3"] = a.sup_A3;
  d["sum_A4"] = a.sum_A4;
  d["sum_A6"] = a.sum_A6;
  d["diam_over_R"] = a.diam_over_R;
  d["cells"] = a.cells;
  d["nonempty_holes"] = a.nonempty_holes;
  return d;
}

double hminus1(py::array_t<double, py::array::c_style | py::array::forcecast> nu, double tol) {
  const int dim = static_cast<int>(nu.ndim());
  if (dim < 1) fail(ErrorKind::InvalidParameter, "field must have at least one axis");
  const auto n = static_cast<std::size_t>(nu.shape(0));
  for (int k = 1; k < dim; ++k)
    if (static_cast<std::size_t>(nu.shape(k)) != n) fail(ErrorKind::InvalidParameter, "field must be a cube of nodes");
  GridField f(Grid::unit(dim, n));
  std::copy(nu.data(), nu.data() + nu.size(), f.values.begin());
  return hminus1_norm(f, tol);
}

py::dict study(const std::string& text) {
  std::istringstream in(text);
  const StudyConfig cfg = parse_study_config(in);
  StudyReport r;
  {
    py::gil_scoped_release release;
    r = run_study(cfg);
  }
  py::dict d;
  d["columns"] = r.columns;
  py::array_t<double> rows({static_cast<py::ssize_t>(r.rows.size()), static_cast<py::ssize_t>(r.columns.size())});
  auto v = rows.mutable_unchecked<2>();
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    for (std::size_t j = 0; j < r.columns.size(); ++j) v(i, j) = r.rows[i][j];
  d["rows"] = rows;
  if (r.failure) {
    py::dict f;
    f["stage"] = r.failure->stage;
    f["epsilon"] = r.failure->epsilon;
    f["kind"] = to_string(r.failure->kind);
    f["message"] = r.failure->message;
    d["failure"] = f;
  } else {
    d["failure"] = py::none();
  }
  py::list checks;
  for (const auto& c : evaluate_checks(cfg, r)) {
    py::dict t;
    t["name"] = c.name;
    t["passed"] = c.passed;
    t["detail"] = c.detail;
    checks.append(t);
  }
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perforated-domain homogenization toolkit";

  static py::exception<Error> exc(m, "PerfhomError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(exc.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("set_num_threads", [](unsigned n) { set_num_threads(n); }, py::arg("n"));
  m.def("sphere_area", &sphere_area, py::arg("d"));
  m.def("capacity_ball", [](int d, double a) { return capacity_ball(d, a).value; }, py::arg("d"), py::arg("a"));
  m.def(
      "capacity_variational",
      [](int d, double a, double L, double h, double tol, const std::string& boundary) {
        BallBoundary b;
        if (boundary == "cut-edge") {
          b = BallBoundary::CutEdge;
        } else if (boundary == "node-mask") {
          b = BallBoundary::NodeMask;
        } else {
          fail(ErrorKind::InvalidParameter, "boundary must be cut-edge or node-mask");
        }
        CapacityResult r;
        {
          py::gil_scoped_release release;
          r = capacity_variational(d, a, L, h, tol, b);
        }
        return capacity_dict(r);
      },
      py::arg("d"), py::arg("a"), py::arg("L"), py::arg("h"), py::arg("tol") = 1e-10,
      py::arg("boundary") = "cut-edge");
  m.def(
      "capacity_extrapolate",
      [](int d, double near_value, double near_L, double far_value, double far_L) {
        CapacityResult a, b;
        a.dim = b.dim = d;
        a.value = near_value;
        a.truncation = near_L;
        a.method = b.method = CapacityMethod::Variational;
        b.value = far_value;
        b.truncation = far_L;
        return capacity_extrapolate(a, b).value;
      },
      py::arg("d"), py::arg("near_value"), py::arg("near_L"), py::arg("far_value"), py::arg("far_L"));
  m.def("radius_for_capacity", &radius_for_capacity, py::arg("d"), py::arg("mass"));
  m.def("construct_holes", &construct, py::arg("potential"), py::arg("epsilon"), py::arg("dim") = 3,
        py::arg("restrict") = true);
  m.def("cell_average_field", &cell_averages, py::arg("potential"), py::arg("epsilon"), py::arg("dim") = 3,
        py::arg("restrict") = true);
  m.def("assumption_quantities", &assumptions, py::arg("potential"), py::arg("epsilon"), py::arg("dim") = 3,
        py::arg("restrict") = true);
  m.def("hminus1_norm", &hminus1, py::arg("nu"), py::arg("tol") = 1e-10);
  m.def("run_study", &study, py::arg("config"));
}
