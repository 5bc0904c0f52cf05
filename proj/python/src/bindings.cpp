#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atfrac/analysis.hpp"
#include "atfrac/config.hpp"
#include "atfrac/run_io.hpp"
#include "atfrac/solve.hpp"

namespace py = pybind11;
using namespace atfrac;

namespace {

Face face_from(const std::string& s) { return parse_face(s); }

py::dict record_dict(const EnergyRecord& r) {
    py::dict d;
    d["step"] = r.step;
    d["t"] = r.t;
    d["elliptic"] = r.elliptic;
    d["surface"] = r.surface;
    d["total"] = r.total;
    d["work_inc"] = r.work_increment;
    d["work_cum"] = r.work_cumulative;
    d["upper_bound"] = r.upper_bound;
    d["lower_bound"] = r.lower_bound;
    d["am_sweeps"] = r.am_sweeps;
    d["competitor_accepted"] = r.competitor_accepted;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ambrosio-Tortorelli quasi-static fracture evolution";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("node_count", &Grid::node_count)
        .def_property_readonly("cell_count", &Grid::cell_count)
        .def("spacing", &Grid::spacing)
        .def("cells", &Grid::cells)
        .def("extent", &Grid::extent)
        .def("is_dirichlet", &Grid::is_dirichlet)
        .def("coordinates", [](const Grid& g) {
            Eigen::MatrixXd xy(g.node_count(), 2);
            for (int n = 0; n < g.node_count(); ++n) xy.row(n) << g.x(n), g.y(n);
            return xy;
        });

    m.def(
        "build_grid",
        [](int dim, std::vector<double> extents, std::vector<int> cells, const std::vector<std::string>& faces) {
            if (extents.size() != static_cast<size_t>(dim) || cells.size() != static_cast<size_t>(dim))
                throw InvalidArgument("build_grid: extents and cells need one entry per axis");
            std::vector<Face> f;
            for (const auto& s : faces) f.push_back(face_from(s));
            return std::const_pointer_cast<Grid>(build_grid(dim, {extents[0], dim == 2 ? extents[1] : 0.0},
                                                            {cells[0], dim == 2 ? cells[1] : 0}, f));
        },
        py::arg("dim"), py::arg("extents"), py::arg("cells"), py::arg("dirichlet"));

    py::class_<Field>(m, "Field")
        .def(py::init([](std::shared_ptr<Grid> g, const Vector& values) { return Field(g, values); }))
        .def_property_readonly("values", [](const Field& f) { return f.values(); })
        .def("__len__", &Field::size);

    py::class_<ATParams>(m, "ATParams")
        .def(py::init([](double eps, double measure) { return ATParams::with_defaults(eps, measure); }),
             py::arg("eps"), py::arg("domain_measure") = 1.0)
        .def_readwrite("eps", &ATParams::eps)
        .def_readwrite("eta", &ATParams::eta)
        .def_readwrite("delta", &ATParams::delta)
        .def_readwrite("tol_am", &ATParams::tol_am)
        .def_readwrite("tol_lin", &ATParams::tol_lin)
        .def_readwrite("tol_qp", &ATParams::tol_qp)
        .def_readwrite("max_sweeps", &ATParams::max_sweeps);

    py::class_<QuadraticForm>(m, "QuadraticForm")
        .def_property_readonly("A", [](const QuadraticForm& f) { return SparseMatrix(f.A); })
        .def_property_readonly("b", [](const QuadraticForm& f) { return Vector(f.b); })
        .def_readonly("c", &QuadraticForm::c)
        .def("evaluate", &QuadraticForm::evaluate)
        .def("gradient", &QuadraticForm::gradient);

    m.def("assemble_weighted_stiffness", [](const Field& w, double eta) {
        return assemble_weighted_stiffness(w.grid(), w, eta);
    });
    m.def("assemble_phase_form", [](const Field& u, double eps, double eta) {
        return assemble_phase_form(u.grid(), u, eps, eta);
    });

    m.def("elliptic_energy", &elliptic_energy, py::arg("u"), py::arg("v"), py::arg("eta"));
    m.def("mm_energy", &mm_energy, py::arg("v"), py::arg("eps"));
    m.def("total_energy", &total_energy, py::arg("u"), py::arg("v"), py::arg("params"));
    m.def("work_increment", &work_increment);

    m.def(
        "solve_box_qp",
        [](const QuadraticForm& form, const Vector& lower, const Vector& upper, double tol) {
            return solve_box_qp(form, lower, upper, tol).x;
        },
        py::arg("form"), py::arg("lower"), py::arg("upper"), py::arg("tol") = 1e-10);

    m.def(
        "alternate_minimize",
        [](const Field& u0, const Field& v0, const Field& v_upper, const Field& g, const ATParams& p) {
            const AMResult r = alternate_minimize(u0, v0, v_upper, g, p);
            return py::make_tuple(r.u, r.v, record_dict(r.record), r.sweeps);
        },
        py::arg("u0"), py::arg("v0"), py::arg("v_upper"), py::arg("g"), py::arg("params"));

    m.def(
        "run",
        [](const std::string& config_text) {
            RunConfig c = parse_config_text(config_text);
            if (c.eps.size() != 1) throw InvalidArgument("run: config lists several eps values; use sweep");
            c = expand_sweep(c).front();
            const GridPtr grid = make_grid(c);
            const Trajectory traj = run(grid, make_schedule(c, grid), make_params(c), make_strategy(c));
            py::list records;
            for (const auto& r : traj.records) records.append(record_dict(r));
            py::list v;
            for (const auto& f : traj.v) v.append(f.values());
            py::dict out;
            out["records"] = records;
            out["v"] = v;
            out["u_final"] = traj.u.back().values();
            out["crack_time"] = crack_time(traj, c.threshold);
            return out;
        },
        py::arg("config_text"), "Runs one evolution described by a config file's text.");

    m.def(
        "sweep",
        [](const std::string& config_text) {
            const RunConfig c = parse_config_text(config_text);
            py::list rows;
            for (const auto& r : eps_sweep(c, c.eps)) {
                py::dict d;
                d["eps"] = r.eps;
                d["h"] = r.h;
                d["delta"] = r.delta;
                d["crack_time"] = r.crack_time;
                d["surface_final"] = r.surface_final;
                d["elliptic_final"] = r.elliptic_final;
                d["sup_gap"] = r.sup_gap;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config_text"));

    m.def(
        "sharp_oracle_1d",
        [](const Knots& a, const std::vector<double>& times, double toughness, double length) {
            const OraclePath p = sharp_oracle_1d(a, times, toughness, length);
            return py::make_tuple(p.energy, p.crack_time);
        },
        py::arg("amplitude"), py::arg("times"), py::arg("toughness") = 1.0, py::arg("length") = 1.0);
    m.def(
        "sharp_oracle_strip",
        [](double w, const Knots& a, const std::vector<double>& times, double height, double toughness) {
            const OraclePath p = sharp_oracle_strip(w, a, times, height, toughness);
            return py::make_tuple(p.energy, p.crack_time);
        },
        py::arg("width"), py::arg("amplitude"), py::arg("times"), py::arg("height") = 1.0,
        py::arg("toughness") = 1.0);

    m.def(
        "select_levels",
        [](const Field& v, double c1, int jmax) {
            py::list out;
            for (const auto& l : select_levels(v, c1, jmax))
                out.append(py::make_tuple(l.j, l.level, l.perimeter, l.certified));
            return out;
        },
        py::arg("v"), py::arg("c1"), py::arg("jmax") = 5);

    m.def(
        "audit_run_directory",
        [](const std::string& dir) {
            const AuditReport r = audit_run_directory(dir);
            py::list violations;
            for (const auto& v : r.violations) violations.append(py::make_tuple(v.step, v.message));
            return py::make_tuple(r.ok(), violations);
        },
        py::arg("dir"));
}
