#include "chemlayer/errors.hpp"
#include "chemlayer/full.hpp"
#include "chemlayer/harness.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace chemlayer;

namespace {

py::array_t<double> to_array(const TimeField& f) {
    py::array_t<double> out({f.levels(), f.size()});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < f.levels(); ++k)
        for (std::size_t i = 0; i < f.size(); ++i) m(k, i) = f.at(k, i);
    return out;
}

py::array_t<double> to_array(std::span<const double> v) { return py::array_t<double>(v.size(), v.data()); }

py::dict row_dict(const StudyRow& r) {
    py::dict d;
    d["eps"] = r.eps;
    d["e1_sup"] = r.e1_sup;
    d["e1x_weighted"] = r.e1x_weighted;
    d["e2_sup"] = r.e2_sup;
    d["u_weighted"] = r.u_weighted;
    d["layer_gap"] = r.layer_gap;
    d["lambda_sup"] = r.lambda_sup;
    d["width"] = r.width;
    d["mass_defect"] = r.mass_defect;
    d["full_bound_violations"] = r.full_bound_violations;
    d["layer_bound_violations"] = r.layer_bound_violations;
    d["homogenization_phi"] = r.homogenization_phi;
    d["homogenization_v"] = r.homogenization_v;
    return d;
}

py::dict solve(const StudyConfig& cfg, double eps) {
    const InitialData data = cfg.make_data();
    const Grid1D grid = build_layer_grid(cfg.grid_n, eps, cfg.grid_c);
    FullSolution sol;
    {
        py::gil_scoped_release release;
        sol = solve_full(data, eps, cfg.v_star, grid, TimeGrid(cfg.T, cfg.effective_dt(), cfg.record_dt));
    }
    py::dict d;
    d["x"] = to_array(sol.grid.nodes());
    d["t"] = to_array(sol.phi.times());
    d["phi"] = to_array(sol.phi);
    d["v"] = to_array(sol.v);
    d["u"] = to_array(sol.u());
    d["mass_defect"] = sol.mass_defect;
    d["bound_violations"] = sol.v_bounds.violations;
    if (eps == 0.0) d["boundary_ode_defect"] = boundary_ode_check(sol);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Boundary-layer lab for the consumption-type Keller-Segel system";

    static py::exception<StageError> stage_error(m, "StageError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const StageError& e) {
            py::set_error(stage_error, e.what());
        }
    });

    py::class_<Exponents>(m, "Exponents")
        .def_readonly("iota0", &Exponents::iota0)
        .def_readonly("phi_sup", &Exponents::phi_sup)
        .def_readonly("phi_x_weighted", &Exponents::phi_x_weighted)
        .def_readonly("v_sup", &Exponents::v_sup);
    m.def("derive_iota0", &derive_iota0, py::arg("alpha"), py::arg("nu"));
    m.def("chi", &chi, py::arg("s"));

    py::class_<StudyConfig>(m, "StudyConfig")
        .def(py::init<>())
        .def_static("from_json", &StudyConfig::from_json_text, py::arg("text"))
        .def_static("load", &StudyConfig::load, py::arg("path"))
        .def("to_json", &StudyConfig::to_json_text)
        .def("validate", &StudyConfig::validate, py::arg("min_eps_count") = 1)
        .def("hash", &StudyConfig::hash)
        .def_readwrite("eps", &StudyConfig::eps)
        .def_readwrite("alpha", &StudyConfig::alpha)
        .def_readwrite("nu", &StudyConfig::nu)
        .def_readwrite("v_star", &StudyConfig::v_star)
        .def_readwrite("T", &StudyConfig::T)
        .def_readwrite("grid_n", &StudyConfig::grid_n)
        .def_readwrite("outer_n", &StudyConfig::outer_n)
        .def_readwrite("layer_cells", &StudyConfig::layer_cells)
        .def_readwrite("z_max", &StudyConfig::z_max)
        .def_readwrite("dt", &StudyConfig::dt)
        .def_readwrite("record_dt", &StudyConfig::record_dt)
        .def_readwrite("t_min", &StudyConfig::t_min)
        .def_readwrite("output_dir", &StudyConfig::output_dir);

    m.def("solve", &solve, py::arg("config"), py::arg("eps"),
          "Full solve at one eps; returns x, t and (levels, nodes) arrays phi, v, u.");

    m.def(
        "run_study",
        [](const StudyConfig& cfg) {
            ConvergenceReport rep;
            {
                py::gil_scoped_release release;
                rep = run_study(cfg);
            }
            py::dict d;
            py::list rows, flags;
            for (const auto& r : rep.rows) rows.append(row_dict(r));
            for (const auto& f : rep.flags) flags.append(py::make_tuple(f.name, f.pass, f.detail));
            d["rows"] = rows;
            d["flags"] = flags;
            d["warnings"] = rep.warnings;
            d["csv"] = report_csv(rep);
            d["json"] = report_json(rep, false);
            d["all_pass"] = rep.all_pass();
            return d;
        },
        py::arg("config"));

    m.def("check", [] {
        std::vector<Flag> flags;
        {
            py::gil_scoped_release release;
            flags = run_invariant_suite();
        }
        py::list out;
        for (const auto& f : flags) out.append(py::make_tuple(f.name, f.pass, f.detail));
        return out;
    });
}
