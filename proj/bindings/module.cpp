#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mendel/error.hpp"
#include "mendel/io.hpp"
#include "mendel/report.hpp"
#include "mendel/run.hpp"

namespace py = pybind11;
using namespace mendel;

namespace {

// Structured results cross the boundary as JSON text, the same bytes the CLI writes.
std::string text(const nlohmann::json& j) { return dump_json(j, -1); }

ModelParams make_params(double f, double D, double delta, double c, double eta, double c_aB,
                        const std::string& compat, std::int64_t K) {
    ModelParams p;
    p.f = f;
    p.D = D;
    p.delta = delta;
    p.c = c;
    p.eta = eta;
    p.c_aB = c_aB;
    const auto mode = parse_compatibility(compat);
    if (!mode) throw ConfigError("unknown compatibility mode '" + compat + "'");
    p.compat = *mode;
    p.K = K;
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Three-allele Mendelian population model";
    m.attr("__version__") = std::string(tool_version());
    m.attr("CSV_HEADER") = std::string(kCsvHeader);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init(&make_params), py::arg("f") = 6.0, py::arg("D") = 0.7, py::arg("delta") = 0.1,
             py::arg("c") = 1.0, py::arg("eta") = 0.0, py::arg("c_aB") = 0.0,
             py::arg("compat") = "no-reproduction-a-B", py::arg("K") = 1000)
        .def_readwrite("f", &ModelParams::f)
        .def_readwrite("D", &ModelParams::D)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("c", &ModelParams::c)
        .def_readwrite("eta", &ModelParams::eta)
        .def_readwrite("c_aB", &ModelParams::c_aB)
        .def_readwrite("K", &ModelParams::K)
        .def_property(
            "compat", [](const ModelParams& p) { return std::string(name(p.compat)); },
            [](ModelParams& p, const std::string& s) {
                const auto mode = parse_compatibility(s);
                if (!mode) throw ConfigError("unknown compatibility mode '" + s + "'");
                p.compat = *mode;
            })
        .def("validate", &ModelParams::validate)
        .def("to_json", [](const ModelParams& p) { return text(to_json(p)); });

    m.def("equilibria", [](const ModelParams& p) {
        const auto e = equilibria(p);
        return py::dict(py::arg("a") = e.a, py::arg("A") = e.A, py::arg("B") = e.B);
    });
    m.def("birth_rates", [](const State& n, const ModelParams& p) { return birth_rates(n, p); });
    m.def("birth_rates_oracle", &birth_rates_oracle);
    m.def("death_rates", [](const State& n, const ModelParams& p) { return death_rates(n, p); });
    m.def("vector_field", [](const State& n, const ModelParams& p) { return vector_field(n, p); });
    m.def("second_mutation_state", [](const ModelParams& p, double eps) { return second_mutation_preset(p, eps).n; });
    m.def("coexistence_point", &coexistence_point);

    m.def(
        "integrate",
        [](const ModelParams& p, const State& n0, double t_end, double tol) {
            InitialCondition ic;
            ic.n = n0;
            const auto traj = integrate(p, ic, t_end, tol);
            return py::make_tuple(traj.times(), traj.states());
        },
        py::arg("params"), py::arg("n0"), py::arg("t_end"), py::arg("tol") = 1e-10);

    m.def(
        "phases",
        [](const ModelParams& p, double eps, double eps0, double t2_delta, double entry_radius) {
            PhaseSettings s;
            s.eps = eps;
            s.eps0 = eps0;
            s.delta = t2_delta;
            s.validate(p);
            s.entry_radius = entry_radius;
            py::gil_scoped_release release;
            const auto r = run_phases(p, s, {}, {});
            return text(to_json(r.report));
        },
        py::arg("params"), py::arg("eps") = 0.01, py::arg("eps0") = 0.03, py::arg("t2_delta") = 0.05,
        py::arg("entry_radius") = 0.01);

    m.def(
        "simulate",
        [](const ModelParams& p, const Counts& init, double t_max, std::uint64_t seed, double sample_dt) {
            SimulationOptions o;
            o.seed = seed;
            if (sample_dt > 0.0) o.sample_times = uniform_grid(t_max, sample_dt);
            SimulationResult r;
            {
                py::gil_scoped_release release;
                r = simulate(p, init, t_max, o);
            }
            return py::make_tuple(r.sample_times, r.samples, text(summary_json(r)));
        },
        py::arg("params"), py::arg("init"), py::arg("t_max"), py::arg("seed") = 1, py::arg("sample_dt") = 0.0);

    m.def("fixed_points", [](const ModelParams& p) { return text(to_json(fixed_points(p))); });
    m.def("spectrum", [](const std::string& label, const State& n, const ModelParams& p) {
        return text(to_json(spectrum(label, n, p)));
    });
    m.def("center_manifold", [](const ModelParams& p) { return text(to_json(center_manifold(p))); });
    m.def("stability_threshold", &stability_threshold);
    m.def("r_max", [] { return r_extremum().value; });

    m.def(
        "run",
        [](const std::string& mode, const std::map<std::string, std::string>& settings, const std::string& out) {
            RunConfig config;
            const auto parsed = parse_mode(mode);
            if (!parsed) throw ConfigError("unknown mode '" + mode + "'");
            config.mode = *parsed;
            for (const auto& [k, v] : settings) config.set(k, v);
            config.validate();
            const auto dir = out.empty() ? default_run_dir(config) : std::filesystem::path(out);
            RunOutcome outcome;
            {
                py::gil_scoped_release release;
                outcome = run(config, dir);
            }
            return py::make_tuple(static_cast<int>(outcome.exit_code), outcome.dir, text(outcome.report),
                                  outcome.warnings);
        },
        py::arg("mode"), py::arg("settings") = std::map<std::string, std::string>{}, py::arg("out") = "");
}
