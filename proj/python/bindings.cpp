#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "railems/config.hpp"
#include "railems/error.hpp"
#include "railems/ev_fleet.hpp"
#include "railems/mip_solver.hpp"
#include "railems/mps.hpp"
#include "railems/pipeline.hpp"
#include "railems/pv.hpp"

namespace py = pybind11;
using namespace railems;

namespace {

RunOptions run_options(const std::string& mode, std::optional<std::uint64_t> seed, const std::string& scenarios,
                       int threads) {
    RunOptions opt;
    opt.mode = parse_mode(mode);
    opt.seed = seed;
    opt.scenarios = scenarios;
    opt.threads = threads;
    return opt;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Day-ahead station energy management (native core)";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<InfeasibleInputError>(m, "InfeasibleInputError", base.ptr());
    py::register_exception<InternalConsistencyError>(m, "InternalConsistencyError", base.ptr());

    m.def(
        "pv_power",
        [](double beta, double rated_kw, double r_c, double r_std) {
            return pv_power(beta, PvSpec{rated_kw, r_c, r_std});
        },
        py::arg("beta"), py::arg("rated_kw") = 1000.0, py::arg("r_c") = 150.0, py::arg("r_std") = 1000.0);

    m.def(
        "flex_bounds",
        [](double e_requested, int stay_steps, double kappa, double p_nominal, double p_max, double eta,
           int step_minutes) {
            EvSession s;
            s.ev_class = EvClass{EvKind::Car, p_nominal, p_max, eta};
            s.t_arrival = 1;
            s.t_departure = 1 + stay_steps;
            s.e_requested = e_requested;
            const FlexBounds b = flex_bounds(s, kappa, TimeGrid{step_minutes, s.t_departure});
            return py::make_tuple(b.theta_min, b.theta_max);
        },
        py::arg("e_requested"), py::arg("stay_steps"), py::arg("kappa") = 0.6, py::arg("p_nominal") = 11.0,
        py::arg("p_max") = 22.0, py::arg("eta") = 1.0, py::arg("step_minutes") = 10);

    m.def(
        "config_json", [](const std::filesystem::path& path) { return config_to_json(load_config(path)); },
        py::arg("path"), "Configuration with all defaults expanded, as JSON text.");

    m.def(
        "run_json",
        [](const std::filesystem::path& config, const std::string& mode, std::optional<std::uint64_t> seed,
           const std::string& scenarios, int threads, std::optional<std::filesystem::path> out_dir) {
            const SiteConfig cfg = load_config(config);
            const RunOptions opt = run_options(mode, seed, scenarios, threads);
            RunReport report;
            {
                py::gil_scoped_release release;
                report = run_pipeline(cfg, opt);
            }
            if (out_dir) write_outputs(report, *out_dir);
            return report.to_json();
        },
        py::arg("config"), py::arg("mode") = "A", py::arg("seed") = py::none(), py::arg("scenarios") = "",
        py::arg("threads") = 0, py::arg("out_dir") = py::none());

    m.def(
        "export_mps",
        [](const std::filesystem::path& config, const std::filesystem::path& out_dir, const std::string& mode,
           const std::string& scenarios) {
            RunOptions opt = run_options(mode, std::nullopt, scenarios, 1);
            opt.export_mps_dir = out_dir;
            py::gil_scoped_release release;
            run_pipeline(load_config(config), opt);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("mode") = "A", py::arg("scenarios") = "");

    m.def(
        "solve_mps",
        [](const std::filesystem::path& path) {
            const CanonicalMilp model = import_mps(path);
            MipSolution s;
            {
                py::gil_scoped_release release;
                s = solve_mip(model);
            }
            py::dict out;
            out["status"] = std::string(status_name(s.status));
            out["objective"] = s.objective;
            out["nodes"] = s.nodes;
            std::vector<std::string> names;
            for (int j = 0; j < model.num_columns(); ++j) names.push_back(model.column_name(j));
            out["columns"] = names;
            out["x"] = s.x;
            return out;
        },
        py::arg("path"));

    m.def(
        "oracle",
        [](const std::filesystem::path& config, const std::string& mode) {
            py::list out;
            for (const OracleCase& c : run_oracle(load_config(config), parse_mode(mode))) {
                py::dict d;
                d["scenario"] = c.scenario;
                d["binaries"] = c.binaries;
                d["branch_and_bound"] = c.branch_and_bound;
                d["brute_force"] = c.brute_force;
                d["agrees"] = c.agrees;
                out.append(d);
            }
            return out;
        },
        py::arg("config"), py::arg("mode") = "A");
}
