// railems: day-ahead EMS runs from the command line.
//
//   railems run --config site.json --mode A --seed 7 --out runs/a
//   railems compare runs/a runs/b
//   railems oracle --config tiny.json

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "railems/error.hpp"
#include "railems/mps.hpp"
#include "railems/pipeline.hpp"

using namespace railems;

namespace {

int cmd_run(const std::string& config, const std::string& mode, std::optional<std::uint64_t> seed,
            const std::string& export_dir, const std::string& scenarios, const std::string& out,
            const std::string& external, int threads) {
    const SiteConfig cfg = load_config(config);
    RunOptions opt;
    opt.mode = parse_mode(mode);
    opt.seed = seed;
    opt.scenarios = scenarios;
    opt.threads = threads;
    if (!export_dir.empty()) opt.export_mps_dir = export_dir;
    const RunReport report = run_pipeline(cfg, opt);
    write_outputs(report, out);

    std::printf("mode %s, seed %llu: %zu EVs, %zu scenarios\n", std::string(mode_name(report.mode)).c_str(),
                static_cast<unsigned long long>(report.seed), report.sessions.size(),
                report.solution.scenarios.size());
    std::printf("expected objective %.6f (energy cost %.6f, theta %.6f kWh)\n", report.solution.objective,
                report.solution.expected_cost, report.solution.expected_theta);
    std::printf("peak: uncoordinated %.3f kW, optimized %.3f kW, cap %.3f kW\n", report.uncoordinated_peak,
                report.optimized_peak, cfg.peak.p_max);
    bool all_pass = true;
    for (const Check& c : report.solution.checks) {
        std::printf("  %-28s %s  residual %.3g\n", c.name.c_str(), c.passed ? "pass" : "FAIL", c.residual);
        all_pass = all_pass && c.passed;
    }

    if (!external.empty()) {
        const ScenarioSet tree = scenarios_from_config(cfg);
        for (const SolveStats& st : report.stats) {
            const EmsModel model = build_model(cfg, report.sessions, {tree.scenarios[static_cast<std::size_t>(st.scenario)]},
                                               opt.mode, ModelOptions{.probability_weighted = false});
            const auto dir = std::filesystem::path(out) / ("external_" + std::to_string(st.scenario));
            const ExternalResult ext = solve_external(model.milp, external, dir);
            if (!ext.ok) {
                std::printf("  external solver, scenario %d: failed (%s)\n", st.scenario, ext.log.c_str());
                all_pass = false;
                continue;
            }
            const double rel = std::abs(ext.objective - st.objective) / std::max(1.0, std::abs(st.objective));
            std::printf("  external solver, scenario %d: %.9g vs %.9g, rel diff %.3g %s\n", st.scenario,
                        ext.objective, st.objective, rel, rel <= 1e-6 ? "pass" : "FAIL");
            all_pass = all_pass && rel <= 1e-6;
        }
    }
    std::printf("outputs written to %s\n", out.c_str());
    return all_pass ? 0 : 3;
}

int cmd_compare(const std::string& a, const std::string& b) {
    std::cout << format_comparison(compare_runs(a, b));
    return 0;
}

int cmd_oracle(const std::string& config, const std::string& mode) {
    const SiteConfig cfg = load_config(config);
    const auto cases = run_oracle(cfg, parse_mode(mode));
    bool ok = true;
    for (const OracleCase& c : cases) {
        std::printf("scenario %d: %d binaries, branch-and-bound %.9g, brute force %.9g, rel diff %.3g %s\n",
                    c.scenario, c.binaries, c.branch_and_bound, c.brute_force, c.relative_difference,
                    c.agrees ? "pass" : "FAIL");
        ok = ok && c.agrees;
    }
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead energy management for a railway station with EV charging"};
    app.require_subcommand(1);

    std::string config, mode = "A", export_dir, scenarios, out = "run", external;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    auto* run = app.add_subcommand("run", "Solve the station MILP for every selected scenario");
    run->add_option("--config", config, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--mode", mode, "A: full model, B: without storage, C: without PV")
        ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
    run->add_option("--seed", seed, "Fleet sampling seed (default: from the configuration)");
    run->add_option("--export-mps", export_dir, "Write one MPS file per scenario into this directory");
    run->add_option("--scenarios", scenarios, "Scenario filter, e.g. 0,3,10-12 (default: all)");
    run->add_option("--threads", threads, "Scenario solves in parallel (default: one per core)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--out", out, "Output directory")->capture_default_str();
    run->add_option("--external-solver", external,
                    "Also solve each scenario with this command ({mps} and {solution} are substituted)");

    std::string dir_a, dir_b;
    auto* compare = app.add_subcommand("compare", "Per-EV theta, peak and objective deltas of two runs");
    compare->add_option("run_a", dir_a)->required()->check(CLI::ExistingDirectory);
    compare->add_option("run_b", dir_b)->required()->check(CLI::ExistingDirectory);

    std::string oracle_config, oracle_mode = "A";
    auto* oracle = app.add_subcommand("oracle", "Check branch-and-bound against brute force on a small instance");
    oracle->add_option("--config", oracle_config, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);
    oracle->add_option("--mode", oracle_mode)->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config, mode, seed, export_dir, scenarios, out, external, threads);
        if (*compare) return cmd_compare(dir_a, dir_b);
        if (*oracle) return cmd_oracle(oracle_config, oracle_mode);
    } catch (const InfeasibleInputError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
