#pragma once
// End-to-end run: sessions, scenario tree, one MILP per scenario, extraction,
// report and output files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "railems/config.hpp"
#include "railems/ems_model.hpp"
#include "railems/mip_solver.hpp"

namespace railems {

/// Scenario tree of a configuration: the raw railway demand is split into
/// train demand and braking power, radiation members go through the PV
/// model, and without an explicit RB axis the braking share of the demand is
/// the single RB member.
ScenarioSet scenarios_from_config(const SiteConfig& cfg);

/// Comma-separated scenario indices and ranges ("0,3,10-12"); empty selects
/// all. Throws DomainError for indices outside [0, count).
std::vector<int> parse_scenario_filter(const std::string& filter, int count);

struct RunOptions {
    Mode mode = Mode::A;
    std::optional<std::uint64_t> seed;  // overrides fleet.seed
    std::string scenarios;              // filter, see parse_scenario_filter
    std::optional<std::filesystem::path> export_mps_dir;
    MipOptions mip;
    int threads = 0;  // scenario solves in parallel; 0: hardware concurrency
};

struct SolveStats {
    int scenario = 0;
    MipStatus status = MipStatus::Optimal;
    double objective = 0.0;  // unweighted scenario objective from the solver
    double best_bound = 0.0;
    double gap = 0.0;
    long nodes = 0;
    long lp_iterations = 0;
    int columns = 0;
    int binaries = 0;
    int rows = 0;
};

struct RunReport {
    SiteConfig config;
    Mode mode = Mode::A;
    std::uint64_t seed = 0;
    std::vector<EvSession> sessions;
    std::vector<int> scenario_indices;
    EmsSolution solution;
    std::vector<SolveStats> stats;
    std::vector<double> uncoordinated_ev;  // kW per step
    // Train + EV peak (max over scenarios and steps).
    double uncoordinated_peak = 0.0;
    double optimized_peak = 0.0;
    MipOptions mip;

    /// Deterministic JSON text (no timings, fixed key order).
    std::string to_json() const;
};

/// Runs every selected scenario as its own MILP and recombines. Throws
/// InfeasibleInputError from the pre-solve check, Error when a scenario
/// solve does not reach optimality.
RunReport run_pipeline(const SiteConfig& cfg, const RunOptions& options);

/// Writes schedule_ev.csv, dispatch.csv, theta.csv and report.json. Files are
/// rendered in memory first and written only once everything succeeded.
void write_outputs(const RunReport& report, const std::filesystem::path& out_dir);

struct ThetaDelta {
    int scenario = 0;
    int ev = 0;
    double theta_a = 0.0;
    double theta_b = 0.0;
    double delta = 0.0;  // a - b
};

struct Comparison {
    std::vector<ThetaDelta> theta;
    double peak_a = 0.0, peak_b = 0.0, peak_delta = 0.0;
    double objective_a = 0.0, objective_b = 0.0, objective_delta = 0.0;
    double theta_sum_delta = 0.0;
};

/// Compares two run directories (theta.csv and report.json). Throws
/// DomainError when the runs cover different sessions or scenarios.
Comparison compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b);
Comparison compare_reports(const RunReport& a, const RunReport& b);
std::string format_comparison(const Comparison& c);

struct OracleCase {
    int scenario = 0;
    int binaries = 0;
    double branch_and_bound = 0.0;
    double brute_force = 0.0;
    double relative_difference = 0.0;
    bool agrees = false;
};

/// Solves every scenario of a small configuration with branch-and-bound and
/// with the brute-force oracle. Throws DomainError when a scenario has more
/// than 20 binaries.
std::vector<OracleCase> run_oracle(const SiteConfig& cfg, Mode mode = Mode::A,
                                   double rel_tol = 1e-6);

}  // namespace railems
