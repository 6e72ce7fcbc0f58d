#pragma once
// Station EMS as a CanonicalMilp: grid exchange, PV, storage fed by the grid
// and by regenerative braking, per-EV charging with flexible departure
// energy, and the peak cap on train + EV load.

#include <string>
#include <string_view>
#include <vector>

#include "railems/config.hpp"
#include "railems/ev_fleet.hpp"
#include "railems/milp.hpp"
#include "railems/scenario_tree.hpp"

namespace railems {

/// A: full model. B: no storage (and hence no braking reuse). C: no PV.
enum class Mode { A, B, C };
std::string_view mode_name(Mode mode);
/// "A"/"B"/"C" (case-insensitive); throws DomainError otherwise.
Mode parse_mode(std::string_view text);

enum class Symbol { P_G, P_S, P_B_plus, P_B_minus, P_RBE, SoC_B, u_G, u_B, P_EV, SoC_EV, theta };
inline constexpr int kSymbolCount = 11;
std::string_view symbol_name(Symbol symbol);

inline constexpr int kNone = -1;

/// Identifies one decision variable: symbol, 1-based step (kNone for theta),
/// scenario position within the model, EV position (kNone for station symbols).
struct VarKey {
    Symbol symbol = Symbol::P_G;
    int t = kNone;
    int s = 0;
    int i = kNone;
    bool operator==(const VarKey&) const = default;
};

/// Column name used in exported models: one letter per symbol
/// (G S C D R B U V P E H for P_G P_S P_B+ P_B- P_RBE SoC_B u_G u_B P_EV
/// SoC_EV theta) followed by t, s and i as two base-36 digits each ("00"
/// when absent), e.g. "P0A0003" is P_EV at t=10, s=0, i=3. Empty when an
/// index does not fit in two digits.
std::string var_name(const VarKey& key);

/// Two-way map between VarKeys and column indices.
class EmsIndex {
public:
    EmsIndex() = default;
    EmsIndex(int horizon_steps, int scenarios, int evs);

    /// Column of key, or -1 if the model has no such variable.
    int column(const VarKey& key) const;
    const VarKey& key(int column) const { return keys_.at(static_cast<std::size_t>(column)); }
    int size() const { return static_cast<int>(keys_.size()); }
    void add(const VarKey& key, int column);

private:
    int slot(const VarKey& key) const;
    int horizon_ = 0;
    int scenarios_ = 0;
    int evs_ = 0;
    std::vector<int> station_;  // [s][symbol][t]
    std::vector<int> ev_;       // [s][i][symbol P_EV/SoC_EV/theta][t]
    std::vector<VarKey> keys_;
};

struct ModelOptions {
    // Weight scenario objectives by their probability. Per-scenario solves
    // switch this off and recombine afterwards.
    bool probability_weighted = true;
};

struct EmsModel {
    CanonicalMilp milp;
    EmsIndex index;
    Mode mode = Mode::A;
    TimeGrid time_grid;
    GridSpec grid;
    EssSpec ess;
    PeakPolicy peak;
    ObjectiveWeights weights;
    std::vector<EvSession> sessions;
    std::vector<Scenario> scenarios;  // as modelled: PV is zero in mode C
    ModelOptions options;
};

/// Assembles the MILP. Throws InfeasibleInputError when the train demand
/// alone exceeds the peak cap at some step, and DomainError for sessions or
/// series that do not fit the time grid.
EmsModel build_model(const SiteConfig& cfg, const std::vector<EvSession>& sessions,
                     const std::vector<Scenario>& scenarios, Mode mode,
                     const ModelOptions& options = {});

/// One named pass/fail check with the measured residual.
struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::string where;  // location of the worst residual
};

struct ScenarioDispatch {
    int scenario = 0;  // index in the scenario tree
    double probability = 1.0;
    // One entry per step 1..N_t (position t-1).
    std::vector<double> p_grid, p_sell, p_b_plus, p_b_minus, p_rbe, soc_b, u_grid, u_ess;
    std::vector<double> p_pv, p_demand, p_ev_total;
    std::vector<std::vector<double>> p_ev;    // [i][t-1], zero while unplugged
    std::vector<std::vector<double>> soc_ev;  // [i][t-1], zero while unplugged
    std::vector<double> departure_soc;        // [i]
    std::vector<double> theta;                // [i]
    double energy_cost = 0.0;  // sum_t (C_G P_G - C_S P_S) dt
    double theta_sum = 0.0;
    double objective = 0.0;    // w_P * energy_cost - w_theta * theta_sum
};

struct EmsSolution {
    MipStatus status = MipStatus::Optimal;
    std::vector<ScenarioDispatch> scenarios;
    double objective = 0.0;         // sum_s pi_s * objective_s
    double expected_cost = 0.0;     // sum_s pi_s * energy_cost_s
    double expected_theta = 0.0;    // sum_s pi_s * theta_sum_s
    std::vector<Check> checks;
};

/// Feasibility tolerance of the post-solve re-check, in kW / kWh.
inline constexpr double kSolutionTol = 1e-6;

/// Maps solver values back to trajectories and re-checks every constraint
/// from the domain data (not from the assembled rows). Values within 1e-9 of
/// zero are reported as zero. Throws InternalConsistencyError if a hard
/// constraint is off by more than kSolutionTol, and DomainError unless the
/// solution is optimal.
EmsSolution extract_solution(const EmsModel& model, const MipSolution& solution);

}  // namespace railems
