#pragma once

#include <memory>
#include <vector>

#include "railems/milp.hpp"

namespace railems {

struct LpOptions {
    double primal_tol = 1e-9;  // bound violation, scaled by 1 + |bound|
    double dual_tol = 1e-9;
    double pivot_tol = 1e-9;
    int refactor_interval = 64;
    long max_iterations = 0;  // 0: 50 * (rows + columns) + 10000
    // Stand-in for infinite bounds of nonbasic variables. A variable still
    // resting on it at the optimum means the LP is unbounded.
    double artificial_bound = 1e7;
    bool perturb_costs = true;
    // Consecutive iterations without dual progress before switching to
    // Bland's rule.
    int stall_limit = 60;
};

/// Bounded-variable dual simplex over the LP relaxation of a CanonicalMilp
/// (binary columns become [0, 1]). Each row i gets a logical variable r_i =
/// a_i x whose bounds encode the row sense, so the system is A x - r = 0 and
/// every constraint lives in variable bounds.
///
/// The engine keeps its basis between solve() calls. After column bounds
/// change the basis stays dual feasible, so the next solve() warm-starts
/// from it; branch-and-bound relies on this.
class LpEngine {
public:
    explicit LpEngine(const CanonicalMilp& model, LpOptions options = {});
    ~LpEngine();
    LpEngine(LpEngine&&) noexcept;
    LpEngine& operator=(LpEngine&&) noexcept;
    LpEngine(const LpEngine&) = delete;
    LpEngine& operator=(const LpEngine&) = delete;

    void set_column_bounds(int col, double lower, double upper);
    double column_lower(int col) const;
    double column_upper(int col) const;
    void set_column_cost(int col, double cost);
    /// Bounds of the logical variable of row i (its activity a_i x).
    void set_row_bounds(int row, double lower, double upper);

    LpStatus solve();

    LpStatus status() const;
    /// Structural values of the last solve.
    std::vector<double> primal() const;
    double objective() const;
    /// Reduced costs of the structural columns (zero for basic ones).
    std::vector<double> reduced_costs() const;
    /// True if column j is basic in the current basis.
    bool is_basic(int col) const;
    /// Same for the logical variable of a row, with its reduced cost (equal to
    /// the row dual) and current activity.
    bool is_row_basic(int row) const;
    double row_reduced_cost(int row) const;
    double row_activity(int row) const;
    double row_lower(int row) const;
    double row_upper(int row) const;
    long iterations() const;
    LpSolution solution() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot solve of the LP relaxation.
LpSolution solve_lp(const CanonicalMilp& model, const LpOptions& options = {});

}  // namespace railems
