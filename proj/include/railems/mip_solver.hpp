#pragma once

#include "railems/lp_solver.hpp"
#include "railems/milp.hpp"

namespace railems {

/// Row and bound residual the final incumbent must show on check_point.
inline constexpr double kIncumbentTol = 1e-8;

struct MipOptions {
    double rel_gap = 1e-6;     // stop when (incumbent - bound) / max(1, |incumbent|) <= rel_gap
    double int_tol = 1e-7;     // binary counts as integral within this distance
    long max_nodes = 500000;
    double time_limit_seconds = 0.0;  // 0: none
    // Until the first incumbent (and always at the root): round the binaries
    // of a fractional LP point, fix them and re-solve for an incumbent.
    bool rounding_heuristic = true;
    // Before branching, search the optimal face of the node LP for a point
    // with fewer fractional binaries and branch on that point instead.
    bool alternate_optimum = true;
    LpOptions lp;
};

/// LP-based branch-and-bound over the binary columns.
///
/// Node selection is best-bound; bounds are compared on a grid of
/// 1e-9 * max(1, |root bound|) so that numerically equal bounds tie, and
/// ties go to the deeper node, then to the older one. Branching takes the
/// most fractional binary (lowest column index on ties) and explores the
/// child nearest to the LP value first. The branching point is the node's LP
/// optimum after zero-cost binaries are rounded where their rows allow it and,
/// with alternate_optimum, after a second LP over the optimal face. Nodes warm-start the dual simplex
/// from the previous basis. When an LP solution is integral its binaries are
/// fixed and the LP re-solved, so incumbents satisfy the continuous
/// constraints with exactly integral binaries.
MipSolution solve_mip(const CanonicalMilp& model, const MipOptions& options = {});

/// Verification oracle: fixes the binaries to each of the 2^k patterns in
/// lexicographic order (first binary column most significant), solves every
/// LP from scratch and keeps the first strictly best. Throws DomainError when
/// the model has more than `max_binaries` (at most 20) binary columns.
MipSolution brute_force_mip(const CanonicalMilp& model, int max_binaries = 20,
                            const LpOptions& lp_options = {});

}  // namespace railems
