#include "railems/mip_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "railems/error.hpp"

namespace railems {

namespace {

constexpr double kRowTol = kIncumbentTol;
constexpr double kBoundTol = kIncumbentTol;

struct Node {
    double bound = -kInf;
    long long bucket = 0;
    int depth = 0;
    long id = 0;
    std::vector<std::pair<int, signed char>> fixes;  // (binary column, value)
};

struct NodeOrder {
    // True if a should come out of the heap after b.
    bool operator()(const Node& a, const Node& b) const {
        if (a.bucket != b.bucket) return a.bucket > b.bucket;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
    }
};

// Column-wise copy of the constraint matrix plus row ranges, for rounding.
struct ColumnView {
    std::vector<int> start;
    std::vector<int> row;
    std::vector<double> value;
    std::vector<double> row_lo;
    std::vector<double> row_hi;

    explicit ColumnView(const CanonicalMilp& m) {
        const int n = m.num_columns();
        start.assign(static_cast<std::size_t>(n) + 1, 0);
        for (const Triplet& t : m.triplets()) ++start[static_cast<std::size_t>(t.col) + 1];
        for (int j = 0; j < n; ++j) start[j + 1] += start[j];
        row.resize(m.triplets().size());
        value.resize(m.triplets().size());
        std::vector<int> fill(start.begin(), start.end() - 1);
        for (const Triplet& t : m.triplets()) {
            const int k = fill[static_cast<std::size_t>(t.col)]++;
            row[static_cast<std::size_t>(k)] = t.row;
            value[static_cast<std::size_t>(k)] = t.value;
        }
        for (const Row& r : m.rows()) {
            row_lo.push_back(r.sense == RowSense::LessEqual ? -kInf : r.rhs);
            row_hi.push_back(r.sense == RowSense::GreaterEqual ? kInf : r.rhs);
        }
    }
};

double relative_gap(double incumbent, double bound) {
    if (!std::isfinite(incumbent)) return kInf;
    return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

}  // namespace

MipSolution solve_mip(const CanonicalMilp& model, const MipOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    MipSolution result;

    std::vector<int> binaries;
    std::vector<double> root_lo(static_cast<std::size_t>(model.num_columns()));
    std::vector<double> root_hi(static_cast<std::size_t>(model.num_columns()));
    for (int j = 0; j < model.num_columns(); ++j) {
        const Column& c = model.column(j);
        root_lo[j] = c.lower;
        root_hi[j] = c.upper;
        if (c.binary) {
            binaries.push_back(j);
            root_lo[j] = std::ceil(std::max(c.lower, 0.0) - options.int_tol);
            root_hi[j] = std::floor(std::min(c.upper, 1.0) + options.int_tol);
            if (root_lo[j] > root_hi[j]) {
                result.status = MipStatus::Infeasible;
                return result;
            }
        }
    }

    const ColumnView view(model);
    const auto make_engine = [&]() { return std::make_unique<LpEngine>(model, options.lp); };
    auto engine = make_engine();

    const auto apply = [&](LpEngine& e, const std::vector<std::pair<int, signed char>>& fixes) {
        for (int j : binaries) e.set_column_bounds(j, root_lo[j], root_hi[j]);
        for (const auto& [j, v] : fixes) e.set_column_bounds(j, v, v);
    };
    const auto fractional = [&](const std::vector<double>& x) {
        int count = 0;
        for (int j : binaries) {
            if (std::abs(x[j] - std::round(x[j])) > options.int_tol) ++count;
        }
        return count;
    };
    const auto activities = [&](const std::vector<double>& x) {
        std::vector<double> act(static_cast<std::size_t>(model.num_rows()), 0.0);
        for (const Triplet& t : model.triplets()) {
            act[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
        }
        return act;
    };
    const auto row_ok = [&](const std::vector<double>& act, int j, double delta) {
        for (int k = view.start[j]; k < view.start[j + 1]; ++k) {
            const auto i = static_cast<std::size_t>(view.row[static_cast<std::size_t>(k)]);
            const double na = act[i] + view.value[static_cast<std::size_t>(k)] * delta;
            const double tol = 1e-9 * (1.0 + std::abs(na));
            if (na < view.row_lo[i] - tol || na > view.row_hi[i] + tol) return false;
        }
        return true;
    };
    const auto move = [&](std::vector<double>& act, std::vector<double>& x, int j, double value) {
        for (int k = view.start[j]; k < view.start[j + 1]; ++k) {
            act[static_cast<std::size_t>(view.row[static_cast<std::size_t>(k)])] +=
                view.value[static_cast<std::size_t>(k)] * (value - x[j]);
        }
        x[j] = value;
    };
    // Zero-cost binaries whose rows still hold after rounding are moved to
    // the integer value. The objective is unchanged, so the point stays an
    // optimum of the node LP.
    const auto shift = [&](std::vector<double>& x, const LpEngine& e) {
        std::vector<double> act = activities(x);
        for (int j : binaries) {
            const double v = x[j];
            if (std::abs(v - std::round(v)) <= options.int_tol || model.column(j).cost != 0.0) continue;
            const double nearest = std::round(v);
            for (const double c : {nearest, 1.0 - nearest}) {
                if (c < e.column_lower(j) || c > e.column_upper(j) || !row_ok(act, j, c - v)) continue;
                move(act, x, j, c);
                break;
            }
        }
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    double bucket_width = 0.0;  // set after the root LP
    long next_id = 0;
    open.push(Node{-kInf, 0, 0, next_id++, {}});

    double incumbent_obj = kInf;
    std::vector<double> incumbent;
    bool limit_hit = false;
    bool failure = false;
    long lp_iterations = 0;
    double pruned_bound = kInf;  // smallest bound among nodes dropped by the limit

    const auto cutoff = [&]() {
        if (!std::isfinite(incumbent_obj)) return kInf;
        return incumbent_obj - options.rel_gap * std::max(1.0, std::abs(incumbent_obj));
    };
    const auto bucket_of = [&](double bound) -> long long {
        if (bucket_width <= 0.0 || !std::isfinite(bound)) return 0;
        return static_cast<long long>(std::floor(bound / bucket_width));
    };
    const auto run = [&](LpEngine& e) {
        const long before = e.iterations();
        const LpStatus st = e.solve();
        lp_iterations += e.iterations() - before;
        return st;
    };
    // Fixes every binary to `point`, re-optimizes the continuous part and
    // keeps the result if it improves the incumbent.
    const auto try_integral = [&](const std::vector<double>& point) {
        std::vector<std::pair<int, signed char>> fixes;
        for (int j : binaries) fixes.emplace_back(j, static_cast<signed char>(std::lround(point[j])));
        apply(*engine, fixes);
        if (run(*engine) != LpStatus::Optimal) return;
        const double obj = engine->objective();
        if (obj < incumbent_obj) {
            incumbent_obj = obj;
            incumbent = engine->primal();
            for (int j : binaries) incumbent[j] = std::round(incumbent[j]);
        }
    };

    while (!open.empty()) {
        if (open.top().bound >= cutoff()) {
            open.pop();
            continue;
        }
        if (result.nodes >= options.max_nodes ||
            (options.time_limit_seconds > 0.0 &&
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
                 options.time_limit_seconds)) {
            limit_hit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        ++result.nodes;

        apply(*engine, node.fixes);
        LpStatus st = run(*engine);
        if (st == LpStatus::NumericalFailure || st == LpStatus::IterationLimit) {
            engine = make_engine();
            apply(*engine, node.fixes);
            st = run(*engine);
        }
        if (st == LpStatus::Unbounded) {
            // An unbounded relaxation makes the MILP unbounded if it has any
            // feasible point; the zero-cost problem decides that.
            CanonicalMilp feasibility = model;
            for (int j = 0; j < model.num_columns(); ++j) feasibility.set_cost(j, 0.0);
            const MipSolution f = solve_mip(feasibility, options);
            result.lp_iterations = lp_iterations + f.lp_iterations;
            result.nodes += f.nodes;
            result.status = f.status == MipStatus::Optimal ? MipStatus::Unbounded : f.status;
            result.objective = result.status == MipStatus::Unbounded ? -kInf : kInf;
            return result;
        }
        if (st == LpStatus::Infeasible) continue;
        if (st != LpStatus::Optimal) {
            failure = true;
            pruned_bound = std::min(pruned_bound, node.bound);
            continue;
        }
        const double obj = engine->objective();
        if (node.depth == 0) {
            bucket_width = 1e-9 * std::max(1.0, std::abs(obj));
        }
        if (obj >= cutoff()) continue;

        const std::vector<double> x0 = engine->primal();
        const std::vector<double> dj = engine->reduced_costs();
        std::vector<double> xs = x0;
        shift(xs, *engine);

        // With fractional binaries left, look for another optimum of the same
        // LP that is closer to integral. Nonbasic columns and rows with a
        // nonzero reduced cost are held at their values, which keeps the
        // search on the optimal face, and binaries are pulled towards their
        // nearest integer.
        if (options.alternate_optimum && fractional(xs) > 0) {
            const double dtol = 1e-7 * std::max(1.0, std::abs(obj)) / std::max(1, model.num_columns());
            std::vector<int> held_rows;
            for (int j = 0; j < model.num_columns(); ++j) {
                if (!engine->is_basic(j) && std::abs(dj[j]) > dtol) engine->set_column_bounds(j, x0[j], x0[j]);
                engine->set_column_cost(j, model.column(j).binary ? (xs[j] < 0.5 ? 1.0 : -1.0) : 0.0);
            }
            for (int i = 0; i < model.num_rows(); ++i) {
                if (!engine->is_row_basic(i) && std::abs(engine->row_reduced_cost(i)) > dtol) {
                    held_rows.push_back(i);
                    const double a = engine->row_activity(i);
                    engine->set_row_bounds(i, a, a);
                }
            }
            const LpStatus as = run(*engine);
            std::vector<double> ys;
            if (as == LpStatus::Optimal) ys = engine->primal();
            for (int j = 0; j < model.num_columns(); ++j) {
                engine->set_column_cost(j, model.column(j).cost);
                engine->set_column_bounds(j, root_lo[j], root_hi[j]);
            }
            for (int i : held_rows) engine->set_row_bounds(i, view.row_lo[i], view.row_hi[i]);
            apply(*engine, node.fixes);
            if (as == LpStatus::NumericalFailure || as == LpStatus::IterationLimit) {
                engine = make_engine();
                apply(*engine, node.fixes);
            }
            if (!ys.empty()) {
                shift(ys, *engine);
                if (fractional(ys) < fractional(xs)) xs = std::move(ys);
            }
        }

        int branch = -1;
        double most = options.int_tol;
        for (int j : binaries) {
            const double v = xs[j];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > most) {
                most = frac;
                branch = j;
            }
        }

        if (branch < 0) {
            // Exact binaries, continuous part re-optimized.
            try_integral(xs);
            continue;
        }

        if (options.rounding_heuristic && (node.depth == 0 || !std::isfinite(incumbent_obj))) {
            // Round each binary to the value its rows admit given the LP
            // point (nearest when both or neither do), then re-solve.
            std::vector<double> point = xs;
            std::vector<double> act = activities(point);
            for (int j : binaries) {
                const double v = point[j];
                const double r = std::round(v);
                if (std::abs(v - r) <= options.int_tol) continue;
                const bool ok_r = row_ok(act, j, r - v);
                const bool ok_other = row_ok(act, j, (1.0 - r) - v);
                move(act, point, j, ok_r || !ok_other ? r : 1.0 - r);
            }
            try_integral(point);
            if (obj >= cutoff()) continue;
        }

        // Reduced-cost fixing: a binary resting at a bound whose reduced
        // cost alone lifts the bound past the cutoff keeps that value below
        // this node.
        std::vector<std::pair<int, signed char>> implied;
        if (std::isfinite(incumbent_obj)) {
            const double room = cutoff() - obj + 1e-9 * std::max(1.0, std::abs(obj));
            for (int j : binaries) {
                if (j == branch || engine->column_lower(j) == engine->column_upper(j)) continue;
                const double v = x0[j];
                if (v <= options.int_tol && dj[j] > room) {
                    implied.emplace_back(j, 0);
                } else if (v >= 1.0 - options.int_tol && -dj[j] > room) {
                    implied.emplace_back(j, 1);
                }
            }
        }

        const double v = xs[branch];
        const signed char first = v - std::floor(v) >= 0.5 ? 1 : 0;
        for (signed char value : {first, static_cast<signed char>(1 - first)}) {
            Node child;
            child.bound = std::max(obj, node.bound);
            child.bucket = bucket_of(child.bound);
            child.depth = node.depth + 1;
            child.id = next_id++;
            child.fixes = node.fixes;
            child.fixes.insert(child.fixes.end(), implied.begin(), implied.end());
            child.fixes.emplace_back(branch, value);
            open.push(std::move(child));
        }
    }

    double bound = std::min(incumbent_obj, pruned_bound);
    if (limit_hit) {
        while (!open.empty()) {
            bound = std::min(bound, open.top().bound);
            open.pop();
        }
    }
    result.lp_iterations = lp_iterations;
    result.best_bound = bound;
    if (!incumbent.empty()) {
        result.x = std::move(incumbent);
        result.objective = incumbent_obj;
        result.gap = relative_gap(incumbent_obj, bound);
        const FeasibilityReport rep = check_point(model, result.x);
        if (!rep.feasible(kRowTol, kBoundTol, options.int_tol)) {
            result.status = MipStatus::NumericalFailure;
        } else if (limit_hit || failure) {
            result.status = result.gap <= options.rel_gap ? MipStatus::Optimal : MipStatus::Limit;
        } else {
            result.status = MipStatus::Optimal;
        }
    } else {
        result.status = limit_hit ? MipStatus::Limit
                        : failure ? MipStatus::NumericalFailure
                                  : MipStatus::Infeasible;
    }
    return result;
}

MipSolution brute_force_mip(const CanonicalMilp& model, int max_binaries,
                            const LpOptions& lp_options) {
    max_binaries = std::min(max_binaries, 20);
    std::vector<int> binaries;
    for (int j = 0; j < model.num_columns(); ++j) {
        if (model.column(j).binary) binaries.push_back(j);
    }
    const int k = static_cast<int>(binaries.size());
    if (k > max_binaries) {
        throw DomainError("brute_force_mip: " + std::to_string(k) +
                          " binary columns exceed the limit of " + std::to_string(max_binaries));
    }
    MipSolution best;
    best.status = MipStatus::Infeasible;
    bool failure = false;
    const long patterns = 1L << k;
    for (long pattern = 0; pattern < patterns; ++pattern) {
        CanonicalMilp fixed = model;
        bool admissible = true;
        for (int b = 0; b < k; ++b) {
            const int j = binaries[static_cast<std::size_t>(b)];
            const double v = static_cast<double>((pattern >> (k - 1 - b)) & 1L);
            const Column& c = model.column(j);
            if (v < c.lower - 1e-9 || v > c.upper + 1e-9) admissible = false;
            fixed.set_bounds(j, v, v);
        }
        ++best.nodes;
        if (!admissible) continue;
        LpEngine engine(fixed, lp_options);
        const LpStatus st = engine.solve();
        best.lp_iterations += engine.iterations();
        if (st == LpStatus::Unbounded) {
            best.status = MipStatus::Unbounded;
            best.x.clear();
            best.objective = -kInf;
            return best;
        }
        if (st != LpStatus::Optimal) {
            if (st != LpStatus::Infeasible) failure = true;
            continue;
        }
        const double obj = engine.objective();
        if (best.x.empty() || obj < best.objective - 1e-9 * std::max(1.0, std::abs(obj))) {
            best.objective = obj;
            best.x = engine.primal();
            for (int j : binaries) best.x[j] = std::round(best.x[j]);
        }
    }
    if (!best.x.empty()) {
        best.status = MipStatus::Optimal;
        best.best_bound = best.objective;
        best.gap = 0.0;
    } else if (failure) {
        best.status = MipStatus::NumericalFailure;
    }
    return best;
}

}  // namespace railems
