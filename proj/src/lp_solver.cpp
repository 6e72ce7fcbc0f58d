#include "railems/lp_solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "railems/error.hpp"

namespace railems {

namespace {

enum class VarState : std::uint8_t { Basic, Lower, Upper };

// Column of B^{-1} recorded at a pivot: B_new = B_old * E with E the
// identity except column `row`, which holds the FTRAN'd entering column.
struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
};

double perturbation_fraction(int j) {
    const std::uint32_t h = static_cast<std::uint32_t>(j) * 2654435761u;
    return 0.5 + 0.5 * (static_cast<double>(h) / 4294967296.0);
}

}  // namespace

struct LpEngine::Impl {
    using SpMat = Eigen::SparseMatrix<double>;
    using Vec = Eigen::VectorXd;

    LpOptions opt;
    int m = 0;  // rows
    int n = 0;  // structural columns
    int total = 0;

    // Structural matrix, column-compressed.
    std::vector<int> col_start;
    std::vector<int> row_index;
    std::vector<double> coef;

    std::vector<double> lb, ub;   // length total; logicals follow structurals
    std::vector<double> cost;     // original costs (zero for logicals)
    std::vector<double> work;     // costs currently optimized (maybe perturbed)
    std::vector<double> x, d;
    std::vector<VarState> state;
    std::vector<int> head;        // basis position -> variable
    std::vector<int> pos;         // variable -> basis position or -1
    std::vector<double> dse;      // dual steepest-edge weights per position

    mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    std::vector<Eta> etas;
    bool factored = false;

    LpStatus last = LpStatus::NumericalFailure;
    long iter = 0;
    long iter_limit = 0;

    Vec rho, alpha_col, tau;
    std::vector<double> alpha_row;
    std::vector<int> row_nz;

    Impl(const CanonicalMilp& model, LpOptions o) : opt(o) {
        const auto problems = model.check();
        if (!problems.empty()) throw DomainError("malformed model: " + problems.front());
        m = model.num_rows();
        n = model.num_columns();
        total = n + m;
        iter_limit = opt.max_iterations > 0 ? opt.max_iterations : 50L * total + 10000;

        std::vector<int> count(static_cast<std::size_t>(n) + 1, 0);
        for (const Triplet& t : model.triplets()) ++count[static_cast<std::size_t>(t.col) + 1];
        col_start.assign(static_cast<std::size_t>(n) + 1, 0);
        for (int j = 0; j < n; ++j) col_start[j + 1] = col_start[j] + count[j + 1];
        row_index.resize(model.triplets().size());
        coef.resize(model.triplets().size());
        std::vector<int> fill(col_start.begin(), col_start.end() - 1);
        for (const Triplet& t : model.triplets()) {
            const int k = fill[static_cast<std::size_t>(t.col)]++;
            row_index[k] = t.row;
            coef[k] = t.value;
        }

        lb.resize(total);
        ub.resize(total);
        cost.assign(total, 0.0);
        for (int j = 0; j < n; ++j) {
            const Column& c = model.column(j);
            lb[j] = c.binary ? std::max(c.lower, 0.0) : c.lower;
            ub[j] = c.binary ? std::min(c.upper, 1.0) : c.upper;
            cost[j] = c.cost;
        }
        for (int i = 0; i < m; ++i) {
            const Row& r = model.row(i);
            const int j = n + i;
            switch (r.sense) {
                case RowSense::LessEqual: lb[j] = -kInf; ub[j] = r.rhs; break;
                case RowSense::GreaterEqual: lb[j] = r.rhs; ub[j] = kInf; break;
                case RowSense::Equal: lb[j] = r.rhs; ub[j] = r.rhs; break;
            }
        }
        work = cost;
        x.assign(total, 0.0);
        d.assign(total, 0.0);
        rho.resize(m);
        alpha_col.resize(m);
        tau.resize(m);
        alpha_row.assign(total, 0.0);
        slack_basis();
    }

    // ------------------------------------------------------------ basis

    void slack_basis() {
        state.assign(total, VarState::Lower);
        head.resize(m);
        pos.assign(total, -1);
        for (int i = 0; i < m; ++i) {
            head[i] = n + i;
            pos[n + i] = i;
            state[n + i] = VarState::Basic;
        }
        dse.assign(m, 1.0);
        factored = false;
        etas.clear();
    }

    bool refactor() {
        etas.clear();
        if (m == 0) {
            factored = true;
            return true;
        }
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(m) * 3);
        for (int p = 0; p < m; ++p) {
            const int j = head[p];
            if (j >= n) {
                trip.emplace_back(j - n, p, -1.0);
            } else {
                for (int k = col_start[j]; k < col_start[j + 1]; ++k) {
                    trip.emplace_back(row_index[k], p, coef[k]);
                }
            }
        }
        SpMat b(m, m);
        b.setFromTriplets(trip.begin(), trip.end());
        b.makeCompressed();
        lu.analyzePattern(b);
        lu.factorize(b);
        factored = lu.info() == Eigen::Success;
        return factored;
    }

    void ftran(Vec& v) const {
        if (m == 0) return;
        v = lu.solve(v);
        for (const Eta& e : etas) {
            const double vr = v[e.row] / e.pivot;
            v[e.row] = vr;
            if (vr == 0.0) continue;
            for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * vr;
        }
    }

    void btran(Vec& v) const {
        if (m == 0) return;
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double s = v[it->row];
            for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
            v[it->row] = s / it->pivot;
        }
        v = lu.transpose().solve(v);
    }

    // Column j of [A | -I] dotted with a dense vector.
    double dot_column(int j, const Vec& v) const {
        if (j >= n) return -v[j - n];
        double s = 0.0;
        for (int k = col_start[j]; k < col_start[j + 1]; ++k) s += coef[k] * v[row_index[k]];
        return s;
    }

    void load_column(int j, Vec& v) const {
        v.setZero();
        if (j >= n) {
            v[j - n] = -1.0;
        } else {
            for (int k = col_start[j]; k < col_start[j + 1]; ++k) v[row_index[k]] = coef[k];
        }
    }

    // ------------------------------------------------------------ values

    bool fixed(int j) const { return lb[j] == ub[j]; }

    double lower_value(int j) const { return std::isfinite(lb[j]) ? lb[j] : -opt.artificial_bound; }
    double upper_value(int j) const { return std::isfinite(ub[j]) ? ub[j] : opt.artificial_bound; }

    bool at_artificial(int j) const {
        return (state[j] == VarState::Lower && !std::isfinite(lb[j])) ||
               (state[j] == VarState::Upper && !std::isfinite(ub[j]));
    }

    void recompute_primal() {
        Vec rhs = Vec::Zero(m);
        for (int j = 0; j < total; ++j) {
            if (state[j] == VarState::Basic) continue;
            x[j] = state[j] == VarState::Lower ? lower_value(j) : upper_value(j);
            if (x[j] == 0.0) continue;
            if (j >= n) {
                rhs[j - n] += x[j];
            } else {
                for (int k = col_start[j]; k < col_start[j + 1]; ++k) rhs[row_index[k]] -= coef[k] * x[j];
            }
        }
        ftran(rhs);
        for (int p = 0; p < m; ++p) x[head[p]] = rhs[p];
    }

    void recompute_duals() {
        Vec y(m);
        for (int p = 0; p < m; ++p) y[p] = work[head[p]];
        btran(y);
        for (int j = 0; j < total; ++j) {
            d[j] = state[j] == VarState::Basic ? 0.0 : work[j] - dot_column(j, y);
        }
    }

    // Moves nonbasic variables to the bound their reduced cost calls for.
    // Returns true if any variable moved.
    bool restore_dual_feasibility(bool strict) {
        bool moved = false;
        const double tol = strict ? 0.0 : opt.dual_tol;
        for (int j = 0; j < total; ++j) {
            if (state[j] == VarState::Basic) continue;
            VarState want = state[j];
            if (fixed(j)) {
                want = VarState::Lower;
            } else if (d[j] > tol) {
                want = VarState::Lower;
            } else if (d[j] < -tol) {
                want = VarState::Upper;
            } else if (strict) {
                // Zero reduced cost: prefer a finite bound.
                if (want == VarState::Lower && !std::isfinite(lb[j]) && std::isfinite(ub[j])) want = VarState::Upper;
                if (want == VarState::Upper && !std::isfinite(ub[j]) && std::isfinite(lb[j])) want = VarState::Lower;
            }
            if (want != state[j]) {
                state[j] = want;
                moved = true;
            }
        }
        return moved;
    }

    double objective_work() const {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += work[j] * x[j];
        return s;
    }

    double infeasibility(int j) const {
        const double v = x[j];
        if (v < lb[j] - opt.primal_tol * (1.0 + std::abs(lb[j]))) return lb[j] - v;
        if (v > ub[j] + opt.primal_tol * (1.0 + std::abs(ub[j]))) return v - ub[j];
        return 0.0;
    }

    void perturb() {
        for (int j = 0; j < n; ++j) {
            if (fixed(j)) continue;
            const double xi = (1e-7 + 1e-7 * std::abs(cost[j])) * perturbation_fraction(j);
            double sign = 1.0;
            if (state[j] == VarState::Upper) sign = -1.0;
            else if (state[j] == VarState::Basic) sign = cost[j] < 0.0 ? -1.0 : 1.0;
            work[j] = cost[j] + sign * xi;
        }
    }

    // ------------------------------------------------------------ main loop

    enum class Outcome { Optimal, Infeasible, Limit, Failure };

    Outcome iterate() {
        int stall = 0;
        bool bland = false;
        double best_obj = -kInf;
        int mismatch_retries = 0;
        bool fresh = false;

        while (true) {
            if (iter >= iter_limit) return Outcome::Limit;
            if (!factored || static_cast<int>(etas.size()) >= opt.refactor_interval) {
                if (!refactor()) return Outcome::Failure;
                recompute_primal();
                recompute_duals();
                if (restore_dual_feasibility(false)) recompute_primal();
                fresh = true;
            }

            // Leaving row.
            int r = -1;
            double best = 0.0;
            for (int p = 0; p < m; ++p) {
                const double inf = infeasibility(head[p]);
                if (inf <= 0.0) continue;
                if (bland) {
                    if (r < 0 || head[p] < head[r]) r = p;
                } else {
                    if (!std::isfinite(dse[p]) || dse[p] <= 0.0) dse[p] = 1.0;
                    const double score = inf * inf / dse[p];
                    if (score > best) {
                        best = score;
                        r = p;
                    }
                }
            }
            if (r < 0) {
                if (fresh) {
                    for (int p = 0; p < m; ++p) {
                        if (!std::isfinite(x[head[p]])) return Outcome::Failure;
                    }
                    return Outcome::Optimal;
                }
                factored = false;  // confirm on a fresh factorization
                continue;
            }

            const int leaving = head[r];
            const double sgn = x[leaving] > ub[leaving] ? 1.0 : -1.0;

            rho.setZero();
            rho[r] = 1.0;
            btran(rho);

            // Pivot row over nonbasic, non-fixed variables.
            row_nz.clear();
            for (int j = 0; j < total; ++j) {
                if (state[j] == VarState::Basic || fixed(j)) continue;
                const double a = dot_column(j, rho);
                if (std::abs(a) > opt.pivot_tol) {
                    alpha_row[j] = a;
                    row_nz.push_back(j);
                }
            }

            int q = -1;
            if (bland) {
                double min_ratio = kInf;
                for (int j : row_nz) {
                    const double a = sgn * alpha_row[j];
                    const bool ok = (state[j] == VarState::Lower && a > 0) ||
                                    (state[j] == VarState::Upper && a < 0);
                    if (!ok) continue;
                    const double ratio = std::max(0.0, d[j] / a);
                    if (ratio < min_ratio - 1e-12) {
                        min_ratio = ratio;
                        q = j;
                    } else if (ratio <= min_ratio + 1e-12 && j < q) {
                        q = j;
                    }
                }
            } else {
                double bound = kInf;
                for (int j : row_nz) {
                    const double a = sgn * alpha_row[j];
                    if (state[j] == VarState::Lower && a > 0) {
                        bound = std::min(bound, (d[j] + opt.dual_tol) / a);
                    } else if (state[j] == VarState::Upper && a < 0) {
                        bound = std::min(bound, (d[j] - opt.dual_tol) / a);
                    }
                }
                double best_a = 0.0;
                for (int j : row_nz) {
                    const double a = sgn * alpha_row[j];
                    const bool ok = (state[j] == VarState::Lower && a > 0) ||
                                    (state[j] == VarState::Upper && a < 0);
                    if (!ok) continue;
                    if (d[j] / a <= bound && std::abs(a) > best_a) {
                        best_a = std::abs(a);
                        q = j;
                    }
                }
            }

            if (q < 0) {
                if (!fresh) {
                    factored = false;
                    continue;
                }
                return Outcome::Infeasible;
            }

            const double arq = alpha_row[q];
            load_column(q, alpha_col);
            ftran(alpha_col);
            if (std::abs(alpha_col[r] - arq) > 1e-7 * (1.0 + std::abs(arq))) {
                if (++mismatch_retries > 5) return Outcome::Failure;
                factored = false;
                continue;
            }

            tau = rho;
            if (!bland) ftran(tau);

            // Dual update.
            double t = d[q] / arq;
            if (t * sgn < 0.0) t = 0.0;
            if (t != 0.0) {
                for (int j : row_nz) d[j] -= t * alpha_row[j];
            }
            d[q] = 0.0;
            d[leaving] = -t;

            // Primal update.
            const double target = sgn > 0 ? ub[leaving] : lb[leaving];
            const double delta = (x[leaving] - target) / arq;
            for (int p = 0; p < m; ++p) {
                if (alpha_col[p] != 0.0) x[head[p]] -= delta * alpha_col[p];
            }
            x[q] += delta;
            x[leaving] = target;

            // Steepest-edge weights.
            if (!bland) {
                const double wr = dse[r];
                for (int p = 0; p < m; ++p) {
                    if (p == r || alpha_col[p] == 0.0) continue;
                    const double k = alpha_col[p] / arq;
                    dse[p] = std::max(dse[p] - 2.0 * k * tau[p] + k * k * wr, 1e-8);
                }
                dse[r] = std::max(wr / (arq * arq), 1e-8);
            }

            // Basis change.
            head[r] = q;
            pos[q] = r;
            pos[leaving] = -1;
            state[q] = VarState::Basic;
            state[leaving] = sgn > 0 ? VarState::Upper : VarState::Lower;
            Eta e;
            e.row = r;
            e.pivot = alpha_col[r];
            for (int p = 0; p < m; ++p) {
                if (p != r && std::abs(alpha_col[p]) > 1e-14) {
                    e.index.push_back(p);
                    e.value.push_back(alpha_col[p]);
                }
            }
            etas.push_back(std::move(e));
            fresh = false;
            mismatch_retries = 0;
            ++iter;

            const double obj = objective_work();
            if (obj > best_obj + 1e-11 * (1.0 + std::abs(obj))) {
                best_obj = obj;
                stall = 0;
                bland = false;
            } else if (++stall > opt.stall_limit) {
                bland = true;
            }
        }
    }

    LpStatus solve() {
        int resets = 0;
        while (true) {
            if (!factored && !refactor()) {
                if (++resets > 3) return last = LpStatus::NumericalFailure;
                slack_basis();
                continue;
            }
            work = cost;
            recompute_duals();
            restore_dual_feasibility(true);
            if (opt.perturb_costs) {
                perturb();
                recompute_duals();
                restore_dual_feasibility(true);
            }
            recompute_primal();

            Outcome out = iterate();
            if (out == Outcome::Optimal && opt.perturb_costs) {
                work = cost;
                recompute_duals();
                if (restore_dual_feasibility(false)) recompute_primal();
                out = iterate();
            }
            switch (out) {
                case Outcome::Optimal: break;
                case Outcome::Infeasible:
                    work = cost;
                    return last = LpStatus::Infeasible;
                case Outcome::Limit:
                    work = cost;
                    return last = LpStatus::IterationLimit;
                case Outcome::Failure:
                    work = cost;
                    if (++resets > 3) return last = LpStatus::NumericalFailure;
                    slack_basis();
                    continue;
            }
            for (int j = 0; j < total; ++j) {
                if (at_artificial(j) && std::abs(d[j]) > opt.dual_tol) {
                    return last = LpStatus::Unbounded;
                }
            }
            return last = LpStatus::Optimal;
        }
    }
};

LpEngine::LpEngine(const CanonicalMilp& model, LpOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}
LpEngine::~LpEngine() = default;
LpEngine::LpEngine(LpEngine&&) noexcept = default;
LpEngine& LpEngine::operator=(LpEngine&&) noexcept = default;

void LpEngine::set_column_bounds(int col, double lower, double upper) {
    if (col < 0 || col >= impl_->n) throw DomainError("set_column_bounds: column out of range");
    if (lower > upper) throw DomainError("set_column_bounds: lower > upper");
    impl_->lb[col] = lower;
    impl_->ub[col] = upper;
}

void LpEngine::set_column_cost(int col, double cost) {
    if (col < 0 || col >= impl_->n) throw DomainError("set_column_cost: column out of range");
    if (!std::isfinite(cost)) throw DomainError("set_column_cost: non-finite cost");
    impl_->cost[col] = cost;
}

void LpEngine::set_row_bounds(int row, double lower, double upper) {
    if (row < 0 || row >= impl_->m) throw DomainError("set_row_bounds: row out of range");
    if (lower > upper) throw DomainError("set_row_bounds: lower > upper");
    impl_->lb[impl_->n + row] = lower;
    impl_->ub[impl_->n + row] = upper;
}

double LpEngine::column_lower(int col) const { return impl_->lb.at(static_cast<std::size_t>(col)); }
double LpEngine::column_upper(int col) const { return impl_->ub.at(static_cast<std::size_t>(col)); }

LpStatus LpEngine::solve() { return impl_->solve(); }
LpStatus LpEngine::status() const { return impl_->last; }

std::vector<double> LpEngine::primal() const {
    return std::vector<double>(impl_->x.begin(), impl_->x.begin() + impl_->n);
}

double LpEngine::objective() const {
    double s = 0.0;
    for (int j = 0; j < impl_->n; ++j) s += impl_->cost[j] * impl_->x[j];
    return s;
}

std::vector<double> LpEngine::reduced_costs() const {
    return std::vector<double>(impl_->d.begin(), impl_->d.begin() + impl_->n);
}

bool LpEngine::is_basic(int col) const {
    return impl_->state.at(static_cast<std::size_t>(col)) == VarState::Basic;
}

bool LpEngine::is_row_basic(int row) const {
    return impl_->state.at(static_cast<std::size_t>(impl_->n + row)) == VarState::Basic;
}
double LpEngine::row_reduced_cost(int row) const { return impl_->d.at(static_cast<std::size_t>(impl_->n + row)); }
double LpEngine::row_activity(int row) const { return impl_->x.at(static_cast<std::size_t>(impl_->n + row)); }
double LpEngine::row_lower(int row) const { return impl_->lb.at(static_cast<std::size_t>(impl_->n + row)); }
double LpEngine::row_upper(int row) const { return impl_->ub.at(static_cast<std::size_t>(impl_->n + row)); }

long LpEngine::iterations() const { return impl_->iter; }

LpSolution LpEngine::solution() const {
    LpSolution s;
    s.status = impl_->last;
    s.iterations = impl_->iter;
    if (s.status == LpStatus::Optimal) {
        s.x = primal();
        s.objective = objective();
    }
    return s;
}

LpSolution solve_lp(const CanonicalMilp& model, const LpOptions& options) {
    LpEngine engine(model, options);
    engine.solve();
    return engine.solution();
}

}  // namespace railems
