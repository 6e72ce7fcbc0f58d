#pragma once

// Solver-agnostic sparse MILP: minimize c'x subject to row constraints and
// column bounds, with some columns restricted to {0, 1}.

#include <limits>
#include <string>
#include <vector>

namespace railems {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Column {
    double lower = 0.0;
    double upper = kInf;
    double cost = 0.0;
    bool binary = false;
    std::string name;
};

struct Row {
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
    std::string name;
};

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

class CanonicalMilp {
public:
    int add_column(double lower, double upper, double cost, bool binary = false,
                   std::string name = {});
    int add_binary(double cost, std::string name = {}) { return add_column(0.0, 1.0, cost, true, std::move(name)); }
    int add_row(RowSense sense, double rhs, std::string name = {});
    void add_coefficient(int row, int col, double value);

    void set_cost(int col, double cost) { columns_.at(static_cast<std::size_t>(col)).cost = cost; }
    void set_bounds(int col, double lower, double upper);
    void set_rhs(int row, double rhs) { rows_.at(static_cast<std::size_t>(row)).rhs = rhs; }

    int num_columns() const { return static_cast<int>(columns_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    int num_binaries() const;

    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }
    const Column& column(int j) const { return columns_.at(static_cast<std::size_t>(j)); }
    const Row& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }

    /// Name of column j, falling back to a positional name.
    std::string column_name(int j) const;
    std::string row_name(int i) const;

    /// Problems with the model as human-readable strings; empty iff the
    /// bounds are consistent, binaries lie within [0, 1], every triplet
    /// references an existing row/column, and no (row, col) pair repeats.
    std::vector<std::string> check() const;

private:
    std::vector<Column> columns_;
    std::vector<Row> rows_;
    std::vector<Triplet> triplets_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };
enum class MipStatus { Optimal, Infeasible, Unbounded, Limit, NumericalFailure };

std::string_view status_name(LpStatus s);
std::string_view status_name(MipStatus s);

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    std::vector<double> x;
    double objective = 0.0;
    long iterations = 0;
};

struct MipSolution {
    MipStatus status = MipStatus::NumericalFailure;
    std::vector<double> x;     // best incumbent (empty if none)
    double objective = kInf;   // incumbent objective
    double best_bound = -kInf;
    double gap = kInf;         // (objective - bound) / max(1, |objective|)
    long nodes = 0;
    long lp_iterations = 0;
};

/// Residuals of a point against a model, computed straight from the
/// triplets (no solver data structures involved).
struct FeasibilityReport {
    double max_row_violation = 0.0;     // scaled by 1 + |rhs|
    double max_bound_violation = 0.0;
    double max_integrality_violation = 0.0;
    int worst_row = -1;
    int worst_column = -1;
    double objective = 0.0;

    bool feasible(double row_tol, double bound_tol, double int_tol) const {
        return max_row_violation <= row_tol && max_bound_violation <= bound_tol &&
               max_integrality_violation <= int_tol;
    }
};

FeasibilityReport check_point(const CanonicalMilp& model, const std::vector<double>& x);

}  // namespace railems
