#include "railems/milp.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "railems/error.hpp"

namespace railems {

int CanonicalMilp::add_column(double lower, double upper, double cost, bool binary,
                              std::string name) {
    columns_.push_back(Column{lower, upper, cost, binary, std::move(name)});
    return static_cast<int>(columns_.size()) - 1;
}

int CanonicalMilp::add_row(RowSense sense, double rhs, std::string name) {
    rows_.push_back(Row{sense, rhs, std::move(name)});
    return static_cast<int>(rows_.size()) - 1;
}

void CanonicalMilp::add_coefficient(int row, int col, double value) {
    if (row < 0 || row >= num_rows() || col < 0 || col >= num_columns()) {
        throw DomainError("coefficient (" + std::to_string(row) + ", " + std::to_string(col) +
                          ") outside the model");
    }
    if (value != 0.0) triplets_.push_back(Triplet{row, col, value});
}

void CanonicalMilp::set_bounds(int col, double lower, double upper) {
    Column& c = columns_.at(static_cast<std::size_t>(col));
    c.lower = lower;
    c.upper = upper;
}

int CanonicalMilp::num_binaries() const {
    return static_cast<int>(std::count_if(columns_.begin(), columns_.end(),
                                          [](const Column& c) { return c.binary; }));
}

std::string CanonicalMilp::column_name(int j) const {
    const std::string& n = column(j).name;
    if (!n.empty()) return n;
    return "C" + std::to_string(j);
}

std::string CanonicalMilp::row_name(int i) const {
    const std::string& n = row(i).name;
    if (!n.empty()) return n;
    return "R" + std::to_string(i);
}

std::vector<std::string> CanonicalMilp::check() const {
    std::vector<std::string> problems;
    for (int j = 0; j < num_columns(); ++j) {
        const Column& c = column(j);
        if (std::isnan(c.lower) || std::isnan(c.upper) || !std::isfinite(c.cost)) {
            problems.push_back("column " + column_name(j) + " has NaN bounds or a non-finite cost");
        } else if (c.lower > c.upper) {
            problems.push_back("column " + column_name(j) + " has lower bound above upper bound");
        }
        if (c.binary && (c.lower < 0.0 || c.upper > 1.0)) {
            problems.push_back("binary column " + column_name(j) + " has bounds outside [0, 1]");
        }
    }
    for (int i = 0; i < num_rows(); ++i) {
        if (!std::isfinite(row(i).rhs)) problems.push_back("row " + row_name(i) + " has a non-finite rhs");
    }
    std::unordered_set<long long> seen;
    seen.reserve(triplets_.size());
    for (const Triplet& t : triplets_) {
        if (t.row < 0 || t.row >= num_rows() || t.col < 0 || t.col >= num_columns()) {
            problems.push_back("triplet outside the model");
            continue;
        }
        if (!std::isfinite(t.value)) {
            problems.push_back("non-finite coefficient in row " + row_name(t.row));
        }
        const long long key = static_cast<long long>(t.row) * num_columns() + t.col;
        if (!seen.insert(key).second) {
            problems.push_back("duplicate coefficient (" + row_name(t.row) + ", " +
                               column_name(t.col) + ")");
        }
    }
    return problems;
}

std::string_view status_name(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
        case LpStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

std::string_view status_name(MipStatus s) {
    switch (s) {
        case MipStatus::Optimal: return "optimal";
        case MipStatus::Infeasible: return "infeasible";
        case MipStatus::Unbounded: return "unbounded";
        case MipStatus::Limit: return "limit";
        case MipStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

FeasibilityReport check_point(const CanonicalMilp& model, const std::vector<double>& x) {
    FeasibilityReport rep;
    if (x.size() != static_cast<std::size_t>(model.num_columns())) {
        rep.max_row_violation = kInf;
        rep.max_bound_violation = kInf;
        return rep;
    }
    std::vector<double> activity(static_cast<std::size_t>(model.num_rows()), 0.0);
    for (const Triplet& t : model.triplets()) {
        activity[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
    }
    for (int i = 0; i < model.num_rows(); ++i) {
        const Row& r = model.row(i);
        const double a = activity[static_cast<std::size_t>(i)];
        double viol = 0.0;
        switch (r.sense) {
            case RowSense::LessEqual: viol = std::max(0.0, a - r.rhs); break;
            case RowSense::GreaterEqual: viol = std::max(0.0, r.rhs - a); break;
            case RowSense::Equal: viol = std::abs(a - r.rhs); break;
        }
        viol /= 1.0 + std::abs(r.rhs);
        if (viol > rep.max_row_violation) {
            rep.max_row_violation = viol;
            rep.worst_row = i;
        }
    }
    for (int j = 0; j < model.num_columns(); ++j) {
        const Column& c = model.column(j);
        const double v = x[static_cast<std::size_t>(j)];
        const double viol = std::max({0.0, c.lower - v, v - c.upper});
        if (viol > rep.max_bound_violation) {
            rep.max_bound_violation = viol;
            rep.worst_column = j;
        }
        if (c.binary) {
            rep.max_integrality_violation =
                std::max(rep.max_integrality_violation, std::abs(v - std::round(v)));
        }
        rep.objective += c.cost * v;
    }
    return rep;
}

}  // namespace railems
