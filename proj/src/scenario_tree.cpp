#include "railems/scenario_tree.hpp"

#include <cmath>

#include "railems/error.hpp"

namespace railems {

namespace {

constexpr double kProbabilitySumTol = 1e-9;

void check_axis(const ScenarioAxis& axis, std::size_t steps, Unit expected) {
    const std::string name(axis_label_name(axis.label));
    if (axis.members.empty()) throw DomainError(name + " axis has no members");
    double sum = 0.0;
    for (const AxisMember& m : axis.members) {
        if (!(m.probability > 0.0)) {
            throw DomainError(name + " axis member '" + m.name + "' has nonpositive probability");
        }
        if (m.payload.size() != steps) {
            throw DomainError(name + " axis member '" + m.name + "' has the wrong length");
        }
        if (m.payload.unit() != expected) {
            throw DomainError(name + " axis member '" + m.name + "' has unit " +
                              std::string(unit_tag(m.payload.unit())) + ", expected " +
                              std::string(unit_tag(expected)));
        }
        if (axis.label != AxisLabel::Price && !m.payload.all_nonnegative()) {
            throw DomainError(name + " axis member '" + m.name + "' has negative values");
        }
        sum += m.probability;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTol) {
        throw DomainError(name + " axis probabilities sum to " + std::to_string(sum) +
                          ", expected 1");
    }
}

}  // namespace

std::string_view axis_label_name(AxisLabel label) {
    switch (label) {
        case AxisLabel::Pv: return "pv";
        case AxisLabel::Price: return "price";
        case AxisLabel::Rb: return "rb";
    }
    return "?";
}

ScenarioAxis ScenarioAxis::certain(AxisLabel label, TimeSeries payload, std::string name) {
    ScenarioAxis axis;
    axis.label = label;
    axis.members.push_back(AxisMember{std::move(payload), 1.0, std::move(name)});
    return axis;
}

double ScenarioSet::total_probability() const {
    double sum = 0.0;
    for (const Scenario& s : scenarios) sum += s.probability;
    return sum;
}

ScenarioSet build_tree(const ScenarioAxis& pv_axis, const ScenarioAxis& price_axis,
                       const ScenarioAxis& rb_axis, const TimeSeries& base_demand) {
    const std::size_t steps = base_demand.size();
    if (base_demand.unit() != Unit::Kilowatt || !base_demand.all_nonnegative()) {
        throw DomainError("base demand must be a nonnegative kW series");
    }
    check_axis(pv_axis, steps, Unit::Kilowatt);
    check_axis(price_axis, steps, Unit::CurrencyPerKwh);
    check_axis(rb_axis, steps, Unit::Kilowatt);

    ScenarioSet set;
    set.pv_count = static_cast<int>(pv_axis.members.size());
    set.price_count = static_cast<int>(price_axis.members.size());
    set.rb_count = static_cast<int>(rb_axis.members.size());
    set.scenarios.reserve(static_cast<std::size_t>(set.pv_count * set.price_count * set.rb_count));
    for (int i = 0; i < set.pv_count; ++i) {
        for (int j = 0; j < set.price_count; ++j) {
            for (int k = 0; k < set.rb_count; ++k) {
                const AxisMember& pv = pv_axis.members[static_cast<std::size_t>(i)];
                const AxisMember& price = price_axis.members[static_cast<std::size_t>(j)];
                const AxisMember& rb = rb_axis.members[static_cast<std::size_t>(k)];
                Scenario s;
                s.index = static_cast<int>(set.scenarios.size());
                s.demand = base_demand;
                s.rb_avail = rb.payload;
                s.pv = pv.payload;
                s.price_buy = price.payload;
                s.price_sell = price.payload;
                s.probability = pv.probability * price.probability * rb.probability;
                s.pv_member = i;
                s.price_member = j;
                s.rb_member = k;
                set.scenarios.push_back(std::move(s));
            }
        }
    }
    return set;
}

std::pair<TimeSeries, TimeSeries> split_demand(const TimeSeries& raw_demand, const TimeGrid& grid) {
    std::vector<double> demand;
    std::vector<double> braking;
    demand.reserve(raw_demand.size());
    braking.reserve(raw_demand.size());
    for (double v : raw_demand.values()) {
        demand.push_back(v > 0.0 ? v : 0.0);
        braking.push_back(v < 0.0 ? -v : 0.0);
    }
    return {TimeSeries(std::move(demand), Unit::Kilowatt, grid),
            TimeSeries(std::move(braking), Unit::Kilowatt, grid)};
}

}  // namespace railems
