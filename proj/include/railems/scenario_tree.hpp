#pragma once

#include <string>
#include <utility>
#include <vector>

#include "railems/core_model.hpp"

namespace railems {

enum class AxisLabel { Pv, Price, Rb };

std::string_view axis_label_name(AxisLabel label);

struct AxisMember {
    TimeSeries payload;
    double probability = 1.0;
    std::string name;
    bool operator==(const AxisMember&) const = default;
};

struct ScenarioAxis {
    AxisLabel label = AxisLabel::Pv;
    std::vector<AxisMember> members;

    /// Single member with probability one.
    static ScenarioAxis certain(AxisLabel label, TimeSeries payload, std::string name = "base");
    bool operator==(const ScenarioAxis&) const = default;
};

/// One leaf of the scenario tree.
struct Scenario {
    int index = 0;
    TimeSeries demand;      // P_D, kW
    TimeSeries rb_avail;    // available regenerative braking power, kW
    TimeSeries pv;          // kW
    TimeSeries price_buy;   // currency/kWh
    TimeSeries price_sell;  // currency/kWh
    double probability = 1.0;
    int pv_member = 0;
    int price_member = 0;
    int rb_member = 0;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    int pv_count = 0;
    int price_count = 0;
    int rb_count = 0;

    std::size_t size() const { return scenarios.size(); }
    double total_probability() const;
};

/// Cross product of the three axes; scenario (i, j, k) has index
/// (i * M2 + j) * M3 + k and probability p_i * p_j * p_k. The selling price
/// follows the buying price trajectory. The PV axis carries kW payloads.
ScenarioSet build_tree(const ScenarioAxis& pv_axis, const ScenarioAxis& price_axis,
                       const ScenarioAxis& rb_axis, const TimeSeries& base_demand);

/// Signed railway demand -> (train demand, available braking power), both nonnegative.
std::pair<TimeSeries, TimeSeries> split_demand(const TimeSeries& raw_demand, const TimeGrid& grid);

}  // namespace railems
