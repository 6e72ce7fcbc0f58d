#pragma once

// Station-level domain types shared by every module: time grid, physical
// limits of grid connection, storage and PV, and the time-series carrier.
//
// Units: energies in kWh, powers in kW, prices in currency per kWh. Time
// steps are 1-based: step t covers the interval ending at t * step_hours,
// and step 0 is the initial instant (only the storage initial state lives
// there).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace railems {

struct TimeGrid {
    int step_minutes = 10;
    int horizon_steps = 144;

    double step_hours() const { return static_cast<double>(step_minutes) / 60.0; }
    int horizon_minutes() const { return step_minutes * horizon_steps; }

    /// Grid covering `horizon_hours` with steps of `step_minutes`. Throws
    /// DomainError unless the horizon is a positive whole number of steps.
    static TimeGrid from_horizon(int step_minutes, double horizon_hours);

    bool operator==(const TimeGrid&) const = default;
};

struct GridSpec {
    double p_buy_max = 5000.0;   // kW
    double p_sell_max = 5000.0;  // kW
    bool operator==(const GridSpec&) const = default;
};

/// How the storage discharge term enters the state-of-charge recursion.
enum class DischargeModel {
    Multiplied,    // SoC -= eta_discharge * P_B- * dt
    Conventional,  // SoC -= P_B- * dt / eta_discharge
};

struct EssSpec {
    double soc_max = 1000.0;  // kWh
    double soc_min = 100.0;   // kWh
    double soc_init = 500.0;  // kWh
    double charge_rate_max = 1000.0;     // kW
    double discharge_rate_max = 1000.0;  // kW
    double eta_charge = 0.95;
    double eta_discharge = 0.95;
    double self_discharge = 0.0;  // fraction of SoC lost per step
    DischargeModel discharge_model = DischargeModel::Multiplied;
    bool terminal_soc = false;  // require SoC at horizon end >= soc_init
    bool operator==(const EssSpec&) const = default;
};

struct PvSpec {
    double rated_capacity = 1000.0;  // kW
    double r_c = 150.0;              // W/m^2, end of the quadratic regime
    double r_std = 1000.0;           // W/m^2, saturation
    bool operator==(const PvSpec&) const = default;
};

struct PeakPolicy {
    double p_max = 3000.0;  // kW, cap on train + EV load
    bool operator==(const PeakPolicy&) const = default;
};

struct FlexPolicy {
    double kappa = 0.6;
    bool operator==(const FlexPolicy&) const = default;
};

/// Objective weights. The energy term is in currency and the flexibility
/// term in kWh, so the weights carry the exchange rate between the two.
struct ObjectiveWeights {
    double w_power = 1.0;
    double w_theta = 1.0;
    bool operator==(const ObjectiveWeights&) const = default;
};

enum class Unit { Kilowatt, WattPerSquareMeter, CurrencyPerKwh };

std::string_view unit_tag(Unit u);
/// Inverse of unit_tag; throws SchemaError on an unknown tag.
Unit parse_unit(std::string_view tag);

/// One value per time step. Construction checks the length against the grid.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<double> values, Unit unit, const TimeGrid& grid);

    /// All-zero series.
    static TimeSeries zeros(Unit unit, const TimeGrid& grid);

    std::span<const double> values() const { return values_; }
    /// Value at 1-based step t.
    double at_step(int t) const { return values_.at(static_cast<std::size_t>(t - 1)); }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }
    Unit unit() const { return unit_; }

    bool all_nonnegative() const;
    double max() const;

    bool operator==(const TimeSeries&) const = default;

private:
    std::vector<double> values_;
    Unit unit_ = Unit::Kilowatt;
};

}  // namespace railems
