#include "railems/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "railems/error.hpp"

namespace railems {

TimeGrid TimeGrid::from_horizon(int step_minutes, double horizon_hours) {
    if (step_minutes <= 0) {
        throw DomainError("time_grid.step_minutes must be positive");
    }
    const double steps = horizon_hours * 60.0 / step_minutes;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9) {
        throw DomainError("time_grid: horizon of " + std::to_string(horizon_hours) +
                          " h is not a positive whole number of " +
                          std::to_string(step_minutes) + "-minute steps");
    }
    return TimeGrid{step_minutes, static_cast<int>(rounded)};
}

std::string_view unit_tag(Unit u) {
    switch (u) {
        case Unit::Kilowatt: return "kW";
        case Unit::WattPerSquareMeter: return "W/m2";
        case Unit::CurrencyPerKwh: return "currency/kWh";
    }
    return "?";
}

Unit parse_unit(std::string_view tag) {
    if (tag == "kW") return Unit::Kilowatt;
    if (tag == "W/m2" || tag == "W/m^2") return Unit::WattPerSquareMeter;
    if (tag == "currency/kWh") return Unit::CurrencyPerKwh;
    throw SchemaError("unknown unit tag '" + std::string(tag) + "'");
}

TimeSeries::TimeSeries(std::vector<double> values, Unit unit, const TimeGrid& grid)
    : values_(std::move(values)), unit_(unit) {
    if (values_.size() != static_cast<std::size_t>(grid.horizon_steps)) {
        throw DomainError("time series has " + std::to_string(values_.size()) +
                          " values, grid has " + std::to_string(grid.horizon_steps) + " steps");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("time series contains a non-finite value");
    }
}

TimeSeries TimeSeries::zeros(Unit unit, const TimeGrid& grid) {
    return TimeSeries(std::vector<double>(static_cast<std::size_t>(grid.horizon_steps), 0.0), unit,
                      grid);
}

bool TimeSeries::all_nonnegative() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

double TimeSeries::max() const {
    if (values_.empty()) return 0.0;
    return *std::max_element(values_.begin(), values_.end());
}

}  // namespace railems
