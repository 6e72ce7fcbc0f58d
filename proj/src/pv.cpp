#include "railems/pv.hpp"

#include <cmath>
#include <vector>

#include "railems/error.hpp"

namespace railems {

double pv_power(double beta, const PvSpec& spec) {
    if (!(beta >= 0.0)) {
        throw DomainError("pv_power: radiation must be nonnegative, got " + std::to_string(beta));
    }
    if (beta < spec.r_c) {
        return beta * beta * spec.rated_capacity / (spec.r_c * spec.r_std);
    }
    if (beta < spec.r_std) {
        return beta * spec.rated_capacity / spec.r_std;
    }
    return spec.rated_capacity;
}

TimeSeries pv_series(const TimeSeries& radiation, const PvSpec& spec, const TimeGrid& grid) {
    if (radiation.unit() != Unit::WattPerSquareMeter) {
        throw DomainError("pv_series: radiation series must be in W/m2");
    }
    std::vector<double> out;
    out.reserve(radiation.size());
    for (double beta : radiation.values()) out.push_back(pv_power(beta, spec));
    return TimeSeries(std::move(out), Unit::Kilowatt, grid);
}

}  // namespace railems
