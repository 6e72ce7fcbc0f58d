#pragma once

#include "railems/core_model.hpp"

namespace railems {

/// PV active power (kW) for a solar radiation `beta` (W/m^2): quadratic up to
/// r_c, linear up to r_std, flat at the rated capacity beyond. Intervals are
/// half-open on the right, so beta == r_c takes the linear branch.
double pv_power(double beta, const PvSpec& spec);

/// Pointwise pv_power over a radiation series (W/m^2 in, kW out).
TimeSeries pv_series(const TimeSeries& radiation, const PvSpec& spec, const TimeGrid& grid);

}  // namespace railems
