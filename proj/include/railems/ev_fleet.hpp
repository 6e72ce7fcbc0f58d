#pragma once

// EV charging sessions: probabilistic private cars, timetable-driven buses,
// per-session flexibility bounds and the uncoordinated-charging baseline.

#include <cstdint>
#include <string>
#include <vector>

#include "railems/core_model.hpp"

namespace railems {

enum class EvKind { Car, Bus };

std::string_view ev_kind_name(EvKind kind);

struct EvClass {
    EvKind kind = EvKind::Car;
    double p_nominal = 11.0;  // kW
    double p_max = 22.0;      // kW
    double eta = 1.0;
    bool operator==(const EvClass&) const = default;
};

EvClass default_car_class();
EvClass default_bus_class();

/// One vehicle's stay. The vehicle is plugged in over steps
/// [t_arrival, t_departure]; energy accrues over steps t_arrival+1 .. t_departure.
struct EvSession {
    int id = 0;
    EvClass ev_class;
    int t_arrival = 1;
    int t_departure = 2;
    double soc_init = 0.0;     // kWh
    double e_requested = 0.0;  // kWh
    double theta_min = 0.0;    // kWh
    double theta_max = 0.0;    // kWh

    int stay_steps() const { return t_departure - t_arrival; }
    bool operator==(const EvSession&) const = default;
};

/// Departure clock times in minutes after midnight.
struct BusTimetable {
    std::vector<int> departures;
    bool operator==(const BusTimetable&) const = default;
};

/// "HH:MM" -> minutes after midnight. Throws ParseError.
int parse_clock(const std::string& hhmm);
std::string format_clock(int minutes);

struct CarFleetSpec {
    bool enabled = true;
    double arrival_rate_per_hour = 4.0;
    int window_start_minutes = 6 * 60;
    int window_end_minutes = 22 * 60;
    double energy_min = 10.0;  // kWh
    double energy_max = 50.0;  // kWh
    EvClass ev_class = default_car_class();
    // Departure = arrival + fulfillment time + triangular offset on
    // [-spread, +spread] hours with the given mode.
    double departure_spread_hours = 2.0;
    double departure_mode_hours = 0.0;
    int max_sessions = -1;  // negative: no class-specific cap
    bool operator==(const CarFleetSpec&) const = default;
};

struct BusFleetSpec {
    BusTimetable timetable;
    double energy_min = 100.0;  // kWh
    double energy_max = 300.0;  // kWh
    EvClass ev_class = default_bus_class();
    // Arrival precedes the fixed departure by a triangular offset (minutes).
    double offset_min_minutes = 10.0;
    double offset_mode_minutes = 35.0;
    double offset_max_minutes = 60.0;
    int max_redraws = 16;
    bool operator==(const BusFleetSpec&) const = default;
};

/// A session given verbatim in the configuration instead of being sampled.
struct SessionSpec {
    EvKind kind = EvKind::Car;
    int t_arrival = 1;
    int t_departure = 2;
    double e_requested = 0.0;
    double soc_init = 0.0;
    bool operator==(const SessionSpec&) const = default;
};

struct FleetConfig {
    std::uint64_t seed = 1;
    int max_sessions = 179;
    CarFleetSpec car;
    BusFleetSpec bus;
    std::vector<SessionSpec> sessions;  // when nonempty, sampling is skipped
    bool operator==(const FleetConfig&) const = default;
};

struct FlexBounds {
    double theta_min = 0.0;
    double theta_max = 0.0;
};

/// Bounds on the guaranteed departure energy. theta_max is the energy
/// reachable at the maximum rate (capped at the request); theta_min is kappa
/// times the energy reachable at the nominal rate (same cap).
FlexBounds flex_bounds(const EvSession& session, double kappa, const TimeGrid& grid);

/// Steps needed to deliver the requested energy at the nominal rate.
int fulfillment_time(const EvSession& session, const TimeGrid& grid);

/// Builds a session with flexibility bounds filled in; checks the session invariants.
EvSession make_session(int id, const EvClass& ev_class, int t_arrival, int t_departure,
                       double e_requested, double soc_init, double kappa, const TimeGrid& grid);

std::vector<EvSession> sample_car_sessions(const CarFleetSpec& spec, const TimeGrid& grid,
                                           std::uint64_t seed, double kappa);

std::vector<EvSession> sample_bus_sessions(const BusFleetSpec& spec, const TimeGrid& grid,
                                           std::uint64_t seed, double kappa);

/// Full fleet for a run: explicit sessions if configured, otherwise sampled
/// buses and cars merged by arrival step, capped, and renumbered 0..N-1.
std::vector<EvSession> generate_fleet(const FleetConfig& fleet, const TimeGrid& grid,
                                      std::uint64_t seed, double kappa);

/// Baseline: every EV charges at its nominal power from the step after
/// arrival until the request is met or it departs; the last step is
/// partial. Returns the per-step sum.
TimeSeries uncoordinated_profile(const std::vector<EvSession>& sessions, const TimeGrid& grid);

/// Per-session energy delivered by the uncoordinated baseline.
double uncoordinated_energy(const EvSession& session, const TimeGrid& grid);

}  // namespace railems
