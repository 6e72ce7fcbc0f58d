#include "railems/ev_fleet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "railems/error.hpp"
#include "random.hpp"

namespace railems {

namespace {

// Guards ceil() against quotients like 3.0000000000000004.
constexpr double kStepRoundingSlack = 1e-9;

constexpr std::uint64_t kBusSeedSalt = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::string_view ev_kind_name(EvKind kind) { return kind == EvKind::Car ? "car" : "bus"; }

EvClass default_car_class() { return EvClass{EvKind::Car, 11.0, 22.0, 1.0}; }
EvClass default_bus_class() { return EvClass{EvKind::Bus, 300.0, 300.0, 1.0}; }

int parse_clock(const std::string& hhmm) {
    int h = 0;
    int m = 0;
    char tail = 0;
    if (std::sscanf(hhmm.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || h > 48 || m < 0 ||
        m > 59) {
        throw ParseError("invalid clock time '" + hhmm + "', expected HH:MM");
    }
    return h * 60 + m;
}

std::string format_clock(int minutes) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
    return buf;
}

FlexBounds flex_bounds(const EvSession& session, double kappa, const TimeGrid& grid) {
    if (session.t_departure <= session.t_arrival) {
        throw DomainError("flex_bounds: departure step must follow arrival step (EV " +
                          std::to_string(session.id) + ")");
    }
    if (kappa < 0.0 || kappa > 1.0) {
        throw DomainError("flex_bounds: kappa must lie in [0, 1]");
    }
    const double stay_hours = session.stay_steps() * grid.step_hours();
    const EvClass& c = session.ev_class;
    FlexBounds b;
    b.theta_max = std::min(c.eta * c.p_max * stay_hours, session.e_requested);
    b.theta_min = kappa * std::min(c.eta * c.p_nominal * stay_hours, session.e_requested);
    return b;
}

int fulfillment_time(const EvSession& session, const TimeGrid& grid) {
    const double missing = session.e_requested - session.soc_init;
    if (missing <= 0.0) return 0;
    const double per_step = session.ev_class.eta * session.ev_class.p_nominal * grid.step_hours();
    return static_cast<int>(std::ceil(missing / per_step - kStepRoundingSlack));
}

EvSession make_session(int id, const EvClass& ev_class, int t_arrival, int t_departure,
                       double e_requested, double soc_init, double kappa, const TimeGrid& grid) {
    if (!(ev_class.p_nominal > 0.0) || ev_class.p_nominal > ev_class.p_max) {
        throw DomainError("EV class requires 0 < p_nominal <= p_max");
    }
    if (!(ev_class.eta > 0.0) || ev_class.eta > 1.0) {
        throw DomainError("EV class efficiency must lie in (0, 1]");
    }
    if (t_arrival < 1 || t_departure <= t_arrival || t_departure > grid.horizon_steps) {
        throw DomainError("EV " + std::to_string(id) + ": need 1 <= t_arrival < t_departure <= " +
                          std::to_string(grid.horizon_steps) + ", got [" +
                          std::to_string(t_arrival) + ", " + std::to_string(t_departure) + "]");
    }
    if (soc_init < 0.0 || e_requested < soc_init) {
        throw DomainError("EV " + std::to_string(id) + ": need 0 <= soc_init <= e_requested");
    }
    EvSession s;
    s.id = id;
    s.ev_class = ev_class;
    s.t_arrival = t_arrival;
    s.t_departure = t_departure;
    s.soc_init = soc_init;
    s.e_requested = e_requested;
    const FlexBounds b = flex_bounds(s, kappa, grid);
    s.theta_min = b.theta_min;
    s.theta_max = b.theta_max;
    return s;
}

std::vector<EvSession> sample_car_sessions(const CarFleetSpec& spec, const TimeGrid& grid,
                                           std::uint64_t seed, double kappa) {
    if (!(spec.arrival_rate_per_hour > 0.0)) {
        throw DomainError("car arrival rate must be positive");
    }
    if (spec.window_start_minutes < 0 || spec.window_end_minutes <= spec.window_start_minutes ||
        spec.window_end_minutes > grid.horizon_minutes()) {
        throw DomainError("car arrival window " + format_clock(spec.window_start_minutes) + "-" +
                          format_clock(spec.window_end_minutes) + " lies outside the time grid");
    }
    if (spec.energy_min < 0.0 || spec.energy_max < spec.energy_min) {
        throw DomainError("car energy range must satisfy 0 <= min <= max");
    }
    detail::Rng rng(seed);
    std::vector<EvSession> out;
    const double step_min = grid.step_minutes;
    double clock = spec.window_start_minutes;
    while (true) {
        clock += 60.0 * rng.exponential(spec.arrival_rate_per_hour);
        if (clock >= spec.window_end_minutes) break;
        const double energy = rng.uniform(spec.energy_min, spec.energy_max);
        const double offset_h = rng.triangular(-spec.departure_spread_hours,
                                               spec.departure_mode_hours,
                                               spec.departure_spread_hours);
        if (spec.max_sessions >= 0 && static_cast<int>(out.size()) >= spec.max_sessions) break;

        const int t_arrival = std::max(1, static_cast<int>(std::ceil(clock / step_min - kStepRoundingSlack)));
        if (t_arrival >= grid.horizon_steps) continue;

        EvSession probe;
        probe.ev_class = spec.ev_class;
        probe.e_requested = energy;
        const int fulfil = fulfillment_time(probe, grid);
        int t_departure =
            t_arrival + fulfil + static_cast<int>(std::lround(offset_h * 60.0 / step_min));
        t_departure = std::clamp(t_departure, t_arrival + 1, grid.horizon_steps);

        out.push_back(make_session(static_cast<int>(out.size()), spec.ev_class, t_arrival,
                                   t_departure, energy, 0.0, kappa, grid));
    }
    return out;
}

std::vector<EvSession> sample_bus_sessions(const BusFleetSpec& spec, const TimeGrid& grid,
                                           std::uint64_t seed, double kappa) {
    if (spec.timetable.departures.empty()) {
        throw DomainError("bus timetable is empty");
    }
    if (spec.offset_min_minutes < 0.0 || spec.offset_max_minutes < spec.offset_min_minutes ||
        spec.offset_mode_minutes < spec.offset_min_minutes ||
        spec.offset_mode_minutes > spec.offset_max_minutes) {
        throw DomainError("bus arrival offset needs min <= mode <= max");
    }
    detail::Rng rng(seed);
    std::vector<EvSession> out;
    for (int departure_min : spec.timetable.departures) {
        const double d_steps = static_cast<double>(departure_min) / grid.step_minutes;
        const int t_departure = static_cast<int>(std::lround(d_steps));
        if (t_departure < 2 || t_departure > grid.horizon_steps) {
            throw DomainError("bus departure " + format_clock(departure_min) +
                              " lies outside the time grid");
        }
        const double energy = rng.uniform(spec.energy_min, spec.energy_max);
        int t_arrival = t_departure;
        for (int attempt = 0; attempt <= spec.max_redraws; ++attempt) {
            const double offset = rng.triangular(spec.offset_min_minutes, spec.offset_mode_minutes,
                                                 spec.offset_max_minutes);
            const int candidate =
                t_departure - static_cast<int>(std::lround(offset / grid.step_minutes));
            if (candidate >= 1 && candidate < t_departure) {
                t_arrival = candidate;
                break;
            }
        }
        if (t_arrival >= t_departure) {
            throw DomainError("bus departing " + format_clock(departure_min) +
                              ": arrival offset rounds to a zero-length stay on this grid");
        }
        out.push_back(make_session(static_cast<int>(out.size()), spec.ev_class, t_arrival,
                                   t_departure, energy, 0.0, kappa, grid));
    }
    return out;
}

std::vector<EvSession> generate_fleet(const FleetConfig& fleet, const TimeGrid& grid,
                                      std::uint64_t seed, double kappa) {
    std::vector<EvSession> all;
    if (!fleet.sessions.empty()) {
        for (const SessionSpec& spec : fleet.sessions) {
            const EvClass& cls =
                spec.kind == EvKind::Car ? fleet.car.ev_class : fleet.bus.ev_class;
            all.push_back(make_session(static_cast<int>(all.size()), cls, spec.t_arrival,
                                       spec.t_departure, spec.e_requested, spec.soc_init, kappa,
                                       grid));
        }
    } else {
        if (!fleet.bus.timetable.departures.empty()) {
            auto buses = sample_bus_sessions(fleet.bus, grid, seed ^ kBusSeedSalt, kappa);
            all.insert(all.end(), buses.begin(), buses.end());
        }
        if (fleet.car.enabled) {
            auto cars = sample_car_sessions(fleet.car, grid, seed, kappa);
            all.insert(all.end(), cars.begin(), cars.end());
        }
        // Stable: buses precede cars on equal arrival, draw order otherwise.
        std::stable_sort(all.begin(), all.end(), [](const EvSession& a, const EvSession& b) {
            return a.t_arrival < b.t_arrival;
        });
    }
    if (fleet.max_sessions >= 0 && static_cast<int>(all.size()) > fleet.max_sessions) {
        all.resize(static_cast<std::size_t>(fleet.max_sessions));
    }
    for (std::size_t k = 0; k < all.size(); ++k) all[k].id = static_cast<int>(k);
    return all;
}

double uncoordinated_energy(const EvSession& session, const TimeGrid& grid) {
    const double per_step = session.ev_class.eta * session.ev_class.p_nominal * grid.step_hours();
    const double missing = std::max(0.0, session.e_requested - session.soc_init);
    return std::min(missing, per_step * session.stay_steps());
}

TimeSeries uncoordinated_profile(const std::vector<EvSession>& sessions, const TimeGrid& grid) {
    std::vector<double> total(static_cast<std::size_t>(grid.horizon_steps), 0.0);
    const double dt = grid.step_hours();
    for (const EvSession& s : sessions) {
        const double per_step = s.ev_class.eta * s.ev_class.p_nominal * dt;
        double remaining = std::max(0.0, s.e_requested - s.soc_init);
        for (int t = s.t_arrival + 1; t <= s.t_departure && remaining > 0.0; ++t) {
            double p = s.ev_class.p_nominal;
            if (remaining <= per_step * (1.0 + kStepRoundingSlack)) {
                p = remaining / (s.ev_class.eta * dt);
                remaining = 0.0;
            } else {
                remaining -= per_step;
            }
            total[static_cast<std::size_t>(t - 1)] += p;
        }
    }
    return TimeSeries(std::move(total), Unit::Kilowatt, grid);
}

}  // namespace railems
