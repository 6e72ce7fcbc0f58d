#include "railems/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "railems/error.hpp"

namespace railems {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- reading

class Reader {
public:
    Reader(const json& obj, std::string path, std::initializer_list<const char*> allowed)
        : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw SchemaError(path_ + ": expected an object");
        for (const auto& [key, _] : obj_.items()) {
            bool known = false;
            for (const char* a : allowed) known = known || key == a;
            if (!known) throw SchemaError(path_ + ": unknown field '" + key + "'");
        }
    }

    bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

    const json& at(const char* key) const {
        if (!has(key)) throw SchemaError(path_ + "." + key + ": required field is missing");
        return obj_.at(key);
    }

    double number(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number()) throw SchemaError(field(key) + ": expected a number");
        return v.get<double>();
    }

    int integer(const char* key, int fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) throw SchemaError(field(key) + ": expected an integer");
        return v.get<int>();
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) throw SchemaError(field(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_string()) throw SchemaError(field(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::pair<double, double> range(const char* key, std::pair<double, double> fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw SchemaError(field(key) + ": expected [min, max]");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }

    Reader section(const char* key, std::initializer_list<const char*> allowed) const {
        static const json empty = json::object();
        return Reader(has(key) ? obj_.at(key) : empty, field(key), allowed);
    }

    std::string field(const char* key) const { return path_ + "." + key; }

private:
    const json& obj_;
    std::string path_;
};

std::vector<double> parse_csv_values(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,value") {
        throw ParseError(origin + ": expected header 'step,value', got '" + line + "'");
    }
    std::vector<double> values;
    int expected_step = 1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected 'step,value'");
        }
        try {
            std::size_t used = 0;
            const int step = std::stoi(line.substr(0, comma), &used);
            const std::string rest = line.substr(comma + 1);
            std::size_t used_v = 0;
            const double value = std::stod(rest, &used_v);
            if (used != comma || used_v != rest.size()) throw std::invalid_argument("trailing");
            if (step != expected_step) {
                throw ParseError(origin + ":" + std::to_string(line_no) + ": expected step " +
                                 std::to_string(expected_step));
            }
            values.push_back(value);
            ++expected_step;
        } catch (const std::logic_error&) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": malformed row '" + line +
                             "'");
        }
    }
    return values;
}

struct Loader {
    std::filesystem::path base_dir;
    TimeGrid grid;

    std::filesystem::path resolve(const std::string& p) const {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }

    TimeSeries series(const json& ref, Unit expected, const std::string& where) const {
        std::vector<double> values;
        if (ref.is_string()) {
            values = read_series_csv(resolve(ref.get<std::string>()));
        } else {
            Reader r(ref, where, {"csv", "values", "unit"});
            if (r.has("unit")) {
                const Unit u = parse_unit(r.string("unit", ""));
                if (u != expected) {
                    throw SchemaError(where + ".unit: expected '" +
                                      std::string(unit_tag(expected)) + "', got '" +
                                      std::string(unit_tag(u)) + "'");
                }
            }
            if (r.has("csv") == r.has("values")) {
                throw SchemaError(where + ": give exactly one of 'csv' or 'values'");
            }
            if (r.has("csv")) {
                values = read_series_csv(resolve(r.string("csv", "")));
            } else {
                const json& arr = r.at("values");
                if (!arr.is_array()) throw SchemaError(where + ".values: expected an array");
                for (const json& v : arr) {
                    if (!v.is_number()) throw SchemaError(where + ".values: expected numbers");
                    values.push_back(v.get<double>());
                }
            }
        }
        if (values.size() != static_cast<std::size_t>(grid.horizon_steps)) {
            throw SchemaError(where + ": series has " + std::to_string(values.size()) +
                              " values, the time grid has " + std::to_string(grid.horizon_steps));
        }
        return TimeSeries(std::move(values), expected, grid);
    }

    ScenarioAxis axis(const json& arr, AxisLabel label, Unit unit, const std::string& where) const {
        if (!arr.is_array() || arr.empty()) {
            throw SchemaError(where + ": expected a nonempty array of axis members");
        }
        ScenarioAxis axis;
        axis.label = label;
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string mwhere = where + "[" + std::to_string(k) + "]";
            Reader m(arr[k], mwhere, {"name", "probability", "series"});
            AxisMember member;
            member.name = m.string("name", std::string(axis_label_name(label)) + std::to_string(k + 1));
            member.probability = m.number("probability", 1.0 / static_cast<double>(arr.size()));
            member.payload = series(m.at("series"), unit, mwhere + ".series");
            axis.members.push_back(std::move(member));
        }
        return axis;
    }
};

EvClass read_class(const Reader& r, EvClass c) {
    c.p_nominal = r.number("p_nominal_kw", c.p_nominal);
    c.p_max = r.number("p_max_kw", c.p_max);
    c.eta = r.number("eta", c.eta);
    return c;
}

int clock_field(const json& v, const std::string& where) {
    if (!v.is_string()) throw SchemaError(where + ": expected an HH:MM string");
    return parse_clock(v.get<std::string>());
}

EvKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "car") return EvKind::Car;
    if (s == "bus") return EvKind::Bus;
    throw SchemaError(where + ": kind must be 'car' or 'bus'");
}

SiteConfig parse_json(const json& root, const std::filesystem::path& base_dir) {
    Reader top(root, "config",
               {"time_grid", "grid", "ess", "pv", "peak", "flexibility", "weights", "fleet",
                "scenario_axes"});
    SiteConfig cfg;

    Reader tg = top.section("time_grid", {"step_minutes", "horizon_hours"});
    try {
        cfg.time_grid = TimeGrid::from_horizon(tg.integer("step_minutes", 10),
                                               tg.number("horizon_hours", 24.0));
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }

    Reader grid = top.section("grid", {"p_buy_max_kw", "p_sell_max_kw"});
    cfg.grid.p_buy_max = grid.number("p_buy_max_kw", cfg.grid.p_buy_max);
    cfg.grid.p_sell_max = grid.number("p_sell_max_kw", cfg.grid.p_sell_max);

    Reader ess = top.section("ess", {"capacity_kwh", "soc_min_fraction", "soc_min_kwh",
                                     "soc_init_fraction", "soc_init_kwh", "charge_rate_kw",
                                     "discharge_rate_kw", "eta_charge", "eta_discharge",
                                     "self_discharge", "discharge_model", "terminal_soc"});
    cfg.ess.soc_max = ess.number("capacity_kwh", 1000.0);
    if (ess.has("soc_min_fraction") && ess.has("soc_min_kwh")) {
        throw SchemaError("config.ess: give soc_min_fraction or soc_min_kwh, not both");
    }
    if (ess.has("soc_init_fraction") && ess.has("soc_init_kwh")) {
        throw SchemaError("config.ess: give soc_init_fraction or soc_init_kwh, not both");
    }
    cfg.ess.soc_min = ess.has("soc_min_kwh") ? ess.number("soc_min_kwh", 0.0)
                                             : ess.number("soc_min_fraction", 0.10) * cfg.ess.soc_max;
    cfg.ess.soc_init = ess.has("soc_init_kwh")
                           ? ess.number("soc_init_kwh", 0.0)
                           : ess.number("soc_init_fraction", 0.50) * cfg.ess.soc_max;
    cfg.ess.charge_rate_max = ess.number("charge_rate_kw", cfg.ess.charge_rate_max);
    cfg.ess.discharge_rate_max = ess.number("discharge_rate_kw", cfg.ess.discharge_rate_max);
    cfg.ess.eta_charge = ess.number("eta_charge", cfg.ess.eta_charge);
    cfg.ess.eta_discharge = ess.number("eta_discharge", cfg.ess.eta_discharge);
    cfg.ess.self_discharge = ess.number("self_discharge", cfg.ess.self_discharge);
    const std::string model = ess.string("discharge_model", "multiplied");
    if (model == "multiplied") {
        cfg.ess.discharge_model = DischargeModel::Multiplied;
    } else if (model == "conventional") {
        cfg.ess.discharge_model = DischargeModel::Conventional;
    } else {
        throw SchemaError("config.ess.discharge_model: expected 'multiplied' or 'conventional'");
    }
    cfg.ess.terminal_soc = ess.boolean("terminal_soc", false);

    Reader pv = top.section("pv", {"rated_kw", "r_c", "r_std"});
    cfg.pv.rated_capacity = pv.number("rated_kw", cfg.pv.rated_capacity);
    cfg.pv.r_c = pv.number("r_c", cfg.pv.r_c);
    cfg.pv.r_std = pv.number("r_std", cfg.pv.r_std);

    cfg.peak.p_max = top.section("peak", {"p_max_kw"}).number("p_max_kw", cfg.peak.p_max);
    cfg.flex.kappa = top.section("flexibility", {"kappa"}).number("kappa", cfg.flex.kappa);

    Reader w = top.section("weights", {"w_power", "w_theta"});
    cfg.weights.w_power = w.number("w_power", 1.0);
    cfg.weights.w_theta = w.number("w_theta", 1.0);

    Loader loader{base_dir, cfg.time_grid};

    Reader fleet = top.section("fleet", {"seed", "max_sessions", "car", "bus", "sessions"});
    if (fleet.has("seed")) {
        const json& s = fleet.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            throw SchemaError("config.fleet.seed: expected a nonnegative integer");
        }
        cfg.fleet.seed = s.get<std::uint64_t>();
    }
    cfg.fleet.max_sessions = fleet.integer("max_sessions", cfg.fleet.max_sessions);

    Reader car = fleet.section("car", {"enabled", "arrival_rate_per_hour", "window", "energy_kwh",
                                       "p_nominal_kw", "p_max_kw", "eta",
                                       "departure_spread_hours", "departure_mode_hours",
                                       "max_sessions"});
    CarFleetSpec& cs = cfg.fleet.car;
    cs.enabled = car.boolean("enabled", cs.enabled);
    cs.arrival_rate_per_hour = car.number("arrival_rate_per_hour", cs.arrival_rate_per_hour);
    if (car.has("window")) {
        const json& win = car.at("window");
        if (!win.is_array() || win.size() != 2) {
            throw SchemaError("config.fleet.car.window: expected [\"HH:MM\", \"HH:MM\"]");
        }
        cs.window_start_minutes = clock_field(win[0], "config.fleet.car.window[0]");
        cs.window_end_minutes = clock_field(win[1], "config.fleet.car.window[1]");
    }
    std::tie(cs.energy_min, cs.energy_max) = car.range("energy_kwh", {cs.energy_min, cs.energy_max});
    cs.ev_class = read_class(car, cs.ev_class);
    cs.departure_spread_hours = car.number("departure_spread_hours", cs.departure_spread_hours);
    cs.departure_mode_hours = car.number("departure_mode_hours", cs.departure_mode_hours);
    cs.max_sessions = car.integer("max_sessions", cs.max_sessions);

    Reader bus = fleet.section("bus", {"timetable", "energy_kwh", "p_nominal_kw", "p_max_kw",
                                       "eta", "arrival_offset_minutes",
                                       "arrival_offset_mode_minutes", "max_redraws"});
    BusFleetSpec& bs = cfg.fleet.bus;
    if (bus.has("timetable")) {
        const json& tt = bus.at("timetable");
        if (tt.is_string()) {
            bs.timetable = read_timetable_csv(loader.resolve(tt.get<std::string>()));
        } else if (tt.is_array()) {
            for (std::size_t k = 0; k < tt.size(); ++k) {
                bs.timetable.departures.push_back(
                    clock_field(tt[k], "config.fleet.bus.timetable[" + std::to_string(k) + "]"));
            }
        } else {
            throw SchemaError("config.fleet.bus.timetable: expected a CSV path or HH:MM list");
        }
    }
    std::tie(bs.energy_min, bs.energy_max) = bus.range("energy_kwh", {bs.energy_min, bs.energy_max});
    bs.ev_class = read_class(bus, bs.ev_class);
    std::tie(bs.offset_min_minutes, bs.offset_max_minutes) =
        bus.range("arrival_offset_minutes", {bs.offset_min_minutes, bs.offset_max_minutes});
    bs.offset_mode_minutes = bus.number("arrival_offset_mode_minutes", bs.offset_mode_minutes);
    bs.max_redraws = bus.integer("max_redraws", bs.max_redraws);

    if (fleet.has("sessions")) {
        const json& arr = fleet.at("sessions");
        if (!arr.is_array()) throw SchemaError("config.fleet.sessions: expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string where = "config.fleet.sessions[" + std::to_string(k) + "]";
            Reader s(arr[k], where,
                     {"kind", "t_arrival", "t_departure", "e_requested_kwh", "soc_init_kwh"});
            SessionSpec spec;
            spec.kind = parse_kind(s.string("kind", "car"), where);
            spec.t_arrival = s.integer("t_arrival", 0);
            spec.t_departure = s.integer("t_departure", 0);
            if (!s.has("t_arrival") || !s.has("t_departure") || !s.has("e_requested_kwh")) {
                throw SchemaError(where + ": t_arrival, t_departure and e_requested_kwh are required");
            }
            spec.e_requested = s.number("e_requested_kwh", 0.0);
            spec.soc_init = s.number("soc_init_kwh", 0.0);
            cfg.fleet.sessions.push_back(spec);
        }
    }

    Reader axes = top.section("scenario_axes", {"demand", "pv", "price", "rb"});
    cfg.scenario_axes.raw_demand =
        loader.series(axes.at("demand"), Unit::Kilowatt, "config.scenario_axes.demand");
    cfg.scenario_axes.radiation = loader.axis(axes.at("pv"), AxisLabel::Pv,
                                              Unit::WattPerSquareMeter, "config.scenario_axes.pv");
    cfg.scenario_axes.price = loader.axis(axes.at("price"), AxisLabel::Price, Unit::CurrencyPerKwh,
                                          "config.scenario_axes.price");
    if (axes.has("rb")) {
        cfg.scenario_axes.rb =
            loader.axis(axes.at("rb"), AxisLabel::Rb, Unit::Kilowatt, "config.scenario_axes.rb");
    }
    return cfg;
}

// ---------------------------------------------------------------- writing

json series_json(const TimeSeries& ts) {
    return json{{"unit", std::string(unit_tag(ts.unit()))},
                {"values", std::vector<double>(ts.values().begin(), ts.values().end())}};
}

json axis_json(const ScenarioAxis& axis) {
    json arr = json::array();
    for (const AxisMember& m : axis.members) {
        arr.push_back(json{{"name", m.name}, {"probability", m.probability},
                           {"series", series_json(m.payload)}});
    }
    return arr;
}

json class_json(const EvClass& c) {
    return json{{"p_nominal_kw", c.p_nominal}, {"p_max_kw", c.p_max}, {"eta", c.eta}};
}

void add_violation(std::vector<Violation>& out, bool ok, std::string field, std::string rule) {
    if (!ok) out.push_back(Violation{std::move(field), std::move(rule)});
}

}  // namespace

std::vector<double> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open series file " + path.string());
    return parse_csv_values(in, path.string());
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> values) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "step,value\n";
    char buf[64];
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k + 1, values[k]);
        out << buf;
    }
}

BusTimetable read_timetable_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open timetable " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "departure_time") {
        throw ParseError(path.string() + ": expected header 'departure_time'");
    }
    BusTimetable tt;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        tt.departures.push_back(parse_clock(line));
    }
    return tt;
}

std::vector<Violation> validate_config(const SiteConfig& cfg) {
    std::vector<Violation> v;
    const TimeGrid& tg = cfg.time_grid;
    add_violation(v, tg.step_minutes > 0, "time_grid.step_minutes", "step_minutes > 0");
    add_violation(v, tg.horizon_steps >= 1, "time_grid.horizon_steps", "horizon_steps >= 1");

    add_violation(v, cfg.grid.p_buy_max >= 0, "grid.p_buy_max_kw", "p_buy_max >= 0");
    add_violation(v, cfg.grid.p_sell_max >= 0, "grid.p_sell_max_kw", "p_sell_max >= 0");

    const EssSpec& e = cfg.ess;
    add_violation(v, e.soc_min >= 0, "ess.soc_min", "soc_min >= 0");
    add_violation(v, e.soc_min <= e.soc_max, "ess.soc_min", "soc_min <= soc_max");
    add_violation(v, e.soc_init >= e.soc_min, "ess.soc_init", "soc_init >= soc_min");
    add_violation(v, e.soc_init <= e.soc_max, "ess.soc_init", "soc_init <= soc_max");
    add_violation(v, e.charge_rate_max >= 0, "ess.charge_rate_kw", "charge rate >= 0");
    add_violation(v, e.discharge_rate_max >= 0, "ess.discharge_rate_kw", "discharge rate >= 0");
    add_violation(v, e.eta_charge > 0 && e.eta_charge <= 1, "ess.eta_charge", "eta_charge in (0, 1]");
    add_violation(v, e.eta_discharge > 0 && e.eta_discharge <= 1, "ess.eta_discharge",
                  "eta_discharge in (0, 1]");
    add_violation(v, e.self_discharge >= 0 && e.self_discharge < 1, "ess.self_discharge",
                  "self_discharge in [0, 1)");

    add_violation(v, cfg.pv.rated_capacity >= 0, "pv.rated_kw", "P_r >= 0");
    add_violation(v, cfg.pv.r_c > 0, "pv.r_c", "r_c > 0");
    add_violation(v, cfg.pv.r_c < cfg.pv.r_std, "pv.r_c", "r_c < r_std");

    add_violation(v, cfg.peak.p_max > 0, "peak.p_max_kw", "p_max > 0");
    add_violation(v, cfg.flex.kappa >= 0 && cfg.flex.kappa <= 1, "flexibility.kappa",
                  "kappa in [0, 1]");

    const ObjectiveWeights& w = cfg.weights;
    add_violation(v, w.w_power >= 0 && w.w_power <= 1, "weights.w_power", "w_power in [0, 1]");
    add_violation(v, w.w_theta >= 0 && w.w_theta <= 1, "weights.w_theta", "w_theta in [0, 1]");
    add_violation(v, w.w_power > 0 || w.w_theta > 0, "weights", "weights not both zero");

    const FleetConfig& f = cfg.fleet;
    for (const auto& [name, cls] : {std::pair{"fleet.car", f.car.ev_class},
                                    std::pair{"fleet.bus", f.bus.ev_class}}) {
        add_violation(v, cls.p_nominal > 0 && cls.p_nominal <= cls.p_max,
                      std::string(name) + ".p_nominal_kw", "0 < p_nominal <= p_max");
        add_violation(v, cls.eta > 0 && cls.eta <= 1, std::string(name) + ".eta", "eta in (0, 1]");
    }
    add_violation(v, f.car.arrival_rate_per_hour > 0, "fleet.car.arrival_rate_per_hour",
                  "arrival rate > 0");
    // Sampling inputs only matter when no explicit sessions are given.
    const bool sampling = f.sessions.empty();
    add_violation(v,
                  !sampling || !f.car.enabled ||
                      (f.car.window_start_minutes >= 0 &&
                       f.car.window_start_minutes < f.car.window_end_minutes &&
                       f.car.window_end_minutes <= tg.horizon_minutes()),
                  "fleet.car.window", "window inside the time grid");
    add_violation(v, f.car.energy_min >= 0 && f.car.energy_min <= f.car.energy_max,
                  "fleet.car.energy_kwh", "0 <= min <= max");
    add_violation(v, f.bus.energy_min >= 0 && f.bus.energy_min <= f.bus.energy_max,
                  "fleet.bus.energy_kwh", "0 <= min <= max");
    add_violation(v,
                  f.bus.offset_min_minutes >= 0 &&
                      f.bus.offset_min_minutes <= f.bus.offset_mode_minutes &&
                      f.bus.offset_mode_minutes <= f.bus.offset_max_minutes,
                  "fleet.bus.arrival_offset_minutes", "0 <= min <= mode <= max");
    for (int d : f.bus.timetable.departures) {
        add_violation(v, !sampling || (d > 0 && d <= tg.horizon_minutes()), "fleet.bus.timetable",
                      "departure " + format_clock(d) + " inside the time grid");
    }
    for (std::size_t k = 0; k < f.sessions.size(); ++k) {
        const SessionSpec& s = f.sessions[k];
        const std::string field = "fleet.sessions[" + std::to_string(k) + "]";
        add_violation(v, s.t_arrival >= 1 && s.t_arrival < s.t_departure &&
                             s.t_departure <= tg.horizon_steps,
                      field, "1 <= t_arrival < t_departure <= N_t");
        add_violation(v, s.soc_init >= 0 && s.soc_init <= s.e_requested, field,
                      "0 <= soc_init <= e_requested");
    }

    const ScenarioInputs& in = cfg.scenario_axes;
    const auto check_axis = [&](const ScenarioAxis& axis, const std::string& field, bool nonneg) {
        double sum = 0.0;
        for (const AxisMember& m : axis.members) {
            add_violation(v, m.probability > 0, field, "member '" + m.name + "' probability > 0");
            add_violation(v, m.payload.size() == static_cast<std::size_t>(tg.horizon_steps), field,
                          "member '" + m.name + "' length == N_t");
            if (nonneg) {
                add_violation(v, m.payload.all_nonnegative(), field,
                              "member '" + m.name + "' values >= 0");
            }
            sum += m.probability;
        }
        add_violation(v, !axis.members.empty() && std::abs(sum - 1.0) <= 1e-9, field,
                      "probabilities sum to 1");
    };
    add_violation(v, in.raw_demand.size() == static_cast<std::size_t>(tg.horizon_steps),
                  "scenario_axes.demand", "length == N_t");
    check_axis(in.radiation, "scenario_axes.pv", true);
    check_axis(in.price, "scenario_axes.price", false);
    if (in.rb) check_axis(*in.rb, "scenario_axes.rb", true);
    return v;
}

SiteConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed configuration: ") + e.what());
    }
    SiteConfig cfg;
    try {
        cfg = parse_json(root, base_dir);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("configuration schema: ") + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
        std::string msg = "configuration violates invariants:";
        for (const Violation& v : violations) msg += "\n  " + v.field + ": " + v.rule;
        throw SchemaError(msg);
    }
    return cfg;
}

SiteConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open configuration " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string config_to_json(const SiteConfig& cfg) {
    json root;
    root["time_grid"] = {{"step_minutes", cfg.time_grid.step_minutes},
                         {"horizon_hours", cfg.time_grid.horizon_minutes() / 60.0}};
    root["grid"] = {{"p_buy_max_kw", cfg.grid.p_buy_max}, {"p_sell_max_kw", cfg.grid.p_sell_max}};
    const EssSpec& e = cfg.ess;
    root["ess"] = {{"capacity_kwh", e.soc_max},
                   {"soc_min_kwh", e.soc_min},
                   {"soc_init_kwh", e.soc_init},
                   {"charge_rate_kw", e.charge_rate_max},
                   {"discharge_rate_kw", e.discharge_rate_max},
                   {"eta_charge", e.eta_charge},
                   {"eta_discharge", e.eta_discharge},
                   {"self_discharge", e.self_discharge},
                   {"discharge_model",
                    e.discharge_model == DischargeModel::Multiplied ? "multiplied" : "conventional"},
                   {"terminal_soc", e.terminal_soc}};
    root["pv"] = {{"rated_kw", cfg.pv.rated_capacity}, {"r_c", cfg.pv.r_c}, {"r_std", cfg.pv.r_std}};
    root["peak"] = {{"p_max_kw", cfg.peak.p_max}};
    root["flexibility"] = {{"kappa", cfg.flex.kappa}};
    root["weights"] = {{"w_power", cfg.weights.w_power}, {"w_theta", cfg.weights.w_theta}};

    const FleetConfig& f = cfg.fleet;
    json car = class_json(f.car.ev_class);
    car["enabled"] = f.car.enabled;
    car["arrival_rate_per_hour"] = f.car.arrival_rate_per_hour;
    car["window"] = {format_clock(f.car.window_start_minutes), format_clock(f.car.window_end_minutes)};
    car["energy_kwh"] = {f.car.energy_min, f.car.energy_max};
    car["departure_spread_hours"] = f.car.departure_spread_hours;
    car["departure_mode_hours"] = f.car.departure_mode_hours;
    car["max_sessions"] = f.car.max_sessions;
    json bus = class_json(f.bus.ev_class);
    json tt = json::array();
    for (int d : f.bus.timetable.departures) tt.push_back(format_clock(d));
    bus["timetable"] = tt;
    bus["energy_kwh"] = {f.bus.energy_min, f.bus.energy_max};
    bus["arrival_offset_minutes"] = {f.bus.offset_min_minutes, f.bus.offset_max_minutes};
    bus["arrival_offset_mode_minutes"] = f.bus.offset_mode_minutes;
    bus["max_redraws"] = f.bus.max_redraws;
    json sessions = json::array();
    for (const SessionSpec& s : f.sessions) {
        sessions.push_back(json{{"kind", std::string(ev_kind_name(s.kind))},
                                {"t_arrival", s.t_arrival},
                                {"t_departure", s.t_departure},
                                {"e_requested_kwh", s.e_requested},
                                {"soc_init_kwh", s.soc_init}});
    }
    root["fleet"] = {{"seed", f.seed}, {"max_sessions", f.max_sessions}, {"car", car},
                     {"bus", bus},     {"sessions", sessions}};

    json axes;
    axes["demand"] = series_json(cfg.scenario_axes.raw_demand);
    axes["pv"] = axis_json(cfg.scenario_axes.radiation);
    axes["price"] = axis_json(cfg.scenario_axes.price);
    if (cfg.scenario_axes.rb) axes["rb"] = axis_json(*cfg.scenario_axes.rb);
    root["scenario_axes"] = axes;
    return root.dump(2);
}

}  // namespace railems
