#pragma once

// Run configuration: station parameters plus the fleet and scenario-axis
// inputs, loaded from one JSON file. See README.md for the schema.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railems/core_model.hpp"
#include "railems/ev_fleet.hpp"
#include "railems/scenario_tree.hpp"

namespace railems {

struct ScenarioInputs {
    TimeSeries raw_demand;            // signed railway demand, kW
    ScenarioAxis radiation;           // W/m2 payloads, label Pv
    ScenarioAxis price;               // currency/kWh payloads
    std::optional<ScenarioAxis> rb;   // kW payloads; absent -> braking share of raw_demand
    bool operator==(const ScenarioInputs&) const = default;
};

struct SiteConfig {
    TimeGrid time_grid;
    GridSpec grid;
    EssSpec ess;
    PvSpec pv;
    PeakPolicy peak;
    FlexPolicy flex;
    ObjectiveWeights weights;
    FleetConfig fleet;
    ScenarioInputs scenario_axes;
    // How the storage rates in the file were read; echoed in the report.
    std::string ess_rate_interpretation = "kW (one value per step)";

    bool operator==(const SiteConfig&) const = default;
};

struct Violation {
    std::string field;
    std::string rule;
};

/// Every broken invariant of the configuration; empty iff valid.
std::vector<Violation> validate_config(const SiteConfig& cfg);

/// Reads and validates a configuration file. Relative CSV paths resolve
/// against the file's directory. Throws ParseError on malformed JSON or CSV
/// and SchemaError on a missing field, a wrong unit tag or an invariant breach.
SiteConfig load_config(const std::filesystem::path& path);

/// Same as load_config but from JSON text.
SiteConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);

/// Serializes with all defaults expanded and every series inline, so that
/// parse_config(config_to_json(c)) == c.
std::string config_to_json(const SiteConfig& cfg);

/// CSV with header `step,value` and rows for steps 1..N.
std::vector<double> read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, std::span<const double> values);

/// CSV with a `departure_time` column of HH:MM entries.
BusTimetable read_timetable_csv(const std::filesystem::path& path);

}  // namespace railems
