#pragma once
// Shared helpers for the unit and acceptance tests.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "railems/config.hpp"
#include "railems/milp.hpp"

namespace railems::testing {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(RAILEMS_SOURCE_DIR) / "tests" / "fixtures" / name / "config.json";
}

inline std::string number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

inline std::string json_list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        s += number(v[k]);
    }
    return s + "]";
}

/// Small inline configuration; every section besides the series keeps its
/// defaults unless overridden through `extra` (raw JSON members appended to
/// the top-level object).
inline std::string small_config_json(const std::vector<double>& demand, const std::vector<double>& radiation,
                                     const std::vector<double>& price, const std::string& sessions,
                                     const std::string& extra = "") {
    const double hours = static_cast<double>(demand.size()) / 6.0;
    std::string j = "{\n";
    j += "  \"time_grid\": {\"step_minutes\": 10, \"horizon_hours\": " + number(hours) + "},\n";
    j += "  \"fleet\": {\"seed\": 1, \"car\": {\"enabled\": false}, \"sessions\": " + sessions + "},\n";
    if (!extra.empty()) j += extra + ",\n";
    j += "  \"scenario_axes\": {\n";
    j += "    \"demand\": {\"values\": " + json_list(demand) + ", \"unit\": \"kW\"},\n";
    j += "    \"pv\": [{\"name\": \"pv\", \"probability\": 1.0, \"series\": {\"values\": " + json_list(radiation) +
         ", \"unit\": \"W/m2\"}}],\n";
    j += "    \"price\": [{\"name\": \"price\", \"probability\": 1.0, \"series\": {\"values\": " + json_list(price) +
         ", \"unit\": \"currency/kWh\"}}]\n";
    j += "  }\n}\n";
    return j;
}

/// Two-variable toy: min -x - y subject to x + y <= 1.5, x, y in [0, 1].
inline CanonicalMilp toy_model(bool binary) {
    CanonicalMilp m;
    const int x = m.add_column(0.0, 1.0, -1.0, binary, "x");
    const int y = m.add_column(0.0, 1.0, -1.0, binary, "y");
    const int r = m.add_row(RowSense::LessEqual, 1.5, "cap");
    m.add_coefficient(r, x, 1.0);
    m.add_coefficient(r, y, 1.0);
    return m;
}

}  // namespace railems::testing
