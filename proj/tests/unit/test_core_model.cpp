#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "railems/config.hpp"
#include "railems/error.hpp"
#include "support.hpp"

using namespace railems;
using railems::testing::fixture;
using railems::testing::small_config_json;

namespace {

std::string three_step(const std::string& extra) {
    return small_config_json({200, -150, 350}, {0, 400, 900}, {0.12, 0.3, 0.2},
                             R"([{"kind": "car", "t_arrival": 1, "t_departure": 3, "e_requested_kwh": 6}])", extra);
}

bool names_field(const std::vector<Violation>& v, const std::string& field) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == field; });
}

}  // namespace

TEST_SUITE("core-model") {

TEST_CASE("time grid from horizon") {
    const TimeGrid g = TimeGrid::from_horizon(10, 24.0);
    CHECK(g.horizon_steps == 144);
    CHECK(g.step_hours() == doctest::Approx(1.0 / 6.0));
    CHECK(TimeGrid::from_horizon(15, 0.5).horizon_steps == 2);
    CHECK_THROWS_AS(TimeGrid::from_horizon(10, 0.25), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_horizon(0, 24.0), DomainError);
}

TEST_CASE("time series length must match the grid") {
    const TimeGrid g{10, 3};
    CHECK_NOTHROW(TimeSeries({1, 2, 3}, Unit::Kilowatt, g));
    CHECK_THROWS_AS(TimeSeries({1, 2}, Unit::Kilowatt, g), DomainError);
    CHECK_THROWS_AS(TimeSeries({1, 2, 3, 4}, Unit::Kilowatt, g), DomainError);
    CHECK(TimeSeries({1, 2, 3}, Unit::Kilowatt, g).at_step(3) == 3.0);
}

TEST_CASE("unit tags round-trip") {
    for (Unit u : {Unit::Kilowatt, Unit::WattPerSquareMeter, Unit::CurrencyPerKwh}) {
        CHECK(parse_unit(unit_tag(u)) == u);
    }
    CHECK_THROWS_AS(parse_unit("MW"), SchemaError);
}

TEST_CASE("storage fractions expand to energies") {
    const SiteConfig c = parse_config(
        three_step(R"("ess": {"capacity_kwh": 1000, "soc_min_fraction": 0.10})"), ".");
    CHECK(c.ess.soc_max == 1000.0);
    CHECK(c.ess.soc_min == doctest::Approx(100.0));
    CHECK(c.ess.soc_init == doctest::Approx(500.0));
}

TEST_CASE("omitted weights default to one") {
    CHECK(parse_config(three_step(R"("weights": {})"), ".").weights == ObjectiveWeights{1.0, 1.0});
    CHECK(parse_config(three_step(""), ".").weights == ObjectiveWeights{1.0, 1.0});
}

TEST_CASE("defaults for omitted sections") {
    const SiteConfig c = parse_config(three_step(""), ".");
    CHECK(c.peak.p_max == 3000.0);
    CHECK(c.flex.kappa == 0.6);
    CHECK(c.pv == PvSpec{1000.0, 150.0, 1000.0});
    CHECK(c.ess.charge_rate_max == 1000.0);
    CHECK(c.ess.discharge_rate_max == 1000.0);
    CHECK(c.ess.discharge_model == DischargeModel::Multiplied);
    CHECK_FALSE(c.ess.terminal_soc);
}

TEST_CASE("schema violations") {
    CHECK_THROWS_AS(parse_config(three_step(R"("pv": {"rated_kw": -5})"), "."), SchemaError);
    CHECK_THROWS_AS(parse_config(three_step(R"("pv": {"rated": 5})"), "."), SchemaError);
    CHECK_THROWS_AS(parse_config(three_step(R"("ess": {"discharge_model": "lossy"})"), "."), SchemaError);
    CHECK_THROWS_AS(parse_config("{\"time_grid\": {}}", "."), SchemaError);
    CHECK_THROWS_AS(parse_config("{ not json", "."), ParseError);

    std::string wrong_unit = three_step("");
    wrong_unit.replace(wrong_unit.find("\"W/m2\""), 6, "\"kW\"");
    CHECK_THROWS_AS(parse_config(wrong_unit, "."), SchemaError);

    const std::string short_series = small_config_json({1, 2, 3}, {0, 0}, {0.1, 0.1, 0.1}, "[]");
    CHECK_THROWS_AS(parse_config(short_series, "."), SchemaError);
}

TEST_CASE("validate_config examples") {
    SiteConfig c = parse_config(three_step(""), ".");
    CHECK(validate_config(c).empty());

    SiteConfig bad_init = c;
    bad_init.ess.soc_init = 1200.0;
    const auto v1 = validate_config(bad_init);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].field == "ess.soc_init");

    SiteConfig kappa = c;
    kappa.flex.kappa = 0.6;
    CHECK(validate_config(kappa).empty());
    kappa.flex.kappa = 1.2;
    CHECK(names_field(validate_config(kappa), "flexibility.kappa"));

    SiteConfig pv = c;
    pv.pv.r_c = 1000.0;
    pv.pv.r_std = 150.0;
    const auto v2 = validate_config(pv);
    CHECK(std::any_of(v2.begin(), v2.end(), [](const Violation& x) { return x.rule == "r_c < r_std"; }));

    SiteConfig w = c;
    w.weights = {0.0, 0.0};
    CHECK(names_field(validate_config(w), "weights"));
}

TEST_CASE("round trip through serialization") {
    const SiteConfig tiny = parse_config(three_step(R"("ess": {"discharge_model": "conventional"})"), ".");
    CHECK(parse_config(config_to_json(tiny), ".") == tiny);

    const SiteConfig ref = load_config(fixture("reference"));
    CHECK(ref.time_grid.horizon_steps == 144);
    CHECK(ref.scenario_axes.radiation.members.size() == 2);
    CHECK(parse_config(config_to_json(ref), ".") == ref);
}

TEST_CASE("every fixture validates") {
    for (const char* name : {"reference", "rb_rich", "pv_rich", "peak_shaving", "tiny"}) {
        CAPTURE(name);
        const SiteConfig c = load_config(fixture(name));
        CHECK(validate_config(c).empty());
    }
}

TEST_CASE("series CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "railems_series_test.csv";
    const std::vector<double> v{0.1, -2.5, 1e-12, 3000.0};
    write_series_csv(path, v);
    CHECK(read_series_csv(path) == v);
    std::ofstream(path) << "step,value\n1,2\n3,4\n";
    CHECK_THROWS_AS(read_series_csv(path), ParseError);
    std::filesystem::remove(path);
}

}
