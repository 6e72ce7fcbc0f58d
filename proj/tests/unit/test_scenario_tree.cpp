#include <cmath>
#include <random>

#include "doctest.h"
#include "railems/error.hpp"
#include "railems/scenario_tree.hpp"

using namespace railems;

namespace {

const TimeGrid kGrid{10, 4};

TimeSeries flat(double v, Unit u) { return TimeSeries(std::vector<double>(4, v), u, kGrid); }

ScenarioAxis uniform_axis(AxisLabel label, int members, Unit unit) {
    ScenarioAxis a;
    a.label = label;
    for (int m = 0; m < members; ++m) {
        a.members.push_back(AxisMember{flat(10.0 * m, unit), 1.0 / members, "m" + std::to_string(m)});
    }
    return a;
}

}  // namespace

TEST_SUITE("scenario-tree") {

TEST_CASE("hundred equally likely scenarios") {
    const ScenarioSet set =
        build_tree(uniform_axis(AxisLabel::Pv, 4, Unit::Kilowatt), uniform_axis(AxisLabel::Price, 5, Unit::CurrencyPerKwh),
                   uniform_axis(AxisLabel::Rb, 5, Unit::Kilowatt), flat(100.0, Unit::Kilowatt));
    REQUIRE(set.size() == 100);
    for (const Scenario& s : set.scenarios) CHECK(s.probability == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(std::abs(set.total_probability() - 1.0) <= 1e-9);

    // Index layout (i * M2 + j) * M3 + k and C_S following C_G.
    const Scenario& s = set.scenarios[(2 * 5 + 3) * 5 + 4];
    CHECK(s.index == (2 * 5 + 3) * 5 + 4);
    CHECK(s.pv_member == 2);
    CHECK(s.price_member == 3);
    CHECK(s.rb_member == 4);
    CHECK(s.pv[0] == 20.0);
    CHECK(s.price_buy[0] == 30.0);
    CHECK(s.rb_avail[0] == 40.0);
    CHECK(s.price_sell == s.price_buy);
}

TEST_CASE("single scenario and product measure") {
    const auto single = build_tree(ScenarioAxis::certain(AxisLabel::Pv, flat(0, Unit::Kilowatt)),
                                   ScenarioAxis::certain(AxisLabel::Price, flat(0.2, Unit::CurrencyPerKwh)),
                                   ScenarioAxis::certain(AxisLabel::Rb, flat(0, Unit::Kilowatt)),
                                   flat(10, Unit::Kilowatt));
    REQUIRE(single.size() == 1);
    CHECK(single.scenarios[0].probability == 1.0);

    const auto two = build_tree(uniform_axis(AxisLabel::Pv, 2, Unit::Kilowatt),
                                ScenarioAxis::certain(AxisLabel::Price, flat(0.2, Unit::CurrencyPerKwh)),
                                ScenarioAxis::certain(AxisLabel::Rb, flat(0, Unit::Kilowatt)),
                                flat(10, Unit::Kilowatt));
    REQUIRE(two.size() == 2);
    CHECK(two.scenarios[0].probability == 0.5);
    CHECK(two.scenarios[1].probability == 0.5);
}

TEST_CASE("probabilities must sum to one") {
    ScenarioAxis bad = uniform_axis(AxisLabel::Pv, 2, Unit::Kilowatt);
    bad.members[0].probability = 0.6;
    CHECK_THROWS_AS(build_tree(bad, ScenarioAxis::certain(AxisLabel::Price, flat(0.2, Unit::CurrencyPerKwh)),
                               ScenarioAxis::certain(AxisLabel::Rb, flat(0, Unit::Kilowatt)),
                               flat(10, Unit::Kilowatt)),
                    DomainError);
}

TEST_CASE("random axis sizes") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    auto random_axis = [&](AxisLabel label, Unit unit) {
        ScenarioAxis a;
        a.label = label;
        const int m = size(rng);
        std::vector<double> w(static_cast<std::size_t>(m));
        double total = 0.0;
        for (double& x : w) total += (x = weight(rng));
        for (int k = 0; k < m; ++k) a.members.push_back(AxisMember{flat(k, unit), w[k] / total, ""});
        return a;
    };
    for (int round = 0; round < 500; ++round) {
        const ScenarioAxis pv = random_axis(AxisLabel::Pv, Unit::Kilowatt);
        const ScenarioAxis price = random_axis(AxisLabel::Price, Unit::CurrencyPerKwh);
        const ScenarioAxis rb = random_axis(AxisLabel::Rb, Unit::Kilowatt);
        const ScenarioSet set = build_tree(pv, price, rb, flat(5, Unit::Kilowatt));
        REQUIRE(set.size() == pv.members.size() * price.members.size() * rb.members.size());
        REQUIRE(std::abs(set.total_probability() - 1.0) <= 1e-9);
        for (const Scenario& s : set.scenarios) {
            const double want = pv.members[s.pv_member].probability * price.members[s.price_member].probability *
                                rb.members[s.rb_member].probability;
            REQUIRE(s.probability == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("split demand") {
    const TimeGrid g{10, 3};
    const auto [pd, rb] = split_demand(TimeSeries({100.0, -50.0, 0.0}, Unit::Kilowatt, g), g);
    CHECK(pd == TimeSeries({100.0, 0.0, 0.0}, Unit::Kilowatt, g));
    CHECK(rb == TimeSeries({0.0, 50.0, 0.0}, Unit::Kilowatt, g));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> v(-800.0, 800.0);
    const TimeGrid day{10, 144};
    std::vector<double> raw(144);
    for (double& x : raw) x = v(rng);
    const auto [d, r] = split_demand(TimeSeries(raw, Unit::Kilowatt, day), day);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        CHECK(d[k] - r[k] == raw[k]);
        CHECK(d[k] * r[k] == 0.0);
        CHECK(d[k] >= 0.0);
        CHECK(r[k] >= 0.0);
    }
}

}
