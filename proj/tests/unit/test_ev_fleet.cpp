#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "railems/error.hpp"
#include "railems/ev_fleet.hpp"

using namespace railems;

namespace {

const TimeGrid kDay{10, 144};

EvSession car_session(int stay_steps, double energy, double soc0 = 0.0) {
    EvSession s;
    s.ev_class = default_car_class();
    s.t_arrival = 10;
    s.t_departure = 10 + stay_steps;
    s.e_requested = energy;
    s.soc_init = soc0;
    return s;
}

}  // namespace

TEST_SUITE("ev-fleet") {

TEST_CASE("flexibility bounds") {
    const FlexBounds four_hours = flex_bounds(car_session(24, 30.0), 0.6, kDay);
    CHECK(four_hours.theta_min == doctest::Approx(18.0));
    CHECK(four_hours.theta_max == doctest::Approx(30.0));

    const FlexBounds one_hour = flex_bounds(car_session(6, 30.0), 0.6, kDay);
    CHECK(one_hour.theta_min == doctest::Approx(6.6));
    CHECK(one_hour.theta_max == doctest::Approx(22.0));

    CHECK(flex_bounds(car_session(24, 30.0), 1.0, kDay).theta_min == doctest::Approx(30.0));
    CHECK(flex_bounds(car_session(24, 30.0), 0.0, kDay).theta_min == 0.0);

    EvSession backwards = car_session(1, 30.0);
    backwards.t_departure = backwards.t_arrival;
    CHECK_THROWS_AS(flex_bounds(backwards, 0.6, kDay), DomainError);
    CHECK_THROWS_AS(flex_bounds(car_session(6, 30.0), 1.5, kDay), DomainError);
}

TEST_CASE("fulfillment time") {
    CHECK(fulfillment_time(car_session(24, 30.0), kDay) == 17);
    CHECK(fulfillment_time(car_session(24, 30.0, 30.0), kDay) == 0);
    EvSession bus = car_session(24, 300.0);
    bus.ev_class = default_bus_class();
    CHECK(fulfillment_time(bus, kDay) == 6);
    // Exact multiple of the per-step energy: no extra step from rounding noise.
    CHECK(fulfillment_time(car_session(24, 11.0 / 6.0 * 3.0), kDay) == 3);
}

TEST_CASE("session invariants are enforced") {
    const EvClass car = default_car_class();
    CHECK_THROWS_AS(make_session(0, car, 0, 5, 10, 0, 0.6, kDay), DomainError);
    CHECK_THROWS_AS(make_session(0, car, 5, 5, 10, 0, 0.6, kDay), DomainError);
    CHECK_THROWS_AS(make_session(0, car, 5, 145, 10, 0, 0.6, kDay), DomainError);
    CHECK_THROWS_AS(make_session(0, car, 5, 8, 10, 11, 0.6, kDay), DomainError);
    EvClass bad = car;
    bad.p_nominal = 30.0;
    CHECK_THROWS_AS(make_session(0, bad, 5, 8, 10, 0, 0.6, kDay), DomainError);
}

TEST_CASE("uncoordinated baseline") {
    const TimeGrid g{10, 12};
    const EvSession car = make_session(0, default_car_class(), 2, 10, 11.0 / 6.0 * 3.0, 0.0, 0.6, g);
    const TimeSeries p = uncoordinated_profile({car}, g);
    for (int t = 1; t <= 12; ++t) {
        CAPTURE(t);
        CHECK(p.at_step(t) == doctest::Approx(t >= 3 && t <= 5 ? 11.0 : 0.0));
    }
    const TimeSeries none = uncoordinated_profile({}, g);
    CHECK(none.max() == 0.0);

    const EvSession b1 = make_session(0, default_bus_class(), 2, 6, 300.0, 0.0, 0.6, g);
    const EvSession b2 = make_session(1, default_bus_class(), 4, 9, 300.0, 0.0, 0.6, g);
    const TimeSeries buses = uncoordinated_profile({b1, b2}, g);
    CHECK(buses.at_step(5) == doctest::Approx(600.0));
    CHECK(buses.at_step(6) == doctest::Approx(600.0));
    CHECK(buses.at_step(3) == doctest::Approx(300.0));
    CHECK(buses.max() == doctest::Approx(600.0));
}

TEST_CASE("uncoordinated energy and power bounds hold for sampled fleets") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> arrival(1, 130);
    std::uniform_int_distribution<int> stay(1, 14);
    std::uniform_real_distribution<double> energy(0.0, 60.0);
    for (int round = 0; round < 200; ++round) {
        std::vector<EvSession> sessions;
        for (int k = 0; k < 6; ++k) {
            const int ta = arrival(rng);
            sessions.push_back(make_session(k, default_car_class(), ta, ta + stay(rng), energy(rng), 0.0,
                                            0.6, kDay));
        }
        const TimeSeries p = uncoordinated_profile(sessions, kDay);
        for (int t = 1; t <= kDay.horizon_steps; ++t) {
            double cap = 0.0;
            for (const EvSession& s : sessions) {
                if (t > s.t_arrival && t <= s.t_departure) cap += s.ev_class.p_nominal;
            }
            REQUIRE(p.at_step(t) <= cap + 1e-9);
        }
        for (const EvSession& s : sessions) {
            double delivered = 0.0;
            const TimeSeries one = uncoordinated_profile({s}, kDay);
            for (int t = 1; t <= kDay.horizon_steps; ++t) delivered += one.at_step(t) * kDay.step_hours();
            const double want = std::min(s.e_requested, s.ev_class.p_nominal * s.stay_steps() * kDay.step_hours());
            REQUIRE(std::abs(delivered - want) <= 1e-9);
            REQUIRE(uncoordinated_energy(s, kDay) == doctest::Approx(want));
        }
    }
}

TEST_CASE("car arrivals concentrate around the Poisson mean") {
    const CarFleetSpec spec;
    int lo = 1 << 30;
    int hi = 0;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const int n = static_cast<int>(sample_car_sessions(spec, kDay, seed, 0.6).size());
        lo = std::min(lo, n);
        hi = std::max(hi, n);
        total += n;
    }
    CHECK(lo >= 40);
    CHECK(hi <= 90);
    CHECK(total / 1000.0 == doctest::Approx(64.0).epsilon(0.03));
}

TEST_CASE("sampled sessions respect their invariants") {
    CarFleetSpec spec;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        for (const EvSession& s : sample_car_sessions(spec, kDay, seed, 0.6)) {
            REQUIRE(s.t_arrival >= 1);
            REQUIRE(s.t_arrival < s.t_departure);
            REQUIRE(s.t_departure <= kDay.horizon_steps);
            REQUIRE(s.soc_init == 0.0);
            REQUIRE(s.e_requested >= 10.0);
            REQUIRE(s.e_requested <= 50.0);
            REQUIRE(0.0 <= s.theta_min);
            REQUIRE(s.theta_min <= s.theta_max);
            REQUIRE(s.theta_max <= s.e_requested);
            ++checked;
        }
    }
    CHECK(checked >= 10000);
}

TEST_CASE("theta_min is nondecreasing in kappa") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> stay(1, 40);
    std::uniform_real_distribution<double> energy(0.0, 300.0);
    for (int k = 0; k < 2000; ++k) {
        EvSession s = car_session(stay(rng), energy(rng));
        if (k % 2) s.ev_class = default_bus_class();
        double prev = -1.0;
        for (double kappa : {0.0, 0.3, 0.6, 1.0}) {
            const double m = flex_bounds(s, kappa, kDay).theta_min;
            REQUIRE(m >= prev);
            prev = m;
        }
    }
}

TEST_CASE("sampling is deterministic") {
    const CarFleetSpec spec;
    CHECK(sample_car_sessions(spec, kDay, 42, 0.6) == sample_car_sessions(spec, kDay, 42, 0.6));
    CHECK(sample_car_sessions(spec, kDay, 42, 0.6) != sample_car_sessions(spec, kDay, 43, 0.6));

    BusFleetSpec bus;
    bus.timetable.departures = {parse_clock("07:40"), parse_clock("12:50")};
    CHECK(sample_bus_sessions(bus, kDay, 9, 0.6) == sample_bus_sessions(bus, kDay, 9, 0.6));
}

TEST_CASE("slow arrivals give few sessions") {
    CarFleetSpec spec;
    spec.arrival_rate_per_hour = 1e-6;
    CHECK(sample_car_sessions(spec, kDay, 1, 0.6).size() <= 1);
}

TEST_CASE("car window must fit the grid") {
    CarFleetSpec spec;
    CHECK_THROWS_AS(sample_car_sessions(spec, TimeGrid{10, 36}, 1, 0.6), DomainError);
}

TEST_CASE("bus sessions") {
    BusFleetSpec spec;
    spec.timetable.departures = {parse_clock("08:00")};
    spec.offset_min_minutes = spec.offset_mode_minutes = spec.offset_max_minutes = 30.0;
    const auto buses = sample_bus_sessions(spec, kDay, 1, 0.6);
    REQUIRE(buses.size() == 1);
    CHECK(buses[0].t_departure == 48);
    CHECK(buses[0].t_arrival == 45);
    CHECK(buses[0].ev_class.p_nominal == 300.0);
    CHECK(buses[0].e_requested >= 100.0);
    CHECK(buses[0].e_requested <= 300.0);

    BusFleetSpec empty;
    CHECK_THROWS_AS(sample_bus_sessions(empty, kDay, 1, 0.6), DomainError);

    BusFleetSpec tight = spec;
    tight.offset_min_minutes = tight.offset_mode_minutes = tight.offset_max_minutes = 2.0;
    CHECK_THROWS_AS(sample_bus_sessions(tight, kDay, 1, 0.6), DomainError);
}

TEST_CASE("clock parsing") {
    CHECK(parse_clock("07:40") == 460);
    CHECK(format_clock(460) == "07:40");
    CHECK_THROWS_AS(parse_clock("7h40"), ParseError);
    CHECK_THROWS_AS(parse_clock("07:61"), ParseError);
}

TEST_CASE("fleet merge, cap and renumbering") {
    FleetConfig fleet;
    fleet.seed = 7;
    fleet.bus.timetable.departures = {parse_clock("07:40"), parse_clock("10:10")};
    fleet.max_sessions = 20;
    const auto all = generate_fleet(fleet, kDay, fleet.seed, 0.6);
    CHECK(all.size() == 20);
    for (std::size_t k = 0; k < all.size(); ++k) {
        CHECK(all[k].id == static_cast<int>(k));
        if (k) CHECK(all[k - 1].t_arrival <= all[k].t_arrival);
    }

    FleetConfig explicit_fleet;
    explicit_fleet.sessions = {SessionSpec{EvKind::Bus, 3, 9, 200.0, 0.0}};
    const auto one = generate_fleet(explicit_fleet, kDay, 1, 0.6);
    REQUIRE(one.size() == 1);
    CHECK(one[0].ev_class.kind == EvKind::Bus);
    CHECK(one[0].theta_max == doctest::Approx(200.0));
}

}
