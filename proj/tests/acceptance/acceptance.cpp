// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "railems/ems_model.hpp"
#include "railems/error.hpp"
#include "railems/mip_solver.hpp"
#include "railems/mps.hpp"
#include "railems/pipeline.hpp"
#include "railems/pv.hpp"
#include "support.hpp"

using namespace railems;
using railems::testing::fixture;
using railems::testing::small_config_json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RunReport& reference_report() {
    static const RunReport report = [] {
        RunOptions opt;
        return run_pipeline(load_config(fixture("reference")), opt);
    }();
    return report;
}

double reference_seconds = 0.0;

// ----------------------------------------------------------------- 1

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    int optimal = 0, infeasible = 0, attempts = 0, worst_binaries = 0;
    double worst = 0.0;
    std::string failure;
    while (optimal < 200 && attempts < 2000 && failure.empty()) {
        ++attempts;
        const int nt = pick(2, 4);
        std::vector<double> demand(nt), radiation(nt), price(nt);
        for (int t = 0; t < nt; ++t) {
            demand[t] = u(rng) < 0.3 ? -uni(0, 400) : uni(0, 1500);
            radiation[t] = u(rng) < 0.3 ? 0.0 : uni(0, 1200);
            price[t] = uni(0.05, 0.4);
        }
        SiteConfig cfg = parse_config(small_config_json(demand, radiation, price, "[]"), ".");
        cfg.grid.p_buy_max = uni(800, 3000);
        cfg.grid.p_sell_max = u(rng) < 0.5 ? uni(0, 200) : uni(200, 3000);
        cfg.ess.soc_max = uni(50, 500);
        cfg.ess.soc_min = cfg.ess.soc_max * uni(0, 0.3);
        cfg.ess.soc_init = uni(cfg.ess.soc_min, cfg.ess.soc_max);
        cfg.ess.charge_rate_max = uni(20, 300);
        cfg.ess.discharge_rate_max = uni(20, 300);
        cfg.ess.eta_charge = uni(0.85, 1.0);
        cfg.ess.eta_discharge = uni(0.85, 1.0);
        cfg.ess.self_discharge = u(rng) < 0.5 ? 0.0 : uni(0, 0.05);
        cfg.ess.discharge_model = u(rng) < 0.5 ? DischargeModel::Multiplied : DischargeModel::Conventional;
        cfg.ess.terminal_soc = u(rng) < 0.2;
        cfg.peak.p_max = *std::max_element(demand.begin(), demand.end()) + uni(0, 150);
        cfg.peak.p_max = std::max(cfg.peak.p_max, 1.0);
        cfg.flex.kappa = uni(0, 1);
        cfg.weights = {uni(0, 1), uni(0, 1)};

        std::vector<EvSession> sessions;
        const int evs = pick(0, 2);
        for (int i = 0; i < evs; ++i) {
            const bool bus = u(rng) < 0.3;
            const int ta = pick(1, nt - 1);
            const int td = pick(ta + 1, nt);
            const double e = bus ? uni(50, 300) : uni(0, 60);
            sessions.push_back(make_session(i, bus ? default_bus_class() : default_car_class(), ta, td, e,
                                            u(rng) < 0.3 ? uni(0, e) : 0.0, cfg.flex.kappa, cfg.time_grid));
        }

        ScenarioSet set = scenarios_from_config(cfg);
        Scenario sc = set.scenarios[0];
        const double r = u(rng);
        if (r < 0.6) {
            // Selling price off the buying trajectory, below or above it.
            std::vector<double> sell(nt);
            for (int t = 0; t < nt; ++t) sell[t] = price[t] * (r < 0.4 ? uni(0.0, 1.0) : uni(1.0, 1.5));
            sc.price_sell = TimeSeries(sell, Unit::CurrencyPerKwh, cfg.time_grid);
        }
        const Mode mode = u(rng) < 0.6 ? Mode::A : (u(rng) < 0.5 ? Mode::B : Mode::C);

        const EmsModel model = build_model(cfg, sessions, {sc}, mode);
        const int k = model.milp.num_binaries();
        worst_binaries = std::max(worst_binaries, k);
        const MipSolution bb = solve_mip(model.milp);
        const MipSolution bf = brute_force_mip(model.milp);
        if (bb.status != bf.status) {
            failure = "status mismatch on instance " + std::to_string(attempts) + ": " +
                      std::string(status_name(bb.status)) + " vs " + std::string(status_name(bf.status));
            break;
        }
        if (bb.status == MipStatus::Infeasible) {
            ++infeasible;
            continue;
        }
        if (bb.status != MipStatus::Optimal) {
            failure = "instance " + std::to_string(attempts) + " ended " + std::string(status_name(bb.status));
            break;
        }
        ++optimal;
        const double rel = std::abs(bb.objective - bf.objective) / std::max(1.0, std::abs(bf.objective));
        worst = std::max(worst, rel);
        if (rel > 1e-6) failure = "objective mismatch on instance " + std::to_string(attempts);
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << optimal << " optimal + " << infeasible << " infeasible instances, <= " << worst_binaries
       << " binaries, worst rel diff " << fmt("%.2e", worst) << ", " << fmt("%.1f", secs) << " s";
    if (!failure.empty()) os << "; " << failure;
    return {failure.empty() && optimal >= 200 && worst_binaries <= 8 && secs < 60.0, os.str()};
}

// ----------------------------------------------------------------- 2

Outcome constraint_certification() {
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport& r = reference_report();
    reference_seconds = seconds_since(t0);
    const SiteConfig& cfg = r.config;
    const ScenarioSet tree = scenarios_from_config(cfg);
    const double dt = cfg.time_grid.step_hours();

    int buses = 0, cars = 0;
    for (const EvSession& s : r.sessions) (s.ev_class.kind == EvKind::Bus ? buses : cars)++;

    double balance = 0.0, peak = 0.0, grid_prod = 0.0, ess_prod = 0.0, ess_rec = 0.0, rb = 0.0;
    for (const ScenarioDispatch& d : r.solution.scenarios) {
        const Scenario& sc = tree.scenarios[static_cast<std::size_t>(d.scenario)];
        double soc_prev = cfg.ess.soc_init;
        for (int t = 1; t <= cfg.time_grid.horizon_steps; ++t) {
            const std::size_t k = static_cast<std::size_t>(t - 1);
            double ev = 0.0;
            for (const auto& p : d.p_ev) ev += p[k];
            const double lhs = d.p_grid[k] - d.p_sell[k] + d.p_b_minus[k] - d.p_b_plus[k] - ev;
            balance = std::max(balance, std::abs(lhs - (sc.demand[k] - sc.pv[k])));
            peak = std::max(peak, sc.demand[k] + ev);
            grid_prod = std::max(grid_prod, d.p_grid[k] * d.p_sell[k]);
            ess_prod = std::max(ess_prod, (d.p_b_plus[k] + d.p_rbe[k]) * d.p_b_minus[k]);
            rb = std::max(rb, d.p_rbe[k] - sc.rb_avail[k]);
            const double soc = soc_prev - cfg.ess.self_discharge * soc_prev +
                               cfg.ess.eta_charge * (d.p_rbe[k] + d.p_b_plus[k]) * dt -
                               cfg.ess.eta_discharge * d.p_b_minus[k] * dt;
            ess_rec = std::max(ess_rec, std::abs(soc - d.soc_b[k]));
            soc_prev = d.soc_b[k];
        }
    }
    const bool ok = r.solution.scenarios.size() == 4 && cfg.time_grid.horizon_steps == 144 &&
                    cfg.time_grid.step_minutes == 10 && buses == 5 && cars == 10 && balance <= 1e-6 &&
                    peak <= 3000.0 + 1e-6 && cfg.peak.p_max == 3000.0 && grid_prod <= 1e-6 && ess_prod <= 1e-6 &&
                    ess_rec <= 1e-6 && rb <= 1e-6 && reference_seconds < 300.0;
    std::ostringstream os;
    os << r.solution.scenarios.size() << " scenarios, " << buses << " buses + " << cars << " cars; balance "
       << fmt("%.1e", balance) << " kW, peak " << fmt("%.3f", peak) << " kW, P_G*P_S " << fmt("%.1e", grid_prod)
       << ", (P_B+ + P_RBE)*P_B- " << fmt("%.1e", ess_prod) << ", SoC recursion " << fmt("%.1e", ess_rec)
       << ", " << fmt("%.1f", reference_seconds) << " s";
    return {ok, os.str()};
}

// ----------------------------------------------------------------- 3

Outcome theta_tightness() {
    double worst = 0.0;
    int pairs = 0;
    const auto scan = [&](const EmsSolution& s) {
        for (const ScenarioDispatch& d : s.scenarios) {
            for (std::size_t i = 0; i < d.theta.size(); ++i) {
                worst = std::max(worst, std::abs(d.theta[i] - d.departure_soc[i]));
                ++pairs;
            }
        }
    };
    scan(reference_report().solution);
    for (const char* name : {"rb_rich", "pv_rich", "peak_shaving", "tiny"}) {
        for (Mode mode : {Mode::A, Mode::B, Mode::C}) {
            RunOptions opt;
            opt.mode = mode;
            const SiteConfig cfg = load_config(fixture(name));
            if (cfg.weights.w_theta != 1.0) return {false, std::string(name) + " does not use w_theta = 1"};
            scan(run_pipeline(cfg, opt).solution);
        }
    }
    return {worst <= 1e-6, std::to_string(pairs) + " (EV, scenario) pairs, max |theta - SoC(t_d)| " + fmt("%.1e", worst)};
}

// ----------------------------------------------------------------- 4

struct Direction {
    bool ok = true;
    bool strict = false;
    std::string text;
};

Direction compare_departure(const char* name, Mode other) {
    const SiteConfig cfg = load_config(fixture(name));
    RunOptions a, b;
    b.mode = other;
    const RunReport ra = run_pipeline(cfg, a);
    const RunReport rb = run_pipeline(cfg, b);
    Direction out;
    std::ostringstream os;
    os << name << " A vs " << mode_name(other) << " [";
    for (std::size_t s = 0; s < ra.solution.scenarios.size(); ++s) {
        const auto& da = ra.solution.scenarios[s].departure_soc;
        const auto& db = rb.solution.scenarios[s].departure_soc;
        for (std::size_t i = 0; i < da.size(); ++i) {
            if (da[i] < db[i] - 1e-6) out.ok = false;
            if (da[i] > db[i] + 1e-6) out.strict = true;
            os << (i ? " " : "") << fmt("%.1f", da[i]) << "/" << fmt("%.1f", db[i]);
        }
    }
    os << "]";
    if (other == Mode::B) {
        // The fixture must exercise braking energy and a binding peak cap.
        double rb_sum = 0.0;
        for (double v : ra.solution.scenarios[0].p_rbe) rb_sum += v;
        const bool binding = std::abs(ra.optimized_peak - cfg.peak.p_max) <= 1e-6;
        os << " RB used " << fmt("%.0f", rb_sum) << " kW-steps, peak " << fmt("%.1f", ra.optimized_peak) << "/"
           << fmt("%.0f", cfg.peak.p_max);
        out.ok = out.ok && rb_sum > 0.0 && binding;
    }
    out.text = os.str();
    return out;
}

Outcome ablation_direction() {
    const Direction b = compare_departure("rb_rich", Mode::B);
    const Direction c = compare_departure("pv_rich", Mode::C);
    return {b.ok && b.strict && c.ok && c.strict, b.text + "; " + c.text};
}

// ----------------------------------------------------------------- 5

Outcome peak_shaving() {
    const SiteConfig cfg = load_config(fixture("peak_shaving"));
    const RunReport r = run_pipeline(cfg, RunOptions{});
    const ScenarioSet tree = scenarios_from_config(cfg);
    const TimeSeries unc = uncoordinated_profile(r.sessions, cfg.time_grid);
    int exceed = 0;
    double unc_peak = 0.0, opt_peak = 0.0;
    for (int t = 1; t <= cfg.time_grid.horizon_steps; ++t) {
        const std::size_t k = static_cast<std::size_t>(t - 1);
        const double base = tree.scenarios[0].demand[k] + unc[k];
        if (base > 3000.0) ++exceed;
        unc_peak = std::max(unc_peak, base);
        double ev = 0.0;
        for (const auto& p : r.solution.scenarios[0].p_ev) ev += p[k];
        opt_peak = std::max(opt_peak, tree.scenarios[0].demand[k] + ev);
    }
    std::ostringstream os;
    os << "uncoordinated above 3000 kW at " << exceed << " steps, peak " << fmt("%.1f", unc_peak)
       << " kW -> optimized " << fmt("%.1f", opt_peak) << " kW";
    return {exceed >= 3 && opt_peak <= 3000.0 + 1e-6 && unc_peak - opt_peak > 0.0, os.str()};
}

// ----------------------------------------------------------------- 6

Outcome scenario_tree() {
    const TimeGrid g{10, 144};
    const auto axis = [&](AxisLabel label, int n, Unit unit) {
        ScenarioAxis a;
        a.label = label;
        for (int m = 0; m < n; ++m) {
            a.members.push_back(AxisMember{TimeSeries(std::vector<double>(144, m), unit, g), 1.0 / n, ""});
        }
        return a;
    };
    const ScenarioSet set = build_tree(axis(AxisLabel::Pv, 4, Unit::Kilowatt),
                                       axis(AxisLabel::Price, 5, Unit::CurrencyPerKwh),
                                       axis(AxisLabel::Rb, 5, Unit::Kilowatt),
                                       TimeSeries::zeros(Unit::Kilowatt, g));
    double worst = 0.0;
    for (const Scenario& s : set.scenarios) worst = std::max(worst, std::abs(s.probability - 0.01));
    const double sum_err = std::abs(set.total_probability() - 1.0);
    return {set.size() == 100 && worst <= 1e-15 && sum_err <= 1e-9,
            std::to_string(set.size()) + " scenarios, max |pi - 0.01| " + fmt("%.1e", worst) + ", |sum - 1| " +
                fmt("%.1e", sum_err)};
}

// ----------------------------------------------------------------- 7

Outcome kappa_monotonicity() {
    SiteConfig cfg = load_config(fixture("reference"));
    std::ostringstream os;
    double prev = -kInf;
    bool ok = true;
    for (double kappa : {0.0, 0.3, 0.6, 0.9}) {
        cfg.flex.kappa = kappa;
        const double obj = run_pipeline(cfg, RunOptions{}).solution.objective;
        // Each objective is optimal up to the relative gap of the search.
        if (obj < prev - 1e-6 * std::max(1.0, std::abs(prev))) ok = false;
        os << (kappa == 0.0 ? "" : ", ") << "kappa " << kappa << ": " << fmt("%.6f", obj);
        prev = obj;
    }
    return {ok, os.str()};
}

// ----------------------------------------------------------------- 8

Outcome pv_transform() {
    const PvSpec spec{1000.0, 150.0, 1000.0};
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> beta(0.0, 1500.0);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double b = beta(rng);
        double want = 1000.0;
        if (b < 150.0) want = 1000.0 * b * b / (1000.0 * 150.0);
        else if (b < 1000.0) want = 1000.0 * b / 1000.0;
        worst = std::max(worst, std::abs(pv_power(b, spec) - want));
    }
    double jump = 0.0;
    for (double r : {150.0, 1000.0}) {
        jump = std::max(jump, std::abs(pv_power(r + 1e-6, spec) - pv_power(r - 1e-6, spec)));
    }
    return {worst <= 1e-9 && jump <= 1e-3,
            "1e5 draws, max |error| " + fmt("%.1e", worst) + " kW, max jump at r_c/r_std " + fmt("%.1e", jump) + " kW"};
}

// ----------------------------------------------------------------- 9

bool highspy_available() {
    return std::system("python3 -c \"import highspy\" >/dev/null 2>&1") == 0;
}

Outcome mps_round_trip() {
    const SiteConfig cfg = load_config(fixture("tiny"));
    const auto sessions = generate_fleet(cfg.fleet, cfg.time_grid, cfg.fleet.seed, cfg.flex.kappa);
    const EmsModel model = build_model(cfg, sessions, scenarios_from_config(cfg).scenarios, Mode::A);
    const CanonicalMilp& m = model.milp;
    std::stringstream buf;
    write_mps(m, buf);
    const CanonicalMilp back = parse_mps(buf);

    bool same = back.num_columns() == m.num_columns() && back.num_rows() == m.num_rows() &&
                back.num_binaries() == m.num_binaries();
    for (int j = 0; same && j < m.num_columns(); ++j) {
        const Column &a = m.column(j), &b = back.column(j);
        same = a.lower == b.lower && a.upper == b.upper && a.cost == b.cost && a.binary == b.binary && a.name == b.name;
    }
    for (int i = 0; same && i < m.num_rows(); ++i) {
        same = m.row(i).sense == back.row(i).sense && m.row(i).rhs == back.row(i).rhs;
    }
    const auto dense = [](const CanonicalMilp& x) {
        std::vector<std::tuple<int, int, double>> v;
        for (const Triplet& t : x.triplets()) v.emplace_back(t.row, t.col, t.value);
        std::sort(v.begin(), v.end());
        return v;
    };
    same = same && dense(m) == dense(back);

    std::ostringstream os;
    os << m.num_columns() << " columns, " << m.num_rows() << " rows, " << m.triplets().size()
       << " coefficients " << (same ? "identical" : "DIFFER") << " after re-parse";
    bool cross = true;
    if (highspy_available()) {
        const auto work = std::filesystem::temp_directory_path() / "railems_acceptance_mps";
        std::filesystem::create_directories(work);
        const std::string cmd = "python3 \"" + (std::filesystem::path(RAILEMS_SOURCE_DIR) / "tools" / "highs_solve.py").string() +
                                "\" {mps} {solution}";
        const ExternalResult ext = solve_external(m, cmd, work);
        const MipSolution own = solve_mip(m);
        const double rel = std::abs(ext.objective - own.objective) / std::max(1.0, std::abs(own.objective));
        cross = ext.ok && own.status == MipStatus::Optimal && rel <= 1e-6;
        os << "; HiGHS " << fmt("%.9f", ext.objective) << " vs " << fmt("%.9f", own.objective) << " (rel "
           << fmt("%.1e", rel) << ")";
        std::filesystem::remove_all(work);
    } else {
        os << "; highspy not installed, cross-solver check skipped";
    }
    return {same && cross, os.str()};
}

// ----------------------------------------------------------------- 10

Outcome determinism() {
    const SiteConfig cfg = load_config(fixture("reference"));
    const auto base = std::filesystem::temp_directory_path() / "railems_acceptance_runs";
    std::filesystem::remove_all(base);
    std::string text[2];
    for (int k = 0; k < 2; ++k) {
        const auto dir = base / std::to_string(k);
        write_outputs(run_pipeline(cfg, RunOptions{}), dir);
        std::ifstream in(dir / "report.json", std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        text[k] = s.str();
    }
    std::filesystem::remove_all(base);
    return {!text[0].empty() && text[0] == text[1],
            "report.json " + std::to_string(text[0].size()) + " bytes, " + (text[0] == text[1] ? "identical" : "different")};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"oracle equivalence", oracle_equivalence},
        {"constraint certification", constraint_certification},
        {"theta tightness", theta_tightness},
        {"ablation direction", ablation_direction},
        {"peak shaving", peak_shaving},
        {"scenario tree arithmetic", scenario_tree},
        {"kappa monotonicity", kappa_monotonicity},
        {"PV transform", pv_transform},
        {"MPS round trip", mps_round_trip},
        {"determinism", determinism},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d %-26s %s  %s\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
