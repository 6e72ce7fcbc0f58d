#include "railems/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "railems/error.hpp"
#include "railems/mps.hpp"
#include "railems/pv.hpp"

namespace railems {

using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error("cannot open " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

ojson check_json(const Check& c) {
    ojson j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["residual"] = c.residual;
    j["tolerance"] = c.tolerance;
    j["where"] = c.where;
    return j;
}

}  // namespace

ScenarioSet scenarios_from_config(const SiteConfig& cfg) {
    const TimeGrid& grid = cfg.time_grid;
    const auto [demand, rb] = split_demand(cfg.scenario_axes.raw_demand, grid);
    ScenarioAxis pv_axis;
    pv_axis.label = AxisLabel::Pv;
    for (const AxisMember& m : cfg.scenario_axes.radiation.members) {
        pv_axis.members.push_back(AxisMember{pv_series(m.payload, cfg.pv, grid), m.probability, m.name});
    }
    const ScenarioAxis rb_axis = cfg.scenario_axes.rb ? *cfg.scenario_axes.rb
                                                      : ScenarioAxis::certain(AxisLabel::Rb, rb, "braking");
    return build_tree(pv_axis, cfg.scenario_axes.price, rb_axis, demand);
}

std::vector<int> parse_scenario_filter(const std::string& filter, int count) {
    std::vector<int> out;
    if (filter.empty() || filter == "all") {
        for (int s = 0; s < count; ++s) out.push_back(s);
        return out;
    }
    std::stringstream ss(filter);
    const auto to_int = [&](const std::string& tok) {
        int v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
            throw DomainError("bad scenario filter '" + filter + "'");
        }
        if (v < 0 || v >= count) {
            throw DomainError("scenario " + tok + " outside [0, " + std::to_string(count) + ")");
        }
        return v;
    };
    for (std::string part; std::getline(ss, part, ',');) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) {
            out.push_back(to_int(part));
        } else {
            const int a = to_int(part.substr(0, dash));
            const int b = to_int(part.substr(dash + 1));
            if (b < a) throw DomainError("bad scenario range '" + part + "'");
            for (int s = a; s <= b; ++s) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RunReport run_pipeline(const SiteConfig& cfg, const RunOptions& options) {
    if (const auto v = validate_config(cfg); !v.empty()) {
        throw SchemaError("invalid configuration: " + v.front().field + ": " + v.front().rule);
    }
    RunReport report;
    report.config = cfg;
    report.mode = options.mode;
    report.seed = options.seed.value_or(cfg.fleet.seed);
    report.mip = options.mip;
    const TimeGrid& grid = cfg.time_grid;

    report.sessions = generate_fleet(cfg.fleet, grid, report.seed, cfg.flex.kappa);
    const ScenarioSet tree = scenarios_from_config(cfg);
    report.scenario_indices = parse_scenario_filter(options.scenarios, static_cast<int>(tree.size()));

    const TimeSeries uncoordinated = uncoordinated_profile(report.sessions, grid);
    report.uncoordinated_ev.assign(uncoordinated.values().begin(), uncoordinated.values().end());

    if (options.export_mps_dir) std::filesystem::create_directories(*options.export_mps_dir);

    // Scenario models share nothing, so they are solved by a pool of
    // workers; results are merged afterwards in scenario order.
    struct Slot {
        SolveStats stats;
        EmsSolution part;
        std::exception_ptr error;
    };
    std::vector<Slot> slots(report.scenario_indices.size());
    const auto solve_one = [&](std::size_t k) {
        Slot& slot = slots[k];
        try {
            const int s = report.scenario_indices[k];
            const Scenario& sc = tree.scenarios[static_cast<std::size_t>(s)];
            const EmsModel model = build_model(cfg, report.sessions, {sc}, options.mode,
                                               ModelOptions{.probability_weighted = false});
            if (options.export_mps_dir) {
                export_mps(model.milp, *options.export_mps_dir / ("scenario_" + std::to_string(s) + ".mps"),
                           "S" + std::to_string(s));
            }
            const MipSolution sol = solve_mip(model.milp, options.mip);
            SolveStats& st = slot.stats;
            st.scenario = s;
            st.status = sol.status;
            st.objective = sol.objective;
            st.best_bound = sol.best_bound;
            st.gap = sol.gap;
            st.nodes = sol.nodes;
            st.lp_iterations = sol.lp_iterations;
            st.columns = model.milp.num_columns();
            st.binaries = model.milp.num_binaries();
            st.rows = model.milp.num_rows();
            if (sol.status != MipStatus::Optimal) {
                throw Error("scenario " + std::to_string(s) + ": solver finished with status " +
                            std::string(status_name(sol.status)));
            }
            slot.part = extract_solution(model, sol);
        } catch (...) {
            slot.error = std::current_exception();
        }
    };
    unsigned workers = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(slots.size()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < slots.size(); ++k) solve_one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t k = next++; k < slots.size(); k = next++) solve_one(k);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    EmsSolution& total = report.solution;
    total.objective = total.expected_cost = total.expected_theta = 0.0;
    std::map<std::string, Check> merged;
    std::vector<std::string> check_order;
    for (Slot& slot : slots) {
        if (slot.error) std::rethrow_exception(slot.error);
        report.stats.push_back(slot.stats);
        for (const Check& c : slot.part.checks) {
            auto it = merged.find(c.name);
            if (it == merged.end()) {
                merged.emplace(c.name, c);
                check_order.push_back(c.name);
            } else if (c.residual > it->second.residual) {
                const bool passed = it->second.passed && c.passed;
                it->second = c;
                it->second.passed = passed;
            } else {
                it->second.passed = it->second.passed && c.passed;
            }
        }
        for (ScenarioDispatch& d : slot.part.scenarios) {
            total.objective += d.probability * d.objective;
            total.expected_cost += d.probability * d.energy_cost;
            total.expected_theta += d.probability * d.theta_sum;
            total.scenarios.push_back(std::move(d));
        }
    }
    for (const std::string& n : check_order) total.checks.push_back(merged.at(n));
    total.status = MipStatus::Optimal;

    for (const ScenarioDispatch& d : total.scenarios) {
        for (std::size_t k = 0; k < d.p_demand.size(); ++k) {
            report.optimized_peak = std::max(report.optimized_peak, d.p_demand[k] + d.p_ev_total[k]);
            report.uncoordinated_peak =
                std::max(report.uncoordinated_peak, d.p_demand[k] + report.uncoordinated_ev[k]);
        }
    }
    return report;
}

std::string RunReport::to_json() const {
    const TimeGrid& grid = config.time_grid;
    ojson j;
    j["mode"] = std::string(mode_name(mode));
    j["seed"] = seed;
    j["status"] = std::string(status_name(solution.status));

    ojson params;
    params["step_minutes"] = grid.step_minutes;
    params["horizon_steps"] = grid.horizon_steps;
    params["p_buy_max_kw"] = config.grid.p_buy_max;
    params["p_sell_max_kw"] = config.grid.p_sell_max;
    params["ess_capacity_kwh"] = config.ess.soc_max;
    params["ess_soc_min_kwh"] = config.ess.soc_min;
    params["ess_soc_init_kwh"] = config.ess.soc_init;
    params["ess_charge_rate_kw"] = config.ess.charge_rate_max;
    params["ess_discharge_rate_kw"] = config.ess.discharge_rate_max;
    params["ess_rate_interpretation"] = config.ess_rate_interpretation;
    params["ess_eta_charge"] = config.ess.eta_charge;
    params["ess_eta_discharge"] = config.ess.eta_discharge;
    params["ess_self_discharge"] = config.ess.self_discharge;
    params["ess_discharge_model"] =
        config.ess.discharge_model == DischargeModel::Multiplied ? "multiplied" : "conventional";
    params["ess_terminal_soc"] = config.ess.terminal_soc;
    params["pv_rated_kw"] = config.pv.rated_capacity;
    params["pv_r_c"] = config.pv.r_c;
    params["pv_r_std"] = config.pv.r_std;
    params["p_max_kw"] = config.peak.p_max;
    params["kappa"] = config.flex.kappa;
    params["w_power"] = config.weights.w_power;
    params["w_theta"] = config.weights.w_theta;
    j["parameters"] = params;

    ojson solver;
    solver["relative_gap_tolerance"] = mip.rel_gap;
    solver["integrality_tolerance"] = mip.int_tol;
    solver["lp_primal_tolerance"] = mip.lp.primal_tol;
    solver["lp_dual_tolerance"] = mip.lp.dual_tol;
    solver["incumbent_residual_tolerance"] = kIncumbentTol;
    solver["residual_check_tolerance"] = kSolutionTol;
    ojson per = ojson::array();
    for (const SolveStats& s : stats) {
        ojson e;
        e["scenario"] = s.scenario;
        e["status"] = std::string(status_name(s.status));
        e["objective"] = s.objective;
        e["best_bound"] = s.best_bound;
        e["gap"] = s.gap;
        e["nodes"] = s.nodes;
        e["lp_iterations"] = s.lp_iterations;
        e["columns"] = s.columns;
        e["binaries"] = s.binaries;
        e["rows"] = s.rows;
        per.push_back(e);
    }
    solver["scenarios"] = per;
    j["solver"] = solver;

    ojson obj;
    obj["expected_objective"] = solution.objective;
    obj["expected_energy_cost"] = solution.expected_cost;
    obj["expected_theta_sum_kwh"] = solution.expected_theta;
    ojson per_s = ojson::array();
    for (const ScenarioDispatch& d : solution.scenarios) {
        ojson e;
        e["scenario"] = d.scenario;
        e["probability"] = d.probability;
        e["objective"] = d.objective;
        e["energy_cost"] = d.energy_cost;
        e["theta_sum_kwh"] = d.theta_sum;
        per_s.push_back(e);
    }
    obj["scenarios"] = per_s;
    j["objective"] = obj;

    ojson evs = ojson::array();
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const EvSession& ev = sessions[i];
        ojson e;
        e["ev"] = ev.id;
        e["kind"] = std::string(ev_kind_name(ev.ev_class.kind));
        e["t_arrival"] = ev.t_arrival;
        e["t_departure"] = ev.t_departure;
        e["e_requested_kwh"] = ev.e_requested;
        e["theta_min_kwh"] = ev.theta_min;
        e["theta_max_kwh"] = ev.theta_max;
        ojson th = ojson::array();
        for (const ScenarioDispatch& d : solution.scenarios) {
            ojson x;
            x["scenario"] = d.scenario;
            x["theta_kwh"] = d.theta[i];
            x["departure_soc_kwh"] = d.departure_soc[i];
            x["theta_over_theta_max"] = ev.theta_max > 0.0 ? d.theta[i] / ev.theta_max : 1.0;
            th.push_back(x);
        }
        e["per_scenario"] = th;
        evs.push_back(e);
    }
    j["ev_theta"] = evs;

    ojson peak;
    peak["p_max_kw"] = config.peak.p_max;
    peak["uncoordinated_peak_kw"] = uncoordinated_peak;
    peak["optimized_peak_kw"] = optimized_peak;
    peak["peak_reduction_kw"] = uncoordinated_peak - optimized_peak;
    ojson prof = ojson::array();
    for (const ScenarioDispatch& d : solution.scenarios) {
        ojson e;
        e["scenario"] = d.scenario;
        std::vector<double> opt(d.p_demand.size()), unc(d.p_demand.size());
        for (std::size_t k = 0; k < opt.size(); ++k) {
            opt[k] = d.p_demand[k] + d.p_ev_total[k];
            unc[k] = d.p_demand[k] + uncoordinated_ev[k];
        }
        e["optimized_kw"] = opt;
        e["uncoordinated_kw"] = unc;
        prof.push_back(e);
    }
    peak["profiles"] = prof;
    j["peak"] = peak;

    ojson soc = ojson::array();
    for (const ScenarioDispatch& d : solution.scenarios) {
        ojson e;
        e["scenario"] = d.scenario;
        e["soc_kwh"] = d.soc_b;
        soc.push_back(e);
    }
    j["ess_soc"] = soc;

    ojson checks = ojson::array();
    for (const Check& c : solution.checks) checks.push_back(check_json(c));
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

void write_outputs(const RunReport& report, const std::filesystem::path& out_dir) {
    std::ostringstream sched, disp, theta;
    sched << "s,t,i,P_EV\n";
    disp << "s,t,P_G,P_S,P_PV,P_D,P_EV,P_B_plus,P_B_minus,P_RBE,SoC_B,u_G,u_B\n";
    theta << "s,i,theta,theta_min,theta_max,E_c,departure_soc\n";
    for (const ScenarioDispatch& d : report.solution.scenarios) {
        for (std::size_t i = 0; i < report.sessions.size(); ++i) {
            const EvSession& ev = report.sessions[i];
            for (int t = ev.t_arrival; t <= ev.t_departure; ++t) {
                sched << d.scenario << ',' << t << ',' << ev.id << ','
                      << num(d.p_ev[i][static_cast<std::size_t>(t - 1)]) << '\n';
            }
            theta << d.scenario << ',' << ev.id << ',' << num(d.theta[i]) << ',' << num(ev.theta_min)
                  << ',' << num(ev.theta_max) << ',' << num(ev.e_requested) << ','
                  << num(d.departure_soc[i]) << '\n';
        }
        for (std::size_t k = 0; k < d.p_grid.size(); ++k) {
            disp << d.scenario << ',' << k + 1 << ',' << num(d.p_grid[k]) << ',' << num(d.p_sell[k])
                 << ',' << num(d.p_pv[k]) << ',' << num(d.p_demand[k]) << ','
                 << num(d.p_ev_total[k]) << ',' << num(d.p_b_plus[k]) << ','
                 << num(d.p_b_minus[k]) << ',' << num(d.p_rbe[k]) << ',' << num(d.soc_b[k]) << ','
                 << num(d.u_grid[k]) << ',' << num(d.u_ess[k]) << '\n';
        }
    }
    const std::string json = report.to_json();

    std::filesystem::create_directories(out_dir);
    const auto put = [&](const char* name, const std::string& text) {
        const auto path = out_dir / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write " + path.string());
        f << text;
        if (!f) throw Error("failed writing " + path.string());
    };
    put("schedule_ev.csv", sched.str());
    put("dispatch.csv", disp.str());
    put("theta.csv", theta.str());
    put("report.json", json);
}

// -------------------------------------------------------------- compare

namespace {

struct RunView {
    std::map<std::pair<int, int>, double> theta;  // (s, i) -> theta
    double peak = 0.0;
    double objective = 0.0;
};

RunView view_of(const RunReport& r) {
    RunView v;
    for (const ScenarioDispatch& d : r.solution.scenarios) {
        for (std::size_t i = 0; i < r.sessions.size(); ++i) {
            v.theta[{d.scenario, r.sessions[i].id}] = d.theta[i];
        }
    }
    v.peak = r.optimized_peak;
    v.objective = r.solution.objective;
    return v;
}

RunView view_of(const std::filesystem::path& dir) {
    RunView v;
    std::istringstream csv(slurp(dir / "theta.csv"));
    std::string line;
    if (!std::getline(csv, line) || line.rfind("s,i,theta", 0) != 0) {
        throw ParseError((dir / "theta.csv").string() + ": unexpected header");
    }
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        std::getline(ls, c, ',');
        try {
            v.theta[{std::stoi(a), std::stoi(b)}] = std::stod(c);
        } catch (const std::exception&) {
            throw ParseError((dir / "theta.csv").string() + ": bad row '" + line + "'");
        }
    }
    ojson j;
    try {
        j = ojson::parse(slurp(dir / "report.json"));
        v.peak = j.at("peak").at("optimized_peak_kw").get<double>();
        v.objective = j.at("objective").at("expected_objective").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError((dir / "report.json").string() + ": " + e.what());
    }
    return v;
}

Comparison compare_views(const RunView& a, const RunView& b) {
    if (a.theta.size() != b.theta.size() ||
        !std::equal(a.theta.begin(), a.theta.end(), b.theta.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; })) {
        throw DomainError("runs cover different sessions or scenarios");
    }
    Comparison c;
    for (auto ia = a.theta.begin(), ib = b.theta.begin(); ia != a.theta.end(); ++ia, ++ib) {
        const double d = ia->second - ib->second;
        c.theta.push_back(ThetaDelta{ia->first.first, ia->first.second, ia->second, ib->second, d});
        c.theta_sum_delta += d;
    }
    c.peak_a = a.peak;
    c.peak_b = b.peak;
    c.peak_delta = a.peak - b.peak;
    c.objective_a = a.objective;
    c.objective_b = b.objective;
    c.objective_delta = a.objective - b.objective;
    return c;
}

}  // namespace

Comparison compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b) {
    return compare_views(view_of(run_a), view_of(run_b));
}

Comparison compare_reports(const RunReport& a, const RunReport& b) {
    return compare_views(view_of(a), view_of(b));
}

std::string format_comparison(const Comparison& c) {
    std::ostringstream os;
    os << "s,i,theta_a,theta_b,delta\n";
    for (const ThetaDelta& t : c.theta) {
        os << t.scenario << ',' << t.ev << ',' << num(t.theta_a) << ',' << num(t.theta_b) << ','
           << num(t.delta) << '\n';
    }
    os << "\nsum theta delta (kWh): " << num(c.theta_sum_delta) << '\n';
    os << "peak (kW): " << num(c.peak_a) << " vs " << num(c.peak_b) << ", delta "
       << num(c.peak_delta) << '\n';
    os << "objective: " << num(c.objective_a) << " vs " << num(c.objective_b) << ", delta "
       << num(c.objective_delta) << '\n';
    return os.str();
}

// --------------------------------------------------------------- oracle

std::vector<OracleCase> run_oracle(const SiteConfig& cfg, Mode mode, double rel_tol) {
    const auto sessions = generate_fleet(cfg.fleet, cfg.time_grid, cfg.fleet.seed, cfg.flex.kappa);
    const ScenarioSet tree = scenarios_from_config(cfg);
    std::vector<OracleCase> out;
    for (const Scenario& sc : tree.scenarios) {
        const EmsModel model = build_model(cfg, sessions, {sc}, mode,
                                           ModelOptions{.probability_weighted = false});
        OracleCase oc;
        oc.scenario = sc.index;
        oc.binaries = model.milp.num_binaries();
        const MipSolution bb = solve_mip(model.milp);
        const MipSolution bf = brute_force_mip(model.milp);
        oc.branch_and_bound = bb.objective;
        oc.brute_force = bf.objective;
        if (bb.status == MipStatus::Optimal && bf.status == MipStatus::Optimal) {
            oc.relative_difference =
                std::abs(bb.objective - bf.objective) / std::max(1.0, std::abs(bf.objective));
            oc.agrees = oc.relative_difference <= rel_tol;
        } else {
            oc.agrees = bb.status == bf.status;
            oc.relative_difference = oc.agrees ? 0.0 : kInf;
        }
        out.push_back(oc);
    }
    return out;
}

}  // namespace railems
