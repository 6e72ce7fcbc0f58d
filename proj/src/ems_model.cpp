#include "railems/ems_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

#include "railems/error.hpp"

namespace railems {

namespace {

constexpr std::array<char, kSymbolCount> kSymbolLetter = {'G', 'S', 'C', 'D', 'R', 'B',
                                                          'U', 'V', 'P', 'E', 'H'};
constexpr int kStationSymbols = 8;  // P_G .. u_B
constexpr int kEvSymbols = 3;       // P_EV, SoC_EV, theta

bool is_station(Symbol s) { return static_cast<int>(s) < kStationSymbols; }

// Two base-36 digits; empty if out of range. kNone -> "00".
std::string base36(int v) {
    static constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    if (v == kNone) return "00";
    if (v < 0 || v >= 36 * 36) return {};
    return {kDigits[v / 36], kDigits[v % 36]};
}

std::string row_label(char kind, int t, int s, int i) {
    const std::string a = base36(t), b = base36(s), c = base36(i);
    if (a.empty() || b.empty() || c.empty()) return {};
    return std::string(1, kind) + a + b + c;
}

std::string at_step(int t, int s) {
    std::ostringstream os;
    os << "t=" << t << " s=" << s;
    return os.str();
}

}  // namespace

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::A: return "A";
        case Mode::B: return "B";
        case Mode::C: return "C";
    }
    return "?";
}

Mode parse_mode(std::string_view text) {
    if (text.size() == 1) {
        switch (std::toupper(static_cast<unsigned char>(text[0]))) {
            case 'A': return Mode::A;
            case 'B': return Mode::B;
            case 'C': return Mode::C;
            default: break;
        }
    }
    throw DomainError("unknown mode '" + std::string(text) + "' (expected A, B or C)");
}

std::string_view symbol_name(Symbol symbol) {
    switch (symbol) {
        case Symbol::P_G: return "P_G";
        case Symbol::P_S: return "P_S";
        case Symbol::P_B_plus: return "P_B_plus";
        case Symbol::P_B_minus: return "P_B_minus";
        case Symbol::P_RBE: return "P_RBE";
        case Symbol::SoC_B: return "SoC_B";
        case Symbol::u_G: return "u_G";
        case Symbol::u_B: return "u_B";
        case Symbol::P_EV: return "P_EV";
        case Symbol::SoC_EV: return "SoC_EV";
        case Symbol::theta: return "theta";
    }
    return "?";
}

std::string var_name(const VarKey& key) {
    const std::string a = base36(key.t), b = base36(key.s), c = base36(key.i);
    if (a.empty() || b.empty() || c.empty()) return {};
    return std::string(1, kSymbolLetter[static_cast<std::size_t>(key.symbol)]) + a + b + c;
}

// ------------------------------------------------------------------ index

EmsIndex::EmsIndex(int horizon_steps, int scenarios, int evs)
    : horizon_(horizon_steps),
      scenarios_(scenarios),
      evs_(evs),
      station_(static_cast<std::size_t>(scenarios) * kStationSymbols * (horizon_steps + 1), -1),
      ev_(static_cast<std::size_t>(scenarios) * evs * kEvSymbols * (horizon_steps + 1), -1) {}

int EmsIndex::slot(const VarKey& key) const {
    if (key.s < 0 || key.s >= scenarios_) return -1;
    const int sym = static_cast<int>(key.symbol);
    if (is_station(key.symbol)) {
        if (key.t < 1 || key.t > horizon_ || key.i != kNone) return -1;
        return (key.s * kStationSymbols + sym) * (horizon_ + 1) + key.t;
    }
    if (key.i < 0 || key.i >= evs_) return -1;
    int t = key.t;
    if (key.symbol == Symbol::theta) {
        if (t != kNone) return -1;
        t = 0;
    } else if (t < 1 || t > horizon_) {
        return -1;
    }
    const int k = sym - kStationSymbols;
    return ((key.s * evs_ + key.i) * kEvSymbols + k) * (horizon_ + 1) + t;
}

int EmsIndex::column(const VarKey& key) const {
    const int k = slot(key);
    if (k < 0) return -1;
    return is_station(key.symbol) ? station_[static_cast<std::size_t>(k)]
                                  : ev_[static_cast<std::size_t>(k)];
}

void EmsIndex::add(const VarKey& key, int column) {
    const int k = slot(key);
    if (k < 0) throw DomainError("variable key outside the index");
    auto& table = is_station(key.symbol) ? station_ : ev_;
    table[static_cast<std::size_t>(k)] = column;
    if (column != size()) throw DomainError("columns must be indexed in creation order");
    keys_.push_back(key);
}

// ------------------------------------------------------------------ build

EmsModel build_model(const SiteConfig& cfg, const std::vector<EvSession>& sessions,
                     const std::vector<Scenario>& scenarios, Mode mode,
                     const ModelOptions& options) {
    const TimeGrid& tg = cfg.time_grid;
    const int nt = tg.horizon_steps;
    const double dt = tg.step_hours();
    const int ns = static_cast<int>(scenarios.size());
    const int nev = static_cast<int>(sessions.size());

    for (const EvSession& ev : sessions) {
        if (ev.t_arrival < 1 || ev.t_departure <= ev.t_arrival || ev.t_departure > nt) {
            throw DomainError("EV " + std::to_string(ev.id) + " does not fit the time grid");
        }
    }
    for (const Scenario& sc : scenarios) {
        for (const TimeSeries* ts : {&sc.demand, &sc.rb_avail, &sc.pv, &sc.price_buy, &sc.price_sell}) {
            if (static_cast<int>(ts->size()) != nt) {
                throw DomainError("scenario " + std::to_string(sc.index) +
                                  " has a series of the wrong length");
            }
        }
        for (int t = 1; t <= nt; ++t) {
            if (sc.demand.at_step(t) > cfg.peak.p_max) {
                std::ostringstream os;
                os << "train demand " << sc.demand.at_step(t) << " kW exceeds the peak cap "
                   << cfg.peak.p_max << " kW at step " << t << " (scenario " << sc.index
                   << "); no schedule can satisfy the cap";
                throw InfeasibleInputError(os.str(), t);
            }
        }
    }

    EmsModel model;
    model.mode = mode;
    model.time_grid = tg;
    model.grid = cfg.grid;
    model.ess = cfg.ess;
    model.peak = cfg.peak;
    model.weights = cfg.weights;
    model.sessions = sessions;
    model.scenarios = scenarios;
    model.options = options;
    if (mode == Mode::C) {
        for (Scenario& sc : model.scenarios) sc.pv = TimeSeries::zeros(Unit::Kilowatt, tg);
    }
    model.index = EmsIndex(nt, ns, nev);

    CanonicalMilp& m = model.milp;
    EmsIndex& idx = model.index;
    const bool with_ess = mode != Mode::B;
    const EssSpec& ess = cfg.ess;
    const double w_p = cfg.weights.w_power;
    const double w_th = cfg.weights.w_theta;

    const auto add_var = [&](Symbol sym, int t, int s, int i, double lo, double hi, double cost) {
        const VarKey key{sym, t, s, i};
        const bool binary = sym == Symbol::u_G || sym == Symbol::u_B;
        const int col = m.add_column(lo, hi, cost, binary, var_name(key));
        idx.add(key, col);
        return col;
    };
    const auto col_of = [&](Symbol sym, int t, int s, int i = kNone) {
        return idx.column(VarKey{sym, t, s, i});
    };

    for (int s = 0; s < ns; ++s) {
        const Scenario& sc = model.scenarios[static_cast<std::size_t>(s)];
        const double weight = options.probability_weighted ? sc.probability : 1.0;

        // Columns, station first, step by step.
        for (int t = 1; t <= nt; ++t) {
            add_var(Symbol::P_G, t, s, kNone, 0.0, cfg.grid.p_buy_max,
                    weight * w_p * sc.price_buy.at_step(t) * dt);
            add_var(Symbol::P_S, t, s, kNone, 0.0, cfg.grid.p_sell_max,
                    -weight * w_p * sc.price_sell.at_step(t) * dt);
            if (with_ess) {
                add_var(Symbol::P_B_plus, t, s, kNone, 0.0, ess.charge_rate_max, 0.0);
                add_var(Symbol::P_B_minus, t, s, kNone, 0.0, ess.discharge_rate_max, 0.0);
                add_var(Symbol::P_RBE, t, s, kNone, 0.0, sc.rb_avail.at_step(t), 0.0);
                add_var(Symbol::SoC_B, t, s, kNone, ess.soc_min, ess.soc_max, 0.0);
            }
            add_var(Symbol::u_G, t, s, kNone, 0.0, 1.0, 0.0);
            if (with_ess) add_var(Symbol::u_B, t, s, kNone, 0.0, 1.0, 0.0);
        }
        for (int i = 0; i < nev; ++i) {
            const EvSession& ev = sessions[static_cast<std::size_t>(i)];
            for (int t = ev.t_arrival; t <= ev.t_departure; ++t) {
                add_var(Symbol::P_EV, t, s, i, 0.0, ev.ev_class.p_max, 0.0);
            }
            for (int t = ev.t_arrival; t <= ev.t_departure; ++t) {
                add_var(Symbol::SoC_EV, t, s, i, 0.0, kInf, 0.0);
            }
            add_var(Symbol::theta, kNone, s, i, 0.0, kInf, -weight * w_th);
        }

        // Station rows.
        for (int t = 1; t <= nt; ++t) {
            const int pg = col_of(Symbol::P_G, t, s);
            const int ps = col_of(Symbol::P_S, t, s);
            const int ug = col_of(Symbol::u_G, t, s);

            const int bal = m.add_row(RowSense::Equal, sc.demand.at_step(t) - sc.pv.at_step(t),
                                      row_label('b', t, s, kNone));
            m.add_coefficient(bal, pg, 1.0);
            m.add_coefficient(bal, ps, -1.0);
            if (with_ess) {
                m.add_coefficient(bal, col_of(Symbol::P_B_minus, t, s), 1.0);
                m.add_coefficient(bal, col_of(Symbol::P_B_plus, t, s), -1.0);
            }
            for (int i = 0; i < nev; ++i) {
                const int pev = col_of(Symbol::P_EV, t, s, i);
                if (pev >= 0) m.add_coefficient(bal, pev, -1.0);
            }

            const int buy = m.add_row(RowSense::LessEqual, 0.0, row_label('g', t, s, kNone));
            m.add_coefficient(buy, pg, 1.0);
            m.add_coefficient(buy, ug, -cfg.grid.p_buy_max);
            const int sell = m.add_row(RowSense::LessEqual, cfg.grid.p_sell_max,
                                       row_label('h', t, s, kNone));
            m.add_coefficient(sell, ps, 1.0);
            m.add_coefficient(sell, ug, cfg.grid.p_sell_max);

            if (with_ess) {
                const int bp = col_of(Symbol::P_B_plus, t, s);
                const int bm = col_of(Symbol::P_B_minus, t, s);
                const int rbe = col_of(Symbol::P_RBE, t, s);
                const int soc = col_of(Symbol::SoC_B, t, s);
                const int ub = col_of(Symbol::u_B, t, s);

                const int chg = m.add_row(RowSense::LessEqual, 0.0, row_label('c', t, s, kNone));
                m.add_coefficient(chg, rbe, 1.0);
                m.add_coefficient(chg, bp, 1.0);
                m.add_coefficient(chg, ub, -ess.charge_rate_max);
                const int dis = m.add_row(RowSense::LessEqual, ess.discharge_rate_max,
                                          row_label('d', t, s, kNone));
                m.add_coefficient(dis, bm, 1.0);
                m.add_coefficient(dis, ub, ess.discharge_rate_max);

                // SoC^t - (1-eps) SoC^{t-1} - eta+ (P_RBE + P_B+) dt + k P_B- dt = 0
                const double keep = 1.0 - ess.self_discharge;
                const double out = ess.discharge_model == DischargeModel::Multiplied
                                       ? ess.eta_discharge * dt
                                       : dt / ess.eta_discharge;
                const double rhs = t == 1 ? keep * ess.soc_init : 0.0;
                const int rec = m.add_row(RowSense::Equal, rhs, row_label('s', t, s, kNone));
                m.add_coefficient(rec, soc, 1.0);
                if (t > 1) m.add_coefficient(rec, col_of(Symbol::SoC_B, t - 1, s), -keep);
                m.add_coefficient(rec, rbe, -ess.eta_charge * dt);
                m.add_coefficient(rec, bp, -ess.eta_charge * dt);
                m.add_coefficient(rec, bm, out);
                if (ess.terminal_soc && t == nt) {
                    const int term = m.add_row(RowSense::GreaterEqual, ess.soc_init,
                                               row_label('f', t, s, kNone));
                    m.add_coefficient(term, soc, 1.0);
                }
            }

            // Peak cap on train + EV load; rows without EV terms are implied
            // by the pre-solve demand check.
            int peak = -1;
            for (int i = 0; i < nev; ++i) {
                const int pev = col_of(Symbol::P_EV, t, s, i);
                if (pev < 0) continue;
                if (peak < 0) {
                    peak = m.add_row(RowSense::LessEqual, cfg.peak.p_max - sc.demand.at_step(t),
                                     row_label('p', t, s, kNone));
                }
                m.add_coefficient(peak, pev, 1.0);
            }
        }

        // EV rows.
        for (int i = 0; i < nev; ++i) {
            const EvSession& ev = sessions[static_cast<std::size_t>(i)];
            const int ta = ev.t_arrival;
            const int td = ev.t_departure;
            const int init = m.add_row(RowSense::Equal, ev.soc_init, row_label('a', ta, s, i));
            m.add_coefficient(init, col_of(Symbol::SoC_EV, ta, s, i), 1.0);
            for (int t = ta + 1; t <= td; ++t) {
                const int r = m.add_row(RowSense::Equal, 0.0, row_label('e', t, s, i));
                m.add_coefficient(r, col_of(Symbol::SoC_EV, t, s, i), 1.0);
                m.add_coefficient(r, col_of(Symbol::SoC_EV, t - 1, s, i), -1.0);
                m.add_coefficient(r, col_of(Symbol::P_EV, t, s, i), -ev.ev_class.eta * dt);
            }
            const int th = col_of(Symbol::theta, kNone, s, i);
            const int soc_d = col_of(Symbol::SoC_EV, td, s, i);
            const int lo = m.add_row(RowSense::LessEqual, 0.0, row_label('x', kNone, s, i));
            m.add_coefficient(lo, th, 1.0);
            m.add_coefficient(lo, soc_d, -1.0);
            const int hi = m.add_row(RowSense::LessEqual, ev.e_requested, row_label('y', kNone, s, i));
            m.add_coefficient(hi, soc_d, 1.0);
            const int tmin = m.add_row(RowSense::GreaterEqual, ev.theta_min, row_label('l', kNone, s, i));
            m.add_coefficient(tmin, th, 1.0);
            const int tmax = m.add_row(RowSense::LessEqual, ev.theta_max, row_label('u', kNone, s, i));
            m.add_coefficient(tmax, th, 1.0);
        }
    }
    return model;
}

// ---------------------------------------------------------------- extract

namespace {

// Tracks the worst residual of one named check.
struct Tracker {
    Check check;
    Tracker(std::string name, double tol) {
        check.name = std::move(name);
        check.tolerance = tol;
    }
    void see(double residual, const std::string& where) {
        if (check.where.empty() || residual > check.residual) {
            check.residual = std::max(check.residual, residual);
            check.where = where;
        }
    }
    Check done() {
        check.passed = check.residual <= check.tolerance;
        return check;
    }
};

double snap(double v) { return std::abs(v) < 1e-9 ? 0.0 : v; }

}  // namespace

EmsSolution extract_solution(const EmsModel& model, const MipSolution& solution) {
    if (solution.status != MipStatus::Optimal) {
        throw DomainError(std::string("cannot extract a schedule from a solve with status ") +
                          std::string(status_name(solution.status)));
    }
    if (static_cast<int>(solution.x.size()) != model.milp.num_columns()) {
        throw DomainError("solution length does not match the model");
    }
    const int nt = model.time_grid.horizon_steps;
    const double dt = model.time_grid.step_hours();
    const int nev = static_cast<int>(model.sessions.size());
    const bool with_ess = model.mode != Mode::B;
    const EssSpec& ess = model.ess;
    const double tol = kSolutionTol;

    const auto value = [&](Symbol sym, int t, int s, int i = kNone) {
        const int c = model.index.column(VarKey{sym, t, s, i});
        return c < 0 ? 0.0 : snap(solution.x[static_cast<std::size_t>(c)]);
    };

    EmsSolution out;
    out.status = solution.status;

    Tracker balance("power_balance", tol);
    Tracker peak("peak_cap", tol);
    Tracker bounds("variable_bounds", tol);
    Tracker ess_rec("ess_soc_recursion", tol);
    Tracker ev_rec("ev_soc_recursion", tol);
    Tracker departure("departure_bounds", tol);
    Tracker theta_rng("theta_range", tol);
    Tracker comp_grid("complementarity_grid", tol);
    Tracker comp_ess("complementarity_ess", tol);
    Tracker integral("binary_integrality", 1e-7);
    Tracker tight("theta_equals_departure_soc", tol);

    const auto bound_check = [&](double v, double lo, double hi, const std::string& where) {
        bounds.see(std::max({0.0, lo - v, v - hi}), where);
    };

    for (std::size_t s = 0; s < model.scenarios.size(); ++s) {
        const Scenario& sc = model.scenarios[s];
        const int si = static_cast<int>(s);
        ScenarioDispatch d;
        d.scenario = sc.index;
        d.probability = sc.probability;
        const auto n = static_cast<std::size_t>(nt);
        for (auto* v : {&d.p_grid, &d.p_sell, &d.p_b_plus, &d.p_b_minus, &d.p_rbe, &d.soc_b,
                        &d.u_grid, &d.u_ess, &d.p_pv, &d.p_demand, &d.p_ev_total}) {
            v->assign(n, 0.0);
        }
        d.p_ev.assign(static_cast<std::size_t>(nev), std::vector<double>(n, 0.0));
        d.soc_ev.assign(static_cast<std::size_t>(nev), std::vector<double>(n, 0.0));
        d.departure_soc.assign(static_cast<std::size_t>(nev), 0.0);
        d.theta.assign(static_cast<std::size_t>(nev), 0.0);

        for (int t = 1; t <= nt; ++t) {
            const std::size_t k = static_cast<std::size_t>(t - 1);
            d.p_grid[k] = value(Symbol::P_G, t, si);
            d.p_sell[k] = value(Symbol::P_S, t, si);
            d.u_grid[k] = value(Symbol::u_G, t, si);
            d.p_pv[k] = sc.pv.at_step(t);
            d.p_demand[k] = sc.demand.at_step(t);
            if (with_ess) {
                d.p_b_plus[k] = value(Symbol::P_B_plus, t, si);
                d.p_b_minus[k] = value(Symbol::P_B_minus, t, si);
                d.p_rbe[k] = value(Symbol::P_RBE, t, si);
                d.soc_b[k] = value(Symbol::SoC_B, t, si);
                d.u_ess[k] = value(Symbol::u_B, t, si);
            } else {
                d.soc_b[k] = 0.0;
            }
            for (int i = 0; i < nev; ++i) {
                const double p = value(Symbol::P_EV, t, si, i);
                d.p_ev[static_cast<std::size_t>(i)][k] = p;
                d.soc_ev[static_cast<std::size_t>(i)][k] = value(Symbol::SoC_EV, t, si, i);
                d.p_ev_total[k] += p;
            }
        }
        for (int i = 0; i < nev; ++i) {
            const EvSession& ev = model.sessions[static_cast<std::size_t>(i)];
            d.departure_soc[static_cast<std::size_t>(i)] =
                d.soc_ev[static_cast<std::size_t>(i)][static_cast<std::size_t>(ev.t_departure - 1)];
            d.theta[static_cast<std::size_t>(i)] = value(Symbol::theta, kNone, si, i);
        }

        // Re-check from the domain data.
        for (int t = 1; t <= nt; ++t) {
            const std::size_t k = static_cast<std::size_t>(t - 1);
            const std::string where = at_step(t, sc.index);
            const double supply = d.p_grid[k] + d.p_pv[k] + d.p_b_minus[k];
            const double use = d.p_demand[k] + d.p_ev_total[k] + d.p_b_plus[k] + d.p_sell[k];
            balance.see(std::abs(supply - use), where);
            peak.see(std::max(0.0, d.p_demand[k] + d.p_ev_total[k] - model.peak.p_max), where);
            bound_check(d.p_grid[k], 0.0, model.grid.p_buy_max * d.u_grid[k], where + " P_G");
            bound_check(d.p_sell[k], 0.0, model.grid.p_sell_max * (1.0 - d.u_grid[k]), where + " P_S");
            comp_grid.see(d.p_grid[k] * d.p_sell[k], where);
            integral.see(std::abs(d.u_grid[k] - std::round(d.u_grid[k])), where + " u_G");
            if (with_ess) {
                bound_check(d.p_b_plus[k] + d.p_rbe[k], 0.0, ess.charge_rate_max * d.u_ess[k],
                            where + " P_B+ + P_RBE");
                bound_check(d.p_b_plus[k], 0.0, kInf, where + " P_B+");
                bound_check(d.p_b_minus[k], 0.0, ess.discharge_rate_max * (1.0 - d.u_ess[k]),
                            where + " P_B-");
                bound_check(d.p_rbe[k], 0.0, sc.rb_avail.at_step(t), where + " P_RBE");
                bound_check(d.soc_b[k], ess.soc_min, ess.soc_max, where + " SoC_B");
                comp_ess.see((d.p_b_plus[k] + d.p_rbe[k]) * d.p_b_minus[k], where);
                integral.see(std::abs(d.u_ess[k] - std::round(d.u_ess[k])), where + " u_B");
                const double prev = t == 1 ? ess.soc_init : d.soc_b[k - 1];
                const double out_k = ess.discharge_model == DischargeModel::Multiplied
                                         ? ess.eta_discharge * dt
                                         : dt / ess.eta_discharge;
                const double expect = (1.0 - ess.self_discharge) * prev +
                                      ess.eta_charge * (d.p_rbe[k] + d.p_b_plus[k]) * dt -
                                      out_k * d.p_b_minus[k];
                ess_rec.see(std::abs(d.soc_b[k] - expect), where);
                if (ess.terminal_soc && t == nt) {
                    bounds.see(std::max(0.0, ess.soc_init - d.soc_b[k]), where + " terminal SoC_B");
                }
            }
        }
        for (int i = 0; i < nev; ++i) {
            const EvSession& ev = model.sessions[static_cast<std::size_t>(i)];
            const auto& p = d.p_ev[static_cast<std::size_t>(i)];
            const auto& soc = d.soc_ev[static_cast<std::size_t>(i)];
            const std::string where = "s=" + std::to_string(sc.index) + " ev=" + std::to_string(ev.id);
            ev_rec.see(std::abs(soc[static_cast<std::size_t>(ev.t_arrival - 1)] - ev.soc_init),
                       where + " arrival");
            for (int t = 1; t <= nt; ++t) {
                const std::size_t k = static_cast<std::size_t>(t - 1);
                if (t < ev.t_arrival || t > ev.t_departure) continue;
                bound_check(p[k], 0.0, ev.ev_class.p_max, where + " t=" + std::to_string(t));
                if (t > ev.t_arrival) {
                    const double expect = soc[k - 1] + ev.ev_class.eta * p[k] * dt;
                    ev_rec.see(std::abs(soc[k] - expect), where + " t=" + std::to_string(t));
                }
            }
            const double dep = d.departure_soc[static_cast<std::size_t>(i)];
            const double th = d.theta[static_cast<std::size_t>(i)];
            departure.see(std::max({0.0, th - dep, dep - ev.e_requested}), where);
            theta_rng.see(std::max({0.0, ev.theta_min - th, th - ev.theta_max}), where);
            tight.see(std::abs(th - dep), where);
        }

        for (int t = 1; t <= nt; ++t) {
            const std::size_t k = static_cast<std::size_t>(t - 1);
            d.energy_cost += (sc.price_buy.at_step(t) * d.p_grid[k] -
                              sc.price_sell.at_step(t) * d.p_sell[k]) * dt;
        }
        for (double th : d.theta) d.theta_sum += th;
        d.objective = model.weights.w_power * d.energy_cost - model.weights.w_theta * d.theta_sum;
        out.objective += sc.probability * d.objective;
        out.expected_cost += sc.probability * d.energy_cost;
        out.expected_theta += sc.probability * d.theta_sum;
        out.scenarios.push_back(std::move(d));
    }

    for (Tracker* tr : {&balance, &peak, &bounds, &ess_rec, &ev_rec, &departure, &theta_rng,
                        &comp_grid, &comp_ess, &integral}) {
        out.checks.push_back(tr->done());
    }
    for (const Check& c : out.checks) {
        if (!c.passed) {
            std::ostringstream os;
            os << "solution fails the independent re-check '" << c.name << "': residual "
               << c.residual << " > " << c.tolerance << " at " << c.where;
            throw InternalConsistencyError(os.str());
        }
    }
    // An optimality property rather than a constraint: reported, not enforced.
    Check t = tight.done();
    if (model.weights.w_theta <= 0.0) {
        t.passed = true;
        t.where = "not applicable (w_theta = 0)";
    }
    out.checks.push_back(t);
    return out;
}

}  // namespace railems
