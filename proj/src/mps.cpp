#include "railems/mps.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "railems/error.hpp"

namespace railems {

namespace {

std::string number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool usable(const std::string& n) {
    if (n.empty()) return false;
    for (char c : n) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
    }
    return n != "OBJ" && n != "RHS" && n != "BND" && n != "MARKER";
}

template <class NameOf>
std::vector<std::string> pick_names(int count, NameOf name_of, char prefix) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(count));
    std::unordered_set<std::string> seen;
    bool ok = true;
    for (int k = 0; k < count; ++k) {
        std::string n = name_of(k);
        if (!usable(n) || !seen.insert(n).second) ok = false;
        names.push_back(std::move(n));
    }
    if (!ok) {
        for (int k = 0; k < count; ++k) names[static_cast<std::size_t>(k)] = prefix + std::to_string(k);
    }
    return names;
}

// Fixed-format field placement: type at 2, name1 at 5, name2 at 15,
// value at 25, name3 at 40, value at 50 (1-based).
std::string field_line(const std::string& type, const std::string& n1, const std::string& n2,
                       const std::string& v2, const std::string& n3 = {},
                       const std::string& v3 = {}) {
    std::string s = " " + type;
    const auto pad_to = [&](std::size_t col) {
        if (s.size() < col) s.append(col - s.size(), ' ');
        else s.push_back(' ');
    };
    pad_to(4);
    s += n1;
    if (!n2.empty()) {
        pad_to(14);
        s += n2;
    }
    if (!v2.empty()) {
        pad_to(24);
        s += v2;
    }
    if (!n3.empty()) {
        pad_to(39);
        s += n3;
        pad_to(49);
        s += v3;
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

constexpr const char* kIntOrg = "    MARKER                 'MARKER'                 'INTORG'";
constexpr const char* kIntEnd = "    MARKER                 'MARKER'                 'INTEND'";

double parse_number(const std::string& tok, int line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && tok[0] == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        // from_chars rejects "inf"/"Infinity" spellings used by some writers.
        std::string lower;
        for (char c : tok) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "+infinity" ||
            lower == "1e+30" || lower == "1e30") {
            return kInf;
        }
        if (lower == "-inf" || lower == "-infinity") return -kInf;
        throw ParseError("MPS line " + std::to_string(line) + ": bad number '" + tok + "'");
    }
    return v;
}

}  // namespace

void write_mps(const CanonicalMilp& model, std::ostream& out, const std::string& name) {
    const auto cols = pick_names(model.num_columns(), [&](int j) { return model.column(j).name; }, 'C');
    const auto rows = pick_names(model.num_rows(), [&](int i) { return model.row(i).name; }, 'R');

    // Coefficients grouped by column, rows in ascending order.
    std::vector<std::vector<std::pair<int, double>>> by_col(static_cast<std::size_t>(model.num_columns()));
    for (const Triplet& t : model.triplets()) {
        by_col[static_cast<std::size_t>(t.col)].emplace_back(t.row, t.value);
    }
    for (auto& v : by_col) std::stable_sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });

    out << "NAME          " << name << "\n";
    out << "ROWS\n";
    out << " N  OBJ\n";
    for (int i = 0; i < model.num_rows(); ++i) {
        const char* type = "E";
        switch (model.row(i).sense) {
            case RowSense::LessEqual: type = "L"; break;
            case RowSense::GreaterEqual: type = "G"; break;
            case RowSense::Equal: type = "E"; break;
        }
        out << " " << type << "  " << rows[static_cast<std::size_t>(i)] << "\n";
    }
    out << "COLUMNS\n";
    bool in_int = false;
    for (int j = 0; j < model.num_columns(); ++j) {
        const Column& c = model.column(j);
        if (c.binary != in_int) {
            out << (c.binary ? kIntOrg : kIntEnd) << "\n";
            in_int = c.binary;
        }
        const std::string& cn = cols[static_cast<std::size_t>(j)];
        std::vector<std::pair<std::string, std::string>> entries;
        if (c.cost != 0.0 || by_col[static_cast<std::size_t>(j)].empty()) {
            entries.emplace_back("OBJ", number(c.cost));
        }
        for (const auto& [r, v] : by_col[static_cast<std::size_t>(j)]) {
            entries.emplace_back(rows[static_cast<std::size_t>(r)], number(v));
        }
        for (const auto& [rn, v] : entries) out << field_line("", cn, rn, v) << "\n";
    }
    if (in_int) out << kIntEnd << "\n";
    out << "RHS\n";
    for (int i = 0; i < model.num_rows(); ++i) {
        if (model.row(i).rhs != 0.0) {
            out << field_line("", "RHS", rows[static_cast<std::size_t>(i)], number(model.row(i).rhs)) << "\n";
        }
    }
    out << "BOUNDS\n";
    for (int j = 0; j < model.num_columns(); ++j) {
        const Column& c = model.column(j);
        const std::string& cn = cols[static_cast<std::size_t>(j)];
        const auto bound = [&](const char* type, double v) {
            out << field_line(type, "BND", cn, number(v)) << "\n";
        };
        if (c.lower == c.upper) {
            bound("FX", c.lower);
            continue;
        }
        if (c.lower == -kInf && c.upper == kInf) {
            out << field_line("FR", "BND", cn, "") << "\n";
            continue;
        }
        if (c.lower == -kInf) {
            out << field_line("MI", "BND", cn, "") << "\n";
        } else if (c.lower != 0.0 || c.binary || c.upper < 0.0) {
            bound("LO", c.lower);
        }
        if (c.upper != kInf) bound("UP", c.upper);
    }
    out << "ENDATA\n";
}

void export_mps(const CanonicalMilp& model, const std::filesystem::path& path,
                const std::string& name) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    write_mps(model, f, name);
    f.close();
    if (!f) throw Error("failed writing " + path.string());
}

CanonicalMilp parse_mps(std::istream& in) {
    enum class Section { None, Name, Rows, Columns, Rhs, Bounds, Done };
    Section section = Section::None;
    std::string objective_row;
    std::unordered_map<std::string, int> row_of;
    std::unordered_map<std::string, int> col_of;
    std::map<std::pair<int, int>, double> seen_coef;

    struct ColData {
        std::string name;
        double cost = 0.0;
        double lower = 0.0;
        double upper = kInf;
        bool integer = false;
        bool upper_set = false;
        bool lower_set = false;
    };
    std::vector<ColData> cols;
    std::vector<Row> rows;
    std::vector<Triplet> trips;
    bool in_int = false;

    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& what) {
        throw ParseError("MPS line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& kw = tok[0];
            if (kw == "NAME") section = Section::Name;
            else if (kw == "ROWS") section = Section::Rows;
            else if (kw == "COLUMNS") section = Section::Columns;
            else if (kw == "RHS") section = Section::Rhs;
            else if (kw == "BOUNDS") section = Section::Bounds;
            else if (kw == "ENDATA") { section = Section::Done; break; }
            else if (kw == "OBJSENSE") {
                if (tok.size() > 1 && tok[1] != "MIN" && tok[1] != "MINIMIZE") fail("only minimization is supported");
            } else if (kw == "MIN" || kw == "MINIMIZE") {
            } else fail("unsupported section '" + kw + "'");
            continue;
        }

        switch (section) {
            case Section::Rows: {
                if (tok.size() != 2) fail("expected '<type> <name>'");
                const std::string& type = tok[0];
                if (type == "N") {
                    if (objective_row.empty()) objective_row = tok[1];
                    continue;
                }
                RowSense sense;
                if (type == "L") sense = RowSense::LessEqual;
                else if (type == "G") sense = RowSense::GreaterEqual;
                else if (type == "E") sense = RowSense::Equal;
                else fail("unknown row type '" + type + "'");
                if (!row_of.emplace(tok[1], static_cast<int>(rows.size())).second) fail("duplicate row " + tok[1]);
                rows.push_back(Row{sense, 0.0, tok[1]});
                break;
            }
            case Section::Columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                    if (tok[2] == "'INTORG'") in_int = true;
                    else if (tok[2] == "'INTEND'") in_int = false;
                    else fail("unknown marker " + tok[2]);
                    continue;
                }
                if (tok.size() != 3 && tok.size() != 5) fail("expected column entries in pairs");
                auto it = col_of.find(tok[0]);
                if (it == col_of.end()) {
                    it = col_of.emplace(tok[0], static_cast<int>(cols.size())).first;
                    cols.push_back(ColData{tok[0]});
                    cols.back().integer = in_int;
                    if (in_int) cols.back().upper = 1.0;
                }
                const int j = it->second;
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    const double v = parse_number(tok[k + 1], lineno);
                    if (tok[k] == objective_row) {
                        cols[static_cast<std::size_t>(j)].cost += v;
                        continue;
                    }
                    auto r = row_of.find(tok[k]);
                    if (r == row_of.end()) fail("unknown row " + tok[k]);
                    if (!seen_coef.emplace(std::make_pair(r->second, j), v).second) {
                        fail("duplicate coefficient for " + tok[0] + " in " + tok[k]);
                    }
                    if (v != 0.0) trips.push_back(Triplet{r->second, j, v});
                }
                break;
            }
            case Section::Rhs: {
                if (tok.size() != 3 && tok.size() != 5) fail("expected rhs entries in pairs");
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    const double v = parse_number(tok[k + 1], lineno);
                    if (tok[k] == objective_row) continue;  // objective constant, not represented
                    auto r = row_of.find(tok[k]);
                    if (r == row_of.end()) fail("unknown row " + tok[k]);
                    rows[static_cast<std::size_t>(r->second)].rhs = v;
                }
                break;
            }
            case Section::Bounds: {
                if (tok.size() < 3) fail("short bound line");
                const std::string& type = tok[0];
                auto it = col_of.find(tok[2]);
                if (it == col_of.end()) fail("bound for unknown column " + tok[2]);
                ColData& c = cols[static_cast<std::size_t>(it->second)];
                const bool needs_value = type != "FR" && type != "MI" && type != "PL" && type != "BV";
                if (needs_value && tok.size() < 4) fail("bound " + type + " needs a value");
                const double v = needs_value ? parse_number(tok[3], lineno) : 0.0;
                if (type == "UP") {
                    c.upper = v;
                    c.upper_set = true;
                    if (v < 0.0 && !c.lower_set && c.lower == 0.0) c.lower = -kInf;
                } else if (type == "LO") {
                    c.lower = v;
                    c.lower_set = true;
                } else if (type == "FX") {
                    c.lower = c.upper = v;
                    c.lower_set = c.upper_set = true;
                } else if (type == "FR") {
                    c.lower = -kInf;
                    c.upper = kInf;
                } else if (type == "MI") {
                    c.lower = -kInf;
                    c.lower_set = true;
                } else if (type == "PL") {
                    c.upper = kInf;
                } else if (type == "BV") {
                    c.integer = true;
                    c.lower = 0.0;
                    c.upper = 1.0;
                } else if (type == "LI" || type == "UI") {
                    c.integer = true;
                    (type == "LI" ? c.lower : c.upper) = v;
                } else {
                    fail("unsupported bound type " + type);
                }
                break;
            }
            case Section::Name:
            case Section::None:
            case Section::Done:
                fail("data outside a section");
        }
    }
    if (section != Section::Done) throw ParseError("MPS input ends without ENDATA");

    CanonicalMilp model;
    for (const ColData& c : cols) {
        if (c.integer && (c.lower < 0.0 || c.upper > 1.0)) {
            throw ParseError("MPS column " + c.name + " is a general integer; only binaries are supported");
        }
        model.add_column(c.lower, c.upper, c.cost, c.integer, c.name);
    }
    for (const Row& r : rows) model.add_row(r.sense, r.rhs, r.name);
    for (const Triplet& t : trips) model.add_coefficient(t.row, t.col, t.value);
    return model;
}

CanonicalMilp import_mps(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path.string());
    return parse_mps(f);
}

ExternalResult solve_external(const CanonicalMilp& model, const std::string& command,
                              const std::filesystem::path& workdir) {
    ExternalResult res;
    std::filesystem::create_directories(workdir);
    const auto mps = workdir / "model.mps";
    const auto sol = workdir / "model.sol";
    std::filesystem::remove(sol);
    export_mps(model, mps);

    std::string cmd = command;
    const auto replace = [&](const std::string& key, const std::string& value) {
        for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size())) {
            cmd.replace(p, key.size(), value);
        }
    };
    replace("{mps}", "'" + mps.string() + "'");
    replace("{solution}", "'" + sol.string() + "'");
    res.log = cmd;
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        res.log += "\nexit status " + std::to_string(rc);
        return res;
    }
    std::ifstream f(sol);
    if (!f) {
        res.log += "\nno solution file written";
        return res;
    }
    const auto names = pick_names(model.num_columns(), [&](int j) { return model.column(j).name; }, 'C');
    std::unordered_map<std::string, int> col_of;
    for (int j = 0; j < model.num_columns(); ++j) col_of.emplace(names[static_cast<std::size_t>(j)], j);
    res.x.assign(static_cast<std::size_t>(model.num_columns()), 0.0);
    std::size_t filled = 0;
    bool have_objective = false;
    for (std::string key, value; f >> key >> value;) {
        if (key == "status") {
            res.status = value;
        } else if (key == "objective") {
            res.objective = parse_number(value, 0);
            have_objective = true;
        } else if (auto it = col_of.find(key); it != col_of.end()) {
            res.x[static_cast<std::size_t>(it->second)] = parse_number(value, 0);
            ++filled;
        }
    }
    if (filled != res.x.size()) res.x.clear();
    res.ok = have_objective && (res.status == "optimal" || res.status == "Optimal");
    return res;
}

}  // namespace railems
