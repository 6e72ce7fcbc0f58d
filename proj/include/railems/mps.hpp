#pragma once
// MPS export and import.
//
// Layout follows fixed-format MPS (section keywords in column 1, data lines
// indented, MARKER INTORG/INTEND around binary columns, objective row "OBJ").
// Names never contain blanks, so free-format readers see the same file.
// Numbers are written in shortest round-trip form, which can be wider than
// the 12 characters of the strict fixed layout.
//
// Column and row names come from the model (the EMS builder names columns
// after their VarKey, see var_name). If any name is missing, duplicated or
// contains blanks, all names of that kind fall back to C<j> / R<i>.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "railems/milp.hpp"

namespace railems {

void write_mps(const CanonicalMilp& model, std::ostream& out, const std::string& name = "RAILEMS");
/// Throws Error on I/O failure.
void export_mps(const CanonicalMilp& model, const std::filesystem::path& path,
                const std::string& name = "RAILEMS");

/// Reads models in the subset written above (ROWS, COLUMNS with integer
/// markers, RHS, BOUNDS; minimization). Integer columns must have bounds
/// within [0, 1]. Throws ParseError.
CanonicalMilp parse_mps(std::istream& in);
CanonicalMilp import_mps(const std::filesystem::path& path);

/// Result of an external solver run.
struct ExternalResult {
    bool ok = false;
    std::string status;  // as reported by the solver
    double objective = 0.0;
    std::vector<double> x;  // in model column order; empty if not reported
    std::string log;        // command line and failure details
};

/// Exports the model into `workdir`, runs `command` through the shell with
/// "{mps}" and "{solution}" replaced by file paths, and reads the solution
/// file: a line "status <word>", a line "objective <value>", then one
/// "<column name> <value>" line per column (tools/highs_solve.py writes this).
ExternalResult solve_external(const CanonicalMilp& model, const std::string& command,
                              const std::filesystem::path& workdir);

}  // namespace railems
