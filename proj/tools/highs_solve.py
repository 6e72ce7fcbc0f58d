#!/usr/bin/env python3
"""Solve an MPS file with HiGHS and write the solution in the format read by
railems' external-solver mode.

    highs_solve.py model.mps model.sol
"""
import sys

import highspy


def main(mps_path, sol_path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    if h.readModel(mps_path) != highspy.HighsStatus.kOk:
        print(f"cannot read {mps_path}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    lp = h.getLp()
    sol = h.getSolution()
    with open(sol_path, "w") as f:
        word = "optimal" if status == highspy.HighsModelStatus.kOptimal else "not_optimal"
        f.write(f"status {word}\n")
        f.write(f"objective {h.getInfo().objective_function_value!r}\n")
        for name, value in zip(lp.col_names_, sol.col_value):
            f.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        sys.exit(2)
    sys.exit(main(sys.argv[1], sys.argv[2]))
