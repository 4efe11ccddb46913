"""Run the embedded solver as a DIMACS command-line solver.

    python -m satdisco.sat.dimacs_main input.cnf [result.txt]

Writes a MiniSat-style result (``SAT`` + model line, or ``UNSAT``) and exits
10 / 20 like MiniSat does.
"""
import sys

from satdisco.cnf import read_dimacs
from satdisco.sat.cdcl import CDCLSolver


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    with open(argv[0]) as fh:
        nvars, clauses = read_dimacs(fh.read())
    solver = CDCLSolver()
    solver.ensure_vars(nvars)
    solver.add_clauses(clauses)
    if solver.solve():
        lits = [v if solver.model[v] else -v for v in range(1, nvars + 1)]
        text = "SAT\n" + " ".join(map(str, lits + [0])) + "\n"
        code = 10
    else:
        text, code = "UNSAT\n", 20
    if len(argv) > 1:
        with open(argv[1], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
