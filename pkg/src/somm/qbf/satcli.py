"""Stand-alone SAT runner with solver-competition exit codes.

``python -m somm.qbf.satcli FILE`` reads a DIMACS or purely existential
QDIMACS file and exits 10 when satisfiable, 20 when not, and 1 on errors.
It lets the external-solver hook be exercised without a separate binary.
"""

from __future__ import annotations

import sys

from pysat.solvers import Solver

from .qdimacs import QdimacsError, read_qdimacs


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m somm.qbf.satcli FILE", file=sys.stderr)
        return 1
    try:
        with open(args[0]) as fh:
            q = read_qdimacs(fh.read())
    except (OSError, QdimacsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not q.is_propositional():
        print("error: universal quantifiers are not supported", file=sys.stderr)
        return 1
    with Solver(name="minisat22", bootstrap_with=q.clauses) as s:
        sat = s.solve()
    print("s SATISFIABLE" if sat else "s UNSATISFIABLE")
    return 10 if sat else 20


if __name__ == "__main__":
    sys.exit(main())
