"""QDIMACS export: prenex, then Tseitin clausification.

Every gate ``g`` of the matrix gets a fresh variable with clauses stating
``g <-> gate``, plus a unit clause for the output.  The gate variables join
the innermost existential block, which is created when the prefix ends with
a universal block.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .circuit import AND, EXISTS, OR, TRUE, VAR, Circuit
from .prenex import prenex as to_prenex


class QdimacsError(ValueError):
    pass


@dataclass
class Qdimacs:
    num_vars: int
    prefix: list  # [("e" | "a", [vars])]
    clauses: list

    def is_propositional(self) -> bool:
        return all(q == "e" for q, _ in self.prefix)

    def to_circuit(self) -> tuple:
        c = Circuit()
        var = {}
        for i in range(1, self.num_vars + 1):
            var[i] = c.var()

        def lit(x):
            return var[abs(x)] if x > 0 else -var[abs(x)]

        root = c.and_([c.or_([lit(x) for x in cl]) for cl in self.clauses])
        for q, vs in reversed(self.prefix):
            vs = [var[v] for v in vs]
            root = c.exists(vs, root) if q == "e" else c.forall(vs, root)
        return c, root


def clausify(c: Circuit, root: int) -> Qdimacs:
    p = to_prenex(c, root)
    num: dict = {}
    nxt = 1
    prefix = []
    for kind, vs in p.prefix:
        ids = []
        for v in vs:
            num[v] = nxt
            ids.append(nxt)
            nxt += 1
        prefix.append(("e" if kind == EXISTS else "a", ids))
    matrix = p.matrix
    clauses: list = []
    aux: list = []

    def lit(x):
        return num[abs(x)] if x > 0 else -num[abs(x)]

    if abs(matrix) == TRUE:
        if matrix != TRUE:
            # false: a fresh variable and its two units
            num[TRUE] = nxt
            aux.append(nxt)
            nxt += 1
            clauses += [[num[TRUE]], [-num[TRUE]]]
    else:
        for node in c.reachable(matrix):
            k = c.kind[node]
            if k == VAR:
                if node not in num:
                    raise QdimacsError("unquantified variable after prenexing")
                continue
            g = num[node] = nxt
            aux.append(g)
            nxt += 1
            args = [lit(a) for a in c.args[node]]
            if k == AND:
                clauses.extend([-g, a] for a in args)
                clauses.append([g, *[-a for a in args]])
            elif k == OR:
                clauses.extend([g, -a] for a in args)
                clauses.append([-g, *args])
            else:
                raise QdimacsError("quantifier left in the matrix")
        clauses.append([lit(matrix)])
    if aux:
        if prefix and prefix[-1][0] == "e":
            prefix[-1] = ("e", prefix[-1][1] + aux)
        else:
            prefix.append(("e", aux))
    return Qdimacs(nxt - 1, prefix, clauses)


def write_qdimacs(c: Circuit, root: int) -> str:
    return dump_qdimacs(clausify(c, root))


def dump_qdimacs(q: Qdimacs) -> str:
    out = io.StringIO()
    out.write(f"p cnf {q.num_vars} {len(q.clauses)}\n")
    for kind, vs in q.prefix:
        if vs:
            out.write(f"{kind} {' '.join(map(str, vs))} 0\n")
    for cl in q.clauses:
        out.write(" ".join(map(str, cl)) + " 0\n")
    return out.getvalue()


def read_qdimacs(text: str) -> Qdimacs:
    header = None
    prefix: list = []
    clauses: list = []
    pending: list = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or header is not None:
                raise QdimacsError(f"line {no}: bad problem line {raw!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise QdimacsError(f"line {no}: data before the problem line")
        toks = line.split()
        if toks[0] in ("e", "a"):
            if clauses or pending:
                raise QdimacsError(f"line {no}: quantifier block after clauses")
            if toks[-1] != "0":
                raise QdimacsError(f"line {no}: quantifier block must end with 0")
            prefix.append((toks[0], [int(t) for t in toks[1:-1]]))
            continue
        for t in toks:
            x = int(t)
            if x == 0:
                clauses.append(pending)
                pending = []
            else:
                if abs(x) > header[0]:
                    raise QdimacsError(f"line {no}: literal {x} exceeds declared {header[0]} variables")
                pending.append(x)
    if header is None:
        raise QdimacsError("missing problem line")
    if pending:
        raise QdimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise QdimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Qdimacs(header[0], prefix, clauses)


def solve_qdimacs(q: Qdimacs, timeout: float | None = None) -> bool:
    """Decide a QDIMACS instance with a SAT solver when propositional, else the embedded solver."""
    if q.is_propositional():
        from pysat.solvers import Solver

        with Solver(name="glucose4", bootstrap_with=q.clauses) as s:
            return s.solve()
    from .solver import solve_circuit

    c, root = q.to_circuit()
    return solve_circuit(c, root, timeout=timeout).value
