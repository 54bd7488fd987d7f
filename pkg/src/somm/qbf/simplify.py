"""Verdict-preserving clean-up of translated formulas.

The circuit is rebuilt from the root into a fresh circuit, so gates go through
the simplifying constructors again and unreachable nodes are dropped.
Quantifiers lose the variables their body does not mention.
"""

from __future__ import annotations

from .circuit import AND, CONST, OR, VAR, Circuit
from .translate import QbfFormula


def simplify_circuit(c: Circuit, root: int, keep=()) -> tuple:
    """Copy ``root`` into a new circuit; returns ``(circuit, root, var_map)``.

    Variables listed in ``keep`` are copied even when unused, so witnesses
    can still be reported for them.
    """
    out = Circuit()
    new: dict = {}
    for v in keep:
        new[v] = out.var(c.origin.get(v))
    order = c.reachable(root)
    # a bound variable absent from the whole circuit is absent from its body
    occurring = {n for n in order if c.kind[n] == VAR}
    for node in order:
        k = c.kind[node]
        if k == CONST:
            new[node] = 1
        elif k == VAR:
            if node not in new:
                new[node] = out.var(c.origin.get(node))
        elif k in (AND, OR):
            kids = [new[abs(a)] * (1 if a > 0 else -1) for a in c.args[node]]
            new[node] = out.and_(kids) if k == AND else out.or_(kids)
        else:
            b = c.args[node][0]
            body = new[abs(b)] * (1 if b > 0 else -1)
            vs = [new[v] for v in c.bound[node] if v in occurring]
            new[node] = out._quant(k, vs, body)
    res = new[abs(root)] * (1 if root > 0 else -1)
    var_map = {v: n for v, n in new.items() if c.kind[v] == VAR}
    return out, res, var_map


def simplify(q: QbfFormula) -> QbfFormula:
    keep = [v for _, lits in q.blocks.values() for v in lits]
    c, root, var_map = simplify_circuit(q.circuit, q.root, keep)
    blocks = {name: (arity, tuple(var_map[v] for v in lits)) for name, (arity, lits) in q.blocks.items()}
    return QbfFormula(c, root, q.universe_size, blocks)
