"""Prenexing of non-prenex circuits.

A quantifier node reached under both polarities is duplicated first, the
negative copy binding renamed variables, so every quantifier has one effective
kind.  Each quantifier is then placed at the smallest prefix level of its kind
that is not shallower than any quantifier enclosing it (existential levels are
odd, universal levels even).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import AND, EXISTS, FORALL, OR, VAR, Circuit


@dataclass
class Prenex:
    prefix: list  # [(EXISTS | FORALL, [vars...]), ...] outermost first
    matrix: int  # quantifier-free literal

    def blocks(self) -> str:
        return "".join("e" if k == EXISTS else "a" for k, _ in self.prefix)


def _has_quant(c: Circuit, root: int) -> bytearray:
    flags = bytearray(len(c.kind))
    for node in c.reachable(root):
        k = c.kind[node]
        if k in (EXISTS, FORALL):
            flags[node] = 1
        elif k in (AND, OR):
            for a in c.args[node]:
                if flags[abs(a)]:
                    flags[node] = 1
                    break
    return flags


def positive_quantifiers(c: Circuit, root: int, flags: bytearray | None = None) -> int:
    """Rewrite ``root`` so that every quantifier node is reached only positively.

    Negations are pushed through gates that have quantifiers below them;
    quantifier-free sub-circuits keep their negations.  ``flags`` marks nodes
    with a quantifier below them and is extended in place for new nodes.
    """
    if flags is None:
        flags = _has_quant(c, root)
    memo: dict = {}

    def go(lit: int) -> int:
        node = abs(lit)
        if not flags[node]:
            return lit
        key = lit
        if key in memo:
            return memo[key]
        k = c.kind[node]
        pos = lit > 0
        if k in (AND, OR):
            kids = [go(a if pos else -a) for a in c.args[node]]
            is_and = (k == AND) == pos
            res = c.and_(kids) if is_and else c.or_(kids)
        else:
            body = c.args[node][0]
            if pos:
                new_body = go(body)
                res = node if new_body == body else c._quant(k, c.bound[node], new_body)
            else:
                fresh = {v: c.var(c.origin.get(v)) for v in c.bound[node]}
                renamed = c.substitute(body, fresh)
                _mark(c, renamed, flags)
                dual = FORALL if k == EXISTS else EXISTS
                res = c._quant(dual, tuple(fresh[v] for v in c.bound[node]), go(-renamed))
        memo[key] = res
        return res

    return _iterative(go, root)


def _mark(c: Circuit, root: int, flags: bytearray):
    if len(flags) < len(c.kind):
        flags.extend(bytearray(len(c.kind) - len(flags)))
    for node in c.reachable(root):
        k = c.kind[node]
        if k in (EXISTS, FORALL):
            flags[node] = 1
        elif k in (AND, OR) and any(flags[abs(a)] for a in c.args[node]):
            flags[node] = 1


def _iterative(fn, arg):
    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 100_000))
    try:
        return fn(arg)
    finally:
        sys.setrecursionlimit(limit)


def prenex(c: Circuit, root: int) -> Prenex:
    flags = _has_quant(c, root)
    root = positive_quantifiers(c, root, flags)
    # the rewrite may reuse shared nodes that were never flagged
    _mark(c, root, flags)
    # only gates with a quantifier below need rewriting
    order = [n for n in c.reachable(root) if flags[n]]
    ctx: dict = {abs(root): 0}
    level: dict = {}
    for node in reversed(order):
        k = c.kind[node]
        here = ctx.get(node, 0)
        if k in (EXISTS, FORALL):
            want = 1 if k == EXISTS else 0
            lv = here if here % 2 == want else here + 1
            level[node] = lv
            inner = lv
        else:
            inner = here
        for a in c.args[node]:
            a = abs(a)
            if flags[a] and inner > ctx.get(a, -1):
                ctx[a] = inner

    # strip quantifier nodes
    stripped: dict = {}
    for node in order:
        k = c.kind[node]
        if k in (EXISTS, FORALL):
            b = c.args[node][0]
            stripped[node] = stripped.get(abs(b), abs(b)) * (1 if b > 0 else -1)
        elif k in (AND, OR):
            args = c.args[node]
            new = [stripped.get(abs(a), abs(a)) * (1 if a > 0 else -1) for a in args]
            if new != list(args):
                stripped[node] = c.and_(new) if k == AND else c.or_(new)
    matrix = stripped.get(abs(root), abs(root)) * (1 if root > 0 else -1)

    used = {n for n in c.reachable(matrix) if c.kind[n] == VAR}
    by_level: dict = {}
    for node, lv in level.items():
        vs = [v for v in c.bound[node] if v in used]
        if vs:
            by_level.setdefault(lv, []).extend(vs)
    prefix: list = []
    for lv in sorted(by_level):
        kind = EXISTS if lv % 2 else FORALL
        vs = sorted(set(by_level[lv]))
        if prefix and prefix[-1][0] == kind:
            prefix[-1][1].extend(vs)
        else:
            prefix.append((kind, vs))
    bound = {v for _, vs in prefix for v in vs}
    free = sorted(used - bound)
    if free:
        # free variables are read as outermost existentials
        if prefix and prefix[0][0] == EXISTS:
            prefix[0] = (EXISTS, free + prefix[0][1])
        else:
            prefix.insert(0, (EXISTS, free))
    return Prenex(prefix, matrix)
