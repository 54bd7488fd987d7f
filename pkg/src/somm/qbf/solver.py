"""Embedded QBF evaluation for non-prenex circuits.

Two strategies share one interface:

``expand``
    Recursive quantifier expansion: ``forall v. f`` is ``f[v:=0] and f[v:=1]``
    and dually for ``exists``.  Results are memoized per node on the values of
    the node's free variables and evaluation stops at the first deciding child.
    Exponential in the width of every quantifier block, so only usable on small
    instances.

``cegar``
    Lazy expansion on top of a SAT solver.  Each existential level is a SAT
    instance; a universal sub-circuit ``forall U. body`` reached positively is
    abstracted by a placeholder literal and expanded one instance ``body[U:=u]``
    at a time, where ``u`` is a counterexample found by a nested level solving
    ``exists U. not body``.  The finished expansion is the same conjunction
    ``expand`` builds, restricted to the instances that matter.
"""

from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass, field

import psutil
from pysat.solvers import Solver

from .circuit import AND, CONST, EXISTS, FORALL, OR, TRUE, VAR, Circuit

DEFAULT_TIMEOUT = 30 * 60.0
DEFAULT_MEM_CAP_MB = 4096
SAT_BACKEND = "glucose4"  # supports asynchronous interruption
EXPAND_BLOCK_LIMIT = 22  # widest quantifier block ``expand`` will enumerate
STRATEGIES = ("cegar", "expand", "expand-nomemo")


class SolverLimit(RuntimeError):
    """A resource limit stopped the solver before it reached a verdict."""


class SolverTimeout(SolverLimit):
    pass


class MemoryCapExceeded(SolverLimit):
    pass


class ExpansionTooLarge(SolverLimit):
    pass


@dataclass
class Verdict:
    value: bool
    # values of the outermost existential variables when ``value`` is true
    witness: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)


class Limits:
    def __init__(self, timeout: float | None = DEFAULT_TIMEOUT, mem_cap_mb: float | None = DEFAULT_MEM_CAP_MB):
        if timeout is not None and timeout <= 0:
            raise ValueError("timeout must be positive")
        if mem_cap_mb is not None and mem_cap_mb <= 0:
            raise ValueError("memory cap must be positive")
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.timeout = timeout
        self.mem_cap = None if mem_cap_mb is None else int(mem_cap_mb * 2**20)
        self._proc = psutil.Process()
        self._ticks = 0

    def remaining(self) -> float | None:
        return None if self.deadline is None else self.deadline - time.monotonic()

    def check(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeout(f"no verdict within {self.timeout:g} s")
        if self.mem_cap is not None:
            rss = self._proc.memory_info().rss
            if rss > self.mem_cap:
                raise MemoryCapExceeded(f"resident memory {rss >> 20} MiB exceeds cap {self.mem_cap >> 20} MiB")

    def tick(self, every: int = 4096):
        self._ticks += 1
        if self._ticks % every == 0:
            self.check()


# -- recursive expansion ------------------------------------------------------------


def evaluate(
    c: Circuit,
    root: int,
    assignment: dict | None = None,
    memo: bool = True,
    limits: Limits | None = None,
) -> bool:
    """Truth value of ``root`` under ``assignment`` (missing free variables read as false)."""
    limits = limits or Limits(None, None)
    nodes = c.reachable(root)
    support: dict = {}
    for node in nodes:
        k = c.kind[node]
        if k == VAR:
            support[node] = (node,)
        elif k == CONST:
            support[node] = ()
        else:
            s = set()
            for a in c.args[node]:
                s.update(support[abs(a)])
            if k in (EXISTS, FORALL):
                s.difference_update(c.bound[node])
                if len(c.bound[node]) > EXPAND_BLOCK_LIMIT:
                    raise ExpansionTooLarge(
                        f"quantifier block of {len(c.bound[node])} variables is too wide to expand"
                    )
            support[node] = tuple(sorted(s))
    env = dict(assignment or {})
    cache: dict = {}

    def ev(lit: int) -> bool:
        node = abs(lit)
        k = c.kind[node]
        if k == VAR:
            val = env.get(node, False)
        elif k == CONST:
            val = True
        else:
            key = None
            if memo:
                key = (node, tuple([env.get(v, False) for v in support[node]]))
                hit = cache.get(key)
                if hit is not None:
                    return hit if lit > 0 else not hit
            limits.tick()
            if k == AND:
                val = all(ev(a) for a in c.args[node])
            elif k == OR:
                val = any(ev(a) for a in c.args[node])
            else:
                val = _expand_quant(node, k)
            if key is not None:
                cache[key] = val
        return val if lit > 0 else not val

    def _expand_quant(node, k) -> bool:
        vs = c.bound[node]
        body = c.args[node][0]
        saved = [env.get(v) for v in vs]
        want = k == EXISTS  # exists stops at the first true instance
        result = not want
        for bits in range(1 << len(vs)):
            for i, v in enumerate(vs):
                env[v] = bool(bits >> i & 1)
            if ev(body) == want:
                result = want
                break
        for v, old in zip(vs, saved):
            if old is None:
                env.pop(v, None)
            else:
                env[v] = old
        return result

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 100_000))
    try:
        return ev(root)
    finally:
        sys.setrecursionlimit(old_limit)


# -- counterexample-guided expansion --------------------------------------------------


class _Context:
    """Variable instantiation in force for one expansion instance."""

    __slots__ = ("parent", "own_map", "own", "memo", "children")

    def __init__(self, parent, own_map: dict):
        self.parent = parent
        self.own_map = own_map
        self.own = frozenset(own_map)
        self.memo: dict = {}  # signed circuit literal -> SAT literal
        self.children: dict = {}


class _Level:
    """One existential level: a SAT instance plus abstracted universal sub-circuits.

    A universal sub-circuit is never copied.  Each instance ``body[U:=u]`` is
    encoded under a context mapping ``U`` to constants and renaming the
    existential variables below it, and every abstracted sub-circuit keeps one
    nested level, shared by all contexts, that receives its free-variable
    values as assumptions.
    """

    def __init__(self, c: Circuit, lit: int, limits: Limits, counters: dict):
        self.c = c
        self.limits = limits
        self.counters = counters
        self.sat = Solver(name=SAT_BACKEND)
        self.top = 0
        self.var_of: dict = {}  # circuit variable -> SAT variable, outside every instance
        self.root = _Context(None, {})
        # SAT literal -> (effective-universal circuit literal, context)
        self.placeholders: dict = {}
        self.children: dict = {}
        self.free_of: dict = {}
        self.seen_cex: set = set()
        self.true_lit = self._new()
        self.sat.add_clause([self.true_lit])
        self.sat.add_clause([self.encode(lit, self.root)])
        counters["levels"] = counters.get("levels", 0) + 1

    def close(self):
        for child in self.children.values():
            child.close()
        self.sat.delete()

    def _new(self) -> int:
        self.top += 1
        return self.top

    def lookup(self, var: int, ctx: _Context) -> int:
        while ctx.parent is not None:
            hit = ctx.own_map.get(var)
            if hit is not None:
                return hit
            ctx = ctx.parent
        v = self.var_of.get(var)
        if v is None:
            v = self.var_of[var] = self._new()
        return v

    def _resolve(self, node: int, ctx: _Context) -> _Context:
        # the outermost context that gives ``node`` the same meaning
        if ctx.parent is None:
            return ctx
        fv = self.c.support(node)
        while ctx.parent is not None and ctx.own.isdisjoint(fv):
            ctx = ctx.parent
        return ctx

    def encode(self, root: int, ctx: _Context) -> int:
        """SAT literal that implies ``root`` under ``ctx`` (one-directional, polarity-aware Tseitin)."""
        c = self.c
        tl = self.true_lit
        add = self.sat.add_clause
        resolve = self._resolve
        start = resolve(abs(root), ctx)
        stack = [(root, start, False)]
        while stack:
            lit, cx, ready = stack.pop()
            memo = cx.memo
            if lit in memo:
                continue
            node = abs(lit)
            pos = lit > 0
            k = c.kind[node]
            if k == CONST:
                memo[lit] = tl if pos else -tl
                continue
            if k == VAR:
                v = self.lookup(node, cx)
                memo[lit] = v if pos else -v
                continue
            if k in (EXISTS, FORALL):
                if (k == FORALL) == pos:
                    p = self._new()
                    self.placeholders[p] = (lit, cx)
                    memo[lit] = p
                    continue
                inner = cx.children.get(node)
                if inner is None:
                    # fresh witnesses for this instance; the root keeps the originals
                    if cx.parent is None:
                        inner = cx
                    else:
                        inner = _Context(cx, {v: self._new() for v in c.bound[node]})
                    cx.children[node] = inner
                body = c.args[node][0]
                body = body if pos else -body
                bx = resolve(abs(body), inner)
                if body in bx.memo:
                    memo[lit] = bx.memo[body]
                else:
                    stack.append((lit, cx, True))
                    stack.append((body, bx, False))
                continue
            kids = c.args[node] if pos else [-a for a in c.args[node]]
            kid_ctx = [resolve(abs(a), cx) for a in kids]
            if not ready:
                missing = [(a, kx, False) for a, kx in zip(kids, kid_ctx) if a not in kx.memo]
                if missing:
                    stack.append((lit, cx, True))
                    stack.extend(missing)
                    continue
            sub = [kx.memo[a] for a, kx in zip(kids, kid_ctx)]
            if (k == AND) == pos:
                sub = [s for s in sub if s != tl]
                if -tl in sub:
                    memo[lit] = -tl
                elif not sub:
                    memo[lit] = tl
                elif len(sub) == 1:
                    memo[lit] = sub[0]
                else:
                    t = self._new()
                    for s in sub:
                        add([-t, s])
                    memo[lit] = t
            else:
                sub = [s for s in sub if s != -tl]
                if tl in sub:
                    memo[lit] = tl
                elif not sub:
                    memo[lit] = -tl
                elif len(sub) == 1:
                    memo[lit] = sub[0]
                else:
                    t = self._new()
                    add([-t, *sub])
                    memo[lit] = t
            self.limits.tick()
        return start.memo[root]

    def value(self, model: set, node: int, assumed: dict) -> bool:
        if node in assumed:
            return assumed[node]
        v = self.var_of.get(node)
        return v is not None and v in model

    def _value_in(self, model: set, var: int, ctx: _Context, assumed: dict) -> bool:
        while ctx.parent is not None:
            s = ctx.own_map.get(var)
            if s is not None:
                return s in model if s > 0 else -s not in model
            ctx = ctx.parent
        return self.value(model, var, assumed)

    def solve(self, assumed: dict):
        """Return the SAT model (set of true literals) if the level is true under ``assumed``."""
        while True:
            self.limits.check()
            assumptions = [
                self.var_of[v] if val else -self.var_of[v] for v, val in assumed.items() if v in self.var_of
            ]
            if not self._sat_solve(assumptions):
                return None
            model = {l for l in self.sat.get_model() if l > 0}
            refined = False
            pending = False
            for p, (ulit, cx) in list(self.placeholders.items()):
                if p not in model:
                    continue
                cex = self._counterexample(ulit, cx, model, assumed)
                if cex is None:
                    continue
                pending = True
                key = (p, cex)
                if key in self.seen_cex:
                    continue
                self.seen_cex.add(key)
                self._refine(p, ulit, cx, cex)
                refined = True
            if not refined:
                if pending:
                    raise RuntimeError("refinement made no progress")
                return model

    def _sat_solve(self, assumptions) -> bool:
        self.counters["sat_calls"] = self.counters.get("sat_calls", 0) + 1
        remaining = self.limits.remaining()
        if remaining is None:
            return self.sat.solve(assumptions=assumptions)
        if remaining <= 0:
            self.limits.check()
        timer = threading.Timer(remaining, self.sat.interrupt)
        timer.daemon = True
        timer.start()
        try:
            res = self.sat.solve_limited(assumptions=assumptions, expect_interrupt=True)
        finally:
            timer.cancel()
        if res is None:
            self.sat.clear_interrupt()
            self.limits.check()
            raise SolverTimeout("SAT call interrupted")
        return res

    def _counterexample(self, ulit: int, cx: _Context, model: set, assumed: dict):
        c = self.c
        node = abs(ulit)
        free = self.free_of.get(node)
        if free is None:
            free = self.free_of[node] = tuple(sorted(c.support(node)))
        child = self.children.get(ulit)
        if child is None:
            child = self.children[ulit] = _Level(c, -ulit, self.limits, self.counters)
        outer = {v: self._value_in(model, v, cx, assumed) for v in free}
        cmodel = child.solve(outer)
        if cmodel is None:
            return None
        return tuple(child.value(cmodel, v, {}) for v in c.bound[node])

    def _refine(self, p: int, ulit: int, cx: _Context, cex: tuple):
        c = self.c
        node = abs(ulit)
        body = c.args[node][0]
        tl = self.true_lit
        inst = _Context(cx, {v: (tl if b else -tl) for v, b in zip(c.bound[node], cex)})
        self.sat.add_clause([-p, self.encode(body if ulit > 0 else -body, inst)])
        self.counters["refinements"] = self.counters.get("refinements", 0) + 1


def _solve_cegar(c: Circuit, root: int, limits: Limits, witness_vars) -> Verdict:
    counters: dict = {}
    level = _Level(c, root, limits, counters)
    try:
        model = level.solve({})
        if model is None:
            return Verdict(False, {}, counters)
        witness = {v: level.value(model, v, {}) for v in witness_vars}
        return Verdict(True, witness, counters)
    finally:
        level.close()


def _outer_exists(c: Circuit, root: int) -> list:
    """Variables of existential quantifiers reached from ``root`` through and/or only, plus free ones."""
    out = list(sorted(c.free_vars(root)))
    stack, seen = [root], set()
    while stack:
        lit = stack.pop()
        if lit in seen:
            continue
        seen.add(lit)
        node = abs(lit)
        k = c.kind[node]
        if k in (AND, OR):
            stack.extend(a if lit > 0 else -a for a in c.args[node])
        elif k in (EXISTS, FORALL) and (k == EXISTS) == (lit > 0):
            out.extend(c.bound[node])
            body = c.args[node][0]
            stack.append(body if lit > 0 else -body)
    return out


def solve_circuit(
    c: Circuit,
    root: int,
    strategy: str = "cegar",
    timeout: float | None = DEFAULT_TIMEOUT,
    mem_cap_mb: float | None = DEFAULT_MEM_CAP_MB,
    witness_vars=None,
) -> Verdict:
    """Decide a closed circuit; free variables are read existentially."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    limits = Limits(timeout, mem_cap_mb)
    if witness_vars is None:
        witness_vars = _outer_exists(c, root)
    witness_vars = list(witness_vars)
    started = time.monotonic()
    if abs(root) == TRUE:
        verdict = Verdict(root == TRUE, {v: False for v in witness_vars} if root == TRUE else {})
    elif strategy == "cegar":
        verdict = _solve_cegar(c, root, limits, witness_vars)
    else:
        memo = strategy == "expand"
        opened = open_outer_exists(c, root)
        free = sorted(c.free_vars(opened))
        value = evaluate(c, c.exists(free, opened), memo=memo, limits=limits)
        witness = _expand_witness(c, opened, witness_vars, memo, limits) if value else {}
        verdict = Verdict(value, witness)
    verdict.stats["seconds"] = time.monotonic() - started
    return verdict


def open_outer_exists(c: Circuit, root: int) -> int:
    """Drop the existential quantifiers reached from ``root`` through and/or, leaving their variables free."""
    memo: dict = {}

    def go(lit):
        if lit in memo:
            return memo[lit]
        node = abs(lit)
        k = c.kind[node]
        pos = lit > 0
        if k in (AND, OR):
            kids = [go(a if pos else -a) for a in c.args[node]]
            res = c.and_(kids) if (k == AND) == pos else c.or_(kids)
        elif k in (EXISTS, FORALL) and (k == EXISTS) == pos:
            body = c.args[node][0]
            res = go(body if pos else -body)
        else:
            res = lit
        memo[lit] = res
        return res

    return go(root)


def _expand_witness(c, opened, witness_vars, memo, limits) -> dict:
    # fix witness variables one at a time, keeping the remaining sentence true
    fixed: dict = {}
    body = opened
    for v in witness_vars:
        for val in (True, False):
            cand = c.substitute(body, {v: TRUE if val else -TRUE})
            if val is False or evaluate(c, c.exists(sorted(c.free_vars(cand)), cand), memo=memo, limits=limits):
                fixed[v], body = val, cand
                break
    return fixed


def solve(q, strategy: str = "cegar", timeout: float | None = DEFAULT_TIMEOUT, mem_cap_mb: float | None = DEFAULT_MEM_CAP_MB):
    """Decide a translated formula; the witness maps each outer set variable to its member tuples."""
    witness_vars = [v for _, lits in q.blocks.values() for v in lits]
    verdict = solve_circuit(q.circuit, q.root, strategy, timeout, mem_cap_mb, witness_vars)
    if verdict.value:
        named: dict = {}
        for name, (_, lits) in q.blocks.items():
            named[name] = sorted(
                q.circuit.origin[v].tuple for v in lits if verdict.witness.get(v, False)
            )
        verdict.witness = named
    return verdict
