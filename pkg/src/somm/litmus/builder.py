"""Construction of event structures from litmus tests."""

from __future__ import annotations

from ..events import Event, EventStructure
from .program import Assign, If, LitmusTest, Load, Num, Outcome, Store, eval_cond, eval_expr

DEFAULT_EVENT_CAP = 10_000
DOMAIN_LIMIT = 64


class BuildError(ValueError):
    pass


class EventCapExceeded(BuildError):
    pass


class DomainDivergence(BuildError):
    pass


def _run_paths(stmts, regs, domains, on_store, on_end):
    """Enumerate the control paths of a thread with reads ranging over ``domains``."""
    if not stmts:
        on_end(regs)
        return
    s, rest = stmts[0], stmts[1:]
    if isinstance(s, Load):
        for v in sorted(domains[s.loc]):
            _run_paths(rest, {**regs, s.reg: v}, domains, on_store, on_end)
    elif isinstance(s, Store):
        on_store(s.loc, _eval(s, s.expr, regs))
        _run_paths(rest, regs, domains, on_store, on_end)
    elif isinstance(s, Assign):
        _run_paths(rest, {**regs, s.reg: _eval(s, s.expr, regs)}, domains, on_store, on_end)
    else:
        branch = s.then if _cond(s, regs) else s.orelse
        _run_paths(tuple(branch) + tuple(rest), regs, domains, on_store, on_end)


def _eval(stmt, e, regs):
    try:
        return eval_expr(e, regs)
    except KeyError as exc:
        line, col = stmt.pos
        raise BuildError(f"{line}:{col}: register {exc.args[0]!r} read before assignment") from None


def _cond(stmt, regs):
    try:
        return eval_cond(stmt.cond, regs)
    except KeyError as exc:
        line, col = stmt.pos
        raise BuildError(f"{line}:{col}: register {exc.args[0]!r} read before assignment") from None


def _constant_stores(stmts):
    for s in stmts:
        if isinstance(s, Store):
            try:
                yield s.loc, eval_expr(s.expr, {})
            except KeyError:
                pass
        elif isinstance(s, If):
            yield from _constant_stores(s.then)
            yield from _constant_stores(s.orelse)


def value_domains(t: LitmusTest, override=None) -> dict:
    """Per-location value sets: the initial value, every constant stored to the
    location on any branch, and the closure under computed stores.

    With ``override`` every location gets the given values plus its initial
    value, and no closure is computed.
    """
    if override is not None:
        return {loc: frozenset(override) | {v} for loc, v in t.init.items()}
    doms = {loc: {v} for loc, v in t.init.items()}
    for th in t.threads:
        for loc, v in _constant_stores(th):
            doms[loc].add(v)
    while True:
        grown = False

        def on_store(loc, v):
            nonlocal grown
            if v not in doms[loc]:
                doms[loc].add(v)
                grown = True

        for th in t.threads:
            _run_paths(tuple(th), {}, {k: frozenset(v) for k, v in doms.items()}, on_store, lambda regs: None)
        if not grown:
            return {k: frozenset(v) for k, v in doms.items()}
        if any(len(v) > DOMAIN_LIMIT for v in doms.values()):
            raise DomainDivergence(
                f"value domain exceeds {DOMAIN_LIMIT} values; fix one with an explicit value list"
            )


def build_event_structure(t: LitmusTest, values=None, event_cap: int = DEFAULT_EVENT_CAP) -> EventStructure:
    """Unfold every thread into a tree of events; reads fork once per value.

    Events of the same thread that are not ordered are in conflict.  The
    initial writes precede every thread event.  The last event of each path
    whose registers satisfy the asked outcome is marked final.
    """
    doms = value_domains(t, values if values is not None else t.values)
    events: list = []
    parent: dict = {}

    def add(**kw):
        if len(events) >= event_cap:
            raise EventCapExceeded(f"event structure exceeds the cap of {event_cap} events")
        e = Event(len(events), **kw)
        events.append(e)
        return e.id

    init_ids = [
        add(is_write=True, loc=loc, value=v, label=f"init {loc}")
        for loc, v in t.init.items()
    ]
    finals = set()
    for tid, th in enumerate(t.threads):
        want = t.outcome_for(tid)
        satisfied = []

        def walk(stmts, regs, last):
            if not stmts:
                if all(regs.get(r) == v for r, v in want.items()):
                    satisfied.append(last)
                return
            s, rest = stmts[0], stmts[1:]
            if isinstance(s, Load):
                for v in sorted(doms[s.loc]):
                    e = add(is_read=True, loc=s.loc, value=v, thread=tid, label=f"T{tid} {s.reg}={s.loc}")
                    parent[e] = last
                    walk(rest, {**regs, s.reg: v}, e)
            elif isinstance(s, Store):
                val = _eval(s, s.expr, regs)
                e = add(is_write=True, loc=s.loc, value=val, thread=tid, label=f"T{tid} {s.loc}={val}")
                parent[e] = last
                walk(rest, regs, e)
            elif isinstance(s, Assign):
                walk(rest, {**regs, s.reg: _eval(s, s.expr, regs)}, last)
            else:
                branch = s.then if _cond(s, regs) else s.orelse
                walk(tuple(branch) + tuple(rest), regs, last)

        walk(tuple(th), {}, None)
        if not satisfied:
            raise BuildError(f"thread {tid} can never satisfy the asked outcome")
        finals |= {e for e in satisfied if e is not None}

    events = [
        Event(e.id, e.is_read, e.is_write, e.id in finals, e.loc, e.value, e.thread, e.label) for e in events
    ]
    n = len(events)
    ancestors = {}
    for e in events:
        if e.thread is None:
            ancestors[e.id] = {e.id}
            continue
        chain, p = {e.id}, parent[e.id]
        while p is not None:
            chain.add(p)
            p = parent[p]
        ancestors[e.id] = chain | set(init_ids)
    po = frozenset((a, b) for b in range(n) for a in ancestors[b])
    conflict = frozenset(
        (a.id, b.id)
        for a in events
        for b in events
        if a.thread is not None
        and a.thread == b.thread
        and a.id not in ancestors[b.id]
        and b.id not in ancestors[a.id]
    )
    justifies = frozenset(
        (w.id, r.id)
        for w in events
        if w.is_write
        for r in events
        if r.is_read and r.loc == w.loc and r.value == w.value
    )
    return EventStructure(
        events, po, conflict, justifies, name=t.name, meta={"domains": {k: sorted(v) for k, v in doms.items()}}
    )


def gen_store_buffer(n: int) -> LitmusTest:
    """Store-buffer family: thread i stores x_i = 1 and then loads x_{i-1}."""
    if n < 2:
        raise ValueError("the store-buffer family needs at least 2 threads")
    init = {f"x{i}": 0 for i in range(1, n + 1)}
    threads = []
    for i in range(1, n + 1):
        prev = n if i == 1 else i - 1
        threads.append([Store(f"x{i}", Num(1)), Load(f"r{i}", f"x{prev}")])
    outcome = [Outcome(i - 1, f"r{i}", 0) for i in range(1, n + 1)]
    return LitmusTest(f"SB{n}", init, threads, outcome)

