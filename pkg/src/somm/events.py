"""Event structures: events, program order, conflict and justification.

Program order (``po``) is stored reflexively, matching ``<=``; the strict order
is derived.  Same-location is derived from event locations and relates memory
accesses only.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .so.structure import RelStructure
from .so.syntax import And, ExistsFo, ForallFo, Formula, Implies, Not, Rel, SoVar, fresh_var

FINAL = Rel("final", 1)
READ = Rel("read", 1)
WRITE = Rel("write", 1)
CONFLICT = Rel("conflict", 2)
JUSTIFIES = Rel("justifies", 2)
SLOC = Rel("sloc", 2)
LE = Rel("<=", 2)
LT = Rel("<", 2)


@dataclass(frozen=True)
class Event:
    id: int
    is_read: bool = False
    is_write: bool = False
    is_final: bool = False
    loc: str | None = None
    value: int | None = None
    thread: int | None = None
    label: str = ""

    def describe(self) -> str:
        kind = "R" if self.is_read else "W" if self.is_write else "E"
        body = f"{kind}{self.loc}={self.value}" if self.loc is not None else kind
        return f"{self.label or self.id}:{body}"


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self):
        return f"{self.axiom}: {self.witness}"


AXIOMS = (
    "read-write-disjoint",
    "justifies-write-read",
    "conflict-symmetric",
    "conflict-irreflexive",
    "conflict-forward",
    "conflict-backward",
    "conflict-transitive",
)
ORDER_LAWS = ("po-reflexive", "po-antisymmetric", "po-transitive")


class InvalidEventStructure(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"event structure violates {len(self.violations)} law(s): {shown}")


@dataclass
class EventStructure:
    events: list
    po: frozenset
    conflict: frozenset
    justifies: frozenset
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, e in enumerate(self.events):
            if e.id != i:
                raise ValueError(f"event at position {i} has id {e.id}")
        n = len(self.events)
        for rel in ("po", "conflict", "justifies"):
            pairs = frozenset(getattr(self, rel))
            for a, b in pairs:
                if not (0 <= a < n and 0 <= b < n):
                    raise ValueError(f"{rel} pair {(a, b)} mentions an unknown event")
            setattr(self, rel, pairs)

    def __len__(self):
        return len(self.events)

    @property
    def strict_po(self) -> frozenset:
        return frozenset((a, b) for a, b in self.po if a != b)

    @property
    def sloc(self) -> frozenset:
        acc = [e for e in self.events if e.is_read or e.is_write]
        return frozenset((a.id, b.id) for a in acc for b in acc if a.loc == b.loc)

    @property
    def finals(self) -> list:
        return [e.id for e in self.events if e.is_final]

    def is_valid_config(self, xs: Iterable[int]) -> bool:
        xs = set(xs)
        if any((a, b) in self.conflict for a in xs for b in xs):
            return False
        return all(a in xs for a, b in self.po if b in xs)

    def is_final_config(self, xs: Iterable[int]) -> bool:
        xs = set(xs)
        if not self.is_valid_config(xs):
            return False
        fin = set(self.finals)
        return all(
            f in xs or any((f, y) in self.conflict and y in fin for y in xs) for f in fin
        )

    # -- export ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "events": [asdict(e) for e in self.events],
            "po": sorted(self.strict_po),
            "conflict": sorted(self.conflict),
            "justifies": sorted(self.justifies),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "EventStructure":
        events = [Event(**e) for e in d["events"]]
        po = {tuple(p) for p in d.get("po", ())} | {(e.id, e.id) for e in events}
        return cls(
            events,
            frozenset(po),
            frozenset(tuple(p) for p in d.get("conflict", ())),
            frozenset(tuple(p) for p in d.get("justifies", ())),
            name=d.get("name", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "EventStructure":
        return cls.from_dict(json.loads(text))

    def to_dot(self) -> str:
        lines = [f'digraph "{self.name or "events"}" {{', "  node [shape=box];"]
        for e in self.events:
            style = ", peripheries=2" if e.is_final else ""
            lines.append(f'  e{e.id} [label="{e.describe()}"{style}];')
        for a, b in sorted(_covering(self.strict_po)):
            lines.append(f"  e{a} -> e{b};")
        for a, b in sorted(self.conflict):
            if a < b and not _inherited(self, a, b):
                lines.append(f"  e{a} -> e{b} [dir=none, style=dashed, color=red];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _covering(lt: frozenset) -> set:
    return {(a, b) for a, b in lt if not any((a, c) in lt and (c, b) in lt for c, _ in lt)}


def _inherited(es: EventStructure, a: int, b: int) -> bool:
    lt = es.strict_po
    return any((p, a) in lt and (p, b) in es.conflict for p, _ in lt) or any(
        (p, b) in lt and (a, p) in es.conflict for p, _ in lt
    )


def validate_axioms(es: EventStructure) -> list:
    """Check the event-structure laws; returns one :class:`Violation` per breach.

    Predecessor inheritance and transitivity of conflict are checked in the
    forms ``x # y, z < y  =>  z < x  or  z # x`` and
    ``x # y, y # z  =>  x # z  or  x <= z  or  z <= x``.
    """
    out: list = []
    n = len(es.events)
    ev = es.events
    po, cf, lt = es.po, es.conflict, es.strict_po
    for e in ev:
        if e.is_read and e.is_write:
            out.append(Violation("read-write-disjoint", (e.id,)))
    for a, b in sorted(es.justifies):
        if not (ev[a].is_write and ev[b].is_read):
            out.append(Violation("justifies-write-read", (a, b)))
    for a, b in sorted(cf):
        if (b, a) not in cf:
            out.append(Violation("conflict-symmetric", (a, b)))
        if a == b:
            out.append(Violation("conflict-irreflexive", (a,)))
    for x, y in sorted(cf):
        for z in range(n):
            if (y, z) in po and (x, z) not in cf:
                out.append(Violation("conflict-forward", (x, y, z)))
            if (z, y) in lt and (z, x) not in lt and (z, x) not in cf:
                out.append(Violation("conflict-backward", (x, y, z)))
    for x, y in sorted(cf):
        for z in range(n):
            if (y, z) in cf and (x, z) not in cf and (x, z) not in po and (z, x) not in po:
                out.append(Violation("conflict-transitive", (x, y, z)))
    for e in range(n):
        if (e, e) not in po:
            out.append(Violation("po-reflexive", (e,)))
    for a, b in sorted(lt):
        if (b, a) in po:
            out.append(Violation("po-antisymmetric", (a, b)))
        for c in range(n):
            if (b, c) in po and (a, c) not in po:
                out.append(Violation("po-transitive", (a, b, c)))
    return out


def to_rel_structure(es: EventStructure) -> RelStructure:
    """Encode ``es`` over the vocabulary final/read/write/conflict/justifies/sloc/<=/<."""
    if not es.events:
        raise ValueError("an event structure needs at least one event")
    bad = validate_axioms(es)
    if bad:
        raise InvalidEventStructure(bad)
    ev = es.events
    rels = {
        "final": (1, [(e.id,) for e in ev if e.is_final]),
        "read": (1, [(e.id,) for e in ev if e.is_read]),
        "write": (1, [(e.id,) for e in ev if e.is_write]),
        "conflict": (2, es.conflict),
        "justifies": (2, es.justifies),
        "sloc": (2, es.sloc),
        "<=": (2, es.po),
        "<": (2, es.strict_po),
    }
    return RelStructure(len(ev), rels)


def from_rel_structure(rs: RelStructure) -> EventStructure:
    """Inverse of :func:`to_rel_structure` up to locations and values.

    Locations are reconstructed as same-location classes and values are lost.
    """
    n = rs.universe_size
    loc_of = {}
    for a, b in rs["sloc"]:
        loc_of[a] = min(loc_of.get(a, a), b)
    loc_of = {a: f"l{m}" for a, m in loc_of.items()}
    events = [
        Event(
            i,
            is_read=rs.holds("read", i),
            is_write=rs.holds("write", i),
            is_final=rs.holds("final", i),
            loc=loc_of.get(i),
        )
        for i in range(n)
    ]
    return EventStructure(events, rs["<="], rs["conflict"], rs["justifies"])


# -- configuration macros -------------------------------------------------------


def mk_valid_config(x: SoVar) -> Formula:
    """``x`` is conflict-free and downward closed under ``<=``."""
    a, b = fresh_var(), fresh_var()
    c, d = fresh_var(), fresh_var()
    conflict_free = ForallFo(a, ForallFo(b, Implies(And((x(a), x(b))), Not(CONFLICT(a, b)))))
    down_closed = ForallFo(d, Implies(x(d), ForallFo(c, Implies(LE(c, d), x(c)))))
    return And((conflict_free, down_closed))


def mk_final_config(x: SoVar) -> Formula:
    """``x`` is a configuration covering every final event, directly or by a conflicting final."""
    f, g = fresh_var(), fresh_var()
    covered = ForallFo(
        f,
        Implies(
            And((FINAL(f), Not(x(f)))),
            ExistsFo(g, And((CONFLICT(f, g), FINAL(g), x(g)))),
        ),
    )
    return And((mk_valid_config(x), covered))
