"""Memory-model sentences over the event-structure vocabulary.

Each generator returns a closed second-order sentence which holds in the
relational encoding of an event structure iff the asked outcome is allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .events import JUSTIFIES, LT, READ, SLOC, WRITE, mk_final_config, mk_valid_config
from .so.combinators import EMPTY, EQUALS, acyclic, inj, inv, irrefl, seq, subset, tc, trans
from .so.structure import RelStructure
from .so.syntax import (
    And,
    ExistsFo,
    ExistsSo,
    ForallFo,
    ForallSo,
    Formula,
    Iff,
    Implies,
    Macro,
    Not,
    Or,
    SoVar,
    fresh_scope,
    fresh_so,
    fresh_var,
    is_sentence,
)

MODELS = ("sc", "ra", "cpp", "jr")
ALIASES = {"c11": "cpp", "c++": "cpp"}


@dataclass
class ModelSentence:
    model: str
    sentence: Formula
    params: dict = field(default_factory=dict)
    # names of the leading existential set variables, for witness reports
    witnesses: tuple = ()


def mk_co(x: SoVar, co: SoVar) -> Formula:
    """``co`` relates every two distinct same-location writes of ``x``, in some direction."""
    a, b = fresh_var(), fresh_var()
    lhs = And((x(a), x(b), WRITE(a), WRITE(b), SLOC(a, b), Not(EQUALS(a, b))))
    return ForallFo(a, ForallFo(b, Iff(lhs, Or((co(a, b), co(b, a))))))


def mk_rf(x: SoVar, rf: SoVar) -> Formula:
    """``rf`` is injective, inside ``justifies``, and feeds every read of ``x`` from a write of ``x``."""
    r, w = fresh_var(), fresh_var()
    covered = ForallFo(
        r,
        Implies(And((READ(r), x(r))), ExistsFo(w, And((WRITE(w), x(w), rf(w, r))))),
    )
    return And((inj(rf), subset(rf, JUSTIFIES), covered))


def mr(co: SoVar, rf: SoVar) -> Macro:
    """Strict program order, rf, co and from-reads, as one binary relation."""

    def body(y, z):
        w = fresh_var()
        return Or((LT(y, z), co(y, z), rf(y, z), ExistsFo(w, And((co(w, z), rf(w, y))))))

    return Macro(2, body, "mr")


def _execution_vars():
    return SoVar("X", 1), SoVar("Yco", 2), SoVar("Yrf", 2)


def gen_sc(rs: RelStructure | None = None) -> ModelSentence:
    with fresh_scope():
        x, co, rf = _execution_vars()
        body = And((mk_final_config(x), mk_co(x, co), mk_rf(x, rf), acyclic(mr(co, rf))))
        f = ExistsSo(x, ExistsSo(co, ExistsSo(rf, body)))
    return ModelSentence("sc", f, witnesses=("X", "Yco", "Yrf"))


def ra_hb_axioms(co: SoVar, rf: SoVar, hb: SoVar) -> Formula:
    return And(
        (
            subset(LT, hb),
            subset(rf, hb),
            trans(hb),
            irrefl(hb),
            irrefl(seq(co, hb)),
            irrefl(seq(inv(rf), seq(co, hb))),
        )
    )


def gen_ra(rs: RelStructure | None = None) -> ModelSentence:
    with fresh_scope():
        x, co, rf = _execution_vars()
        hb = SoVar("Yhb", 2)
        body = And(
            (
                mk_final_config(x),
                mk_co(x, co),
                mk_rf(x, rf),
                acyclic(co),
                ExistsSo(hb, ra_hb_axioms(co, rf, hb)),
            )
        )
        f = ExistsSo(x, ExistsSo(co, ExistsSo(rf, body)))
    return ModelSentence("ra", f, witnesses=("X", "Yco", "Yrf"))


# C++ consistency and race predicates take (X, Yco, Yrf, Yhb).
CppMacro = Callable[[SoVar, SoVar, SoVar, SoVar], Formula]


def cpp_consistent(x: SoVar, co: SoVar, rf: SoVar, hb: SoVar) -> Formula:
    """Release-acquire happens-before skeleton with acyclic coherence."""
    return And((acyclic(co), ra_hb_axioms(co, rf, hb)))


def cpp_race(x: SoVar, co: SoVar, rf: SoVar, hb: SoVar) -> Formula:
    """Two distinct same-location accesses of a configuration, one a write, unordered by ``hb``."""
    a, b = fresh_var(), fresh_var()
    unordered = And((Not(hb(a, b)), Not(hb(b, a))))
    pair = And(
        (
            x(a),
            x(b),
            SLOC(a, b),
            Or((WRITE(a), WRITE(b))),
            Not(EQUALS(a, b)),
            unordered,
        )
    )
    return And((mk_valid_config(x), ExistsFo(a, ExistsFo(b, pair))))


def gen_cpp(
    rs: RelStructure | None = None,
    consistent: CppMacro = cpp_consistent,
    race: CppMacro = cpp_race,
) -> ModelSentence:
    with fresh_scope():
        x, co, rf = _execution_vars()
        hb = SoVar("Yhb", 2)
        body = And(
            (
                mk_co(x, co),
                mk_rf(x, rf),
                consistent(x, co, rf, hb),
                Or((mk_final_config(x), race(x, co, rf, hb))),
            )
        )
        f = ExistsSo(x, ExistsSo(co, ExistsSo(rf, ExistsSo(hb, body))))
    return ModelSentence("cpp", f, witnesses=("X", "Yco", "Yrf", "Yhb"))


# -- stepwise justification ------------------------------------------------


def mk_justify(p: SoVar, q: SoVar, literal_write_y: bool = False) -> Formula:
    """Every read new in ``q`` (absent from ``p``) is justified by a write of ``p``."""
    y, w = fresh_var(), fresh_var()
    writer = WRITE(y) if literal_write_y else WRITE(w)
    return ForallFo(
        y,
        Implies(
            And((Not(p(y)), q(y), READ(y))),
            ExistsFo(w, And((p(w), writer, JUSTIFIES(w, y)))),
        ),
    )


def _config_step(p, q) -> Formula:
    return And((subset(p, q), mk_valid_config(p), mk_valid_config(q)))


def mk_always_justifies(literal_write_y: bool = False):
    def step(p, q):
        return And((mk_justify(p, q, literal_write_y), _config_step(p, q)))

    return step


def mk_always_eventually_justifies(n: int, literal_write_y: bool = False):
    aj = mk_always_justifies(literal_write_y)

    def step(p, q):
        x, y = fresh_so(1, "Ax"), fresh_so(1, "Ey")
        eventually = ExistsSo(y, And((tc(n, aj, x, y), mk_justify(y, q, literal_write_y))))
        return And((_config_step(p, q), ForallSo(x, Implies(tc(n, aj, p, x), eventually))))

    return step


def gen_jr(rs: RelStructure, n: int | None = None, literal_write_y: bool = False) -> ModelSentence:
    if n is None:
        n = rs.universe_size
    if n < 0:
        raise ValueError("closure bound must be non-negative")
    with fresh_scope():
        x = SoVar("X", 1)
        aej = mk_always_eventually_justifies(n, literal_write_y)
        f = ExistsSo(x, And((tc(n, aej, EMPTY, x), mk_final_config(x))))
    return ModelSentence("jr", f, params={"n": n, "literal_write_y": literal_write_y}, witnesses=("X",))


def generate(model: str, rs: RelStructure, **kw) -> ModelSentence:
    model = ALIASES.get(model.lower(), model.lower())
    if model == "sc":
        ms = gen_sc(rs)
    elif model == "ra":
        ms = gen_ra(rs)
    elif model == "cpp":
        ms = gen_cpp(rs, **kw)
    elif model == "jr":
        ms = gen_jr(rs, **kw)
    else:
        raise ValueError(f"unknown memory model {model!r}; choose from {', '.join(MODELS)}")
    assert is_sentence(ms.sentence)
    return ms


__all__ = [
    "MODELS",
    "ModelSentence",
    "cpp_consistent",
    "cpp_race",
    "gen_cpp",
    "gen_jr",
    "gen_ra",
    "gen_sc",
    "generate",
    "mk_always_eventually_justifies",
    "mk_always_justifies",
    "mk_co",
    "mk_justify",
    "mk_rf",
    "mr",
]
