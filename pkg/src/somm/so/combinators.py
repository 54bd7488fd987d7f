"""Combinator library for building large second-order formulas.

Predicates passed to combinators may be relation symbols, second-order
variables, or :class:`Macro` objects (such as the result of :func:`seq`).
Every expansion introduces fresh bound variables.
"""

from __future__ import annotations

from typing import Callable

from .syntax import (
    And,
    ArityError,
    ExistsFo,
    ExistsSo,
    ForallFo,
    Formula,
    Iff,
    Implies,
    Macro,
    Not,
    Or,
    Rel,
    fresh_so,
    fresh_var,
)

EQUALS = Rel("=", 2)
EMPTY = Rel("empty", 1)


def _check(name: str, expected: int, *preds) -> None:
    for p in preds:
        if p.arity != expected:
            raise ArityError(f"{name} expects arity-{expected} predicates, got {p} of arity {p.arity}")


def _forall_all(vs, body: Formula) -> Formula:
    for v in reversed(vs):
        body = ForallFo(v, body)
    return body


def subset(p, q) -> Formula:
    """Every tuple of ``p`` is a tuple of ``q`` (any common arity)."""
    _check("subset", p.arity, q)
    xs = [fresh_var() for _ in range(p.arity)]
    return _forall_all(xs, Implies(p(*xs), q(*xs)))


def eq(p, q) -> Formula:
    _check("eq", p.arity, q)
    xs = [fresh_var() for _ in range(p.arity)]
    return _forall_all(xs, Iff(p(*xs), q(*xs)))


def irrefl(p) -> Formula:
    _check("irrefl", 2, p)
    x = fresh_var()
    return ForallFo(x, Not(p(x, x)))


def inv(p) -> Macro:
    _check("inv", 2, p)
    return Macro(2, lambda x, y: p(y, x), f"inv({p})")


ident = Macro(2, lambda x, y: EQUALS(x, y), "id")


def seq(p, q) -> Macro:
    """Relational composition ``p ; q``."""
    _check("seq", 2, p, q)

    def body(x, z):
        y = fresh_var("y")
        return ExistsFo(y, And((p(x, y), q(y, z))))

    return Macro(2, body, f"seq({p},{q})")


def union(*ps) -> Macro:
    _check("union", 2, *ps)
    return Macro(2, lambda x, y: Or(tuple(p(x, y) for p in ps)), "union")


def inj(p) -> Formula:
    return subset(seq(p, inv(p)), ident)


def trans(p) -> Formula:
    return subset(seq(p, p), p)


def acyclic(p) -> Formula:
    """``p`` is contained in some transitive irreflexive relation."""
    _check("acyclic", 2, p)
    x = fresh_so(2, "Ac")
    return ExistsSo(x, And((subset(p, x), trans(x), irrefl(x))))


Step = Callable[..., Formula]


def tc(n: int, step: Step, p, q) -> Formula:
    """Bounded reflexive-transitive closure of the set transformer ``step``.

    ``tc(0)`` is set equality; ``tc(n+1)(P,Q)`` holds when ``P = Q`` or
    ``step(P, X)`` and ``tc(n)(X, Q)`` for some set ``X``.
    """
    if n < 0:
        raise ValueError("closure bound must be non-negative")
    _check("tc", 1, p, q)
    if n == 0:
        return eq(p, q)
    x = fresh_so(1, "Tc")
    return Or((eq(p, q), ExistsSo(x, And((step(p, x), tc(n - 1, step, x, q))))))
