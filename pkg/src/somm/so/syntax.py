"""Abstract syntax of second-order formulas over finite relational vocabularies.

Terms are first-order variables (:class:`Var`) or constant symbols
(:class:`Const`).  Predicates are second-order variables (:class:`SoVar`) or
relation symbols (:class:`Rel`); both carry their arity and can be applied to
terms directly, ``X(x, y)`` builds an :class:`Atom`.

Formulas are immutable.  Sub-formulas may be shared freely between trees.
"""

from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Union


class ArityError(ValueError):
    """A predicate was applied to the wrong number of terms."""


# -- terms and predicates ---------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]


class _Applicable:
    arity: int

    def __call__(self, *terms: Term) -> "Atom":
        if len(terms) != self.arity:
            raise ArityError(f"{self} has arity {self.arity}, applied to {len(terms)} terms")
        return Atom(self, tuple(terms))


@dataclass(frozen=True)
class SoVar(_Applicable):
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise ArityError(f"second-order variable {self.name} needs arity >= 1")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Rel(_Applicable):
    name: str
    arity: int

    def __str__(self):
        return self.name


Pred = Union[SoVar, Rel]


class Macro(_Applicable):
    """A relation defined by a formula template, expanded on every application.

    ``fn`` receives the argument terms and returns a fresh formula; any bound
    variables it introduces must be fresh on each call.
    """

    def __init__(self, arity: int, fn: Callable[..., "Formula"], name: str = "macro"):
        self.arity = arity
        self.fn = fn
        self.name = name

    def __call__(self, *terms: Term) -> "Formula":
        if len(terms) != self.arity:
            raise ArityError(f"{self.name} has arity {self.arity}, applied to {len(terms)} terms")
        return self.fn(*terms)

    def __repr__(self):
        return f"Macro({self.name}/{self.arity})"

    __str__ = __repr__


# -- formulas ---------------------------------------------------------------


class Formula:
    """Base class; supports ``&``, ``|``, ``~`` and ``>>`` (implication)."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self):
        from .sexpr import dump_formula

        return dump_formula(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    pred: Pred
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.pred.arity:
            raise ArityError(f"{self.pred} has arity {self.pred.arity}, got {len(self.args)} terms")


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    """Conjunction; ``And(())`` is the constant true."""

    args: tuple


@dataclass(frozen=True, repr=False)
class Or(Formula):
    """Disjunction; ``Or(())`` is the constant false."""

    args: tuple


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, repr=False)
class Nand(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, repr=False)
class ForallFo(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True, repr=False)
class ExistsFo(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True, repr=False)
class ForallSo(Formula):
    var: SoVar
    body: Formula


@dataclass(frozen=True, repr=False)
class ExistsSo(Formula):
    var: SoVar
    body: Formula


for _cls in (Atom, Not, And, Or, Implies, Iff, Nand, ForallFo, ExistsFo, ForallSo, ExistsSo):
    _cls.__repr__ = Formula.__str__

TRUE = And(())
FALSE = Or(())

QUANTIFIERS = (ForallFo, ExistsFo, ForallSo, ExistsSo)


def children(f: Formula) -> tuple:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff, Nand)):
        return (f.lhs, f.rhs)
    return (f.body,)


def conj(*fs: Formula) -> Formula:
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def disj(*fs: Formula) -> Formula:
    return fs[0] if len(fs) == 1 else Or(tuple(fs))


def forall(vs, body: Formula) -> Formula:
    """Quantify universally over one or several variables (FO or SO)."""
    if isinstance(vs, (Var, SoVar)):
        vs = (vs,)
    for v in reversed(tuple(vs)):
        body = ForallSo(v, body) if isinstance(v, SoVar) else ForallFo(v, body)
    return body


def exists(vs, body: Formula) -> Formula:
    if isinstance(vs, (Var, SoVar)):
        vs = (vs,)
    for v in reversed(tuple(vs)):
        body = ExistsSo(v, body) if isinstance(v, SoVar) else ExistsFo(v, body)
    return body


# -- fresh names --------------------------------------------------------------

_counter = itertools.count(1)


def fresh_var(hint: str = "x") -> Var:
    return Var(f"{hint}.{next(_counter)}")


def fresh_so(arity: int, hint: str = "X") -> SoVar:
    return SoVar(f"{hint}.{next(_counter)}", arity)


@contextlib.contextmanager
def fresh_scope() -> Iterator[None]:
    """Restart fresh-name numbering; formulas built inside get stable names."""
    global _counter
    saved = _counter
    _counter = itertools.count(1)
    try:
        yield
    finally:
        _counter = saved


# -- traversals ---------------------------------------------------------------


def free_vars(f: Formula) -> tuple[frozenset, frozenset]:
    """Return ``(first_order, second_order)`` sets of free variables.

    Constants and relation symbols are never free.
    """
    cache: dict = {}

    def go(g):
        key = id(g)
        hit = cache.get(key)
        if hit is not None:
            return hit[0]
        if isinstance(g, Atom):
            fo = frozenset(t for t in g.args if isinstance(t, Var))
            so = frozenset((g.pred,)) if isinstance(g.pred, SoVar) else frozenset()
            res = (fo, so)
        elif isinstance(g, (ForallFo, ExistsFo)):
            fo, so = go(g.body)
            res = (fo - {g.var}, so)
        elif isinstance(g, (ForallSo, ExistsSo)):
            fo, so = go(g.body)
            res = (fo, so - {g.var})
        else:
            fo, so = frozenset(), frozenset()
            for c in children(g):
                cfo, cso = go(c)
                fo |= cfo
                so |= cso
            res = (fo, so)
        # keep g alive so its id cannot be recycled during the walk
        cache[key] = (res, g)
        return res

    return go(f)


def is_sentence(f: Formula) -> bool:
    fo, so = free_vars(f)
    return not fo and not so


def size(f: Formula) -> int:
    """Number of nodes of the formula tree (shared nodes counted per occurrence)."""
    memo: dict = {}

    def go(g):
        k = id(g)
        if k not in memo:
            memo[k] = (1 + sum(go(c) for c in children(g)), g)
        return memo[k][0]

    return go(f)


def to_nand(f: Formula) -> Formula:
    """Rewrite every boolean connective into :class:`Nand` (constants stay)."""
    memo: dict = {}

    def neg(a):
        return Nand(a, a)

    def and2(a, b):
        return neg(Nand(a, b))

    def or2(a, b):
        return Nand(neg(a), neg(b))

    def go(g):
        k = id(g)
        if k in memo:
            return memo[k][0]
        if isinstance(g, Atom):
            r = g
        elif isinstance(g, Not):
            r = neg(go(g.arg))
        elif isinstance(g, And):
            if not g.args:
                r = g
            else:
                parts = [go(c) for c in g.args]
                r = parts[0]
                for p in parts[1:]:
                    r = and2(r, p)
        elif isinstance(g, Or):
            if not g.args:
                r = g
            else:
                parts = [go(c) for c in g.args]
                r = parts[0]
                for p in parts[1:]:
                    r = or2(r, p)
        elif isinstance(g, Implies):
            r = Nand(go(g.lhs), neg(go(g.rhs)))
        elif isinstance(g, Iff):
            a, b = go(g.lhs), go(g.rhs)
            r = or2(and2(a, b), and2(neg(a), neg(b)))
        elif isinstance(g, Nand):
            r = Nand(go(g.lhs), go(g.rhs))
        else:
            r = type(g)(g.var, go(g.body))
        memo[k] = (r, g)
        return r

    return go(f)
