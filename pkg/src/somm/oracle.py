"""Reference model checker: evaluates second-order formulas by enumeration.

This module mirrors the satisfaction relation clause by clause and is meant to
stay obviously correct.  Second-order quantifiers enumerate every subset of
``A^k``, smallest subsets first.  Work is metered in clause evaluations; when
the budget runs out :class:`OracleInfeasible` is raised instead of returning a
verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .so.structure import RelStructure
from .so.syntax import (
    And,
    Atom,
    Const,
    ExistsFo,
    ExistsSo,
    ForallFo,
    ForallSo,
    Formula,
    Iff,
    Implies,
    Nand,
    Not,
    Or,
    SoVar,
    Var,
    free_vars,
)

DEFAULT_BUDGET = 5_000_000


class OracleInfeasible(RuntimeError):
    """The enumeration would exceed the clause-evaluation budget."""


class UnboundSymbol(ValueError):
    pass


@dataclass
class Environment:
    fo: dict = field(default_factory=dict)
    so: dict = field(default_factory=dict)

    def bind_fo(self, v: Var, e: int) -> "Environment":
        return Environment({**self.fo, v: e}, self.so)

    def bind_so(self, v: SoVar, tuples: frozenset) -> "Environment":
        for t in tuples:
            if len(t) != v.arity:
                raise ValueError(f"{v} has arity {v.arity}, bound to tuple {t}")
        return Environment(self.fo, {**self.so, v: frozenset(tuples)})


def subsets(universe_size: int, arity: int):
    """All subsets of ``A^arity`` by increasing cardinality, then lexicographically."""
    tuples = list(itertools.product(range(universe_size), repeat=arity))
    for r in range(len(tuples) + 1):
        for combo in itertools.combinations(tuples, r):
            yield frozenset(combo)


class Oracle:
    def __init__(self, rs: RelStructure, budget: int = DEFAULT_BUDGET):
        self.rs = rs
        self.budget = budget
        self.steps = 0

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise OracleInfeasible(f"clause budget of {self.budget} exhausted")

    def _term(self, t, env: Environment) -> int:
        if isinstance(t, Var):
            if t not in env.fo:
                raise UnboundSymbol(f"unbound first-order variable {t}")
            return env.fo[t]
        if isinstance(t, Const):
            return self.rs.element(t.name)
        raise TypeError(f"not a term: {t!r}")

    def holds(self, f: Formula, env: Environment) -> bool:
        self._tick()
        if isinstance(f, Atom):
            args = tuple(self._term(t, env) for t in f.args)
            if isinstance(f.pred, SoVar):
                if f.pred not in env.so:
                    raise UnboundSymbol(f"unbound second-order variable {f.pred}")
                return args in env.so[f.pred]
            if f.pred.name not in self.rs.relations:
                raise UnboundSymbol(f"unknown relation {f.pred.name}")
            if self.rs.arity(f.pred.name) != f.pred.arity:
                raise UnboundSymbol(f"relation {f.pred.name} used with arity {f.pred.arity}")
            return self.rs.holds(f.pred.name, *args)
        if isinstance(f, Not):
            return not self.holds(f.arg, env)
        if isinstance(f, And):
            return all(self.holds(c, env) for c in f.args)
        if isinstance(f, Or):
            return any(self.holds(c, env) for c in f.args)
        if isinstance(f, Implies):
            return not self.holds(f.lhs, env) or self.holds(f.rhs, env)
        if isinstance(f, Iff):
            return self.holds(f.lhs, env) == self.holds(f.rhs, env)
        if isinstance(f, Nand):
            return not (self.holds(f.lhs, env) and self.holds(f.rhs, env))
        if isinstance(f, ForallFo):
            return all(self.holds(f.body, env.bind_fo(f.var, e)) for e in self.rs.universe)
        if isinstance(f, ExistsFo):
            return any(self.holds(f.body, env.bind_fo(f.var, e)) for e in self.rs.universe)
        if isinstance(f, (ForallSo, ExistsSo)):
            count = 2 ** (self.rs.universe_size ** f.var.arity)
            if count > self.budget - self.steps:
                raise OracleInfeasible(f"quantifier over {f.var} ranges over {count} relations")
            sets = subsets(self.rs.universe_size, f.var.arity)
            test = (self.holds(f.body, env.bind_so(f.var, s)) for s in sets)
            return all(test) if isinstance(f, ForallSo) else any(test)
        raise TypeError(f"not a formula: {f!r}")

    def witness(self, f: Formula) -> tuple[bool, dict]:
        """Decide ``f``; when true, also return bindings of its leading ∃SO block."""
        prefix, body = [], f
        while isinstance(body, ExistsSo):
            prefix.append(body.var)
            body = body.body
        if not prefix:
            return self.holds(f, Environment()), {}
        combinations = 1
        for v in prefix:
            combinations *= 2 ** (self.rs.universe_size**v.arity)
            if combinations > self.budget - self.steps:
                raise OracleInfeasible(f"leading block ranges over {combinations}+ combinations")
        pools = [list(subsets(self.rs.universe_size, v.arity)) for v in prefix]
        for choice in itertools.product(*pools):
            env = Environment(so=dict(zip(prefix, choice)))
            if self.holds(body, env):
                return True, dict(zip(prefix, choice))
        return False, {}


def check(rs: RelStructure, f: Formula, budget: int = DEFAULT_BUDGET, env: Environment | None = None) -> bool:
    """Decide ``rs ⊨ f``.  ``f`` must be closed unless ``env`` binds its free variables."""
    if env is None:
        fo, so = free_vars(f)
        if fo or so:
            names = sorted(str(v) for v in (*fo, *so))
            raise UnboundSymbol(f"formula has free variables: {', '.join(names)}")
        env = Environment()
    return Oracle(rs, budget).holds(f, env)
