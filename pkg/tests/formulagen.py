"""Random closed second-order sentences over small random structures."""

from __future__ import annotations

import random

from somm.oracle import OracleInfeasible, check
from somm.so import (
    And,
    Const,
    ExistsFo,
    ExistsSo,
    ForallFo,
    ForallSo,
    Iff,
    Implies,
    Nand,
    Not,
    Or,
    Rel,
    RelStructure,
    SoVar,
    Var,
)

UNARY = Rel("p", 1)
BINARY = Rel("r", 2)
IDENTITY = Rel("=", 2)

PAIR_BUDGET = 400_000


def random_structure(rng: random.Random, max_size: int = 3) -> RelStructure:
    n = rng.randint(1, max_size)
    unary = [(i,) for i in range(n) if rng.random() < 0.5]
    binary = [(i, j) for i in range(n) for j in range(n) if rng.random() < 0.4]
    return RelStructure(n, {"p": (1, unary), "r": (2, binary)})


class SentenceGenerator:
    def __init__(self, rng: random.Random, universe_size: int, max_depth: int = 4, max_so_arity: int = 2):
        self.rng = rng
        self.n = universe_size
        self.max_depth = max_depth
        self.max_so_arity = max_so_arity
        self.counter = 0

    def _fresh(self, kind: str) -> str:
        self.counter += 1
        return f"{kind}{self.counter}"

    def _term(self, fo: list):
        if fo and self.rng.random() < 0.8:
            return self.rng.choice(fo)
        return Const(f"a{self.rng.randint(1, self.n)}")

    def _atom(self, fo: list, so: list):
        if so and self.rng.random() < 0.7:
            pred = self.rng.choice(so)
        else:
            pred = self.rng.choices([UNARY, BINARY, IDENTITY], weights=[4, 4, 1])[0]
        return pred(*[self._term(fo) for _ in range(pred.arity)])

    def formula(self, depth: int, fo: list, so: list):
        if depth == 0 or (depth < self.max_depth and self.rng.random() < 0.1):
            return self._atom(fo, so)
        kinds = ["not", "and", "or", "implies", "iff", "nand", "forall", "exists"]
        # a set variable in scope is what makes the circuit non-constant
        kinds += ["forall-so", "exists-so"] * (3 if not so else 1)
        kind = self.rng.choice(kinds)
        sub = depth - 1
        if kind == "not":
            return Not(self.formula(sub, fo, so))
        if kind in ("and", "or"):
            parts = tuple(self.formula(sub, fo, so) for _ in range(self.rng.randint(2, 3)))
            return And(parts) if kind == "and" else Or(parts)
        if kind in ("implies", "iff", "nand"):
            cls = {"implies": Implies, "iff": Iff, "nand": Nand}[kind]
            return cls(self.formula(sub, fo, so), self.formula(sub, fo, so))
        if kind in ("forall", "exists"):
            v = Var(self._fresh("x"))
            body = self.formula(sub, fo + [v], so)
            return ForallFo(v, body) if kind == "forall" else ExistsFo(v, body)
        v = SoVar(self._fresh("X"), self.rng.randint(1, self.max_so_arity))
        body = self.formula(sub, fo, so + [v])
        return ForallSo(v, body) if kind == "forall-so" else ExistsSo(v, body)

    def sentence(self):
        return self.formula(self.max_depth, [], [])


def decided_pairs(seed: int, count: int, budget: int = PAIR_BUDGET):
    """``count`` (structure, sentence, oracle verdict) triples the oracle decides within ``budget``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        rs = random_structure(rng)
        f = SentenceGenerator(rng, rs.universe_size).sentence()
        try:
            verdict = check(rs, f, budget=budget)
        except OracleInfeasible:
            continue
        out.append((rs, f, verdict))
    return out
