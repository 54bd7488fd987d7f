"""Translation of second-order model checking into quantified boolean circuits.

First-order quantifiers are expanded over the universe into conjunctions and
disjunctions.  A second-order variable of arity ``k`` becomes ``n**k`` fresh
boolean variables, one per tuple in lexicographic order.  Relation atoms fold
to constants (true exactly for members).

The formula is compiled once into closures over a slot-indexed environment.
Sub-formulas that do not depend on every first-order variable in scope are
memoized on the values of their free variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..so.structure import RelStructure
from ..so.syntax import (
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
from .circuit import FALSE, TRUE, Circuit, VarOrigin


class TranslationError(ValueError):
    pass


@dataclass
class QbfFormula:
    circuit: Circuit
    root: int
    universe_size: int
    # top-level existential set variables: name -> (arity, boolean variables)
    blocks: dict = field(default_factory=dict)

    def stats(self) -> dict:
        return self.circuit.stats(self.root)

    def num_vars(self) -> int:
        return self.stats()["bound_vars"]


class _Binding:
    __slots__ = ("lits", "token")
    _tokens = itertools.count(1)

    def __init__(self, lits):
        self.lits = lits
        self.token = next(self._tokens)


class _Compiler:
    def __init__(self, rs: RelStructure, circuit: Circuit, record_top: dict):
        self.rs = rs
        self.n = rs.universe_size
        self.c = circuit
        self.fo_slot: dict = {}
        self.so_slot: dict = {}
        self.n_fo = 0
        self.n_so = 0
        self.record_top = record_top
        self._fv: dict = {}

    def fv(self, f):
        hit = self._fv.get(id(f))
        if hit is None:
            hit = (free_vars(f), f)
            self._fv[id(f)] = hit
        return hit[0]

    def compile(self, f: Formula, scope_fo: frozenset, scope_so: frozenset, top: bool = False):
        fn = self._compile(f, scope_fo, scope_so, top)
        if isinstance(f, Atom):
            return fn
        fo, so = self.fv(f)
        if fo == scope_fo:
            return fn
        # a first-order variable in scope is irrelevant here: memoize on the relevant ones
        fo_slots = tuple(sorted(self.fo_slot[v] for v in fo))
        so_slots = tuple(sorted(self.so_slot[v] for v in so))
        memo: dict = {}

        def memoized(fe, se):
            key = (tuple([fe[i] for i in fo_slots]), tuple([se[j].token for j in so_slots]))
            r = memo.get(key)
            if r is None:
                r = memo[key] = fn(fe, se)
            return r

        return memoized

    def term(self, t):
        if isinstance(t, Var):
            if t not in self.fo_slot:
                raise TranslationError(f"unbound first-order variable {t}")
            return ("slot", self.fo_slot[t])
        if isinstance(t, Const):
            try:
                return ("const", self.rs.element(t.name))
            except ValueError as exc:
                raise TranslationError(str(exc)) from None
        raise TranslationError(f"not a term: {t!r}")

    def _compile(self, f, sfo, sso, top):
        c = self.c
        n = self.n
        if isinstance(f, Atom):
            terms = [self.term(t) for t in f.args]
            k = len(terms)
            if isinstance(f.pred, SoVar):
                if f.pred not in self.so_slot:
                    raise TranslationError(f"unbound second-order variable {f.pred}")
                s = self.so_slot[f.pred]
                if k == 1:
                    (ka, a), = terms
                    if ka == "const":
                        return lambda fe, se: se[s].lits[a]
                    return lambda fe, se: se[s].lits[fe[a]]
                if k == 2 and terms[0][0] == "slot" and terms[1][0] == "slot":
                    a, b = terms[0][1], terms[1][1]
                    return lambda fe, se: se[s].lits[fe[a] * n + fe[b]]

                def so_atom(fe, se):
                    idx = 0
                    for kind, v in terms:
                        idx = idx * n + (fe[v] if kind == "slot" else v)
                    return se[s].lits[idx]

                return so_atom
            name = f.pred.name
            if name not in self.rs.relations:
                raise TranslationError(f"unknown relation {name!r}")
            if self.rs.arity(name) != k:
                raise TranslationError(f"relation {name!r} has arity {self.rs.arity(name)}, used with {k}")
            members = self.rs[name]
            if k == 2 and all(kind == "slot" for kind, _ in terms):
                a, b = terms[0][1], terms[1][1]
                table = [[TRUE if (i, j) in members else FALSE for j in range(n)] for i in range(n)]
                return lambda fe, se: table[fe[a]][fe[b]]
            if k == 1 and terms[0][0] == "slot":
                a = terms[0][1]
                table1 = [TRUE if (i,) in members else FALSE for i in range(n)]
                return lambda fe, se: table1[fe[a]]

            def rel_atom(fe, se):
                tup = tuple(fe[v] if kind == "slot" else v for kind, v in terms)
                return TRUE if tup in members else FALSE

            return rel_atom
        if isinstance(f, Not):
            g = self.compile(f.arg, sfo, sso)
            return lambda fe, se: -g(fe, se)
        if isinstance(f, And):
            parts = [self.compile(a, sfo, sso, top) for a in f.args]

            def conj(fe, se):
                out = []
                for p in parts:
                    r = p(fe, se)
                    if r == FALSE:
                        return FALSE
                    out.append(r)
                return c.and_(out)

            return conj
        if isinstance(f, Or):
            parts = [self.compile(a, sfo, sso) for a in f.args]

            def disj(fe, se):
                out = []
                for p in parts:
                    r = p(fe, se)
                    if r == TRUE:
                        return TRUE
                    out.append(r)
                return c.or_(out)

            return disj
        if isinstance(f, Implies):
            a, b = self.compile(f.lhs, sfo, sso), self.compile(f.rhs, sfo, sso)

            def imp(fe, se):
                x = a(fe, se)
                if x == FALSE:
                    return TRUE
                return c.or_((-x, b(fe, se)))

            return imp
        if isinstance(f, Iff):
            a, b = self.compile(f.lhs, sfo, sso), self.compile(f.rhs, sfo, sso)
            return lambda fe, se: c.iff(a(fe, se), b(fe, se))
        if isinstance(f, Nand):
            a, b = self.compile(f.lhs, sfo, sso), self.compile(f.rhs, sfo, sso)

            def nand(fe, se):
                x = a(fe, se)
                if x == FALSE:
                    return TRUE
                return -c.and_((x, b(fe, se)))

            return nand
        if isinstance(f, (ForallFo, ExistsFo)):
            slot = self.n_fo
            self.n_fo += 1
            saved = self.fo_slot.get(f.var)
            self.fo_slot[f.var] = slot
            body = self.compile(f.body, sfo | {f.var}, sso)
            self._restore(self.fo_slot, f.var, saved)
            universe = range(n)
            if isinstance(f, ForallFo):

                def forall_fo(fe, se):
                    out = []
                    for e in universe:
                        fe[slot] = e
                        r = body(fe, se)
                        if r == FALSE:
                            return FALSE
                        out.append(r)
                    return c.and_(out)

                return forall_fo

            def exists_fo(fe, se):
                out = []
                for e in universe:
                    fe[slot] = e
                    r = body(fe, se)
                    if r == TRUE:
                        return TRUE
                    out.append(r)
                return c.or_(out)

            return exists_fo
        if isinstance(f, (ForallSo, ExistsSo)):
            v = f.var
            slot = self.n_so
            self.n_so += 1
            saved = self.so_slot.get(v)
            self.so_slot[v] = slot
            body = self.compile(f.body, sfo, sso | {v}, top and isinstance(f, ExistsSo))
            self._restore(self.so_slot, v, saved)
            tuples = list(itertools.product(range(n), repeat=v.arity))
            universal = isinstance(f, ForallSo)
            record = self.record_top if top and not universal else None

            def so_quant(fe, se):
                lits = tuple(c.var(VarOrigin(v.name, t)) for t in tuples)
                se[slot] = _Binding(lits)
                r = body(fe, se)
                if record is not None:
                    record[v.name] = (v.arity, lits)
                return c.forall(lits, r) if universal else c.exists(lits, r)

            return so_quant
        raise TranslationError(f"not a formula: {f!r}")

    @staticmethod
    def _restore(table, key, saved):
        if saved is None:
            del table[key]
        else:
            table[key] = saved


def translate(rs: RelStructure, f: Formula, circuit: Circuit | None = None) -> QbfFormula:
    """Build a circuit that is true iff ``rs`` satisfies the sentence ``f``."""
    fo, so = free_vars(f)
    if fo or so:
        names = ", ".join(sorted(str(v) for v in (*fo, *so)))
        raise TranslationError(f"formula is not a sentence; free variables: {names}")
    c = circuit or Circuit()
    top: dict = {}
    comp = _Compiler(rs, c, top)
    fn = comp.compile(f, frozenset(), frozenset(), top=True)
    root = fn([0] * comp.n_fo, [None] * comp.n_so)
    return QbfFormula(c, root, rs.universe_size, top)
