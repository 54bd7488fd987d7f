"""S-expression dump and parse for formulas and structures.

Formula syntax::

    (forall-fo ?x BODY)   (exists-fo ?x BODY)
    (forall-so $X 2 BODY) (exists-so $X 2 BODY)
    (and F ...) (or F ...) (not F) (implies F G) (iff F G) (nand F G)
    (conflict ?x a1)      ; relation atom, terms ?var or constant
    ($X ?x ?y)            ; second-order variable atom

Structure syntax::

    (structure N (const NAME ID) ... (rel NAME ARITY (i j) ...) ...)

Constants ``a1 .. aN`` and the relations ``=`` and ``empty`` are implicit and
are not written out.
"""

from __future__ import annotations

import re

from .syntax import (
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
    Rel,
    SoVar,
    Var,
)


class SexprError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise SexprError(f"bad character at offset {pos}")
        pos = m.end()
        if m.group(1):
            continue
        out.append(m.group(2) or m.group(3) or m.group(4))
    return out


def read(text: str):
    toks = tokenize(text)
    if not toks:
        raise SexprError("empty input")
    pos = 0

    def item():
        nonlocal pos
        if pos >= len(toks):
            raise SexprError("unexpected end of input")
        t = toks[pos]
        pos += 1
        if t == "(":
            lst = []
            while True:
                if pos >= len(toks):
                    raise SexprError("unbalanced '('")
                if toks[pos] == ")":
                    pos += 1
                    return lst
                lst.append(item())
        if t == ")":
            raise SexprError("unexpected ')'")
        return t

    v = item()
    if pos != len(toks):
        raise SexprError("trailing tokens after expression")
    return v


# -- formulas ----------------------------------------------------------------

_BIN = {Implies: "implies", Iff: "iff", Nand: "nand"}
_QUANT = {ForallFo: "forall-fo", ExistsFo: "exists-fo", ForallSo: "forall-so", ExistsSo: "exists-so"}


def _term(t) -> str:
    return f"?{t.name}" if isinstance(t, Var) else t.name


def dump_formula(f: Formula) -> str:
    parts: list = []

    def go(g):
        if isinstance(g, Atom):
            head = f"${g.pred.name}" if isinstance(g.pred, SoVar) else g.pred.name
            parts.append("(" + " ".join([head] + [_term(t) for t in g.args]) + ")")
        elif isinstance(g, Not):
            parts.append("(not ")
            go(g.arg)
            parts.append(")")
        elif isinstance(g, (And, Or)):
            parts.append("(and" if isinstance(g, And) else "(or")
            for c in g.args:
                parts.append(" ")
                go(c)
            parts.append(")")
        elif type(g) in _BIN:
            parts.append(f"({_BIN[type(g)]} ")
            go(g.lhs)
            parts.append(" ")
            go(g.rhs)
            parts.append(")")
        elif isinstance(g, (ForallSo, ExistsSo)):
            parts.append(f"({_QUANT[type(g)]} ${g.var.name} {g.var.arity} ")
            go(g.body)
            parts.append(")")
        elif isinstance(g, (ForallFo, ExistsFo)):
            parts.append(f"({_QUANT[type(g)]} ?{g.var.name} ")
            go(g.body)
            parts.append(")")
        else:
            raise TypeError(f"not a formula: {g!r}")

    go(f)
    return "".join(parts)


def parse_formula(text: str) -> Formula:
    return formula_from_tree(read(text))


def formula_from_tree(tree) -> Formula:
    def term(t):
        if not isinstance(t, str):
            raise SexprError(f"term expected, got {t!r}")
        return Var(t[1:]) if t.startswith("?") else Const(t)

    def go(x):
        if not isinstance(x, list) or not x:
            raise SexprError(f"formula expected, got {x!r}")
        head = x[0]
        if not isinstance(head, str):
            raise SexprError("operator expected")
        if head == "and":
            return And(tuple(go(c) for c in x[1:]))
        if head == "or":
            return Or(tuple(go(c) for c in x[1:]))
        if head == "not":
            _arity(x, 2)
            return Not(go(x[1]))
        if head in ("implies", "iff", "nand"):
            _arity(x, 3)
            cls = {"implies": Implies, "iff": Iff, "nand": Nand}[head]
            return cls(go(x[1]), go(x[2]))
        if head in ("forall-fo", "exists-fo"):
            _arity(x, 3)
            v = x[1]
            if not isinstance(v, str) or not v.startswith("?"):
                raise SexprError(f"first-order variable expected, got {v!r}")
            cls = ForallFo if head == "forall-fo" else ExistsFo
            return cls(Var(v[1:]), go(x[2]))
        if head in ("forall-so", "exists-so"):
            _arity(x, 4)
            v = x[1]
            if not isinstance(v, str) or not v.startswith("$"):
                raise SexprError(f"second-order variable expected, got {v!r}")
            try:
                k = int(x[2])
            except (TypeError, ValueError):
                raise SexprError(f"arity expected, got {x[2]!r}") from None
            cls = ForallSo if head == "forall-so" else ExistsSo
            return cls(SoVar(v[1:], k), go(x[3]))
        terms = tuple(term(t) for t in x[1:])
        if head.startswith("$"):
            return Atom(SoVar(head[1:], len(terms)), terms)
        return Atom(Rel(head, len(terms)), terms)

    return go(tree)


def _arity(x, n):
    if len(x) != n:
        raise SexprError(f"'{x[0]}' takes {n - 1} operands, got {len(x) - 1}")


# -- structures -----------------------------------------------------------------


def dump_structure(rs) -> str:
    lines = [f"(structure {rs.universe_size}"]
    for name, e in sorted(rs.constants.items(), key=lambda kv: (kv[1], kv[0])):
        if name != f"a{e + 1}":
            lines.append(f"  (const {name} {e})")
    for name in sorted(rs.relations):
        if name in ("=", "empty"):
            continue
        k, tuples = rs.relations[name]
        body = " ".join("(" + " ".join(map(str, t)) + ")" for t in sorted(tuples))
        lines.append(f"  (rel {name} {k}{' ' + body if body else ''})")
    return "\n".join(lines) + ")\n"


def parse_structure(text: str):
    from .structure import RelStructure

    tree = read(text)
    if not isinstance(tree, list) or not tree or tree[0] != "structure" or len(tree) < 2:
        raise SexprError("expected (structure N ...)")
    try:
        n = int(tree[1])
    except ValueError:
        raise SexprError("universe size must be an integer") from None
    consts, rels = {}, {}
    for item in tree[2:]:
        if not isinstance(item, list) or not item:
            raise SexprError(f"bad structure item {item!r}")
        if item[0] == "const":
            _arity(item, 3)
            consts[item[1]] = int(item[2])
        elif item[0] == "rel":
            if len(item) < 3:
                raise SexprError("rel needs a name and an arity")
            k = int(item[2])
            tuples = []
            for t in item[3:]:
                if not isinstance(t, list):
                    raise SexprError(f"tuple expected in relation {item[1]}")
                tuples.append(tuple(int(v) for v in t))
            rels[item[1]] = (k, tuples)
        else:
            raise SexprError(f"unknown structure item {item[0]!r}")
    return RelStructure(n, rels, consts)
