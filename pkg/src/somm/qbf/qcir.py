"""QCIR-G14 writer and reader.

The writer numbers variables ``1..V`` in prefix order and gates ``V+1..`` in
topological order.  By default the circuit is prenexed first; with
``prenex=False`` quantifiers are kept as quantified gates.
"""

from __future__ import annotations

import io
import re

from .circuit import AND, CONST, EXISTS, FORALL, OR, TRUE, VAR, Circuit
from .prenex import prenex as to_prenex


class QcirError(ValueError):
    pass


def _lit(num: dict, lit: int) -> str:
    v = num[abs(lit)]
    return str(v) if lit > 0 else f"-{v}"


def write_qcir(c: Circuit, root: int, prenex: bool = True) -> str:
    out = io.StringIO()
    write_qcir_to(out, c, root, prenex)
    return out.getvalue()


def write_qcir_to(out, c: Circuit, root: int, prenex: bool = True) -> dict:
    """Stream QCIR to ``out``; returns counts of variables and gates."""
    if prenex:
        p = to_prenex(c, root)
        prefix, matrix = p.prefix, p.matrix
    else:
        prefix, matrix = [], root
    num: dict = {}
    nxt = 1
    for _, vs in prefix:
        for v in vs:
            num[v] = nxt
            nxt += 1
    reach = c.reachable(matrix)
    # the constant node is reachable only as a constant matrix, written as the output gate
    order = [n for n in reach if c.kind[n] not in (VAR, CONST)]
    if not prenex:
        # variables bound inside quantified gates, in first-binding order
        for n in order:
            for v in c.bound[n]:
                if v not in num:
                    num[v] = nxt
                    nxt += 1
    free = [n for n in reach if c.kind[n] == VAR and n not in num]
    for v in free:
        num[v] = nxt
        nxt += 1
    n_vars = nxt - 1
    gate_lines = []
    for n in order:
        num[n] = nxt
        nxt += 1
    if abs(matrix) == TRUE or c.kind[abs(matrix)] == VAR or not order:
        # output must be a gate: wrap constants and bare literals
        out_gate = nxt
        nxt += 1
    else:
        out_gate = None
    out.write(f"#QCIR-G14 {nxt - 1}\n")
    if free:
        out.write("free(" + ", ".join(str(num[v]) for v in free) + ")\n")
    for kind, vs in prefix:
        word = "exists" if kind == EXISTS else "forall"
        out.write(f"{word}(" + ", ".join(str(num[v]) for v in vs) + ")\n")
    if out_gate is None:
        out.write(f"output({_lit(num, matrix)})\n")
    else:
        out.write(f"output({out_gate})\n")
    write = out.write
    for n in order:
        k = c.kind[n]
        if k in (AND, OR):
            word = "and" if k == AND else "or"
            write(f"{num[n]} = {word}(" + ", ".join([_lit(num, a) for a in c.args[n]]) + ")\n")
        else:
            word = "exists" if k == EXISTS else "forall"
            vs = ", ".join(str(num[v]) for v in c.bound[n])
            write(f"{num[n]} = {word}({vs}; {_lit(num, c.args[n][0])})\n")
        gate_lines.append(n)
    if out_gate is not None:
        if matrix == TRUE:
            write(f"{out_gate} = and()\n")
        elif matrix == -TRUE:
            write(f"{out_gate} = or()\n")
        else:
            write(f"{out_gate} = and({_lit(num, matrix)})\n")
    return {"variables": n_vars, "gates": len(gate_lines) + (out_gate is not None)}


# -- reader ---------------------------------------------------------------------

_GATE = re.compile(r"^\s*(\w+)\s*=\s*(and|or|xor|ite|exists|forall)\s*\((.*)\)\s*$", re.IGNORECASE)
_BLOCK = re.compile(r"^\s*(free|exists|forall|output)\s*\((.*)\)\s*$", re.IGNORECASE)


def read_qcir(text: str, c: Circuit | None = None) -> tuple:
    """Parse QCIR into ``(circuit, root)``; free variables become outermost existentials."""
    c = c or Circuit()
    names: dict = {}
    prefix: list = []
    output = None
    gates: list = []
    lines = text.splitlines()
    if not lines or not lines[0].upper().startswith("#QCIR"):
        raise QcirError("missing '#QCIR-G14' header")

    def var(name):
        if name not in names:
            names[name] = c.var()
        return names[name]

    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _BLOCK.match(line)
        if m:
            word, body = m.group(1).lower(), m.group(2)
            items = [t.strip() for t in body.split(",") if t.strip()]
            if word == "output":
                if len(items) != 1:
                    raise QcirError(f"line {no}: output takes one literal")
                output = items[0]
            else:
                kind = FORALL if word == "forall" else EXISTS
                prefix.append((kind, [var(t) for t in items]))
            continue
        m = _GATE.match(line)
        if not m:
            raise QcirError(f"line {no}: cannot parse {raw!r}")
        gates.append((no, m.group(1), m.group(2).lower(), m.group(3)))
    if output is None:
        raise QcirError("missing output statement")

    # a quantified gate may bind a variable that earlier gates already use
    for _, _, word, body in gates:
        if word in ("exists", "forall") and ";" in body:
            for t in body.split(";", 1)[0].split(","):
                if t.strip():
                    var(t.strip())

    defined: dict = {}

    def lit(tok: str, no: int) -> int:
        neg = tok.startswith("-")
        name = tok[1:] if neg else tok
        if name in defined:
            v = defined[name]
        elif name in names:
            v = names[name]
        else:
            raise QcirError(f"line {no}: undefined literal {tok!r}")
        return -v if neg else v

    for no, name, word, body in gates:
        if name in defined or name in names:
            raise QcirError(f"line {no}: {name!r} defined twice")
        if word in ("exists", "forall"):
            if ";" not in body:
                raise QcirError(f"line {no}: quantified gate needs 'vars; literal'")
            vs_txt, inner = body.split(";", 1)
            vs = [var(t.strip()) for t in vs_txt.split(",") if t.strip()]
            g = c.exists(vs, lit(inner.strip(), no)) if word == "exists" else c.forall(vs, lit(inner.strip(), no))
        else:
            args = [lit(t.strip(), no) for t in body.split(",") if t.strip()]
            if word == "and":
                g = c.and_(args)
            elif word == "or":
                g = c.or_(args)
            elif word == "xor":
                g = args[0] if args else -TRUE
                for a in args[1:]:
                    g = c.or_((c.and_((g, -a)), c.and_((-g, a))))
            else:
                if len(args) != 3:
                    raise QcirError(f"line {no}: ite takes three literals")
                g = c.or_((c.and_((args[0], args[1])), c.and_((-args[0], args[2]))))
        defined[name] = g
    root = lit(output, len(lines))
    for kind, vs in reversed(prefix):
        root = c.forall(vs, root) if kind == FORALL else c.exists(vs, root)
    return c, root
