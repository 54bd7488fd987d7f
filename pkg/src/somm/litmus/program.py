"""Litmus-test abstract syntax and a source printer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Pos = tuple  # (line, column), 1-based


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # + - *
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[Num, Reg, BinOp]


@dataclass(frozen=True)
class Cmp:
    op: str  # == != < <= > >=
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class BoolOp:
    op: str  # && ||
    lhs: "Cond"
    rhs: "Cond"


@dataclass(frozen=True)
class NotCond:
    arg: "Cond"


Cond = Union[Cmp, BoolOp, NotCond]


@dataclass(frozen=True)
class Load:
    reg: str
    loc: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Store:
    loc: str
    expr: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Assign:
    reg: str
    expr: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class If:
    cond: Cond
    then: tuple
    orelse: tuple = ()
    pos: Pos = field(default=(0, 0), compare=False)


Stmt = Union[Load, Store, Assign, If]


@dataclass(frozen=True)
class Outcome:
    """One clause ``thread:reg == value`` of the asked final condition."""

    thread: int
    reg: str
    value: int


@dataclass
class LitmusTest:
    name: str
    init: dict
    threads: list
    outcome: list
    # explicit read-value domain, overriding the inferred one
    values: tuple | None = None

    @property
    def locations(self) -> list:
        return sorted(self.init)

    def outcome_for(self, thread: int) -> dict:
        return {o.reg: o.value for o in self.outcome if o.thread == thread}


def eval_expr(e: Expr, regs: dict) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Reg):
        if e.name not in regs:
            raise KeyError(e.name)
        return regs[e.name]
    a, b = eval_expr(e.lhs, regs), eval_expr(e.rhs, regs)
    return a + b if e.op == "+" else a - b if e.op == "-" else a * b


_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_cond(c: Cond, regs: dict) -> bool:
    if isinstance(c, Cmp):
        return _CMP[c.op](eval_expr(c.lhs, regs), eval_expr(c.rhs, regs))
    if isinstance(c, NotCond):
        return not eval_cond(c.arg, regs)
    if c.op == "&&":
        return eval_cond(c.lhs, regs) and eval_cond(c.rhs, regs)
    return eval_cond(c.lhs, regs) or eval_cond(c.rhs, regs)


# -- printing -------------------------------------------------------------------


def show_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Reg):
        return e.name
    return f"({show_expr(e.lhs)} {e.op} {show_expr(e.rhs)})"


def show_cond(c: Cond) -> str:
    if isinstance(c, Cmp):
        return f"{show_expr(c.lhs)} {c.op} {show_expr(c.rhs)}"
    if isinstance(c, NotCond):
        return f"!({show_cond(c.arg)})"
    return f"({show_cond(c.lhs)} {c.op} {show_cond(c.rhs)})"


def _show_block(stmts, indent: int) -> list:
    pad = "  " * indent
    out = []
    for s in stmts:
        if isinstance(s, Load):
            out.append(f"{pad}{s.reg} = {s.loc};")
        elif isinstance(s, Store):
            out.append(f"{pad}{s.loc} = {show_expr(s.expr)};")
        elif isinstance(s, Assign):
            out.append(f"{pad}{s.reg} = {show_expr(s.expr)};")
        else:
            out.append(f"{pad}if ({show_cond(s.cond)}) {{")
            out += _show_block(s.then, indent + 1)
            if s.orelse:
                out.append(f"{pad}}} else {{")
                out += _show_block(s.orelse, indent + 1)
            out.append(f"{pad}}}")
    return out


def to_source(t: LitmusTest) -> str:
    lines = [f"litmus {t.name}"]
    if t.init:
        lines.append("init " + ", ".join(f"{k} = {v}" for k, v in t.init.items()))
    if t.values is not None:
        lines.append("values " + ", ".join(map(str, t.values)))
    blocks = []
    for th in t.threads:
        blocks.append("{\n" + "\n".join(_show_block(th, 1)) + "\n}")
    lines.append(" || ".join(blocks))
    conds = " && ".join(f"{o.thread}:{o.reg} == {o.value}" for o in t.outcome)
    lines.append(f"allowed? {conds or 'true'}")
    return "\n".join(lines) + "\n"
