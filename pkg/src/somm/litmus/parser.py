"""Parser for the litmus-test language.

Grammar (``#`` and ``//`` start comments)::

    test      := "litmus" NAME-TO-END-OF-LINE
                 ["init" LOC "=" INT ("," LOC "=" INT)*]
                 ["values" INT ("," INT)*]
                 block ("||" block)*
                 "allowed?" outcome
    block     := "{" stmt* "}"
    stmt      := REG "=" LOC [";"]            load
               | LOC "=" expr [";"]           store
               | REG "=" expr [";"]           local assignment
               | "if" "(" cond ")" block ["else" (block | if-stmt)]
    cond      := conj ("||" conj)* ;  conj := unary ("&&" unary)*
    unary     := "!" unary | "(" cond ")" | expr CMP expr
    expr      := term (("+" | "-") term)* ;  term := atom ("*" atom)*
    atom      := INT | REG | "-" atom | "(" expr ")"
    outcome   := "true" | clause (("&&" | ",") clause)*
    clause    := [INT ":"] REG "==" INT

Every shared location must be declared in ``init``; any other identifier is a
thread-local register.  An unqualified register in the outcome must be
assigned in exactly one thread.
"""

from __future__ import annotations

import re

from .program import (
    Assign,
    BinOp,
    BoolOp,
    Cmp,
    If,
    LitmusTest,
    Load,
    NotCond,
    Num,
    Outcome,
    Reg,
    Store,
)


class LitmusSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        self.msg, self.line, self.col = msg, line, col
        super().__init__(f"{line}:{col}: {msg}")


_TOKENS = re.compile(
    r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>(?:\#|//)[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*\??)
  | (?P<op>\|\||&&|==|!=|<=|>=|[<>=;,{}():+\-*!])
    """,
    re.VERBOSE,
)
_CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")


class _Lexer:
    def __init__(self, text: str, line0: int = 1):
        self.toks = []
        pos, line, bol = 0, line0, 0
        while pos < len(text):
            m = _TOKENS.match(text, pos)
            if not m:
                raise LitmusSyntaxError(f"unexpected character {text[pos]!r}", line, pos - bol + 1)
            kind = m.lastgroup
            if kind == "nl":
                line, bol = line + 1, m.end()
            elif kind not in ("ws", "comment"):
                self.toks.append((kind, m.group(), line, pos - bol + 1))
            pos = m.end()
        self.toks.append(("eof", "", line, pos - bol + 1))
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return LitmusSyntaxError(msg, tok[2], tok[3])

    def at(self, text: str) -> bool:
        t = self.peek()
        return t[0] in ("op", "ident") and t[1] == text

    def expect(self, text: str):
        t = self.peek()
        if not self.at(text):
            shown = t[1] or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.next()

    def expect_kind(self, kind: str, what: str):
        t = self.peek()
        if t[0] != kind:
            raise self.error(f"expected {what}, found {t[1] or 'end of input'!r}")
        return self.next()


class _Parser:
    def __init__(self, lex: _Lexer, locations: set):
        self.lex = lex
        self.locations = locations

    def integer(self) -> int:
        neg = False
        if self.lex.at("-"):
            self.lex.next()
            neg = True
        t = self.lex.expect_kind("num", "an integer")
        return -int(t[1]) if neg else int(t[1])

    def block(self) -> tuple:
        self.lex.expect("{")
        stmts = []
        while not self.lex.at("}"):
            if self.lex.peek()[0] == "eof":
                raise self.lex.error("unterminated block, expected '}'")
            stmts.append(self.stmt())
        self.lex.next()
        return tuple(stmts)

    def stmt(self):
        t = self.lex.peek()
        pos = (t[2], t[3])
        if self.lex.at("if"):
            return self.if_stmt()
        if t[0] != "ident":
            raise self.lex.error(f"expected a statement, found {t[1]!r}")
        name = self.lex.next()[1]
        self.lex.expect("=")
        rhs = self.lex.peek()
        after = self.lex.peek(1)
        if name in self.locations:
            s = Store(name, self.expr(), pos)
        elif rhs[0] == "ident" and rhs[1] in self.locations and not (
            after[0] == "op" and after[1] in "+-*"
        ):
            self.lex.next()
            s = Load(name, rhs[1], pos)
        else:
            s = Assign(name, self.expr(), pos)
        if self.lex.at(";"):
            self.lex.next()
        return s

    def if_stmt(self):
        t = self.lex.expect("if")
        self.lex.expect("(")
        c = self.cond()
        self.lex.expect(")")
        then = self.block()
        orelse: tuple = ()
        if self.lex.at("else"):
            self.lex.next()
            orelse = (self.if_stmt(),) if self.lex.at("if") else self.block()
        return If(c, then, orelse, (t[2], t[3]))

    def cond(self):
        c = self.conj()
        while self.lex.at("||"):
            self.lex.next()
            c = BoolOp("||", c, self.conj())
        return c

    def conj(self):
        c = self.unary()
        while self.lex.at("&&"):
            self.lex.next()
            c = BoolOp("&&", c, self.unary())
        return c

    def unary(self):
        if self.lex.at("!"):
            self.lex.next()
            return NotCond(self.unary())
        if self.lex.at("("):
            # a parenthesis opens either a condition or an arithmetic operand
            save = self.lex.i
            self.lex.next()
            try:
                c = self.cond()
                self.lex.expect(")")
                if not any(self.lex.at(op) for op in _CMP_OPS + ("+", "-", "*")):
                    return c
            except LitmusSyntaxError:
                pass
            self.lex.i = save
        lhs = self.expr()
        t = self.lex.peek()
        if not (t[0] == "op" and t[1] in _CMP_OPS):
            raise self.lex.error(f"expected a comparison operator, found {t[1]!r}")
        self.lex.next()
        return Cmp(t[1], lhs, self.expr())

    def expr(self):
        e = self.term()
        while self.lex.at("+") or self.lex.at("-"):
            op = self.lex.next()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.atom()
        while self.lex.at("*"):
            self.lex.next()
            e = BinOp("*", e, self.atom())
        return e

    def atom(self):
        t = self.lex.peek()
        if t[0] == "num":
            self.lex.next()
            return Num(int(t[1]))
        if self.lex.at("-"):
            self.lex.next()
            inner = self.atom()
            return Num(-inner.value) if isinstance(inner, Num) else BinOp("-", Num(0), inner)
        if self.lex.at("("):
            self.lex.next()
            e = self.expr()
            self.lex.expect(")")
            return e
        if t[0] == "ident" and t[1] not in ("if", "else"):
            if t[1] in self.locations:
                raise self.lex.error(f"location {t[1]!r} used in an expression; load it into a register first")
            self.lex.next()
            return Reg(t[1])
        raise self.lex.error(f"expected an expression, found {t[1] or 'end of input'!r}")


def _assigned(stmts) -> set:
    out = set()
    for s in stmts:
        if isinstance(s, (Load, Assign)):
            out.add(s.reg)
        elif isinstance(s, If):
            out |= _assigned(s.then) | _assigned(s.orelse)
    return out


def parse(text: str) -> LitmusTest:
    lines = text.split("\n")
    first = next((i for i, ln in enumerate(lines) if ln.strip() and not ln.strip().startswith(("#", "//"))), None)
    if first is None:
        raise LitmusSyntaxError("empty input", 1, 1)
    header = lines[first].strip()
    if not header.startswith("litmus"):
        raise LitmusSyntaxError("expected 'litmus NAME' header", first + 1, 1)
    name = header[len("litmus"):].strip()
    if not name:
        raise LitmusSyntaxError("missing test name", first + 1, len(lines[first]) + 1)

    lex = _Lexer("\n".join(lines[first + 1:]), line0=first + 2)
    init: dict = {}
    if lex.at("init"):
        lex.next()
        while True:
            t = lex.expect_kind("ident", "a location name")
            if t[1] in init:
                raise lex.error(f"location {t[1]!r} initialised twice", t)
            lex.expect("=")
            init[t[1]] = _Parser(lex, set()).integer()
            if not lex.at(","):
                break
            lex.next()
        if lex.at(";"):
            lex.next()
    values = None
    if lex.at("values"):
        lex.next()
        values = []
        while True:
            values.append(_Parser(lex, set()).integer())
            if not lex.at(","):
                break
            lex.next()
        if lex.at(";"):
            lex.next()
        values = tuple(sorted(set(values)))

    p = _Parser(lex, set(init))
    if not lex.at("{"):
        raise lex.error("expected at least one thread block '{ ... }'")
    threads = [list(p.block())]
    while lex.at("||"):
        lex.next()
        threads.append(list(p.block()))

    t = lex.peek()
    if not (t[0] == "ident" and t[1] == "allowed?"):
        raise lex.error(f"expected 'allowed?', found {t[1] or 'end of input'!r}")
    lex.next()

    assigned = [_assigned(th) for th in threads]
    outcome = []
    if lex.at("true"):
        lex.next()
    else:
        while True:
            tok = lex.peek()
            thread = None
            if tok[0] == "num" and lex.peek(1)[1] == ":":
                thread = int(lex.next()[1])
                lex.next()
                if thread >= len(threads):
                    raise lex.error(f"thread {thread} does not exist (threads are numbered from 0)", tok)
            reg = lex.expect_kind("ident", "a register")
            lex.expect("==")
            value = p.integer()
            if thread is None:
                owners = [i for i, regs in enumerate(assigned) if reg[1] in regs]
                if not owners:
                    raise lex.error(f"register {reg[1]!r} is never assigned", reg)
                if len(owners) > 1:
                    raise lex.error(f"register {reg[1]!r} is ambiguous; qualify it as T:{reg[1]}", reg)
                thread = owners[0]
            elif reg[1] not in assigned[thread]:
                raise lex.error(f"register {reg[1]!r} is never assigned in thread {thread}", reg)
            outcome.append(Outcome(thread, reg[1], value))
            if lex.at("&&") or lex.at(","):
                lex.next()
                continue
            break
    if lex.at(";"):
        lex.next()
    if lex.peek()[0] != "eof":
        raise lex.error(f"unexpected trailing input {lex.peek()[1]!r}")
    return LitmusTest(name, init, threads, outcome, values)


def parse_file(path) -> LitmusTest:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
