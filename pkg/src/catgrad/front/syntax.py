"""Surface language: AST, lexer and recursive-descent parser.

Grammar::

    program  := ('\\' | 'λ') pattern '->' expr
    pattern  := NAME | '(' ')' | '(' pattern ',' pattern ')' | '[' pattern (',' pattern)* ']'
    expr     := 'let' NAME '=' expr 'in' expr | sum
    sum      := product (('+' | '-') product)*
    product  := unary ('*' unary)*
    unary    := '-' unary | FUNC unary | postfix
    postfix  := atom ('.' INT)*
    atom     := NUMBER | NAME | '(' expr ')' | '(' expr ',' expr ')' | '[' expr (',' expr)* ']'

``FUNC`` is one of ``sin cos exp neg fst snd sum``.  ``a - b`` is read as
``a + neg b``.  ``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional


class SourceError(ValueError):
    """An error tied to a location in the source text."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        self.bare = message
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(f"{where}{message}")


class ParseError(SourceError):
    pass


class UnboundVariableError(SourceError):
    pass


class DuplicateNameError(SourceError):
    pass


Pos = tuple  # (line, col)


def _pos_field():
    return field(default=(0, 0), compare=False, repr=False)


# --- patterns -------------------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class PPair:
    left: "Pattern"
    right: "Pattern"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class PVec:
    items: tuple
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class PUnit:
    pos: Pos = _pos_field()


Pattern = object


def pattern_names(p) -> list:
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PPair):
        return pattern_names(p.left) + pattern_names(p.right)
    if isinstance(p, PVec):
        return [n for q in p.items for n in pattern_names(q)]
    return []


# --- expressions ----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Lit:
    value: float
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class PairE:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Fst:
    arg: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Snd:
    arg: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Neg:
    arg: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Sin:
    arg: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Cos:
    arg: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Exp:
    arg: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Expr"
    body: "Expr"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class VecE:
    items: tuple
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Idx:
    arg: "Expr"
    index: int
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class SumE:
    arg: "Expr"
    pos: Pos = _pos_field()


Expr = object

UNARY = {"sin": Sin, "cos": Cos, "exp": Exp, "neg": Neg, "fst": Fst, "snd": Snd, "sum": SumE}
KEYWORDS = {"let", "in"} | set(UNARY)


def Sub(x, y, pos=(0, 0)):
    return Add(x, Neg(y, pos), pos)


# --- lexer ----------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUM INT NAME KW SYM EOF
    text: str
    line: int
    col: int


_NUM = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_INT = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_SYMS = ("->", "\\", "λ", "(", ")", "[", "]", ",", "+", "-", "*", "=", ".")


def tokenize(text: str) -> list:
    toks: list = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        after_dot = bool(toks) and toks[-1].kind == "SYM" and toks[-1].text == "."
        if after_dot and c.isdigit():
            m = _INT.match(text, i)
            toks.append(Token("INT", m.group(), line, col))
        elif c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit() and not _ends_operand(toks)):
            m = _NUM.match(text, i)
            toks.append(Token("NUM", m.group(), line, col))
        elif _NAME.match(text, i):
            word = _NAME.match(text, i).group()
            toks.append(Token("KW" if word in KEYWORDS else "NAME", word, line, col))
        else:
            for s in _SYMS:
                if text.startswith(s, i):
                    toks.append(Token("SYM", s, line, col))
                    break
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
        width = len(toks[-1].text)
        i, col = i + width, col + width
    toks.append(Token("EOF", "", line, col))
    return toks


def _ends_operand(toks) -> bool:
    if not toks:
        return False
    t = toks[-1]
    return t.kind in ("NAME", "NUM", "INT") or (t.kind == "SYM" and t.text in (")", "]"))


# --- parser ---------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Optional[Token] = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("SYM", "KW") and self.tok.text == text

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def program(self):
        if not (self.at("\\") or self.at("λ")):
            self.fail("expected '\\' to start a lambda")
        self.i += 1
        p = self.pattern()
        self.eat("->")
        e = self.expr()
        if self.tok.kind != "EOF":
            self.fail("unexpected trailing input")
        return p, e

    def pattern(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "NAME":
            self.i += 1
            return PVar(t.text, pos)
        if self.at("("):
            self.i += 1
            if self.at(")"):
                self.i += 1
                return PUnit(pos)
            left = self.pattern()
            self.eat(",")
            right = self.pattern()
            self.eat(")")
            return PPair(left, right, pos)
        if self.at("["):
            self.i += 1
            items = [self.pattern()]
            while self.at(","):
                self.i += 1
                items.append(self.pattern())
            self.eat("]")
            return PVec(tuple(items), pos)
        self.fail("expected a pattern")

    def expr(self):
        if self.at("let"):
            t = self.tok
            self.i += 1
            name = self.tok
            if name.kind != "NAME":
                self.fail("expected a name after 'let'")
            self.i += 1
            self.eat("=")
            bound = self.expr()
            self.eat("in")
            body = self.expr()
            return Let(name.text, bound, body, (t.line, t.col))
        return self.sum()

    def sum(self):
        e = self.product()
        while self.at("+") or self.at("-"):
            t = self.tok
            self.i += 1
            rhs = self.product()
            pos = (t.line, t.col)
            e = Add(e, rhs, pos) if t.text == "+" else Sub(e, rhs, pos)
        return e

    def product(self):
        e = self.unary()
        while self.at("*"):
            t = self.tok
            self.i += 1
            e = Mul(e, self.unary(), (t.line, t.col))
        return e

    def unary(self):
        t = self.tok
        pos = (t.line, t.col)
        if self.at("-"):
            self.i += 1
            return Neg(self.unary(), pos)
        if t.kind == "KW" and t.text in UNARY:
            self.i += 1
            return UNARY[t.text](self.unary(), pos)
        return self.postfix()

    def postfix(self):
        e = self.atom()
        while self.at("."):
            t = self.tok
            self.i += 1
            if self.tok.kind != "INT":
                self.fail("expected an index after '.'")
            e = Idx(e, int(self.tok.text), (t.line, t.col))
            self.i += 1
        return e

    def atom(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "NUM":
            self.i += 1
            return Lit(float(t.text), pos)
        if t.kind == "NAME":
            self.i += 1
            return Var(t.text, pos)
        if self.at("("):
            self.i += 1
            e = self.expr()
            if self.at(","):
                self.i += 1
                r = self.expr()
                self.eat(")")
                return PairE(e, r, pos)
            self.eat(")")
            return e
        if self.at("["):
            self.i += 1
            items = [self.expr()]
            while self.at(","):
                self.i += 1
                items.append(self.expr())
            self.eat("]")
            return VecE(tuple(items), pos)
        self.fail("expected an expression")


def parse(text: str):
    """Parse a program into ``(pattern, expr)``, scope-checked and alpha-normalized."""
    p, e = _Parser(text).program()
    return p, resolve(p, e)


def parse_expr(text: str):
    """Parse a bare expression (no lambda); used by tests and tooling."""
    ps = _Parser(text)
    e = ps.expr()
    if ps.tok.kind != "EOF":
        ps.fail("unexpected trailing input")
    return e


# --- scoping --------------------------------------------------------------------


def check_pattern(p) -> None:
    seen: dict = {}

    def walk(q):
        if isinstance(q, PVar):
            if q.name in seen:
                raise DuplicateNameError(f"name {q.name!r} bound twice in pattern", *q.pos)
            seen[q.name] = q
        elif isinstance(q, PPair):
            walk(q.left)
            walk(q.right)
        elif isinstance(q, PVec):
            for r in q.items:
                walk(r)

    walk(p)


def resolve(p, e):
    """Check that every variable is bound and rename shadowing ``let`` binders apart."""
    check_pattern(p)
    names = set(pattern_names(p))
    env = {n: n for n in names}
    counter = [0]

    def fresh(base):
        while True:
            counter[0] += 1
            cand = f"{base}~{counter[0]}"
            if cand not in names:
                names.add(cand)
                return cand

    def go(x, env):
        if isinstance(x, Var):
            if x.name not in env:
                raise UnboundVariableError(f"unbound variable {x.name!r}", *x.pos)
            return Var(env[x.name], x.pos)
        if isinstance(x, Lit):
            return x
        if isinstance(x, Let):
            bound = go(x.bound, env)
            new = x.name
            if new in names:
                new = fresh(x.name)
            else:
                names.add(new)
            return Let(new, bound, go(x.body, {**env, x.name: new}), x.pos)
        if isinstance(x, (PairE, Add, Mul)):
            return type(x)(go(x.left, env), go(x.right, env), x.pos)
        if isinstance(x, Idx):
            return Idx(go(x.arg, env), x.index, x.pos)
        if isinstance(x, VecE):
            return VecE(tuple(go(i, env) for i in x.items), x.pos)
        return type(x)(go(x.arg, env), x.pos)

    return go(e, env)


# --- printing -------------------------------------------------------------------


def show_pattern(p) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PUnit):
        return "()"
    if isinstance(p, PPair):
        return f"({show_pattern(p.left)}, {show_pattern(p.right)})"
    return "[" + ", ".join(show_pattern(q) for q in p.items) + "]"


_FN_NAMES = {Sin: "sin", Cos: "cos", Exp: "exp", Neg: "neg", Fst: "fst", Snd: "snd", SumE: "sum"}


def show_expr(e, prec: int = 0) -> str:
    """Re-parseable text for an expression (fully parenthesized where needed)."""
    if isinstance(e, Var):
        return e.name.replace("~", "_")
    if isinstance(e, Lit):
        s = repr(float(e.value))
        return s if e.value >= 0 else f"({s})"
    if isinstance(e, PairE):
        return f"({show_expr(e.left)}, {show_expr(e.right)})"
    if isinstance(e, VecE):
        return "[" + ", ".join(show_expr(i) for i in e.items) + "]"
    if isinstance(e, Idx):
        return f"{show_expr(e.arg, 4)}.{e.index}"
    if isinstance(e, Add):
        s = f"{show_expr(e.left, 1)} + {show_expr(e.right, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, Mul):
        s = f"{show_expr(e.left, 2)} * {show_expr(e.right, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(e, Let):
        s = f"let {e.name.replace('~', '_')} = {show_expr(e.bound)} in {show_expr(e.body)}"
        return f"({s})"
    s = f"{_FN_NAMES[type(e)]} {show_expr(e.arg, 3)}"
    return f"({s})" if prec > 2 else s


def show_program(p, e) -> str:
    return f"\\{show_pattern(p)} -> {show_expr(e)}"
