"""A tiny expression language for scalar functions of ``(x, y)``.

Grammar (``^`` binds tighter than unary minus, and is right associative)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "i" | "x" | "y" | FUNC "(" expr ")" | "(" expr ")"

Functions: sin cos sinh cosh exp ln sqrt.  Expressions are evaluated to jets,
see :func:`eval_jet`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from . import jets
from .jets import Jet, JetError

FUNCTIONS: dict[str, Callable[[Jet], Jet]] = {
    "sin": jets.jet_sin,
    "cos": jets.jet_cos,
    "sinh": jets.jet_sinh,
    "cosh": jets.jet_cosh,
    "exp": jets.jet_exp,
    "ln": jets.jet_log,
    "sqrt": jets.jet_sqrt,
}
VARIABLES = ("x", "y")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, source: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.source = source


class ExprEvalError(ValueError):
    def __init__(self, message: str, subexpr: "Expr"):
        super().__init__(f"{message} in '{to_source(subexpr)}'")
        self.subexpr = subexpr


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        text = m.group(kind)
        toks.append(_Tok(kind, text, m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, aliases: Mapping[str, str]):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.aliases = aliases

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ExprSyntaxError(message, tok.pos, self.src)

    def eat(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            if self.tok.text == ")":
                self.error("unbalanced ')'")
            self.error(f"unexpected token {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.eat("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.eat("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(complex(float(tok.text)))
        if tok.kind == "name":
            self.i += 1
            name = self.aliases.get(tok.text, tok.text)
            if name == "i":
                return Num(1j)
            if name in VARIABLES:
                return Var(name)
            if name in FUNCTIONS:
                if not self.eat("("):
                    self.error(f"expected '(' after {tok.text}")
                arg = self.expr()
                if not self.eat(")"):
                    self.error("expected ')'")
                return Call(name, arg)
            self.error(f"unknown identifier {tok.text!r}", tok)
        if self.eat("("):
            e = self.expr()
            if not self.eat(")"):
                self.error("expected ')'")
            return e
        if tok.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {tok.text!r}")


def parse(source: str, aliases: Mapping[str, str] | None = None) -> Expr:
    """Parse ``source``; ``aliases`` renames identifiers (e.g. ``{"u": "x"}``)."""
    return _Parser(source, aliases or {}).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3


def _num_source(v: complex) -> str:
    if v == 1j:
        return "i"
    if v.imag == 0 and v.real >= 0:
        return repr(float(v.real))
    if v.real == 0:
        return f"{repr(float(v.imag))}*i"
    return f"({repr(float(v.real))} + {repr(float(v.imag))}*i)"


def to_source(e: Expr) -> str:
    """Print with the minimal parentheses needed to re-parse to the same tree."""
    return _src(e)[0]


def _src(e: Expr) -> tuple[str, int]:
    if isinstance(e, Num):
        s = _num_source(e.value)
        return s, (5 if s[0] != "(" and "*" not in s else 2)
    if isinstance(e, Var):
        return e.name, 5
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})", 5
    if isinstance(e, Neg):
        s, p = _src(e.operand)
        # "-" followed by a power or atom binds as written
        return "-" + (s if p >= _NEG_PREC else f"({s})"), _NEG_PREC
    op, prec = e.op, _PREC[e.op]
    ls, lp = _src(e.left)
    rs, rp = _src(e.right)
    if op == "^":
        # base must be an atom; exponent may be any unary
        ls = ls if lp >= 5 else f"({ls})"
        rs = rs if rp >= _NEG_PREC else f"({rs})"
    else:
        ls = ls if lp >= prec else f"({ls})"
        rs = rs if rp > prec else f"({rs})"
    return f"{ls} {op} {rs}", prec


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Call):
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


def _is_integer_constant(e: Expr) -> int | None:
    if isinstance(e, Num) and e.value.imag == 0 and float(e.value.real).is_integer():
        return int(e.value.real)
    if isinstance(e, Neg):
        v = _is_integer_constant(e.operand)
        return None if v is None else -v
    return None


def eval_jet(e: Expr, base: tuple[complex, complex], order: int = jets.DEFAULT_ORDER) -> Jet:
    """Expand ``e`` at ``base`` as a jet of the given order."""
    bx, by = base
    env = {"x": Jet.variable("x", bx, order), "y": Jet.variable("y", by, order)}
    return _eval(e, env, order)


def _eval(e: Expr, env: dict[str, Jet], order: int) -> Jet:
    if isinstance(e, Num):
        return Jet.constant(e.value, order)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -_eval(e.operand, env, order)
    try:
        if isinstance(e, Call):
            return FUNCTIONS[e.func](_eval(e.arg, env, order))
        left = _eval(e.left, env, order)
        if e.op == "^":
            n = _is_integer_constant(e.right)
            if n is not None:
                return jets.jet_int_power(left, n)
            right = _eval(e.right, env, order)
            if not (right - right.value).max_abs():
                return jets.jet_power(left, right.value)
            return jets.jet_exp(right * jets.jet_log(left))
        right = _eval(e.right, env, order)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        return left / right
    except ExprEvalError:
        raise
    except (JetError, ZeroDivisionError, OverflowError) as exc:
        raise ExprEvalError(str(exc), e) from exc


def evaluate(e: Expr, x: complex, y: complex) -> complex:
    return eval_jet(e, (x, y), 0).value


def compile_expr(source: str | Expr, aliases: Mapping[str, str] | None = None) -> Expr:
    return source if not isinstance(source, str) else parse(source, aliases)
