"""Tokens, syntax tree, recursive-descent parser and renderer for identity sources.

Grammar (``q`` is the formal variable; other identifiers are parameters or
bound indices)::

    expr   := unary (("+" | "-") unary)*
    unary  := "-" unary | term
    term   := factor (("*" | "/") factor | factor)*      # juxtaposition multiplies
    factor := "(-1)" "^" atom | atom ("^" ["-"] integer)?
    atom   := integer | ident | call | "(" expr ")"
    call   := ident "(" expr ("," expr)* ")"

``^`` binds tighter than unary minus, so ``-k^2`` is ``-(k^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "DSLError",
    "DSLSyntaxError",
    "Token",
    "tokenize",
    "Num",
    "Name",
    "Neg",
    "BinOp",
    "Pow",
    "Sign",
    "Call",
    "Expr",
    "BUILTINS",
    "parse",
    "render",
    "walk",
]

MAX_DEPTH = 100


class DSLError(Exception):
    """Base class for expression-language errors."""


class DSLSyntaxError(DSLError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, OP, EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"\s+|(?P<INT>\d+)|(?P<IDENT>[A-Za-z_][A-Za-z_0-9]*)|(?P<OP>[-+*/^(),])")


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        if m.lastgroup is not None:
            tokens.append(Token(m.lastgroup, m.group(), line, pos - line_start + 1))
        else:
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- syntax tree ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Sign:
    """``(-1)^exponent``."""

    exponent: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Num, Name, Neg, BinOp, Pow, Sign, Call]

# name -> arity
BUILTINS = {
    "sum": 4,
    "qpow": 1,
    "qbin": 2,
    "poch": 2,
    "binom2": 1,
    "floor": 2,
    "mod": 2,
    "eq": 2,
}


def walk(e: Expr):
    """Pre-order traversal."""
    yield e
    if isinstance(e, Neg):
        yield from walk(e.operand)
    elif isinstance(e, BinOp):
        yield from walk(e.left)
        yield from walk(e.right)
    elif isinstance(e, Pow):
        yield from walk(e.base)
    elif isinstance(e, Sign):
        yield from walk(e.exponent)
    elif isinstance(e, Call):
        for a in e.args:
            yield from walk(a)


# -- parser -----------------------------------------------------------------------

_ATOM_START = frozenset({"integer", "identifier", "'('"})


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def fail(self, message: str, expected=frozenset(), tok: Token = None):
        tok = tok or self.tok
        raise DSLSyntaxError(message, tok.line, tok.column, expected)

    def found(self) -> str:
        return repr(self.tok.text) if self.tok.text else "end of input"

    def at_op(self, text: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            self.fail(f"unexpected {self.found()}", {repr(text)})
        tok = self.tok
        self.pos += 1
        return tok

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail("expression nested too deeply")

    def expr(self) -> Expr:
        self.enter()
        node = self.unary()
        while self.at_op("+") or self.at_op("-"):
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.unary())
        self.depth -= 1
        return node

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.pos += 1
            self.enter()
            node = Neg(self.unary())
            self.depth -= 1
            return node
        return self.term()

    def starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("INT", "IDENT") or (t.kind == "OP" and t.text == "(")

    def term(self) -> Expr:
        node = self.factor()
        while True:
            if self.at_op("*") or self.at_op("/"):
                op = self.tok.text
                self.pos += 1
                node = BinOp(op, node, self.factor())
            elif self.starts_atom():
                node = BinOp("*", node, self.factor())
            else:
                return node

    def is_sign_prefix(self) -> bool:
        want = (("OP", "("), ("OP", "-"), ("INT", "1"), ("OP", ")"), ("OP", "^"))
        return all(self.peek(i).kind == k and self.peek(i).text == t for i, (k, t) in enumerate(want))

    def factor(self) -> Expr:
        if self.is_sign_prefix():
            self.pos += 5
            return Sign(self.atom())
        base = self.atom()
        if self.at_op("^"):
            self.pos += 1
            negative = False
            if self.at_op("-"):
                self.pos += 1
                negative = True
            if self.tok.kind != "INT":
                self.fail("exponent must be an integer literal", {"integer"})
            value = int(self.tok.text)
            self.pos += 1
            return Pow(base, -value if negative else value)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.pos += 1
            return Num(int(t.text))
        if t.kind == "IDENT":
            self.pos += 1
            if self.at_op("("):
                return self.call(t)
            return Name(t.text)
        if self.at_op("("):
            self.pos += 1
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail(f"unexpected {self.found()}", _ATOM_START)

    def call(self, name_tok: Token) -> Expr:
        name = name_tok.text
        if name not in BUILTINS:
            self.fail(f"unknown builtin {name!r}", frozenset(BUILTINS), name_tok)
        self.expect_op("(")
        self.enter()
        args = [self.expr()]
        while self.at_op(","):
            self.pos += 1
            args.append(self.expr())
        if not self.at_op(")"):
            self.fail(f"unexpected {self.found()}", {"','", "')'"})
        self.pos += 1
        self.depth -= 1
        if len(args) != BUILTINS[name]:
            self.fail(f"{name} takes {BUILTINS[name]} arguments, got {len(args)}", tok=name_tok)
        if name == "sum" and not isinstance(args[0], Name):
            self.fail("first argument of sum must be an index name", {"identifier"}, name_tok)
        if name == "sum" and args[0].id == "q":
            self.fail("q cannot be used as a summation index", tok=name_tok)
        if name == "poch":
            _check_monomial_base(args[0], self, name_tok)
        return Call(name, tuple(args))


def _mentions_q(e: Expr) -> bool:
    return any(
        (isinstance(x, Name) and x.id == "q") or (isinstance(x, Call) and x.name == "qpow")
        for x in walk(e)
    )


def _check_monomial_base(e: Expr, parser: _Parser, tok: Token) -> None:
    """Reject Pochhammer bases that cannot be of the form c * q^e."""
    for x in walk(e):
        if isinstance(x, Call) and x.name in ("sum", "qbin", "poch"):
            parser.fail(f"poch base must be a monomial c*q^e, not a {x.name}(...) expression", tok=tok)
        if isinstance(x, BinOp) and x.op in "+-" and (_mentions_q(x.left) or _mentions_q(x.right)):
            parser.fail("poch base must be a monomial c*q^e, not a sum of q-terms", tok=tok)
        if isinstance(x, BinOp) and x.op == "/" and _mentions_q(x.right):
            parser.fail("poch base must be a monomial c*q^e", tok=tok)


def parse(src: str) -> Expr:
    parser = _Parser(tokenize(src))
    try:
        node = parser.expr()
    except RecursionError:
        parser.fail("expression nested too deeply")
    if parser.tok.kind != "EOF":
        parser.fail(f"unexpected {parser.found()}", {"'+'", "'-'", "'*'", "'/'", "end of input"})
    return node


# -- renderer ---------------------------------------------------------------------

def render(e: Expr) -> str:
    """Source text that parses back to an equal tree."""
    return _render(e, 0)


def _render(e: Expr, ctx: int) -> str:
    # ctx: 0 expression, 1 right operand of +/-, 2 unary operand,
    # 3 left of * /, 4 right of * /, 5 atom position
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Call):
        return f"{e.name}({', '.join(_render(a, 0) for a in e.args)})"
    if isinstance(e, Sign):
        text = f"(-1)^{_render(e.exponent, 5)}"
        return f"({text})" if ctx == 5 else text
    if isinstance(e, Pow):
        base = _render(e.base, 5)
        if isinstance(e.base, Neg) and e.base.operand == Num(1):
            base = "(-(1))"
        text = f"{base}^{e.exponent}"
        return f"({text})" if ctx == 5 else text
    if isinstance(e, Neg):
        text = f"-{_render(e.operand, 2)}"
        return text if ctx <= 2 and ctx != 1 else f"({text})"
    if isinstance(e, BinOp):
        if e.op in "+-":
            text = f"{_render(e.left, 0)} {e.op} {_render(e.right, 1)}"
            return text if ctx == 0 else f"({text})"
        text = f"{_render(e.left, 3)}{e.op}{_render(e.right, 4)}"
        return text if ctx in (0, 1, 2, 3) else f"({text})"
    raise TypeError(f"not an expression node: {e!r}")
