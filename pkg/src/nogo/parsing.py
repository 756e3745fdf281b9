"""Tokenizer and recursive-descent parsers for the scalar expression languages.

Three small grammars share one arithmetic core:

* classical polynomials: ``3*q^2*p - 1/2*p^3``, Poisson brackets ``{f, g}``
* Weyl-algebra operators: ``qh^2*ph + i*qh``, commutators ``[A, B]``, ``I``
* rational functions in named coordinates: ``1/(1 + x^2)``

Juxtaposition multiplies, so ``2 q p`` equals ``2*q*p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from .kernel import I, Polynomial, RationalFunction
from .weyl import IDENTITY, PH, QH, ClassicalPoly, WeylElement, commutator, poisson_bracket


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, OP, END
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<NUM>\d+)|(?P<NAME>[A-Za-z][A-Za-z0-9]*'?)"
    r"|(?P<OP>->|[\^_{}\[\]()+\-*/,;:~])"
)


def tokenize(text: str) -> List[Token]:
    out = []
    pos, line, col0 = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            col0 = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, m.start() - col0 + 1))
        pos = m.end()
    out.append(Token("END", "", line, pos - col0 + 1))
    return out


class Cursor:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("OP", "NAME") and tok.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def error(self, message: str, tok: Token = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    def expect_end(self):
        tok = self.peek()
        if tok.kind != "END":
            self.error(f"unexpected {tok.text!r}")


_ATOM_START = {"(", "{", "["}


def parse_exponent(cur: Cursor) -> int:
    neg = False
    paren = cur.accept("(") is not None
    if cur.accept("-"):
        neg = True
    tok = cur.next()
    if tok.kind != "NUM":
        cur.error("expected an integer exponent", tok)
    if paren:
        cur.expect(")")
    return -int(tok.text) if neg else int(tok.text)


class ArithParser:
    """Precedence climbing over a ring supplied through callbacks."""

    def __init__(
        self,
        name_fn: Callable[[Token], object],
        number_fn: Callable[[int], object],
        brackets: Dict[str, Callable[[object, object], object]] = None,
        divide_fn: Callable[[object, object, Token], object] = None,
    ):
        self.name_fn = name_fn
        self.number_fn = number_fn
        self.brackets = brackets or {}
        self.divide_fn = divide_fn or (lambda a, b, tok: a / b)

    def parse(self, text: str):
        cur = Cursor(tokenize(text))
        if cur.peek().kind == "END":
            cur.error("empty expression")
        value = self.expr(cur)
        cur.expect_end()
        return value

    def expr(self, cur: Cursor):
        neg = cur.accept("-") is not None
        if not neg:
            cur.accept("+")
        value = self.term(cur)
        if neg:
            value = -value
        while True:
            if cur.accept("+"):
                value = value + self.term(cur)
            elif cur.accept("-"):
                value = value - self.term(cur)
            else:
                return value

    def _starts_atom(self, tok: Token) -> bool:
        return tok.kind in ("NUM", "NAME") or (tok.kind == "OP" and tok.text in _ATOM_START)

    def term(self, cur: Cursor):
        value = self.unary(cur)
        while True:
            if cur.accept("*"):
                value = value * self.unary(cur)
            elif cur.at("/"):
                tok = cur.next()
                value = self.divide_fn(value, self.unary(cur), tok)
            elif self._starts_atom(cur.peek()):
                value = value * self.unary(cur)
            else:
                return value

    def unary(self, cur: Cursor):
        if cur.accept("-"):
            return -self.unary(cur)
        return self.power(cur)

    def power(self, cur: Cursor):
        base = self.atom(cur)
        if cur.accept("^"):
            tok = cur.peek()
            k = parse_exponent(cur)
            try:
                return base ** k
            except (ValueError, ArithmeticError) as exc:
                cur.error(str(exc), tok)
        return base

    def atom(self, cur: Cursor):
        tok = cur.next()
        if tok.kind == "NUM":
            return self.number_fn(int(tok.text))
        if tok.kind == "NAME":
            return self.name_fn(tok)
        if tok.text == "(":
            v = self.expr(cur)
            cur.expect(")")
            return v
        if tok.text in self.brackets:
            close = {"{": "}", "[": "]"}[tok.text]
            a = self.expr(cur)
            cur.expect(",")
            b = self.expr(cur)
            cur.expect(close)
            return self.brackets[tok.text](a, b)
        cur.error(f"unexpected {tok.text or 'end of input'!r}", tok)


def _unknown(cur_names):
    def fn(tok: Token):
        raise ParseError(f"unknown symbol {tok.text!r} (expected one of {', '.join(cur_names)})",
                         tok.line, tok.column)
    return fn


def _numeric_divide(kind):
    def div(a, b, tok):
        try:
            return a / b
        except (ValueError, ArithmeticError, TypeError) as exc:
            raise ParseError(f"cannot divide {kind}: {exc}", tok.line, tok.column) from None
    return div


def parse_classical(text: str) -> ClassicalPoly:
    """Classical polynomial in q, p; ``{f, g}`` is the Poisson bracket."""
    names = {"q": ClassicalPoly.monomial(1, 0), "p": ClassicalPoly.monomial(0, 1)}

    def name_fn(tok):
        if tok.text in names:
            return names[tok.text]
        _unknown(names)(tok)

    parser = ArithParser(
        name_fn,
        lambda n: ClassicalPoly.const(n),
        {"{": poisson_bracket},
        _numeric_divide("a polynomial"),
    )
    return parser.parse(text)


def parse_operator(text: str) -> WeylElement:
    """Operator word in qh, ph, i and identity I; ``[A, B]`` is the commutator."""
    names = {"qh": QH, "ph": PH, "i": WeylElement.scalar(I), "I": IDENTITY}

    def name_fn(tok):
        if tok.text in names:
            return names[tok.text]
        _unknown(names)(tok)

    parser = ArithParser(
        name_fn,
        lambda n: WeylElement.scalar(n),
        {"[": commutator},
        _numeric_divide("an operator"),
    )
    return parser.parse(text)


def parse_rational_function(text: str, variables: Sequence[str]) -> RationalFunction:
    variables = tuple(variables)

    def name_fn(tok):
        if tok.text in variables:
            return RationalFunction.var(variables, tok.text)
        _unknown(variables)(tok)

    parser = ArithParser(
        name_fn,
        lambda n: RationalFunction.constant(variables, Fraction(n)),
        {},
        _numeric_divide("by zero"),
    )
    return parser.parse(text)


def parse_univariate(text: str, var: str = "q") -> Polynomial:
    """Polynomial test function in a single variable."""
    rf = parse_rational_function(text, (var,))
    if not rf.den.is_constant():
        raise ParseError(f"{text!r} is not a polynomial")
    return rf.num


__all__ = [
    "ParseError",
    "Token",
    "tokenize",
    "Cursor",
    "ArithParser",
    "parse_classical",
    "parse_operator",
    "parse_rational_function",
    "parse_univariate",
]
