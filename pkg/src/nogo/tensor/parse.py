"""Parser for the tensor expression language.

Grammar (juxtaposition multiplies)::

    expr    := ['-'|'+'] term (('+'|'-') term)*
    term    := unary (['*'|'/'] unary)*        # '/' only by scalars
    unary   := '-' unary | atom ['^' int]      # exponents only on scalars
    atom    := NUM | pi | m | qc | '(' expr ')'
             | 'D' '[' conn ',' ['^'] name ']' unary
             | 'R' '[' conn ']' indices        # 4: Riemann, 2: Ricci, 0: scalar
             | ('g' | 'eta') indices           # metric
             | 'bar' '(' NAME ')' indices      # curved-side image
             | NAME indices
    indices := (('^'|'_') (name | '{' name* '}'))*

Declaration lines may precede the expression::

    antisym F {1 2}
    sym T {1 2}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..parsing import Cursor, ParseError, Token, parse_exponent, tokenize
from .expr import (
    CONSTANTS,
    CURVED,
    FLAT,
    Factor,
    Index,
    IndexDisciplineError,
    Term,
    TensorExpr,
    TensorSymbol,
    derivative,
    metric,
    ricci,
    ricci_scalar,
    riemann,
    slot_generators,
)

RESERVED = {"D", "R", "g", "eta", "bar"} | set(CONSTANTS)
_SIDES = {FLAT: "flat", CURVED: "curved"}


@dataclass
class Declarations:
    """Slot symmetries of generic symbols, keyed by name (1-based slots)."""

    symmetries: Dict[str, List[Tuple[str, Tuple[int, ...]]]] = field(default_factory=dict)

    def add(self, kind: str, name: str, slots: Sequence[int]) -> None:
        if kind not in ("sym", "antisym"):
            raise ValueError(f"unknown symmetry kind {kind!r}")
        if len(slots) < 2 or min(slots) < 1 or len(set(slots)) != len(slots):
            raise ValueError(f"bad slot list {list(slots)} for {name}")
        entry = (kind, tuple(sorted(slots)))
        lst = self.symmetries.setdefault(name, [])
        if entry not in lst:
            lst.append(entry)

    def generators(self, name: str, rank: int):
        gens = []
        for kind, slots in self.symmetries.get(name, ()):
            if max(slots) > rank:
                raise IndexDisciplineError(
                    f"symmetry on slots {list(slots)} declared for {name}, which has rank {rank}"
                )
            gens.extend(slot_generators(kind, [s - 1 for s in slots]))
        return tuple(gens)

    def lines(self) -> List[str]:
        out = []
        for name in sorted(self.symmetries):
            for kind, slots in self.symmetries[name]:
                out.append(f"{kind} {name} {{{' '.join(map(str, slots))}}}")
        return out

    def copy(self) -> "Declarations":
        return Declarations({k: list(v) for k, v in self.symmetries.items()})

    def merged(self, other: Optional["Declarations"]) -> "Declarations":
        out = self.copy()
        if other:
            for name, entries in other.symmetries.items():
                for kind, slots in entries:
                    out.add(kind, name, slots)
        return out

    @classmethod
    def parse(cls, text: str) -> "Declarations":
        decls = cls()
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if line:
                decls.parse_line(line, n)
        return decls

    def parse_line(self, line: str, lineno: int = 1) -> None:
        cur = Cursor(tokenize(line))
        kind = cur.next()
        if kind.text not in ("sym", "antisym"):
            raise ParseError(f"expected 'sym' or 'antisym', found {kind.text!r}", lineno, kind.column)
        name = cur.next()
        if name.kind != "NAME":
            raise ParseError("expected a symbol name", lineno, name.column)
        cur.expect("{")
        slots = []
        while not cur.at("}"):
            tok = cur.next()
            if tok.kind != "NUM":
                raise ParseError("expected a slot number", lineno, tok.column)
            slots.append(int(tok.text))
            cur.accept(",")
        cur.expect("}")
        cur.expect_end()
        try:
            self.add(kind.text, name.text, slots)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, name.column) from None


def is_declaration(line: str) -> bool:
    words = line.split()
    return bool(words) and words[0] in ("sym", "antisym")


def split_preamble(text: str) -> Tuple[Declarations, str, int]:
    """Separate leading declaration lines from the expression text."""
    decls = Declarations()
    lines = text.split("\n")
    k = 0
    while k < len(lines):
        stripped = lines[k].split("#", 1)[0].strip()
        if not stripped:
            k += 1
            continue
        if not is_declaration(stripped):
            break
        decls.parse_line(stripped, k + 1)
        k += 1
    return decls, "\n".join(lines[k:]), k


class TensorParser:
    def __init__(self, decls: Optional[Declarations] = None):
        self.decls = decls or Declarations()
        self.ranks: Dict[str, int] = {}
        # index names written directly in the last unary; a parenthesized
        # group contributes only its free indices (its dummies are scoped)
        self.visible: List[str] = []

    def parse(self, text: str, line_offset: int = 0) -> TensorExpr:
        toks = tokenize(text)
        if line_offset:
            toks = [Token(t.kind, t.text, t.line + line_offset, t.column) for t in toks]
        cur = Cursor(toks)
        if cur.peek().kind == "END":
            cur.error("empty expression")
        e = self.expr(cur)
        cur.expect_end()
        try:
            return e.validate()
        except IndexDisciplineError as exc:
            raise ParseError(str(exc), toks[0].line, toks[0].column) from None

    # grammar ------------------------------------------------------------------
    def expr(self, cur: Cursor) -> TensorExpr:
        start = cur.peek()
        neg = cur.accept("-") is not None
        if not neg:
            cur.accept("+")
        value = self.term(cur)
        if neg:
            value = -value
        while True:
            tok = cur.peek()
            if cur.accept("+"):
                value = self._combine(lambda a, b: a + b, value, self.term(cur), tok)
            elif cur.accept("-"):
                value = self._combine(lambda a, b: a - b, value, self.term(cur), tok)
            else:
                return value

    def _combine(self, fn, a, b, tok):
        try:
            return fn(a, b)
        except IndexDisciplineError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from None

    def _starts_atom(self, tok: Token) -> bool:
        return tok.kind in ("NUM", "NAME") or (tok.kind == "OP" and tok.text == "(")

    def _count(self, written: Dict[str, int], tok: Token, cur: Cursor) -> None:
        for name in self.visible:
            written[name] = written.get(name, 0) + 1
            if written[name] > 2:
                cur.error(f"index {name} written more than twice in one product", tok)

    def term(self, cur: Cursor) -> TensorExpr:
        written: Dict[str, int] = {}
        tok = cur.peek()
        value = self.unary(cur)
        self._count(written, tok, cur)
        while True:
            tok = cur.peek()
            if cur.accept("*") or self._starts_atom(tok):
                value = self._combine(lambda a, b: a * b, value, self.unary(cur), tok)
                self._count(written, tok, cur)
            elif cur.accept("/"):
                divisor = self.unary(cur)
                value = value * self._reciprocal(divisor, tok, cur)
            else:
                return value

    def _reciprocal(self, e: TensorExpr, tok: Token, cur: Cursor) -> TensorExpr:
        if len(e.terms) != 1 or e.terms[0].factors or e.terms[0].coeff == 0:
            cur.error("can only divide by a nonzero scalar monomial", tok)
        t = e.terms[0]
        return TensorExpr((Term(1 / t.coeff, tuple((n, -k) for n, k in t.consts), ()),))

    def unary(self, cur: Cursor) -> TensorExpr:
        if cur.accept("-"):
            return -self.unary(cur)
        base = self.atom(cur)
        if cur.at("^"):
            tok = cur.next()
            if len(base.terms) != 1 or base.terms[0].factors:
                cur.error("exponents are only allowed on scalars", tok)
            k = parse_exponent(cur)
            t = base.terms[0]
            if t.coeff == 0 and k < 0:
                cur.error("zero to a negative power", tok)
            self.visible = []
            base = TensorExpr((Term(t.coeff ** k, tuple((n, e * k) for n, e in t.consts), ()),))
        return base

    def atom(self, cur: Cursor) -> TensorExpr:
        tok = cur.next()
        self.visible = []
        if tok.kind == "NUM":
            return TensorExpr.scalar(Fraction(int(tok.text)))
        if tok.kind == "OP" and tok.text == "(":
            e = self.expr(cur)
            cur.expect(")")
            self.visible = [i.name for i in e.free_indices()]
            return e
        if tok.kind != "NAME":
            cur.error(f"unexpected {tok.text or 'end of input'!r}", tok)
        name = tok.text
        if name in CONSTANTS:
            return TensorExpr.scalar(1, ((name, 1),))
        if name == "D" and cur.at("["):
            conn, index = self.derivative_head(cur)
            operand = self.unary(cur)
            self.visible = [index.name] + self.visible
            try:
                return derivative(conn, index, operand)
            except IndexDisciplineError as exc:
                raise ParseError(str(exc), tok.line, tok.column) from None
        if name == "R" and cur.at("["):
            cur.expect("[")
            conn = self.connection(cur)
            cur.expect("]")
            idx = self.indices(cur)
            side = _SIDES[conn]
            sym = {4: riemann, 2: ricci, 0: ricci_scalar}.get(len(idx))
            if sym is None:
                cur.error(f"curvature tensor takes 0, 2 or 4 indices, got {len(idx)}", tok)
            return self._factor(Factor(sym(side), idx), tok, cur)
        if name in (FLAT, CURVED):
            idx = self.indices(cur)
            if len(idx) != 2:
                cur.error(f"metric {name} takes 2 indices, got {len(idx)}", tok)
            return self._factor(Factor(metric(_SIDES[name]), idx), tok, cur)
        side = "flat"
        if name == "bar":
            cur.expect("(")
            inner = cur.next()
            if inner.kind != "NAME" or inner.text in RESERVED:
                cur.error("expected a symbol name inside bar(...)", inner)
            cur.expect(")")
            name, side = inner.text, "curved"
        elif name in RESERVED:
            cur.error(f"{name!r} is reserved", tok)
        idx = self.indices(cur)
        rank = len(idx)
        if self.ranks.setdefault(name, rank) != rank:
            cur.error(
                f"index arity mismatch for {name}: {rank} indices, earlier {self.ranks[name]}", tok
            )
        try:
            sym = TensorSymbol(name, rank, side=side, symmetries=self.decls.generators(name, rank))
        except IndexDisciplineError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from None
        return self._factor(Factor(sym, idx), tok, cur)

    def _factor(self, f: Factor, tok: Token, cur: Cursor) -> TensorExpr:
        self.visible = [i.name for i in f.indices]
        try:
            return TensorExpr.of(f)
        except IndexDisciplineError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from None

    def connection(self, cur: Cursor) -> str:
        tok = cur.next()
        if tok.text not in (FLAT, CURVED):
            cur.error(f"unknown connection {tok.text!r} (expected 'eta' or 'g')", tok)
        return tok.text

    def derivative_head(self, cur: Cursor) -> Tuple[str, Index]:
        cur.expect("[")
        conn = self.connection(cur)
        if cur.accept(","):
            up = cur.accept("^") is not None
            if not up:
                cur.accept("_")
            name = self.index_name(cur)
            cur.expect("]")
            return conn, Index(name, up)
        cur.expect("]")
        if cur.accept("^"):
            return conn, Index(self.index_name(cur), True)
        cur.expect("_")
        return conn, Index(self.index_name(cur), False)

    def index_name(self, cur: Cursor) -> str:
        tok = cur.next()
        if tok.kind != "NAME":
            cur.error("expected an index name", tok)
        return tok.text

    def indices(self, cur: Cursor) -> Tuple[Index, ...]:
        out: List[Index] = []
        while cur.at("^") or cur.at("_"):
            up = cur.next().text == "^"
            if cur.accept("{"):
                while not cur.at("}"):
                    out.append(Index(self.index_name(cur), up))
                    cur.accept(",")
                cur.expect("}")
            else:
                out.append(Index(self.index_name(cur), up))
        return tuple(out)


def parse_tensor(text: str, decls: Optional[Declarations] = None) -> TensorExpr:
    """Parse an expression, honouring any leading declaration lines."""
    pre, body, offset = split_preamble(text)
    all_decls = (decls or Declarations()).merged(pre)
    return TensorParser(all_decls).parse(body, offset)


def parse_with_declarations(text: str, decls: Optional[Declarations] = None):
    pre, body, offset = split_preamble(text)
    all_decls = (decls or Declarations()).merged(pre)
    return TensorParser(all_decls).parse(body, offset), all_decls
