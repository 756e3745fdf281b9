"""Abstract-index tensor expressions.

An expression is a sum of terms; a term is an exact coefficient, a product of
opaque scalar constants and a product of factors.  A factor is a tensor
symbol carrying one index per slot and a prefix of covariant derivatives,
outermost first.  Repeated index names inside a term are contractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from itertools import chain, count
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

FLAT = "eta"
CURVED = "g"
CONNECTIONS = (FLAT, CURVED)

GENERIC = "generic"
METRIC = "metric"
RIEMANN = "riemann"
RICCI = "ricci"
RICCI_SCALAR = "ricci_scalar"

CONSTANTS = ("pi", "m", "qc")

# canonical factor order: curvature first, metric, then fields
_KIND_ORDER = {RIEMANN: 0, RICCI: 1, RICCI_SCALAR: 2, METRIC: 3, GENERIC: 4}


class TensorError(Exception):
    pass


class IndexDisciplineError(TensorError, IndexError):
    pass


class WrongConnection(TensorError):
    pass


# --------------------------------------------------------------------------
# indices and symbols


@dataclass(frozen=True, order=True)
class Index:
    name: str
    up: bool

    def flip(self) -> "Index":
        return Index(self.name, not self.up)

    def __str__(self):
        return ("^" if self.up else "_") + self.name


Perm = Tuple[int, ...]
Generator = Tuple[Perm, int]


def slot_generators(kind: str, slots: Sequence[int]) -> Tuple[Generator, ...]:
    """Generators for a (anti)symmetric slot subset; ``slots`` are 0-based."""
    slots = sorted(slots)
    sign = -1 if kind == "antisym" else 1
    width = max(slots) + 1
    gens = []
    for a, b in zip(slots, slots[1:]):
        perm = list(range(width))
        perm[a], perm[b] = perm[b], perm[a]
        gens.append((tuple(perm), sign))
    return tuple(gens)


def _pad(perm: Perm, n: int) -> Perm:
    return tuple(perm) + tuple(range(len(perm), n))


@lru_cache(maxsize=None)
def symmetry_group(generators: Tuple[Generator, ...], rank: int) -> Tuple[Generator, ...]:
    """Closure of the generators; identity first.  Each element is (perm, sign)
    with ``new[k] = old[perm[k]]``."""
    ident = tuple(range(rank))
    gens = [(_pad(p, rank), s) for p, s in generators]
    seen: Dict[Perm, int] = {ident: 1}
    frontier = [(ident, 1)]
    while frontier:
        nxt = []
        for perm, sign in frontier:
            for gp, gs in gens:
                comp = tuple(perm[gp[k]] for k in range(rank))
                csign = sign * gs
                if comp not in seen:
                    seen[comp] = csign
                    nxt.append((comp, csign))
        frontier = nxt
    return tuple(sorted(seen.items(), key=lambda kv: kv[0] != ident))


RIEMANN_GENERATORS: Tuple[Generator, ...] = (
    ((0, 2, 1, 3), -1),  # derivative pair
    ((3, 1, 2, 0), -1),  # lowered first slot against last
    ((2, 3, 0, 1), 1),  # pair exchange
)
SYMMETRIC_PAIR: Tuple[Generator, ...] = (((1, 0), 1),)


@dataclass(frozen=True)
class TensorSymbol:
    """A named tensor.

    ``symmetries`` holds generators ``(perm, sign)`` of the monoterm slot
    symmetry group.  ``side`` is ``flat`` for Minkowski-side symbols and
    ``curved`` for their images under the generalization map.
    """

    name: str
    rank: int
    kind: str = GENERIC
    side: str = "flat"
    symmetries: Tuple[Generator, ...] = ()

    @property
    def connection(self) -> str:
        return FLAT if self.side == "flat" else CURVED

    def group(self) -> Tuple[Generator, ...]:
        return symmetry_group(self.symmetries, self.rank)

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.name, self.side)

    def curved_image(self) -> "TensorSymbol":
        if self.side == "curved":
            raise TensorError(f"{self.name} is already curved-side")
        name = CURVED if self.kind == METRIC else self.name
        return replace(self, side="curved", name=name)


def metric(side: str = "curved") -> TensorSymbol:
    return TensorSymbol(FLAT if side == "flat" else CURVED, 2, METRIC, side, SYMMETRIC_PAIR)


def riemann(side: str = "curved") -> TensorSymbol:
    return TensorSymbol("R", 4, RIEMANN, side, RIEMANN_GENERATORS)


def ricci(side: str = "curved") -> TensorSymbol:
    return TensorSymbol("R", 2, RICCI, side, SYMMETRIC_PAIR)


def ricci_scalar(side: str = "curved") -> TensorSymbol:
    return TensorSymbol("R", 0, RICCI_SCALAR, side)


# --------------------------------------------------------------------------
# factors, terms, expressions

Deriv = Tuple[str, Index]


@dataclass(frozen=True)
class Factor:
    symbol: TensorSymbol
    indices: Tuple[Index, ...]
    derivs: Tuple[Deriv, ...] = ()

    def __post_init__(self):
        if len(self.indices) != self.symbol.rank:
            raise IndexDisciplineError(
                f"{self.symbol.name} takes {self.symbol.rank} indices, got {len(self.indices)}"
            )

    def all_indices(self) -> Tuple[Index, ...]:
        return tuple(i for _, i in self.derivs) + self.indices

    def with_all_indices(self, new: Sequence[Index]) -> "Factor":
        k = len(self.derivs)
        derivs = tuple((c, i) for (c, _), i in zip(self.derivs, new[:k]))
        return Factor(self.symbol, tuple(new[k:]), derivs)

    def rename(self, mapping: Dict[str, str]) -> "Factor":
        return self.with_all_indices(
            [Index(mapping.get(i.name, i.name), i.up) for i in self.all_indices()]
        )

    def connections(self) -> Tuple[str, ...]:
        return tuple(c for c, _ in self.derivs)


Consts = Tuple[Tuple[str, int], ...]


def _merge_consts(a: Consts, b: Consts) -> Consts:
    out: Dict[str, int] = dict(a)
    for k, v in b:
        out[k] = out.get(k, 0) + v
    return tuple(sorted((k, v) for k, v in out.items() if v))


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    consts: Consts = ()
    factors: Tuple[Factor, ...] = ()

    def index_occurrences(self) -> Dict[str, List[Index]]:
        occ: Dict[str, List[Index]] = {}
        for f in self.factors:
            for i in f.all_indices():
                occ.setdefault(i.name, []).append(i)
        return occ

    def free_indices(self) -> Tuple[Index, ...]:
        occ = self.index_occurrences()
        return tuple(sorted(v[0] for v in occ.values() if len(v) == 1))

    def dummy_names(self) -> Tuple[str, ...]:
        occ = self.index_occurrences()
        return tuple(sorted(k for k, v in occ.items() if len(v) == 2))

    def names(self) -> set:
        return set(self.index_occurrences())

    def scaled(self, c) -> "Term":
        return replace(self, coeff=self.coeff * Fraction(c))

    def rename(self, mapping: Dict[str, str]) -> "Term":
        return replace(self, factors=tuple(f.rename(mapping) for f in self.factors))

    def scalar_part(self) -> "Term":
        return Term(self.coeff, self.consts, ())


def fresh_names(avoid: Iterable[str]) -> Iterator[str]:
    """Index names not in ``avoid``: a..z, then a1..z1, ..."""
    avoid = set(avoid)
    letters = "abcdefghijklmnopqrstuvwxyz"
    for suffix in chain([""], map(str, count(1))):
        for ch in letters:
            name = ch + suffix
            if name not in avoid:
                yield name


def validate_term(term: Term) -> None:
    for name, occ in term.index_occurrences().items():
        if len(occ) > 2:
            raise IndexDisciplineError(f"index {name} occurs {len(occ)} times")
        if len(occ) == 2 and occ[0].up == occ[1].up:
            where = "up" if occ[0].up else "down"
            raise IndexDisciplineError(f"index {name} repeated with the same variance ({where})")


@dataclass(frozen=True)
class TensorExpr:
    terms: Tuple[Term, ...] = ()

    # construction ---------------------------------------------------------
    @classmethod
    def of(cls, *factors: Factor, coeff=1, consts: Consts = ()) -> "TensorExpr":
        t = Term(Fraction(coeff), tuple(sorted(consts)), tuple(factors))
        validate_term(t)
        return cls((t,))

    @classmethod
    def scalar(cls, c, consts: Consts = ()) -> "TensorExpr":
        return cls((Term(Fraction(c), tuple(sorted(consts)), ()),))

    def is_zero(self) -> bool:
        return not any(t.coeff for t in self.terms)

    def free_indices(self) -> Tuple[Index, ...]:
        if not self.terms:
            return ()
        return self.terms[0].free_indices()

    def validate(self) -> "TensorExpr":
        frees = None
        for t in self.terms:
            validate_term(t)
            f = t.free_indices()
            if frees is None:
                frees = f
            elif f != frees:
                raise IndexDisciplineError(
                    "free indices differ between terms: "
                    f"{''.join(map(str, frees))} vs {''.join(map(str, f))}"
                )
        return self

    def sides(self) -> set:
        out = set()
        for t in self.terms:
            for f in t.factors:
                out.add(f.symbol.side)
                out.update("flat" if c == FLAT else "curved" for c in f.connections())
        return out

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "TensorExpr") -> "TensorExpr":
        if not isinstance(other, TensorExpr):
            return NotImplemented
        out = TensorExpr(self.terms + other.terms)
        if self.terms and other.terms:
            out.validate()
        return out

    def __neg__(self) -> "TensorExpr":
        return TensorExpr(tuple(t.scaled(-1) for t in self.terms))

    def __sub__(self, other: "TensorExpr") -> "TensorExpr":
        return self + (-other)

    def __mul__(self, other) -> "TensorExpr":
        if isinstance(other, (int, Fraction)):
            return TensorExpr(tuple(t.scaled(other) for t in self.terms))
        if not isinstance(other, TensorExpr):
            return NotImplemented
        return TensorExpr(tuple(multiply_terms(a, b) for a in self.terms for b in other.terms))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __str__(self):
        from .printing import format_expr

        return format_expr(self)


def multiply_terms(a: Term, b: Term) -> Term:
    """Product of two terms; clashing dummies are renamed apart."""
    a_names, b_names = a.names(), b.names()
    a_dummies, b_dummies = set(a.dummy_names()), set(b.dummy_names())
    if (b_dummies & a_names) or (a_dummies & b_names):
        gen = fresh_names(a_names | b_names)
        b = b.rename({n: next(gen) for n in sorted(b_dummies & a_names)})
        b_names = b.names()
        a = a.rename({n: next(gen) for n in sorted(a_dummies & b_names)})
    t = Term(a.coeff * b.coeff, _merge_consts(a.consts, b.consts), a.factors + b.factors)
    validate_term(t)
    return t


def derivative(conn: str, index: Index, e: TensorExpr) -> TensorExpr:
    """Covariant derivative of an expression, expanded by the Leibniz rule."""
    out: List[Term] = []
    for t in e.terms:
        if index.name in t.dummy_names():
            gen = fresh_names(t.names() | {index.name})
            t = t.rename({index.name: next(gen)})
        for k, f in enumerate(t.factors):
            nf = Factor(f.symbol, f.indices, ((conn, index),) + f.derivs)
            nt = replace(t, factors=t.factors[:k] + (nf,) + t.factors[k + 1:])
            validate_term(nt)
            out.append(nt)
    return TensorExpr(tuple(out))


def zero() -> TensorExpr:
    return TensorExpr(())
