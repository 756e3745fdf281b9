"""Classical Poisson algebra in (q, p) and the Weyl algebra [qh, ph] = i (hbar = 1).

``ClassicalPoly`` stores q^n p^m as ``(n, m) -> Fraction``.  ``WeylElement``
stores operators in q-left normal form qh^n ph^m as ``(n, m) -> GaussianRational``.
The "normal ordering" scheme (p to the left) is an ordering *map* into that
internal form, see :func:`apply_ordering`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

from .kernel import I, GaussianRational, Polynomial

Monomial = Tuple[int, int]


class WeylError(ValueError):
    pass


class DegreeExceeded(WeylError):
    """Raised when the forced quantization is asked for a degree > 2 polynomial."""


class MissingAssignment(WeylError):
    def __init__(self, bracket: "ClassicalPoly", monomial: Monomial):
        self.bracket = bracket
        self.monomial = monomial
        super().__init__(
            f"map is not defined on {format_monomial_qp(monomial)} "
            f"(needed for bracket {bracket})"
        )


def format_monomial_qp(mono: Monomial, q="q", p="p") -> str:
    n, m = mono
    parts = []
    for sym, k in ((q, n), (p, m)):
        if k == 1:
            parts.append(sym)
        elif k:
            parts.append(f"{sym}^{k}")
    return "*".join(parts) or "1"


# --------------------------------------------------------------------------
# classical side


class ClassicalPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for (n, m), c in items:
            c = Fraction(c)
            if c:
                clean[(int(n), int(m))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("ClassicalPoly is immutable")

    @classmethod
    def monomial(cls, n: int, m: int, c=1) -> "ClassicalPoly":
        return cls({(n, m): c})

    @classmethod
    def const(cls, c) -> "ClassicalPoly":
        return cls({(0, 0): c})

    def _lift(self, other):
        if isinstance(other, ClassicalPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return ClassicalPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return ClassicalPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ClassicalPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Fraction] = {}
        for (a, b), c1 in self.terms.items():
            for (x, y), c2 in other.terms.items():
                k = (a + x, b + y)
                out[k] = out.get(k, 0) + c1 * c2
        return ClassicalPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ClassicalPoly) and other.is_constant():
            other = other.terms.get((0, 0), Fraction(0))
        if not isinstance(other, (int, Fraction)):
            raise WeylError("classical polynomials can only be divided by numbers")
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return ClassicalPoly({k: c / other for k, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise WeylError("negative power of a polynomial")
        out = ClassicalPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def degree(self) -> int:
        return max((n + m for n, m in self.terms), default=-1)

    def diff_q(self) -> "ClassicalPoly":
        return ClassicalPoly({(n - 1, m): c * n for (n, m), c in self.terms.items() if n})

    def diff_p(self) -> "ClassicalPoly":
        return ClassicalPoly({(n, m - 1): c * m for (n, m), c in self.terms.items() if m})

    def monomials(self):
        return sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0]))

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"ClassicalPoly({self.terms!r})"

    def __str__(self):
        return _format_sum(self.monomials(), format_monomial_qp)


def _format_sum(items, mono_fmt) -> str:
    from .kernel import _join_signed, _signed_term

    if not items:
        return "0"
    parts = []
    for mono, c in items:
        body = "" if mono == (0, 0) else mono_fmt(mono)
        parts.append(_signed_term(c, body))
    return _join_signed(parts)


q = ClassicalPoly.monomial(1, 0)
p = ClassicalPoly.monomial(0, 1)


def poisson_bracket(f: ClassicalPoly, g: ClassicalPoly) -> ClassicalPoly:
    """{f, g} = df/dq dg/dp - df/dp dg/dq  (so {q, p} = 1)."""
    return f.diff_q() * g.diff_p() - f.diff_p() * g.diff_q()


# --------------------------------------------------------------------------
# Weyl algebra


def _gauss(c) -> GaussianRational:
    return GaussianRational.coerce(c)


class WeylElement:
    """Element of the Weyl algebra, stored as sum c * qh^n ph^m."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for (n, m), c in items:
            c = _gauss(c)
            if c:
                clean[(int(n), int(m))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("WeylElement is immutable")

    @classmethod
    def identity(cls) -> "WeylElement":
        return cls({(0, 0): 1})

    @classmethod
    def scalar(cls, c) -> "WeylElement":
        return cls({(0, 0): c})

    @classmethod
    def word(cls, letters: Iterable[str], coeff=1) -> "WeylElement":
        return weyl_normal_form(letters, coeff)

    def _lift(self, other):
        if isinstance(other, WeylElement):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return WeylElement.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return WeylElement(out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return WeylElement({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, WeylElement):
            return NotImplemented
        out: Dict[Monomial, GaussianRational] = {}
        for (a, b), c1 in self.terms.items():
            for (x, y), c2 in other.terms.items():
                for (n, m), c in _monomial_product(a, b, x, y).items():
                    out[(n, m)] = out.get((n, m), 0) + c1 * c2 * c
        return WeylElement(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, WeylElement) and other.is_scalar():
            other = other.scalar_value()
        if not isinstance(other, (int, Fraction, GaussianRational)):
            raise WeylError("operators can only be divided by scalars")
        return self * (1 / _gauss(other))

    def __pow__(self, n: int):
        if n < 0:
            raise WeylError("negative power of an operator")
        out = WeylElement.identity()
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def scalar_value(self) -> GaussianRational:
        if not self.is_scalar():
            raise WeylError(f"{self} is not a multiple of the identity")
        return self.terms.get((0, 0), GaussianRational(0))

    def degree(self) -> int:
        return max((n + m for n, m in self.terms), default=-1)

    def monomials(self):
        return sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0]))

    def act(self, psi: Polynomial, var: str = "q") -> Polynomial:
        """Apply to a polynomial wave function: qh multiplies, ph = (1/i) d/dq."""
        if psi.variables != (var,):
            raise WeylError(f"test function must be univariate in {var}")
        out = Polynomial.zero((var,))
        x = Polynomial.var((var,), var)
        for (n, m), c in self.terms.items():
            d = psi
            for _ in range(m):
                d = d.diff(var)
            out = out + (x ** n * d).scale(c * (-I) ** m)
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"WeylElement({self.terms!r})"

    def __str__(self):
        return _format_sum(self.monomials(), lambda mono: format_monomial_qp(mono, "qh", "ph"))


def _monomial_product(a: int, b: int, x: int, y: int) -> Dict[Monomial, GaussianRational]:
    """(qh^a ph^b)(qh^x ph^y) in normal form.

    Uses ph^b qh^x = sum_k C(b,k) C(x,k) k! (-i)^k qh^(x-k) ph^(b-k).
    """
    out = {}
    for k in range(min(b, x) + 1):
        c = comb(b, k) * comb(x, k) * factorial(k)
        out[(a + x - k, b + y - k)] = (-I) ** k * c
    return out


QH = WeylElement({(1, 0): 1})
PH = WeylElement({(0, 1): 1})
IDENTITY = WeylElement.identity()


def weyl_normal_form(letters: Iterable[str], coeff=1) -> WeylElement:
    """Normal form of coeff * (product of generators); letters are 'q'/'p'."""
    out = WeylElement.scalar(coeff)
    for ch in letters:
        if ch == "q":
            out = out * QH
        elif ch == "p":
            out = out * PH
        else:
            raise WeylError(f"unknown generator {ch!r}")
    return out


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return a * b - b * a


class OrderingScheme(enum.Enum):
    WEYL_SYMMETRIC = "weyl"
    NORMAL_P_LEFT = "normal"

    @classmethod
    def parse(cls, text: str) -> "OrderingScheme":
        t = text.lower().replace("_", "-")
        aliases = {
            "weyl": cls.WEYL_SYMMETRIC,
            "weyl-symmetric": cls.WEYL_SYMMETRIC,
            "symmetric": cls.WEYL_SYMMETRIC,
            "mid": cls.WEYL_SYMMETRIC,
            "normal": cls.NORMAL_P_LEFT,
            "normal-p-left": cls.NORMAL_P_LEFT,
            "right": cls.NORMAL_P_LEFT,
        }
        try:
            return aliases[t]
        except KeyError:
            raise ValueError(f"unknown ordering scheme {text!r}") from None


def interleavings(n: int, m: int) -> List[str]:
    """All distinct words with n 'q's and m 'p's."""
    words = []
    for qpos in combinations(range(n + m), n):
        w = ["p"] * (n + m)
        for k in qpos:
            w[k] = "q"
        words.append("".join(w))
    return words


def order_monomial(n: int, m: int, scheme: OrderingScheme) -> WeylElement:
    if scheme is OrderingScheme.WEYL_SYMMETRIC:
        words = interleavings(n, m)
        total = WeylElement()
        for w in words:
            total = total + weyl_normal_form(w)
        return total * Fraction(1, len(words))
    return weyl_normal_form("p" * m + "q" * n)


def apply_ordering(f: ClassicalPoly, scheme: OrderingScheme) -> WeylElement:
    out = WeylElement()
    for (n, m), c in f.terms.items():
        out = out + order_monomial(n, m, scheme) * c
    return out


# --------------------------------------------------------------------------
# forced degree <= 2 quantization

U2_BASIS: Tuple[Monomial, ...] = ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1))

QUANTIZATION_TABLE: Dict[Monomial, WeylElement] = {
    (0, 0): IDENTITY,
    (1, 0): QH,
    (0, 1): PH,
    (2, 0): QH * QH,
    (0, 2): PH * PH,
    (1, 1): (QH * PH + PH * QH) * Fraction(1, 2),
}


def quantize_u2(f: ClassicalPoly) -> WeylElement:
    if f.degree() > 2:
        raise DegreeExceeded(f"degree {f.degree()} > 2: {f}")
    return extend_linearly(QUANTIZATION_TABLE, f)


def extend_linearly(table: Mapping[Monomial, WeylElement], f: ClassicalPoly) -> WeylElement:
    out = WeylElement()
    for mono, c in f.terms.items():
        if mono not in table:
            raise MissingAssignment(f, mono)
        out = out + table[mono] * c
    return out


def ordering_table(scheme: OrderingScheme, basis: Iterable[Monomial] = U2_BASIS):
    return {mono: order_monomial(*mono, scheme) for mono in basis}


@dataclass
class PairCheck:
    f: Monomial
    g: Monomial
    bracket: ClassicalPoly
    lhs: WeylElement  # image of {f, g}
    rhs: WeylElement  # (1/i)[f^, g^]
    linear: bool

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs and self.linear

    @property
    def defect(self) -> WeylElement:
        return self.lhs - self.rhs


@dataclass
class HomomorphismReport:
    pairs: List[PairCheck] = field(default_factory=list)
    unit_ok: bool = True
    generators_ok: bool = True

    @property
    def failures(self) -> List[PairCheck]:
        return [c for c in self.pairs if not c.passed]

    @property
    def all_passed(self) -> bool:
        return self.unit_ok and not self.failures


def check_homomorphism(
    table: Mapping[Monomial, WeylElement],
    basis: Sequence[Monomial],
) -> HomomorphismReport:
    """Check the bracket, linearity and unit conditions of a quantization map.

    Each unordered pair {f, g} of distinct basis monomials is tested for
    image({f,g}) == (1/i)[image(f), image(g)].  The unit condition is checked
    when the constant monomial is in the basis; the generator condition
    (q -> qh, p -> ph) is reported separately.
    """
    report = HomomorphismReport()
    basis = list(basis)
    if (0, 0) in basis:
        report.unit_ok = table.get((0, 0)) == IDENTITY
    if (1, 0) in basis and table.get((1, 0)) != QH:
        report.generators_ok = False
    if (0, 1) in basis and table.get((0, 1)) != PH:
        report.generators_ok = False
    for fm, gm in combinations(basis, 2):
        f = ClassicalPoly.monomial(*fm)
        g = ClassicalPoly.monomial(*gm)
        br = poisson_bracket(f, g)
        lhs = extend_linearly(table, br)
        rhs = commutator(table[fm], table[gm]) * (-I)
        linear = extend_linearly(table, f + g) == table[fm] + table[gm]
        report.pairs.append(PairCheck(fm, gm, br, lhs, rhs, linear))
    return report


# --------------------------------------------------------------------------
# the degree-3 obstruction witness


@dataclass
class GvhWitness:
    classical_lhs: ClassicalPoly
    classical_rhs: ClassicalPoly
    lhs: WeylElement
    rhs: WeylElement

    @property
    def classical_residual(self) -> ClassicalPoly:
        return self.classical_lhs - self.classical_rhs

    @property
    def residual(self) -> WeylElement:
        return self.lhs - self.rhs

    @property
    def constant(self) -> GaussianRational:
        return self.residual.scalar_value()


def gvh_witness(
    ordering: Callable[[ClassicalPoly], WeylElement] = None,
) -> GvhWitness:
    """Two classically equal expressions for q^2 p^2 with different quantizations.

    (1/9){q^3, p^3} = q^2 p^2 = (1/3){q^2 p, q p^2} classically; a bracket
    preserving map extending the degree-2 one would have to send both to the
    same operator.  Weyl ordering is the unique such extension on the cubic
    monomials, so the commutators are taken with Weyl-ordered images.
    """
    if ordering is None:
        ordering = lambda f: apply_ordering(f, OrderingScheme.WEYL_SYMMETRIC)  # noqa: E731
    q3, p3 = q ** 3, p ** 3
    q2p, qp2 = q * q * p, q * p * p
    c_lhs = poisson_bracket(q3, p3) * Fraction(1, 9)
    c_rhs = poisson_bracket(q2p, qp2) * Fraction(1, 3)
    lhs = commutator(ordering(q3), ordering(p3)) * (-I) * Fraction(1, 9)
    rhs = commutator(ordering(q2p), ordering(qp2)) * (-I) * Fraction(1, 3)
    return GvhWitness(c_lhs, c_rhs, lhs, rhs)


# --------------------------------------------------------------------------
# kernel prescriptions


def prescription_action(
    scheme: OrderingScheme, h: ClassicalPoly, test: Polynomial
) -> Polynomial:
    """Act with the kernel <q'|H|q> on a polynomial test function.

    For H = q^n p^m the p-integral gives (i d/dq)^m delta(q - q'); after m
    integrations by parts the action is (-i)^m d^m/dq^m [G(q, q') test(q)] at
    q = q', with G = ((q + q')/2)^n (mid-point) or q^n (right-point).
    The result is returned as a polynomial in the variable ``q'``.
    """
    if len(test.variables) != 1 or test.variables != ("q",):
        raise WeylError("test function must be a polynomial in the single variable q")
    two = ("q", "q'")
    qq = Polynomial.var(two, "q")
    qp_ = Polynomial.var(two, "q'")
    psi = Polynomial(two, {(e[0], 0): c for e, c in test.terms.items()})
    total = Polynomial.zero(two)
    for (n, m), c in h.terms.items():
        if scheme is OrderingScheme.WEYL_SYMMETRIC:
            g = ((qq + qp_) * Fraction(1, 2)) ** n
        else:
            g = qq ** n
        d = g * psi
        for _ in range(m):
            d = d.diff("q")
        total = total + d.scale((-I) ** m * c)
    at_diag = total.substitute("q", qp_)
    return Polynomial(("q'",), {(e[1],): c for e, c in at_diag.terms.items()})


def operator_action(scheme: OrderingScheme, h: ClassicalPoly, test: Polynomial) -> Polynomial:
    """Action of apply_ordering(h, scheme) on ``test``, renamed to q'."""
    res = apply_ordering(h, scheme).act(test, "q")
    return res.rename(("q'",))


def monomials_up_to(degree: int):
    return [(n, d - n) for d in range(degree + 1) for n in range(d, -1, -1)]


__all__ = [
    "ClassicalPoly",
    "WeylElement",
    "OrderingScheme",
    "DegreeExceeded",
    "MissingAssignment",
    "poisson_bracket",
    "weyl_normal_form",
    "commutator",
    "apply_ordering",
    "quantize_u2",
    "check_homomorphism",
    "gvh_witness",
    "prescription_action",
    "operator_action",
    "QH",
    "PH",
    "IDENTITY",
    "U2_BASIS",
    "QUANTIZATION_TABLE",
]
