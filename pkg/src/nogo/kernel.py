"""Exact arithmetic: rationals, Gaussian rationals, polynomials, rational functions.

Rationals are :class:`fractions.Fraction`.  Everything here is immutable and
exact; nothing ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

Rational = Fraction
Number = Union[int, Fraction, "GaussianRational"]


class KernelError(ArithmeticError):
    pass


class DivisionByZero(KernelError, ZeroDivisionError):
    pass


class UnknownVariable(KernelError, KeyError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


class GaussianRational:
    """a + b*i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return cls(x, 0)

    def __add__(self, other):
        if not isinstance(other, (GaussianRational, int, Fraction)):
            return NotImplemented
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, (GaussianRational, int, Fraction)):
            return NotImplemented
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (GaussianRational, int, Fraction)):
            return NotImplemented
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise DivisionByZero("inverse of zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        if not isinstance(other, (GaussianRational, int, Fraction)):
            return NotImplemented
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_coefficient(self)


I = GaussianRational(0, 1)


def format_coefficient(c) -> str:
    """Human-readable exact coefficient: ``3/2``, ``-i``, ``(1/2 - 2*i)``."""
    if isinstance(c, GaussianRational):
        if c.im == 0:
            return str(c.re)
        if c.re == 0:
            if c.im == 1:
                return "i"
            if c.im == -1:
                return "-i"
            return f"{c.im}*i"
        sign = "-" if c.im < 0 else "+"
        mag = abs(c.im)
        imag = "i" if mag == 1 else f"{mag}*i"
        return f"({c.re} {sign} {imag})"
    return str(c)


def rat_arith(a, b, op: str):
    """Field arithmetic on Rational/GaussianRational.

    ``op`` is one of ``add``, ``mul``, ``neg``, ``inv``; unary ops ignore ``b``.
    Division by zero raises :class:`DivisionByZero`.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if isinstance(a, GaussianRational):
            return a.inverse()
        return 1 / _frac(a)
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------
# Polynomials

Exponents = Tuple[int, ...]


class Polynomial:
    """Sparse multivariate polynomial over exact coefficients.

    ``terms`` maps exponent tuples (aligned with ``variables``) to nonzero
    coefficients.  Coefficients may be rationals or Gaussian rationals.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping[Exponents, Number] = ()):
        variables = tuple(variables)
        clean: Dict[Exponents, Number] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            exps = tuple(exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent {exps} does not match variables {variables}")
            if isinstance(c, int):
                c = Fraction(c)
            if c != 0:
                clean[exps] = c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # constructors
    @classmethod
    def zero(cls, variables) -> "Polynomial":
        return cls(variables)

    @classmethod
    def constant(cls, variables, c) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(name)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: Fraction(1)})

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise ValueError(
                    f"variable mismatch: {self.variables} vs {other.variables}"
                )
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return Polynomial.constant(self.variables, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def depends_on(self, name: str) -> bool:
        k = self.variables.index(name)
        return any(e[k] for e in self.terms)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

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
        out: Dict[Exponents, Number] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.constant(self.variables, Fraction(1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c) -> "Polynomial":
        return Polynomial(self.variables, {e: c * v for e, v in self.terms.items()})

    def diff(self, name: str) -> "Polynomial":
        if name not in self.variables:
            raise UnknownVariable(name)
        k = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[ne] = c * e[k]
        return Polynomial(self.variables, out)

    def evaluate(self, values: Mapping[str, Number]):
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(self.variables, e):
                if k:
                    t = t * _frac_or_gauss(values[v]) ** k
            total = total + t
        return total

    def substitute(self, name: str, value: "Polynomial") -> "Polynomial":
        """Replace variable ``name`` by a polynomial in the same variables."""
        k = self.variables.index(name)
        out = Polynomial.zero(self.variables)
        for e, c in self.terms.items():
            rest = e[:k] + (0,) + e[k + 1:]
            out = out + Polynomial(self.variables, {rest: c}) * value ** e[k]
        return out

    def rename(self, variables: Iterable[str]) -> "Polynomial":
        return Polynomial(variables, self.terms)

    def leading(self) -> Tuple[Exponents, Number]:
        """Lex-leading term."""
        e = max(self.terms)
        return e, self.terms[e]

    def divmod(self, divisor: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        """Lex-order division by a single polynomial.

        The remainder is zero iff ``divisor`` divides ``self`` exactly.
        """
        if divisor.is_zero():
            raise DivisionByZero("polynomial division by zero")
        dl, dc = divisor.leading()
        quot: Dict[Exponents, Number] = {}
        rem: Dict[Exponents, Number] = {}
        work = dict(self.terms)
        while work:
            e = max(work)
            c = work[e]
            if all(a >= b for a, b in zip(e, dl)):
                qe = tuple(a - b for a, b in zip(e, dl))
                qc = c / dc
                quot[qe] = quot.get(qe, 0) + qc
                for de, dcoef in divisor.terms.items():
                    te = tuple(a + b for a, b in zip(qe, de))
                    v = work.get(te, 0) - qc * dcoef
                    if v == 0:
                        work.pop(te, None)
                    else:
                        work[te] = v
            else:
                rem[e] = c
                del work[e]
        return Polynomial(self.variables, quot), Polynomial(self.variables, rem)

    def exact_div(self, divisor: "Polynomial"):
        """Quotient if ``divisor`` divides exactly, else ``None``."""
        q, r = self.divmod(divisor)
        return q if r.is_zero() else None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Polynomial.constant(self.variables, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.variables, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"Polynomial({self.variables!r}, {self.terms!r})"

    def __str__(self):
        return format_polynomial(self)


def _frac_or_gauss(x):
    if isinstance(x, (Fraction, GaussianRational)):
        return x
    return Fraction(x)


def format_monomial(variables, exps) -> str:
    parts = []
    for v, k in zip(variables, exps):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    out = []
    # highest total degree first, then lex
    for e in sorted(p.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
        c = p.terms[e]
        mono = format_monomial(p.variables, e)
        out.append(_signed_term(c, mono))
    return _join_signed(out)


def _signed_term(c, mono: str) -> Tuple[str, str]:
    """Split a coefficient*monomial into (sign, body) for pretty sums."""
    if isinstance(c, GaussianRational) and c.im != 0 and c.re != 0:
        body = format_coefficient(c) + (f"*{mono}" if mono else "")
        return "+", body
    if isinstance(c, GaussianRational):
        if c.re == 0:
            neg = c.im < 0
            mag = abs(c.im)
            core = "i" if mag == 1 else f"{mag}*i"
        else:
            neg = c.re < 0
            mag = abs(c.re)
            core = str(mag)
            if mag == 1 and mono:
                core = ""
    else:
        neg = c < 0
        mag = abs(c)
        core = "" if (mag == 1 and mono) else str(mag)
    if core and mono:
        body = f"{core}*{mono}"
    else:
        body = core or mono
    return ("-" if neg else "+"), body


def _join_signed(parts) -> str:
    s = ""
    for k, (sign, body) in enumerate(parts):
        if k == 0:
            s = body if sign == "+" else f"-{body}"
        else:
            s += f" {sign} {body}"
    return s


def poly_diff(f, var: str):
    """Exact partial derivative of a Polynomial or RationalFunction."""
    return f.diff(var)


# --------------------------------------------------------------------------
# Rational functions


class RationalFunction:
    """num/den over a fixed variable tuple.

    Not reduced to lowest terms; equality is decided by cross-multiplication.
    Cheap simplifications (shared denominators, exact division, constant
    denominators) keep sizes in check.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial = None):
        if den is None:
            den = Polynomial.constant(num.variables, Fraction(1))
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.variables != den.variables:
            raise ValueError("numerator/denominator variable mismatch")
        num, den = _simplify(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @property
    def variables(self):
        return self.num.variables

    @classmethod
    def constant(cls, variables, c) -> "RationalFunction":
        return cls(Polynomial.constant(variables, c))

    @classmethod
    def var(cls, variables, name) -> "RationalFunction":
        return cls(Polynomial.var(variables, name))

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return RationalFunction.constant(self.variables, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        q = other.den.exact_div(self.den)
        if q is not None:
            return RationalFunction(self.num * q + other.num, other.den)
        q = self.den.exact_div(other.den)
        if q is not None:
            return RationalFunction(self.num + other.num * q, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

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
        if self.num.is_zero() or other.num.is_zero():
            return RationalFunction(Polynomial.zero(self.variables))
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    def diff(self, name: str) -> "RationalFunction":
        if name not in self.variables:
            raise UnknownVariable(name)
        dn = self.num.diff(name)
        dd = self.den.diff(name)
        if dd.is_zero():
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values: Mapping[str, Number]):
        d = self.den.evaluate(values)
        if d == 0:
            raise DivisionByZero(f"denominator vanishes at {dict(values)}")
        n = self.num.evaluate(values)
        return n / d

    def equals(self, other: "RationalFunction") -> bool:
        return rf_equal(self, other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Polynomial)):
            other = self._lift(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return rf_equal(self, other)

    __hash__ = None  # equality is semantic, not structural

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _cancel_monomial(num: Polynomial, den: Polynomial):
    """Divide out the largest monomial dividing both numerator and denominator."""
    n = len(num.variables)
    common = [min(e[k] for e in list(num.terms) + list(den.terms)) for k in range(n)]
    if not any(common):
        return num, den

    def shift(p: Polynomial) -> Polynomial:
        return Polynomial(
            p.variables, {tuple(a - b for a, b in zip(e, common)): c for e, c in p.terms.items()}
        )

    return shift(num), shift(den)


def _simplify(num: Polynomial, den: Polynomial):
    if num.is_zero():
        return num, Polynomial.constant(num.variables, Fraction(1))
    if den.is_constant():
        c = den.constant_value()
        return num.scale(1 / c), Polynomial.constant(num.variables, Fraction(1))
    q = num.exact_div(den)
    if q is not None:
        return q, Polynomial.constant(num.variables, Fraction(1))
    num, den = _cancel_monomial(num, den)
    if den.is_constant():
        c = den.constant_value()
        return num.scale(1 / c), Polynomial.constant(num.variables, Fraction(1))
    # sign/scale normalization: leading denominator coefficient 1
    _, lc = den.leading()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return num, den


def rf_equal(f: RationalFunction, g: RationalFunction) -> bool:
    """True iff f*den(g) - g*den(f) is the zero polynomial."""
    if f.variables != g.variables:
        raise ValueError("rf_equal on different variable sets")
    return (f.num * g.den - g.num * f.den).is_zero()
