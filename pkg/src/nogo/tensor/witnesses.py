"""Checks that decide whether the minimal-substitution map is well defined.

Each function returns a small record; the residual expressions are in
derivative normal form so they can be compared with ``expr_equal``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .canonical import DIMENSION, canonicalize
from .constraints import ConstraintRule, apply_constraints, parse_rule
from .derivatives import curved_commute, derivative_normal_form, flat_commute_sort
from .expr import CURVED, FLAT, TensorExpr
from .generalize import generalize
from .parse import Declarations, parse_tensor


@dataclass
class WellposednessReport:
    flat_equal: bool
    curved_residual: TensorExpr
    image_a: TensorExpr
    image_b: TensorExpr

    @property
    def consistent(self) -> bool:
        """A map exists on {eA, eB} iff flat equality forces curved equality."""
        return not self.flat_equal or self.curved_residual.is_zero()


def wellposedness_check(a: TensorExpr, b: TensorExpr, *, dim: int = DIMENSION, trace=None) -> WellposednessReport:
    """Compare the images of two flat expressions.

    The residual is normal_form(bar(b) - bar(a)): the cost of reordering the
    curved derivatives of ``b`` into the order used by ``a``.
    """
    flat_equal = flat_commute_sort(a - b, dim=dim, trace=trace).is_zero()
    ga = generalize(a, trace=trace)
    gb = generalize(b, trace=trace)
    residual = derivative_normal_form(gb - ga, dim=dim, trace=trace)
    return WellposednessReport(flat_equal, residual, ga, gb)


# --------------------------------------------------------------------------
# the order-3 witness and the symmetrized map


def gr_witness(*, trace=None) -> WellposednessReport:
    a = parse_tensor("D[eta,a] D[eta,b] T^c")
    b = parse_tensor("D[eta,b] D[eta,a] T^c")
    return wellposedness_check(a, b, trace=trace)


def gr_witness_expected() -> TensorExpr:
    return parse_tensor("R[g]^c_{a b d} bar(T)^d")


@dataclass
class SymmetricMapReport:
    image: TensorExpr
    residual: TensorExpr
    scalar_residual: TensorExpr
    image_symmetric: bool


def symmetric_image(field_text: str) -> TensorExpr:
    """(1/2)(D_a D_b + D_b D_a) applied to the curved image of a field."""
    return parse_tensor(f"1/2 D[g,a] D[g,b] {field_text} + 1/2 D[g,b] D[g,a] {field_text}")


def symmetric_map_check(*, trace=None) -> SymmetricMapReport:
    """Derivative compatibility of the symmetrized map on D_a D_b T^c.

    The map is compatible iff its image equals D_a D_b applied to the image
    of T^c; the residual is image minus that.
    """
    image = symmetric_image("bar(T)^c")
    direct = parse_tensor("D[g,a] D[g,b] bar(T)^c")
    residual = derivative_normal_form(image - direct, trace=trace)
    scalar = derivative_normal_form(symmetric_image("bar(f)") - parse_tensor("D[g,a] D[g,b] bar(f)"))
    swapped = parse_tensor("1/2 D[g,b] D[g,a] bar(T)^c + 1/2 D[g,a] D[g,b] bar(T)^c")
    symmetric = canonicalize(image - swapped).is_zero()
    return SymmetricMapReport(image, residual, scalar, symmetric)


def symmetric_map_expected() -> TensorExpr:
    return parse_tensor("1/2 R[g]^c_{a b d} bar(T)^d")


# --------------------------------------------------------------------------
# current conservation in flat spacetime


FIELD_DECLS = Declarations.parse("antisym F {1 2}\nsym S {1 2}\nsym T {1 2}")


def flat_divergence_of_divergence(symbol: str = "F", *, trace=None) -> TensorExpr:
    e = parse_tensor(f"D[eta,^b] D[eta,^a] {symbol}_{{a b}}", FIELD_DECLS)
    return flat_commute_sort(e, trace=trace)


def flat_current_conservation(*, trace=None) -> TensorExpr:
    """D^b D^a F_ab for antisymmetric F; exactly zero."""
    return flat_divergence_of_divergence("F", trace=trace)


@dataclass
class RelabelingDerivation:
    """X = D^b D^a F_ab.  Renaming a <-> b and using antisymmetry gives
    X = -Y with Y = D^a D^b F_ab; Y and X differ only in derivative order."""

    x: TensorExpr
    relabeled: TensorExpr  # canonical form without commuting: -Y
    y: TensorExpr
    x_plus_y: TensorExpr  # canonicalized without commuting; vanishes iff relabeling suffices
    commuted_difference: TensorExpr  # flat_commute_sort(X - Y) = 0 closes the argument
    conclusion: TensorExpr  # flat_commute_sort(X)


def relabeling_derivation() -> RelabelingDerivation:
    x = parse_tensor("D[eta,^b] D[eta,^a] F_{a b}", FIELD_DECLS)
    y = parse_tensor("D[eta,^a] D[eta,^b] F_{a b}", FIELD_DECLS)
    relabeled = canonicalize(x)
    return RelabelingDerivation(
        x=x,
        relabeled=relabeled,
        y=canonicalize(y),
        x_plus_y=canonicalize(x + y),
        commuted_difference=flat_commute_sort(x - y),
        conclusion=flat_commute_sort(x),
    )


# --------------------------------------------------------------------------
# Lorentz gauge


@dataclass
class LorentzReport:
    connection: str
    start: TensorExpr
    steps: List[Tuple[str, TensorExpr]] = field(default_factory=list)
    residual: Optional[TensorExpr] = None


def lorentz_rule(conn: str) -> ConstraintRule:
    field_name = "bar(A)" if conn == CURVED else "A"
    return parse_rule(f"lorentz_gauge: D[{conn},^b] {field_name}_b -> 0")


def lorentz_gauge_contradiction(conn: str = CURVED, *, trace=None) -> LorentzReport:
    """Divergence of the current j_b = -(1/4pi) D^a D_a A_b in Lorentz gauge.

    The outer divergence is commuted inward past both wave-operator
    derivatives; the gauge condition then kills the main term and only
    curvature terms remain.
    """
    field_name = "bar(A)" if conn == CURVED else "A"
    start = parse_tensor(f"-1/4 pi^-1 D[{conn},^b] D[{conn},^a] D[{conn},a] {field_name}_b")
    report = LorentzReport(conn, start)
    rule = lorentz_rule(conn)
    cur = start
    if conn == CURVED:
        cur = curved_commute(cur, 0, 0, 0, trace=trace)
        report.steps.append(("swap outer pair", cur))
        cur = curved_commute(cur, 0, 0, 1, trace=trace)
        report.steps.append(("swap inner pair", cur))
    else:
        cur = flat_commute_sort(cur, trace=trace)
        report.steps.append(("flat reorder", cur))
    cur = apply_constraints(cur, [rule], trace=trace)
    report.steps.append(("gauge condition", cur))
    cur = derivative_normal_form(cur, trace=trace)
    report.steps.append(("normal form", cur))
    report.residual = cur
    return report


def lorentz_expected() -> TensorExpr:
    """-(1/4pi) D^b (R_b^d A_d), expanded."""
    return parse_tensor("-1/4 pi^-1 D[g,^b] (R[g]_b^d bar(A)_d)")


# --------------------------------------------------------------------------
# order-two family


_SCALAR_SWAPS = [
    ("D[eta,{0}] D[eta,{1}] f", "D[eta,{1}] D[eta,{0}] f"),
    ("D[eta,{0}] D[eta,{1}] (f h)", "D[eta,{1}] D[eta,{0}] (f h)"),
    ("D[eta,{0}] D[eta,{1}] f + D[eta,{1}] D[eta,{0}] h", "D[eta,{1}] D[eta,{0}] f + D[eta,{0}] D[eta,{1}] h"),
    ("2 D[eta,{0}] D[eta,{1}] f - D[eta,{1}] D[eta,{0}] f", "D[eta,{1}] D[eta,{0}] f"),
]

_OTHER = [
    ("eta_{{{0} c}} X^c", "X_{0}"),
    ("eta^{{{0} c}} X_c", "X^{0}"),
    ("D[eta,{0}] X^{1}", "eta^{{{1} c}} D[eta,{0}] X_c"),
    ("X^c Y_c", "X_c Y^c"),
    ("D[eta,{0}] (f h)", "h D[eta,{0}] f + f D[eta,{0}] h"),
    ("D[eta,{0}] X_{1}", "eta_{{{1} c}} D[eta,{0}] X^c"),
    ("X^{0} Y^{1}", "Y^{1} X^{0}"),
    ("D[eta,{0}] (X^c Y_c)", "X^c D[eta,{0}] Y_c + Y_c D[eta,{0}] X^c"),
    ("D[eta,^c] D[eta,c] f", "D[eta,c] D[eta,^c] f"),
    ("D[eta,^c] D[eta,c] f", "eta^{{c e}} D[eta,c] D[eta,e] f"),
    ("S_{{{0} {1}}}", "S_{{{1} {0}}}"),
]


def _derivative_index_variants() -> List[Tuple[str, str]]:
    out = []
    for na, nb in (("a", "b"), ("b", "a"), ("x", "y")):
        for va, vb in ((0, 0), (1, 0), (0, 1), (1, 1)):
            out.append((("^" if va else "") + na, ("^" if vb else "") + nb))
    return out


def order_two_family() -> List[Tuple[str, TensorExpr, TensorExpr]]:
    """Flat-equal pairs built from order-2 objects.

    Scalars with two derivatives, vectors with one, metric contractions and
    products.  Each entry is (label, eA, eB).
    """
    decls = Declarations.parse("sym S {1 2}")
    out = []
    for k, (ta, tb) in enumerate(_SCALAR_SWAPS):
        for ia, ib in _derivative_index_variants():
            out.append((f"scalar-swap-{k}-{ia}{ib}", parse_tensor(ta.format(ia, ib), decls),
                        parse_tensor(tb.format(ia, ib), decls)))
    for k, (ta, tb) in enumerate(_OTHER):
        for na, nb in (("a", "b"), ("b", "a"), ("x", "y")):
            out.append((f"order2-{k}-{na}{nb}", parse_tensor(ta.format(na, nb), decls),
                        parse_tensor(tb.format(na, nb), decls)))
    return out


def order_three_pair() -> Tuple[TensorExpr, TensorExpr]:
    return (parse_tensor("D[eta,a] D[eta,b] T^c"), parse_tensor("D[eta,b] D[eta,a] T^c"))


def residual_coefficient(residual: TensorExpr, reference: TensorExpr) -> Optional[Fraction]:
    """c with residual = c * reference (both canonicalized), else None."""
    r = canonicalize(residual)
    ref = canonicalize(reference)
    if len(ref.terms) != 1 or len(r.terms) != 1:
        return None
    if r.terms[0].factors != ref.terms[0].factors or r.terms[0].consts != ref.terms[0].consts:
        return None
    return r.terms[0].coeff / ref.terms[0].coeff


__all__ = [
    "WellposednessReport",
    "wellposedness_check",
    "gr_witness",
    "gr_witness_expected",
    "SymmetricMapReport",
    "symmetric_map_check",
    "symmetric_map_expected",
    "flat_current_conservation",
    "flat_divergence_of_divergence",
    "relabeling_derivation",
    "LorentzReport",
    "lorentz_gauge_contradiction",
    "lorentz_expected",
    "order_two_family",
    "order_three_pair",
    "residual_coefficient",
]
