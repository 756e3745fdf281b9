from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensor_strategies import DECLS, tensor_exprs
from nogo.parsing import ParseError
from nogo.tensor.canonical import canonicalize, expr_equal
from nogo.tensor.constraints import ConstraintLoop, RuleError, apply_constraints, parse_rule
from nogo.tensor.derivatives import (
    curved_commute,
    derivative_normal_form,
    flat_commute_sort,
)
from nogo.tensor.expr import CURVED, FLAT, TensorExpr, WrongConnection
from nogo.tensor.generalize import GeneralizeError, generalize
from nogo.tensor.parse import Declarations, parse_tensor
from nogo.tensor.printing import format_expr, latex_expr
from nogo.tensor.witnesses import (
    flat_current_conservation,
    flat_divergence_of_divergence,
    gr_witness,
    gr_witness_expected,
    lorentz_expected,
    lorentz_gauge_contradiction,
    order_three_pair,
    order_two_family,
    relabeling_derivation,
    residual_coefficient,
    symmetric_map_check,
    symmetric_map_expected,
    wellposedness_check,
)


def P(text, decls=DECLS):
    return parse_tensor(text, decls)


# --------------------------------------------------------------------------
# parsing and printing


def test_parse_flat_double_derivative():
    e = P("D[eta,a] D[eta,b] T^c")
    (term,) = e.terms
    (factor,) = term.factors
    assert factor.connections() == (FLAT, FLAT)
    assert [i.name for i in factor.all_indices()] == ["a", "b", "c"]


def test_parse_riemann_and_metric():
    e = P("R[g]^c_{a b d} eta^{a e}")
    assert {(i.name, i.up) for i in e.free_indices()} == {("c", True), ("b", False), ("d", False), ("e", True)}
    (term,) = e.terms
    assert [f.symbol.kind for f in term.factors] == ["riemann", "metric"]


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("F_{a a}", "same variance"),
        ("X^a Y^a", "same variance"),
        ("X^a + Y^b", "free indices"),
        ("X^a X_{a b}", "arity"),
        ("D[foo,a] X^b", "connection"),
        ("X^a Y_a Z^a", "more than twice"),
        ("X^a /", ""),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        P(text)
    assert info.value.line == 1 and info.value.column >= 1
    assert fragment in str(info.value)


@settings(max_examples=300)
@given(tensor_exprs(curved=True))
def test_print_parse_round_trip(text):
    e = P(text)
    again = P(format_expr(e))
    assert expr_equal(e, again)
    assert format_expr(canonicalize(again)) == format_expr(canonicalize(e))
    assert latex_expr(e)


# --------------------------------------------------------------------------
# canonical form


def test_antisymmetry_and_metric_contraction():
    assert str(canonicalize(P("F_{b a}"))) == "-F_{a b}"
    assert canonicalize(P("F_{a b} + F_{b a}")).is_zero()
    assert canonicalize(P("F^a_a")).is_zero()
    assert expr_equal(P("eta_{a b} X^b"), P("X_a"))
    assert expr_equal(P("eta^a_a"), P("4"))
    assert expr_equal(P("g^a_a"), P("4"))
    assert canonicalize(P("T^c V_c - T^d V_d")).is_zero()


def test_flat_curvature_and_metric_derivatives_vanish():
    assert canonicalize(P("R[eta]^a_{b c d}")).is_zero()
    assert canonicalize(P("D[g,a] g_{b c}")).is_zero()
    assert canonicalize(P("D[eta,a] eta^{b c}")).is_zero()


def test_riemann_symmetries_and_traces():
    # slots are (c, a, b, d) of R^c_{abd}: antisymmetric in (a, b) and, lowered, in (c, d)
    assert canonicalize(P("R[g]^c_{a b d} + R[g]^c_{b a d}")).is_zero()
    assert canonicalize(P("R[g]_{c a b d} + R[g]_{d a b c}")).is_zero()
    assert canonicalize(P("R[g]_{c a b d} - R[g]_{b d c a}")).is_zero()
    assert not canonicalize(P("R[g]_{c a b d} + R[g]_{a c b d}")).is_zero()
    assert canonicalize(P("R[g]^c_{a b d} + R[g]^c_{b d a} + R[g]^c_{d a b}")).is_zero()
    assert expr_equal(P("R[g]^b_{a b d}"), P("R[g]_{a d}"))
    assert expr_equal(P("R[g]^a_a"), P("R[g]"))
    assert canonicalize(P("R[g]_{a b} - R[g]_{b a}")).is_zero()


@settings(max_examples=500)
@given(tensor_exprs(curved=True))
def test_canonicalize_idempotent(text):
    once = canonicalize(P(text))
    assert canonicalize(once) == once


@settings(max_examples=500)
@given(tensor_exprs(curved=True), st.randoms(use_true_random=False))
def test_canonicalize_renaming_and_reordering_invariant(text, rnd):
    e = P(text)
    terms = []
    for t in e.terms:
        dummies = list(t.dummy_names())
        used = t.names()
        pool = [n for n in "pqrstuvwxyz" if n not in used]
        rnd.shuffle(pool)
        t = t.rename(dict(zip(dummies, pool)))
        factors = list(t.factors)
        rnd.shuffle(factors)
        terms.append(type(t)(t.coeff, t.consts, tuple(factors)))
    rnd.shuffle(terms)
    assert canonicalize(TensorExpr(tuple(terms))) == canonicalize(e)


@settings(max_examples=300)
@given(tensor_exprs(curved=True))
def test_difference_with_itself_vanishes(text):
    e = P(text)
    assert canonicalize(e - e).is_zero()
    assert expr_equal(e + e, P(f"2 ({text})"))


# --------------------------------------------------------------------------
# derivatives


def test_flat_sort_rejects_curved_input():
    with pytest.raises(WrongConnection):
        flat_commute_sort(P("D[g,a] D[g,b] bar(T)^c"))


def test_flat_derivatives_commute():
    assert flat_commute_sort(P("D[eta,a] D[eta,b] T^c - D[eta,b] D[eta,a] T^c")).is_zero()
    assert not canonicalize(P("D[eta,a] D[eta,b] T^c - D[eta,b] D[eta,a] T^c")).is_zero()


def test_curved_swap_produces_curvature():
    out = curved_commute(P("D[g,a] D[g,b] bar(T)^c"), 0, 0, 0)
    assert expr_equal(out, P("D[g,b] D[g,a] bar(T)^c - R[g]^c_{a b d} bar(T)^d"))
    out = curved_commute(P("D[g,a] D[g,b] bar(w)_c"), 0, 0, 0)
    assert expr_equal(out, P("D[g,b] D[g,a] bar(w)_c + R[g]^d_{a b c} bar(w)_d"))
    out = curved_commute(P("D[g,a] D[g,b] bar(f)"), 0, 0, 0)
    assert expr_equal(out, P("D[g,b] D[g,a] bar(f)"))


def test_curved_swap_rejects_flat_pair():
    with pytest.raises(Exception):
        curved_commute(P("D[eta,a] D[eta,b] T^c"), 0, 0, 0)


@settings(max_examples=200)
@given(tensor_exprs(only_curved=True))
def test_derivative_normal_form_idempotent(text):
    once = derivative_normal_form(P(text))
    assert derivative_normal_form(once) == once


@settings(max_examples=200)
@given(tensor_exprs())
def test_image_normal_form_idempotent(text):
    image = generalize(canonicalize(P(text), flat_commuting=True))
    once = derivative_normal_form(image)
    assert derivative_normal_form(once) == once


def test_normal_form_identifies_swapped_orders():
    a = P("D[g,a] D[g,b] bar(T)^c")
    b = curved_commute(a, 0, 0, 0)
    assert derivative_normal_form(a - b).is_zero()


# --------------------------------------------------------------------------
# generalization


def test_generalize_promotes_metric_and_connection():
    assert expr_equal(generalize(P("eta_{a b} D[eta,c] X^b")), P("g_{a b} D[g,c] bar(X)^b"))
    assert expr_equal(generalize(P("2 pi f")), P("2 pi bar(f)"))


def test_generalize_rejects_curved_input():
    with pytest.raises(GeneralizeError):
        generalize(P("D[g,a] bar(X)^b"))


# --------------------------------------------------------------------------
# constraints


def test_unit_velocity_rule():
    rule = parse_rule("unit: u^a u_a -> -1")
    assert apply_constraints(P("u^b u_b X^c"), [rule]) == canonicalize(P("-X^c"))
    assert apply_constraints(P("eta_{a b} u^a u^b"), [rule]) == canonicalize(P("-1"))
    # the inner part of a longer derivative prefix
    rule2 = parse_rule("gauge: D[eta,^b] A_b -> 0")
    assert apply_constraints(P("D[eta,c] D[eta,^b] A_b"), [rule2]).is_zero()
    assert apply_constraints(P("D[eta,^b] D[eta,c] A_b"), [rule2]).is_zero()


def test_rules_must_shrink_and_keep_free_indices():
    with pytest.raises(RuleError):
        parse_rule("bad: u^a -> v^b")
    with pytest.raises(RuleError):
        parse_rule("grow: u^a -> u^a v^b w_b")
    with pytest.raises(ParseError):
        parse_rule("no arrow here")


def test_step_limit_raises_loop_error():
    rule = parse_rule("unit: u^a u_a -> -1")
    with pytest.raises(ConstraintLoop):
        apply_constraints(P("u^a u_a u^b u_b"), [rule], max_steps=1)


# --------------------------------------------------------------------------
# the witnesses


def test_order_three_witness():
    rep = gr_witness()
    assert rep.flat_equal
    assert not rep.consistent
    assert expr_equal(rep.curved_residual, gr_witness_expected())


def test_order_two_family_is_consistent():
    family = order_two_family()
    assert len(family) >= 60
    for label, a, b in family:
        rep = wellposedness_check(a, b)
        assert rep.flat_equal, label
        assert rep.curved_residual.is_zero(), label


def test_wellposedness_on_unequal_pair():
    a, b = order_three_pair()
    rep = wellposedness_check(a, a + b)
    assert not rep.flat_equal and rep.consistent


def test_symmetric_map_fails_by_half_curvature():
    rep = symmetric_map_check()
    assert rep.image_symmetric
    assert rep.scalar_residual.is_zero()
    coeff = residual_coefficient(rep.residual, symmetric_map_expected())
    assert coeff is not None and abs(coeff) == 1


def test_flat_conservation():
    assert flat_current_conservation().is_zero()
    assert not flat_divergence_of_divergence("S").is_zero()
    d = relabeling_derivation()
    assert d.x_plus_y.is_zero()
    assert d.commuted_difference.is_zero()
    assert d.conclusion.is_zero()


def test_lorentz_gauge():
    rep = lorentz_gauge_contradiction(CURVED)
    assert not rep.residual.is_zero()
    assert expr_equal(rep.residual, derivative_normal_form(lorentz_expected()))
    assert lorentz_gauge_contradiction(FLAT).residual.is_zero()
