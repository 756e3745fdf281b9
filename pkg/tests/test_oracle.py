from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tensor_strategies import tensor_exprs
from nogo.oracle import (
    CoordinateChart,
    ComponentMetric,
    OracleError,
    SingularMetric,
    christoffel,
    convention_checks,
    evaluate_abstract,
    is_flat,
    parse_manifest,
    random_bindings,
    ricci,
    ricci_scalar,
    riemann,
    sample_metrics,
)
from nogo.parsing import ParseError
from nogo.tensor.canonical import canonicalize
from nogo.tensor.derivatives import curved_commute, derivative_normal_form
from nogo.tensor.expr import CURVED
from nogo.tensor.parse import parse_tensor
from nogo.tensor.witnesses import gr_witness, lorentz_gauge_contradiction, symmetric_map_check

METRICS = sample_metrics()
BLOCK = METRICS["block4"]


def evaluate(e, g=BLOCK, seed=0):
    return evaluate_abstract(e, random_bindings(e, g, random.Random(seed)), g)


def test_sample_metrics_present():
    assert set(METRICS) == {"minkowski4", "polar2", "bump2", "block4"}
    assert is_flat(METRICS["minkowski4"]) and is_flat(METRICS["polar2"])
    assert not is_flat(METRICS["bump2"]) and not is_flat(BLOCK)


@pytest.mark.parametrize("name", sorted(METRICS))
def test_conventions_hold_componentwise(name):
    checks = convention_checks(METRICS[name])
    assert all(checks.values()), checks


def test_known_values():
    polar = METRICS["polar2"]
    G = christoffel(polar)
    x = polar.chart.var("x")
    assert G[0, 1, 1] == -x
    assert G[1, 0, 1] == x.inverse()
    bump = METRICS["bump2"]
    assert ricci_scalar(bump)[()].evaluate({"x": 0, "y": 0}) == -2
    assert ricci(bump)[0, 0].evaluate({"x": 1, "y": 0}) == Fraction(-1, 4)


def _sympy_riemann(diag, coords):
    n = len(coords)
    g = sympy.diag(*diag)
    gi = g.inv()
    Gam = [[[sum(gi[c, d] * (sympy.diff(g[b, d], coords[a]) + sympy.diff(g[a, d], coords[b])
                             - sympy.diff(g[a, b], coords[d])) for d in range(n)) / 2
             for b in range(n)] for a in range(n)] for c in range(n)]
    R = {}
    for c in range(n):
        for a in range(n):
            for b in range(n):
                for d in range(n):
                    val = (sympy.diff(Gam[c][a][d], coords[b]) - sympy.diff(Gam[c][b][d], coords[a])
                           + sum(Gam[c][b][l] * Gam[l][a][d] - Gam[c][a][l] * Gam[l][b][d] for l in range(n)))
                    R[c, a, b, d] = sympy.simplify(val)
    return R


@pytest.mark.parametrize("name, diag", [("bump2", ["1", "1 + x**2"]), ("polar2", ["1", "x**2"])])
def test_riemann_matches_sympy(name, diag):
    g = METRICS[name]
    coords = sympy.symbols("x y")
    expected = _sympy_riemann([sympy.sympify(d) for d in diag], coords)
    Riem = riemann(g)
    for idx, want in expected.items():
        got = Riem[idx]
        for pt in ({"x": 1, "y": 0}, {"x": Fraction(1, 2), "y": 3}):
            assert got.evaluate(pt) == sympy.Rational(want.subs({coords[0]: pt["x"], coords[1]: pt["y"]}))


def test_commutator_sign_fixed_by_components():
    # the opposite sign would leave a nonzero remainder on a curved metric
    wrong = parse_tensor("D[g,a] D[g,b] bar(T)^c - D[g,b] D[g,a] bar(T)^c - R[g]^c_{a b d} bar(T)^d")
    assert not evaluate(wrong).is_zero()


@settings(max_examples=100)
@given(tensor_exprs(only_curved=True), st.integers(0, 3))
def test_engine_rewrites_hold_componentwise(text, seed):
    e = parse_tensor(text)
    for rewritten in (canonicalize(e), derivative_normal_form(e)):
        assert evaluate(rewritten - e, seed=seed).is_zero()
    for ti, t in enumerate(e.terms):
        for fi, f in enumerate(t.factors):
            if len(f.derivs) >= 2:
                swapped = curved_commute(e, ti, fi, 0)
                assert evaluate(swapped - e, seed=seed).is_zero()


def test_witness_residuals_componentwise():
    residual = gr_witness().curved_residual
    assert not evaluate(residual).is_zero()
    assert evaluate(residual, METRICS["minkowski4"]).is_zero()
    assert not evaluate(symmetric_map_check().residual).is_zero()
    lorentz = lorentz_gauge_contradiction(CURVED).residual
    value = evaluate(lorentz)
    point = {v: Fraction(k + 1, 2) for k, v in enumerate(value.chart.ring)}
    assert value.nonzero_at(point)


def test_manifest_errors():
    with pytest.raises(SingularMetric):
        parse_manifest("[bad]\ncoords: x y\ndiag: 1, 0\n")
    with pytest.raises((ParseError, OracleError)):
        parse_manifest("[bad]\ncoords: x y\nnonsense: 1\n")
    with pytest.raises((ParseError, OracleError)):
        parse_manifest("[bad]\ncoords: x y\ndiag: 1, z\n")


def test_custom_metric():
    chart = CoordinateChart(("u", "v"))
    one, u = chart.const(1), chart.var("u")
    g = ComponentMetric(chart, [[one, chart.zero()], [chart.zero(), u * u * u]])
    assert all(convention_checks(g).values())
