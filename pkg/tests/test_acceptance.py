"""Acceptance gate: every criterion, timed against its limit.

Run under pytest (a summary line per criterion is printed at the end) or
directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from oracles import as_monomials, commutator_words, rewrite_normal, weyl_words  # noqa: E402
from tensor_strategies import tensor_exprs  # noqa: E402

from nogo.cli import main as cli_main  # noqa: E402
from nogo.corpus import run_corpus  # noqa: E402
from nogo.kernel import GaussianRational, I, Polynomial  # noqa: E402
from nogo.oracle import (  # noqa: E402
    convention_checks,
    evaluate_abstract,
    random_bindings,
    ricci_scalar,
    sample_metrics,
)
from nogo.parsing import parse_classical  # noqa: E402
from nogo.tensor.canonical import canonicalize, expr_equal  # noqa: E402
from nogo.tensor.derivatives import derivative_normal_form  # noqa: E402
from nogo.tensor.expr import CURVED, TensorExpr  # noqa: E402
from nogo.tensor.parse import parse_tensor  # noqa: E402
from nogo.tensor.witnesses import (  # noqa: E402
    flat_divergence_of_divergence,
    gr_witness,
    gr_witness_expected,
    lorentz_expected,
    lorentz_gauge_contradiction,
    order_two_family,
    residual_coefficient,
    symmetric_map_check,
    symmetric_map_expected,
    wellposedness_check,
)
from nogo.weyl import (  # noqa: E402
    PH,
    QH,
    QUANTIZATION_TABLE,
    U2_BASIS,
    ClassicalPoly,
    OrderingScheme,
    WeylElement,
    check_homomorphism,
    gvh_witness,
    operator_action,
    ordering_table,
    poisson_bracket,
    prescription_action,
    quantize_u2,
    weyl_normal_form,
)

Outcome = Tuple[bool, str]
RESULTS: Dict[int, Tuple[bool, str]] = {}


def _evaluate(e: TensorExpr, metric: str, seed: int = 0):
    g = sample_metrics()[metric]
    return evaluate_abstract(e, random_bindings(e, g, random.Random(seed)), g)


# --------------------------------------------------------------------------
# the criteria


def poisson_cubic_bracket() -> Outcome:
    from io import StringIO
    from contextlib import redirect_stdout

    value = parse_classical("{q^3,p^3}")
    buf = StringIO()
    with redirect_stdout(buf):
        code = cli_main(["poisson", "{q^3,p^3}", "--expect", "9*q^2*p^2"])
    ok = value == parse_classical("9*q^2*p^2") and str(value) == "9*q^2*p^2" and code == 0
    return ok, f"{{q^3,p^3}} = {value}"


def forced_quantization() -> Outcome:
    half = Fraction(1, 2)
    ok = (
        quantize_u2(parse_classical("q^2")) == QH * QH
        and quantize_u2(parse_classical("p^2")) == PH * PH
        and quantize_u2(parse_classical("q*p")) == (QH * PH + PH * QH) * half
    )
    report = check_homomorphism(QUANTIZATION_TABLE, U2_BASIS)
    ok = ok and len(report.pairs) == 15 and report.all_passed and report.generators_ok
    return ok, f"{len(report.pairs)} pairs, {len(report.failures)} failing"


def gvh() -> Outcome:
    w = gvh_witness()
    engine_c = w.constant if w.residual.is_scalar() else None
    lhs = commutator_words(weyl_words(3, 0), weyl_words(0, 3))
    rhs = commutator_words(weyl_words(2, 1), weyl_words(1, 2))
    total: Dict[str, GaussianRational] = {}
    for ws, scale in ((lhs, Fraction(1, 9)), (rhs, Fraction(-1, 3))):
        for word, c in ws.items():
            total[word] = total.get(word, GaussianRational(0)) + c * (-I) * scale
    oracle = as_monomials(rewrite_normal(total))
    ok = (
        w.classical_residual.is_zero()
        and engine_c is not None
        and engine_c != 0
        and oracle == {(0, 0): engine_c}
    )
    return ok, f"classical residual {w.classical_residual}, quantum residual ({engine_c})*I, oracle {oracle}"


def prescriptions() -> Outcome:
    tests = [Polynomial(("q",), {(k,): 1}) for k in range(4)]
    tests.append(Polynomial(("q",), {(3,): Fraction(2, 3), (1,): -1, (0,): 5}))
    checked = 0
    for scheme in (OrderingScheme.WEYL_SYMMETRIC, OrderingScheme.NORMAL_P_LEFT):
        for d in range(5):
            for n in range(d + 1):
                h = ClassicalPoly.monomial(n, d - n)
                for psi in tests:
                    if prescription_action(scheme, h, psi) != operator_action(scheme, h, psi):
                        return False, f"mismatch {scheme.value} {h} on {psi}"
                    checked += 1
    return True, f"{checked} (scheme, monomial, test) cases agree"


def normal_on_u2() -> Outcome:
    report = check_homomorphism(ordering_table(OrderingScheme.NORMAL_P_LEFT), U2_BASIS)
    names = [f"({c.f},{c.g}) defect {c.defect}" for c in report.failures]
    return len(report.failures) >= 1, f"failing pairs: {', '.join(names)}"


def gr_no_go() -> Outcome:
    rep = gr_witness()
    matches = expr_equal(rep.curved_residual, gr_witness_expected())
    curved = not _evaluate(rep.curved_residual, "block4").is_zero()
    flat = _evaluate(rep.curved_residual, "minkowski4").is_zero()
    ok = rep.flat_equal and matches and curved and flat
    return ok, f"flat_equal={rep.flat_equal}, residual {rep.curved_residual}, block4 nonzero={curved}, minkowski zero={flat}"


def order_two() -> Outcome:
    family = order_two_family()
    swaps = sum(label.startswith("scalar-swap") for label, _, _ in family)
    for label, a, b in family:
        rep = wellposedness_check(a, b)
        if not rep.flat_equal or not rep.curved_residual.is_zero():
            return False, f"{label}: residual {rep.curved_residual}"
    return swaps > 0, f"{len(family)} pairs ({swaps} scalar double-derivative swaps), all residuals 0"


def symmetric_map() -> Outcome:
    rep = symmetric_map_check()
    coeff = residual_coefficient(rep.residual, symmetric_map_expected())
    nonzero = not _evaluate(rep.residual, "block4").is_zero()
    ok = coeff is not None and abs(coeff) == 1 and nonzero
    return ok, f"residual {rep.residual}, oracle nonzero={nonzero}"


def flat_conservation() -> Outcome:
    f = flat_divergence_of_divergence("F")
    s = flat_divergence_of_divergence("S")
    return f.is_zero() and not s.is_zero(), f"antisymmetric: {f}; symmetric control: {s}"


def lorentz() -> Outcome:
    rep = lorentz_gauge_contradiction(CURVED)
    leading = expr_equal(rep.residual, derivative_normal_form(lorentz_expected()))
    value = _evaluate(rep.residual, "block4", seed=3)
    point = {v: Fraction(k + 2, 3) for k, v in enumerate(value.chart.ring)}
    nonzero = value.nonzero_at(point)
    ok = not rep.residual.is_zero() and leading and nonzero
    return ok, f"residual {rep.residual}; equals -(1/4pi) D^b(R_b^d A_d): {leading}; nonzero at {point}: {nonzero}"


def corpus() -> Outcome:
    results = run_corpus()
    failed = [r.entry.name for r in results if not r.passed]
    return not failed and len(results) > 0, f"{len(results)} entries, failed: {failed or 'none'}"


def oracle_pinning() -> Outcome:
    bad = []
    for name, g in sample_metrics().items():
        bad += [f"{name}:{k}" for k, v in convention_checks(g).items() if not v]
    scalar = ricci_scalar(sample_metrics()["bump2"])[()].evaluate({"x": 0, "y": 0})
    return not bad and scalar == -2, f"failing checks: {bad or 'none'}; Ricci scalar of bump2 at x=0: {scalar}"


def _count_examples(test: Callable) -> int:
    calls = []
    test(calls)
    return len(calls)


def property_suites() -> Outcome:
    coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=4)
    polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=4).map(ClassicalPoly)
    words = st.text(alphabet="qp", max_size=7)
    run = settings(max_examples=500, database=None, deadline=None, derandomize=True)

    @run
    @given(polys, polys, polys)
    def jacobi(calls, f, g, h):
        calls.append(1)
        assert (poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f))
                + poisson_bracket(h, poisson_bracket(f, g))).is_zero()

    @run
    @given(polys, polys, polys)
    def leibniz(calls, f, g, h):
        calls.append(1)
        assert poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h)

    @run
    @given(st.lists(st.tuples(words, coeffs), min_size=1, max_size=3))
    def nf_idempotent(calls, combo):
        calls.append(1)
        nf = WeylElement()
        for w, c in combo:
            nf = nf + weyl_normal_form(w, c)
        again = WeylElement()
        for (n, m), c in nf.terms.items():
            again = again + weyl_normal_form("q" * n + "p" * m, c)
        assert again == nf

    @run
    @given(words, words)
    def nf_homomorphism(calls, u, v):
        calls.append(1)
        assert weyl_normal_form(u + v) == weyl_normal_form(u) * weyl_normal_form(v)

    @run
    @given(tensor_exprs(curved=True))
    def canon_idempotent(calls, text):
        calls.append(1)
        once = canonicalize(parse_tensor(text, _DECLS))
        assert canonicalize(once) == once

    @run
    @given(tensor_exprs(curved=True), st.randoms(use_true_random=False))
    def canon_renaming(calls, text, rnd):
        calls.append(1)
        e = parse_tensor(text, _DECLS)
        terms = []
        for t in e.terms:
            pool = [n for n in "pqrstuvwxyz" if n not in t.names()]
            rnd.shuffle(pool)
            terms.append(t.rename(dict(zip(t.dummy_names(), pool))))
        rnd.shuffle(terms)
        assert canonicalize(TensorExpr(tuple(terms))) == canonicalize(e)

    counts = {}
    for name, fn in (("jacobi", jacobi), ("leibniz", leibniz), ("normal-form idempotence", nf_idempotent),
                     ("normal-form homomorphism", nf_homomorphism), ("canonicalize idempotence", canon_idempotent),
                     ("canonicalize renaming", canon_renaming)):
        try:
            counts[name] = _count_examples(fn)
        except AssertionError as exc:
            return False, f"{name} failed: {exc}"
    ok = all(n >= 500 for n in counts.values())
    return ok, ", ".join(f"{k}: {v}" for k, v in counts.items())


from tensor_strategies import DECLS as _DECLS  # noqa: E402

CRITERIA: List[Tuple[int, str, Optional[float], Callable[[], Outcome]]] = [
    (1, "Poisson bracket {q^3, p^3}", 1.0, poisson_cubic_bracket),
    (2, "forced degree-2 quantization", 1.0, forced_quantization),
    (3, "degree-3 obstruction witness", 1.0, gvh),
    (4, "orderings vs kernel prescriptions", 5.0, prescriptions),
    (5, "p-left normal ordering fails on degree 2", 1.0, normal_on_u2),
    (6, "order-3 minimal-substitution witness", 2.0, gr_no_go),
    (7, "order-2 consistency", 5.0, order_two),
    (8, "symmetrized map failure", 1.0, symmetric_map),
    (9, "flat current conservation", 1.0, flat_conservation),
    (10, "Lorentz-gauge contradiction", 5.0, lorentz),
    (11, "golden corpus", 10.0, corpus),
    (12, "oracle convention pinning", 10.0, oracle_pinning),
    (13, "property suites (>= 500 cases each)", None, property_suites),
]


def evaluate_criterion(number: int, title: str, limit: Optional[float], fn) -> Tuple[bool, str]:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    in_time = limit is None or elapsed < limit
    budget = f"< {limit:g} s" if limit is not None else "no limit"
    status = "PASS" if ok and in_time else "FAIL"
    line = f"criterion {number:2d} {status} [{elapsed:6.2f} s, {budget}] {title}: {detail}"
    RESULTS[number] = (ok and in_time, line)
    return ok and in_time, line


@pytest.mark.parametrize("number, title, limit, fn", CRITERIA, ids=[f"criterion-{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, title, limit, fn):
    ok, line = evaluate_criterion(number, title, limit, fn)
    print(line)
    assert ok, line


if __name__ == "__main__":
    outcomes = [evaluate_criterion(*c) for c in CRITERIA]
    for _, line in outcomes:
        print(line)
    sys.exit(0 if all(ok for ok, _ in outcomes) else 1)
