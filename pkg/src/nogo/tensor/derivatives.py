"""Reordering covariant derivatives.

Flat derivatives commute freely.  Swapping two adjacent curved derivatives
costs one Riemann term per index of the differentiated object (deeper
derivative indices included), with the convention

    D_a D_b T^c = D_b D_a T^c - R^c_{a b d} T^d
    D_a D_b w_c = D_b D_a w_c + R^d_{a b c} w_d

The symbol ``R^c_{a b d}`` has its derivative pair in slots 2 and 3.  These
signs are pinned component-wise by the coordinate oracle tests.
"""

from __future__ import annotations

from dataclasses import replace
from typing import List

from .canonical import DIMENSION, canonicalize, preferred_derivative_orders
from .expr import (
    CURVED,
    Factor,
    Index,
    Term,
    TensorError,
    TensorExpr,
    WrongConnection,
    derivative,
    fresh_names,
    riemann,
)


class CommuteError(TensorError):
    pass


class NoNormalForm(TensorError):
    pass


def _curved_prefixes(e: TensorExpr) -> bool:
    return any(c == CURVED for t in e.terms for f in t.factors for c in f.connections())


def flat_commute_sort(e: TensorExpr, *, dim: int = DIMENSION, trace=None) -> TensorExpr:
    """Sort flat derivative prefixes (no corrections) and canonicalize."""
    if _curved_prefixes(e):
        raise WrongConnection("flat_commute_sort: expression contains curved derivatives")
    return canonicalize(e, dim=dim, flat_commuting=True, trace=trace)


def swap_corrections(term: Term, fi: int, p: int) -> List[Term]:
    """Riemann terms produced by swapping prefixes p, p+1 of factor fi."""
    f = term.factors[fi]
    (_, a), (_, b) = f.derivs[p], f.derivs[p + 1]
    inner = Factor(f.symbol, f.indices, f.derivs[p + 2:])
    outer = f.derivs[:p]
    others = term.factors[:fi] + term.factors[fi + 1:]
    gen = fresh_names(term.names())
    out: List[Term] = []
    idx = list(inner.all_indices())
    for j, i in enumerate(idx):
        n = next(gen)
        moved = list(idx)
        if i.up:
            r = Factor(riemann(), (i, a, b, Index(n, False)))
            moved[j] = Index(n, True)
            sign = -1
        else:
            r = Factor(riemann(), (Index(n, True), a, b, i))
            moved[j] = Index(n, False)
            sign = 1
        piece = TensorExpr((Term(term.coeff * sign, term.consts, (r, inner.with_all_indices(moved))),))
        for conn, d in reversed(outer):
            piece = derivative(conn, d, piece)
        out.extend(replace(t, factors=others + t.factors) for t in piece.terms)
    return out


def curved_commute(
    e: TensorExpr, term_position: int, factor_position: int, prefix_position: int, *, trace=None
) -> TensorExpr:
    """Swap derivative prefixes ``prefix_position`` and ``prefix_position + 1``."""
    try:
        term = e.terms[term_position]
        f = term.factors[factor_position]
    except IndexError:
        raise CommuteError(
            f"no factor at term {term_position}, factor {factor_position}"
        ) from None
    p = prefix_position
    if not 0 <= p < len(f.derivs) - 1:
        raise CommuteError(f"prefix positions {p}, {p + 1} are not both present")
    if f.derivs[p][0] != CURVED or f.derivs[p + 1][0] != CURVED:
        raise CommuteError("curved_commute needs two curved derivatives")
    derivs = list(f.derivs)
    derivs[p], derivs[p + 1] = derivs[p + 1], derivs[p]
    swapped = replace(f, derivs=tuple(derivs))
    main = replace(term, factors=term.factors[:factor_position] + (swapped,) + term.factors[factor_position + 1:])
    new_terms = [main] + swap_corrections(term, factor_position, p)
    result = TensorExpr(e.terms[:term_position] + tuple(new_terms) + e.terms[term_position + 1:])
    if trace is not None:
        trace.record(
            "curved_commute", e, result,
            term=term_position, factor=factor_position, prefix=prefix_position,
        )
    return result


def _swap_in_term(term: Term, fi: int, j: int) -> Term:
    f = term.factors[fi]
    derivs = list(f.derivs)
    derivs[j], derivs[j + 1] = derivs[j + 1], derivs[j]
    nf = replace(f, derivs=tuple(derivs))
    return replace(term, factors=term.factors[:fi] + (nf,) + term.factors[fi + 1:])


def derivative_normal_form(
    e: TensorExpr, *, dim: int = DIMENSION, max_terms: int = 20000, trace=None
) -> TensorExpr:
    """Canonical form in which every derivative prefix is in a preferred order.

    The order for each term is the one its canonical search picks when all
    derivatives are treated as commuting, so two expressions that agree up
    to derivative order reach the same main terms.  Curved swaps on the way
    add their Riemann terms, which are normalized in turn; they carry two
    derivatives fewer, so the work list drains.
    """
    work = list(canonicalize(e, dim=dim, flat_commuting=True).terms)
    done: List[Term] = []
    processed = 0
    while work:
        processed += 1
        if processed > max_terms:
            raise NoNormalForm(f"derivative reordering exceeded {max_terms} terms")
        t = work.pop()
        for fi, perm in preferred_derivative_orders(t):
            rank = {orig: k for k, orig in enumerate(perm)}
            cur = list(range(len(perm)))
            n = len(cur)
            for sweep in range(n):
                for j in range(n - 1 - sweep):
                    if rank[cur[j]] < rank[cur[j + 1]]:
                        continue
                    c0 = t.factors[fi].derivs[j][0]
                    c1 = t.factors[fi].derivs[j + 1][0]
                    if c0 != c1:
                        raise CommuteError("cannot reorder a flat derivative past a curved one")
                    if c0 == CURVED:
                        for corr in swap_corrections(t, fi, j):
                            work.extend(
                                canonicalize(TensorExpr((corr,)), dim=dim, flat_commuting=True).terms
                            )
                    t = _swap_in_term(t, fi, j)
                    cur[j], cur[j + 1] = cur[j + 1], cur[j]
        done.append(t)
    result = canonicalize(TensorExpr(tuple(done)), dim=dim, flat_commuting=True)
    if trace is not None:
        trace.record("derivative_normal_form", e, result)
    return result


__all__ = [
    "CommuteError",
    "NoNormalForm",
    "flat_commute_sort",
    "curved_commute",
    "swap_corrections",
    "derivative_normal_form",
]
