"""The minimal-substitution map from flat-side to curved-side expressions."""

from __future__ import annotations

from dataclasses import replace

from .expr import CURVED, FLAT, GENERIC, METRIC, Factor, TensorError, TensorExpr


class GeneralizeError(TensorError):
    pass


def generalize_factor(f: Factor) -> Factor:
    s = f.symbol
    if s.side == "curved":
        raise GeneralizeError(f"input already contains the curved-side symbol {s.name}")
    if s.kind not in (GENERIC, METRIC):
        raise GeneralizeError("flat-side curvature vanishes; canonicalize before generalizing")
    derivs = tuple((CURVED if c == FLAT else c, i) for c, i in f.derivs)
    if any(c != CURVED for c, _ in derivs):
        raise GeneralizeError("unknown connection in derivative prefix")
    return Factor(s.curved_image(), f.indices, derivs)


def generalize(e: TensorExpr, *, trace=None) -> TensorExpr:
    """eta -> g, flat derivative -> curved derivative, X -> bar(X).

    Purely syntactic: linear, multiplicative, and derivative prefixes keep
    their written order.
    """
    out = TensorExpr(
        tuple(replace(t, factors=tuple(generalize_factor(f) for f in t.factors)) for t in e.terms)
    )
    if trace is not None:
        trace.record("generalize", e, out)
    return out
