"""Text and LaTeX rendering of tensor expressions.

The text form re-parses with :func:`nogo.tensor.parse.parse_tensor`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import groupby
from typing import List, Sequence

from .expr import FLAT, METRIC, RICCI, RICCI_SCALAR, RIEMANN, Factor, Index, Term, TensorExpr


def _index_runs(indices: Sequence[Index]) -> str:
    out = []
    for up, run in groupby(indices, key=lambda i: i.up):
        names = [i.name for i in run]
        body = names[0] if len(names) == 1 else "{" + " ".join(names) + "}"
        out.append(("^" if up else "_") + body)
    return "".join(out)


def symbol_text(f: Factor) -> str:
    s = f.symbol
    if s.kind == METRIC:
        return s.name
    if s.kind in (RIEMANN, RICCI, RICCI_SCALAR):
        return f"R[{s.connection}]"
    if s.side == "curved":
        return f"bar({s.name})"
    return s.name


def format_factor(f: Factor) -> str:
    parts = []
    for conn, i in f.derivs:
        parts.append(f"D[{conn},{'^' if i.up else ''}{i.name}]")
    parts.append(symbol_text(f) + _index_runs(f.indices))
    return " ".join(parts)


def _scalar_text(coeff: Fraction, consts) -> List[str]:
    parts = []
    if coeff != 1 or not consts:
        parts.append(str(coeff))
    for name, k in consts:
        parts.append(name if k == 1 else f"{name}^{k}")
    return parts


def format_term(t: Term, leading: bool = True) -> str:
    coeff = t.coeff
    neg = coeff < 0
    body = _scalar_text(abs(coeff), t.consts)
    if t.factors and body == ["1"]:
        body = []
    body += [format_factor(f) for f in t.factors]
    text = " ".join(body)
    if leading:
        return f"-{text}" if neg else text
    return ("- " if neg else "+ ") + text


def format_expr(e: TensorExpr) -> str:
    if not e.terms:
        return "0"
    return " ".join(format_term(t, k == 0) for k, t in enumerate(e.terms))


# --------------------------------------------------------------------------
# LaTeX


def _latex_indices(indices: Sequence[Index]) -> str:
    out = []
    for up, run in groupby(indices, key=lambda i: i.up):
        names = "".join(i.name for i in run)
        out.append(("^{" if up else "_{") + names + "}")
    return "{}".join(out)


def latex_factor(f: Factor) -> str:
    parts = []
    for conn, i in f.derivs:
        c = r"\eta" if conn == FLAT else "g"
        parts.append(rf"\nabla^{{({c})}}" + ("^{" if i.up else "_{") + i.name + "}")
    s = f.symbol
    if s.kind == METRIC:
        head = r"\eta" if s.side == "flat" else "g"
    elif s.kind in (RIEMANN, RICCI, RICCI_SCALAR):
        c = r"\eta" if s.side == "flat" else "g"
        head = rf"R^{{({c})}}{{}}"
    else:
        name = {"rho": r"\rho", "pi": r"\pi"}.get(s.name, s.name)
        head = rf"\overline{{{name}}}" if s.side == "curved" else name
    parts.append(head + _latex_indices(f.indices))
    return " ".join(parts)


def latex_term(t: Term) -> str:
    num, den = abs(t.coeff.numerator), t.coeff.denominator
    consts_num = [(n, k) for n, k in t.consts if k > 0]
    consts_den = [(n, -k) for n, k in t.consts if k < 0]

    def c(name, k):
        n = r"\pi" if name == "pi" else name
        return n if k == 1 else f"{n}^{{{k}}}"

    top = " ".join(([str(num)] if num != 1 or not (consts_num or t.factors) else []) + [c(*x) for x in consts_num])
    bottom = " ".join(([str(den)] if den != 1 else []) + [c(*x) for x in consts_den])
    scalar = rf"\frac{{{top or '1'}}}{{{bottom}}}" if bottom else top
    body = " ".join(x for x in [scalar] + [latex_factor(f) for f in t.factors] if x)
    return body


def latex_expr(e: TensorExpr) -> str:
    if not e.terms:
        return "0"
    out = ""
    for k, t in enumerate(e.terms):
        neg = t.coeff < 0
        body = latex_term(t)
        if k == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out
