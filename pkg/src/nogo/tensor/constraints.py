"""Algebraic side conditions applied as term rewrites.

A rule replaces a product of factors (the pattern) by an expression with the
same free indices.  Rules must strictly shrink (factor count, derivative
count) so that rewriting reaches a fixpoint.

Matching is up to slot symmetries and dummy renaming.  Free pattern indices
may meet either variance in the term (indices move through the metric).  A
single-factor pattern also matches the innermost part of a longer derivative
prefix; the extra outer derivatives are then applied to the replacement.
Flat derivative prefixes are matched in any order, since they commute.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .canonical import DIMENSION, canonicalize
from .expr import (
    FLAT,
    Factor,
    Index,
    Term,
    TensorError,
    TensorExpr,
    _merge_consts,
    derivative,
    fresh_names,
    validate_term,
)


class RuleError(TensorError):
    pass


class ConstraintLoop(TensorError):
    def __init__(self, message: str, steps: Sequence[str]):
        super().__init__(message + "\n" + "\n".join(steps[-10:]))
        self.steps = list(steps)


def _measure(t: Term) -> Tuple[int, int]:
    return (len(t.factors), sum(len(f.derivs) for f in t.factors))


@dataclass(frozen=True)
class ConstraintRule:
    name: str
    pattern: Term
    replacement: TensorExpr

    @classmethod
    def create(cls, name: str, pattern: TensorExpr, replacement: TensorExpr) -> "ConstraintRule":
        if len(pattern.terms) != 1 or not pattern.terms[0].factors:
            raise RuleError(f"rule {name}: the pattern must be a single product of tensors")
        pat = pattern.terms[0]
        replacement = TensorExpr(tuple(t for t in replacement.terms if t.coeff != 0))
        if pat.coeff == 0:
            raise RuleError(f"rule {name}: zero pattern")
        frees = set(pat.free_indices())
        for t in replacement.terms:
            if set(t.free_indices()) != frees:
                raise RuleError(
                    f"rule {name}: replacement free indices "
                    f"{''.join(map(str, t.free_indices()))} differ from the pattern's "
                    f"{''.join(map(str, sorted(frees)))}"
                )
        top = _measure(pat)
        for t in replacement.terms:
            if not _measure(t) < top:
                raise RuleError(
                    f"rule {name}: replacement term does not reduce (factors, derivatives) "
                    f"{_measure(t)} >= {top}"
                )
        return cls(name, pat, replacement)

    def names(self) -> set:
        out = set(self.pattern.names())
        for t in self.replacement.terms:
            out |= t.names()
        return out

    def __str__(self):
        from .printing import format_expr

        return f"{self.name}: {format_expr(TensorExpr((self.pattern,)))} -> {format_expr(self.replacement)}"


# --------------------------------------------------------------------------
# matching


@dataclass
class Match:
    positions: Tuple[int, ...]  # term factor matched by each pattern factor
    outer: Tuple  # extra outer derivatives (single-factor patterns only)
    binding: Dict[str, Index]  # free pattern name -> term index (with term variance)
    sign: int


def _same_symbol(a, b) -> bool:
    return (a.name, a.kind, a.side, a.rank) == (b.name, b.kind, b.side, b.rank)


def _prefix_orders(tf: Factor):
    """Derivative prefixes equal to tf's: all orders if every one is flat."""
    if len(tf.derivs) > 1 and all(c == FLAT for c in tf.connections()):
        return sorted(set(permutations(tf.derivs)))
    return [tf.derivs]


def _factor_matches(pf: Factor, tf: Factor, allow_outer: bool):
    extra = len(tf.derivs) - len(pf.derivs)
    if extra < 0 or (extra and not allow_outer):
        return
    for derivs in _prefix_orders(tf):
        inner = derivs[extra:]
        if tuple(c for c, _ in inner) != pf.connections():
            continue
        outer = derivs[:extra]
        for perm, sign in tf.symbol.group():
            idx = tuple(tf.indices[perm[k]] for k in range(tf.symbol.rank))
            yield outer, tuple(i for _, i in inner) + idx, sign


def find_match(rule: ConstraintRule, term: Term) -> Optional[Match]:
    pat = rule.pattern
    pat_occ = pat.index_occurrences()
    term_occ = term.index_occurrences()
    single = len(pat.factors) == 1

    def extend(k: int, used: Tuple[int, ...], pairs: List[Tuple[Index, Index]], outer, sign) -> Iterator[Match]:
        if k == len(pat.factors):
            m = _check(pairs)
            if m is not None:
                yield Match(used, outer, m, sign)
            return
        pf = pat.factors[k]
        for ti, tf in enumerate(term.factors):
            if ti in used or not _same_symbol(pf.symbol, tf.symbol):
                continue
            for out, idx, s in _factor_matches(pf, tf, single):
                yield from extend(
                    k + 1, used + (ti,), pairs + list(zip(pf.all_indices(), idx)), out, sign * s
                )

    def _check(pairs) -> Optional[Dict[str, Index]]:
        binding: Dict[str, Index] = {}
        dummy_map: Dict[str, List[Index]] = {}
        for p, t in pairs:
            if len(pat_occ[p.name]) == 2:
                dummy_map.setdefault(p.name, []).append(t)
            else:
                binding[p.name] = t
        used_dummies = set()
        for name, ts in dummy_map.items():
            a, b = ts
            if a.name != b.name or a.up == b.up or len(term_occ[a.name]) != 2:
                return None
            if a.name in used_dummies:
                return None
            used_dummies.add(a.name)
        bound_names = [i.name for i in binding.values()]
        if len(set(bound_names)) != len(bound_names) or used_dummies & set(bound_names):
            return None
        return binding

    return next(extend(0, (), [], (), 1), None)


def apply_match(rule: ConstraintRule, term: Term, m: Match) -> List[Term]:
    pat = rule.pattern
    pattern_up = {i.name: i.up for i in pat.free_indices()}
    keep = tuple(f for k, f in enumerate(term.factors) if k not in m.positions)
    gen = fresh_names(term.names() | rule.names())
    pieces = []
    for rt in rule.replacement.terms:
        dummies = {name: next(gen) for name in rt.dummy_names()}
        factors = []
        for f in rt.factors:
            new = []
            for i in f.all_indices():
                bound = m.binding.get(i.name)
                if bound is None:
                    new.append(Index(dummies[i.name], i.up))
                else:
                    # keep the variance the bound index has in the term
                    flipped = bound.up != pattern_up[i.name]
                    new.append(Index(bound.name, i.up != flipped))
            factors.append(f.with_all_indices(new))
        coeff = Fraction(rt.coeff) * term.coeff * m.sign / pat.coeff
        inv = tuple((n, -k) for n, k in pat.consts)
        consts = _merge_consts(_merge_consts(term.consts, inv), rt.consts)
        pieces.append(Term(coeff, consts, tuple(factors)))
    out = TensorExpr(tuple(pieces))
    for conn, d in reversed(m.outer):
        out = derivative(conn, d, out)
    result = [replace(t, factors=keep + t.factors) for t in out.terms]
    for t in result:
        validate_term(t)
    return result


def parse_rule(text: str, decls=None, name: str = "rule") -> ConstraintRule:
    """``[name:] pattern -> replacement``."""
    from ..parsing import ParseError
    from .parse import parse_tensor

    head, sep, rest = text.partition(":")
    if sep and "->" not in head:
        name, text = head.strip(), rest
    lhs, arrow, rhs = text.partition("->")
    if not arrow:
        raise ParseError(f"rule {name}: expected 'pattern -> replacement'")
    pattern = parse_tensor(lhs, decls)
    replacement = parse_tensor(rhs, decls)
    return ConstraintRule.create(name, pattern, replacement)


def rewrite_once(e: TensorExpr, rules: Sequence[ConstraintRule]):
    """First rule application found, as (new expression, description) or None."""
    for ti, t in enumerate(e.terms):
        for rule in rules:
            m = find_match(rule, t)
            if m is not None:
                new = apply_match(rule, t, m)
                return TensorExpr(e.terms[:ti] + tuple(new) + e.terms[ti + 1:]), rule.name
    return None


def apply_constraints(
    e: TensorExpr,
    rules: Sequence[ConstraintRule],
    *,
    dim: int = DIMENSION,
    max_steps: int = 500,
    trace=None,
) -> TensorExpr:
    """Rewrite with ``rules`` to a fixpoint, canonicalizing between steps."""
    cur = canonicalize(e, dim=dim, flat_commuting=True)
    steps: List[str] = []
    for _ in range(max_steps):
        hit = rewrite_once(cur, rules)
        if hit is None:
            break
        new, name = hit
        new = canonicalize(new, dim=dim, flat_commuting=True)
        steps.append(f"{name}: {cur} => {new}")
        cur = new
    else:
        raise ConstraintLoop(f"constraint rewriting did not settle within {max_steps} steps", steps)
    if trace is not None:
        trace.record("apply_constraints", e, cur, rules=[str(r) for r in rules])
    return cur
