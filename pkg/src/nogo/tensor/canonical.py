"""Canonical form of tensor expressions.

Per term: metric contractions are eliminated, curvature self-contractions are
reduced (Riemann -> Ricci -> scalar), then the term is brought to the least
representative over factor permutations, slot-symmetry permutations and
dummy relabelings.  A term that is mapped to itself with sign -1 vanishes.
Flat derivative prefixes may additionally be treated as symmetric (they
commute); curved prefixes never are.
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

from .expr import (
    CURVED,
    FLAT,
    GENERIC,
    METRIC,
    RICCI,
    RICCI_SCALAR,
    RIEMANN,
    Factor,
    Index,
    IndexDisciplineError,
    Term,
    TensorExpr,
    fresh_names,
    ricci,
    ricci_scalar,
    validate_term,
)

DIMENSION = 4


# --------------------------------------------------------------------------
# algebraic simplifications that change factor structure


def _occurrences(term: Term):
    """name -> list of (factor position, position within all_indices)."""
    occ: Dict[str, List[Tuple[int, int]]] = {}
    for fi, f in enumerate(term.factors):
        for k, i in enumerate(f.all_indices()):
            occ.setdefault(i.name, []).append((fi, k))
    return occ


def _set_index(term: Term, fi: int, k: int, new: Index) -> Term:
    f = term.factors[fi]
    idx = list(f.all_indices())
    idx[k] = new
    nf = f.with_all_indices(idx)
    return replace(term, factors=term.factors[:fi] + (nf,) + term.factors[fi + 1:])


def _drop_factor(term: Term, fi: int) -> Term:
    return replace(term, factors=term.factors[:fi] + term.factors[fi + 1:])


def contract_metrics(term: Term, dim: int = DIMENSION) -> Optional[Term]:
    """Eliminate contracted metrics; ``None`` if the term vanishes."""
    while True:
        for f in term.factors:
            if f.symbol.kind == METRIC and f.derivs:
                return None  # metric compatibility
        occ = _occurrences(term)
        done = True
        for fi, f in enumerate(term.factors):
            if f.symbol.kind != METRIC:
                continue
            a, b = f.indices
            if a.name == b.name:
                term = _drop_factor(term, fi).scaled(dim)
                done = False
                break
            moved = False
            for s, other in ((a, b), (b, a)):
                partners = [(pi, k) for pi, k in occ[s.name] if pi != fi]
                if partners:
                    pi, k = partners[0]
                    term = _drop_factor(_set_index(term, pi, k, other), fi)
                    moved = True
                    break
            if moved:
                done = False
                break
        if done:
            return term


def reduce_curvature(term: Term) -> Optional[Term]:
    """Riemann/Ricci self-contractions; flat-side curvature vanishes."""
    changed = True
    while changed:
        changed = False
        for fi, f in enumerate(term.factors):
            kind = f.symbol.kind
            if kind in (RIEMANN, RICCI, RICCI_SCALAR) and f.symbol.side == "flat":
                return None
            names = [i.name for i in f.indices]
            if len(set(names)) == len(names):
                continue
            if kind == RIEMANN:
                new = _riemann_trace(f)
                if new is None:
                    return None
                nf, sign = new
            elif kind == RICCI:
                nf, sign = Factor(ricci_scalar(f.symbol.side), (), f.derivs), 1
            else:
                continue
            term = replace(
                term, factors=term.factors[:fi] + (nf,) + term.factors[fi + 1:]
            ).scaled(sign)
            changed = True
            break
    return term


def _riemann_trace(f: Factor):
    """Contract a self-contracted Riemann factor to Ricci: R^b_{abd} = R_{ad}."""
    for perm, sign in f.symbol.group():
        idx = [f.indices[perm[k]] for k in range(4)]
        if idx[0].name == idx[2].name:
            return Factor(ricci(f.symbol.side), (idx[1], idx[3]), f.derivs), sign
    return None  # trace over an antisymmetric pair


# --------------------------------------------------------------------------
# least representative search


def _index_key(i: Index):
    return (not i.up, i.name)


def _factor_key(f: Factor):
    return (
        f.symbol.sort_key(),
        len(f.derivs),
        f.connections(),
        tuple(_index_key(i) for _, i in f.derivs),
        tuple(_index_key(i) for i in f.indices),
    )


def _coarse_key(f: Factor, free: set):
    frees = tuple(sorted(_index_key(i) for i in f.all_indices() if i.name in free))
    ndummy = sum(1 for i in f.all_indices() if i.name not in free)
    return (f.symbol.sort_key(), len(f.derivs), f.connections(), frees, ndummy)


def _factor_variants(f: Factor, flat_commuting: bool, curved_commuting: bool = False):
    """All (factor, sign) obtained by slot symmetries (and commuting prefix perms)."""
    derivs_options = [f.derivs]
    conns = set(f.connections())
    if len(f.derivs) > 1 and (
        curved_commuting or (flat_commuting and conns == {FLAT})
    ):
        derivs_options = sorted(set(permutations(f.derivs)))
    out = []
    for perm, sign in f.symbol.group():
        idx = tuple(f.indices[perm[k]] for k in range(f.symbol.rank))
        for d in derivs_options:
            out.append((Factor(f.symbol, idx, tuple(d)), sign))
    return out


def _relabel(factors: Sequence[Factor], free: set) -> Tuple[Factor, ...]:
    """Rename dummies by first appearance; the first occurrence is lowered."""
    gen = fresh_names(free)
    mapping: Dict[str, str] = {}
    out = []
    for f in factors:
        new = []
        for i in f.all_indices():
            if i.name in free:
                new.append(i)
            elif i.name not in mapping:
                mapping[i.name] = next(gen)
                new.append(Index(mapping[i.name], False))
            else:
                new.append(Index(mapping[i.name], True))
        out.append(f.with_all_indices(new))
    return tuple(out)


def _search(term: Term, flat_commuting: bool, curved_commuting: bool = False):
    """Least key over all equivalent arrangements.

    Returns (best factors, set of signs reaching it, (original factors in
    chosen order, chosen variants)).
    """
    free = {i.name for i in term.free_indices()}
    factors = sorted(term.factors, key=lambda f: _coarse_key(f, free))
    groups: List[List[Factor]] = []
    for f in factors:
        if groups and _coarse_key(groups[-1][0], free) == _coarse_key(f, free):
            groups[-1].append(f)
        else:
            groups.append([f])
    variants = [_factor_variants(f, flat_commuting, curved_commuting) for f in factors]
    by_id = {id(f): v for f, v in zip(factors, variants)}

    best_key = None
    best = None
    best_signs = set()
    witness = None
    group_orders = [sorted(set(permutations(range(len(g))))) for g in groups]
    for orders in product(*group_orders):
        arranged = [g[k] for g, order in zip(groups, orders) for k in order]
        for choice in product(*(by_id[id(f)] for f in arranged)):
            sign = 1
            for _, s in choice:
                sign *= s
            cand = _relabel([f for f, _ in choice], free)
            key = tuple(_factor_key(f) for f in cand)
            if best_key is None or key < best_key:
                best_key, best, best_signs = key, cand, {sign}
                witness = (arranged, [f for f, _ in choice])
            elif key == best_key:
                best_signs.add(sign)
    return best, best_signs, witness


def canonical_term(term: Term, flat_commuting: bool = False) -> Optional[Term]:
    """Least representative of a (pre-simplified) term, or None if it vanishes."""
    if not term.factors:
        return term
    best, signs, _ = _search(term, flat_commuting)
    if len(signs) > 1:
        return None
    (sign,) = signs
    return Term(term.coeff * sign, term.consts, best)


def preferred_derivative_orders(term: Term) -> List[Tuple[int, Tuple[int, ...]]]:
    """For each factor, the prefix permutation the canonical search prefers
    when all derivatives are allowed to commute.  Entries are
    (factor position in ``term``, perm) with ``new[k] = old[perm[k]]``."""
    if not term.factors:
        return []
    _, _, (arranged, chosen) = _search(term, True, True)
    out = []
    used = set()
    for orig, var in zip(arranged, chosen):
        pos = next(k for k, f in enumerate(term.factors) if f is orig and k not in used)
        used.add(pos)
        perm = tuple(orig.derivs.index(d) for d in var.derivs)
        out.append((pos, perm))
    return sorted(out)


def simplify_term(term: Term, dim: int = DIMENSION) -> Optional[Term]:
    validate_term(term)
    if term.coeff == 0:
        return None
    t = contract_metrics(term, dim)
    if t is None:
        return None
    return reduce_curvature(t)


def _term_sort_key(t: Term):
    return (len(t.factors), tuple(_factor_key(f) for f in t.factors), t.consts)


def collect(terms: Sequence[Term]) -> TensorExpr:
    acc: Dict[tuple, Fraction] = {}
    rep: Dict[tuple, Term] = {}
    for t in terms:
        k = (t.consts, t.factors)
        acc[k] = acc.get(k, Fraction(0)) + t.coeff
        rep.setdefault(k, t)
    out = [replace(rep[k], coeff=c) for k, c in acc.items() if c != 0]
    out.sort(key=_term_sort_key)
    return TensorExpr(tuple(out))


# --------------------------------------------------------------------------
# first Bianchi identity: R[c,a,b,d] + R[c,b,d,a] + R[c,d,a,b] = 0


def _bianchi_images(term: Term, k: int) -> List[Term]:
    f = term.factors[k]
    c, a, b, d = f.indices
    out = []
    for idx in ((c, b, d, a), (c, d, a, b)):
        nf = Factor(f.symbol, idx, f.derivs)
        out.append(replace(term, factors=term.factors[:k] + (nf,) + term.factors[k + 1:]))
    return out


def _has_riemann(t: Term) -> bool:
    return any(f.symbol.kind == RIEMANN for f in t.factors)


def _monomial(t: Term):
    return (t.consts, t.factors)


def _mono_key(m):
    consts, factors = m
    return (len(factors), tuple(_factor_key(f) for f in factors), consts)


def bianchi_reduce(terms: Sequence[Term], flat_commuting: bool, dim: int, limit: int = 400) -> List[Term]:
    """Normal form modulo the cyclic identity, by linear elimination.

    The relations are generated from every Riemann factor of every monomial
    reachable from the input; each relation's largest monomial becomes a
    pivot and is eliminated from the expression.
    """
    def canon(t: Term) -> Optional[Term]:
        st = simplify_term(t, dim)
        return None if st is None else canonical_term(st, flat_commuting)

    seen = {}
    queue = [replace(t, coeff=Fraction(1)) for t in terms if _has_riemann(t)]
    relations: List[Dict] = []
    while queue:
        t = queue.pop()
        m = _monomial(t)
        if m in seen:
            continue
        seen[m] = t
        if len(seen) > limit:
            return list(terms)
        for k, f in enumerate(t.factors):
            if f.symbol.kind != RIEMANN:
                continue
            rel: Dict = {}
            for piece in [t] + _bianchi_images(t, k):
                c = canon(piece)
                if c is None:
                    continue
                cm = _monomial(c)
                rel[cm] = rel.get(cm, Fraction(0)) + c.coeff
                if cm not in seen:
                    queue.append(replace(c, coeff=Fraction(1)))
            rel = {m2: v for m2, v in rel.items() if v}
            if rel:
                relations.append(rel)

    pivots: Dict = {}

    def reduce(vec: Dict) -> Dict:
        vec = dict(vec)
        while True:
            hits = [m2 for m2 in vec if m2 in pivots]
            if not hits:
                return vec
            top = max(hits, key=_mono_key)
            c = vec[top]
            for m2, v in pivots[top].items():
                nv = vec.get(m2, Fraction(0)) - c * v
                if nv:
                    vec[m2] = nv
                else:
                    vec.pop(m2, None)

    for rel in relations:
        r = reduce(rel)
        if not r:
            continue
        top = max(r, key=_mono_key)
        lead = r[top]
        pivots[top] = {m2: v / lead for m2, v in r.items()}

    vec: Dict = {}
    rest = []
    for t in terms:
        if _has_riemann(t):
            m = _monomial(t)
            vec[m] = vec.get(m, Fraction(0)) + t.coeff
        else:
            rest.append(t)
    vec = reduce({m2: v for m2, v in vec.items() if v})
    return rest + [Term(v, m2[0], m2[1]) for m2, v in vec.items()]


def canonicalize(
    e: TensorExpr, *, dim: int = DIMENSION, flat_commuting: bool = False, trace=None
) -> TensorExpr:
    """Unique representative of ``e`` (up to the identities listed above)."""
    e.validate()
    out = []
    for t in e.terms:
        s = simplify_term(t, dim)
        if s is None:
            continue
        c = canonical_term(s, flat_commuting)
        if c is not None:
            out.append(c)
    if any(_has_riemann(t) for t in out):
        out = bianchi_reduce(out, flat_commuting, dim)
    result = collect(out)
    if trace is not None:
        trace.record("canonicalize", e, result, dim=dim, flat_commuting=flat_commuting)
    return result


def expr_equal(a: TensorExpr, b: TensorExpr, **kw) -> bool:
    return canonicalize(a - b, **kw).is_zero()
