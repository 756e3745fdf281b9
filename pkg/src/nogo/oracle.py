"""Exact component calculus in a coordinate chart.

Everything here is computed from the metric components alone, independently
of the abstract-index engine, so it can check that engine's identities and
sign conventions.

Conventions (indices in the order written):

    Gamma[c, a, b] = 1/2 g^{cd} (d_a g_bd + d_b g_ad - d_d g_ab)
    Riem[c, a, b, d] = d_b Gamma^c_ad - d_a Gamma^c_bd
                       + Gamma^c_bl Gamma^l_ad - Gamma^c_al Gamma^l_bd
    Ric[a, d] = sum_b Riem[b, a, b, d]

With these, (D_a D_b - D_b D_a) T^c = -Riem[c, a, b, d] T^d.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .kernel import KernelError, Polynomial, RationalFunction, rf_equal
from .parsing import ParseError, parse_rational_function
from .tensor.expr import (
    CONSTANTS,
    METRIC,
    RICCI,
    RICCI_SCALAR,
    RIEMANN,
    Factor,
    Term,
    TensorExpr,
    TensorSymbol,
)


class OracleError(ValueError):
    pass


class SingularMetric(OracleError):
    pass


class UnboundSymbol(OracleError, KeyError):
    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class CoordinateChart:
    variables: Tuple[str, ...]
    parameters: Tuple[str, ...] = ()  # opaque constants carried as extra variables

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def ring(self) -> Tuple[str, ...]:
        return self.variables + self.parameters

    def zero(self) -> RationalFunction:
        return RationalFunction.constant(self.ring, 0)

    def const(self, c) -> RationalFunction:
        return RationalFunction.constant(self.ring, Fraction(c))

    def var(self, name: str) -> RationalFunction:
        return RationalFunction.var(self.ring, name)

    def with_parameters(self, params: Iterable[str]) -> "CoordinateChart":
        extra = tuple(p for p in params if p not in self.parameters)
        return CoordinateChart(self.variables, self.parameters + extra)


def extend_rf(f: RationalFunction, ring: Tuple[str, ...]) -> RationalFunction:
    """Re-express ``f`` over a larger variable tuple."""
    if f.variables == ring:
        return f
    pos = [ring.index(v) for v in f.variables]

    def lift(p: Polynomial) -> Polynomial:
        terms = {}
        for exps, c in p.terms.items():
            new = [0] * len(ring)
            for k, e in zip(pos, exps):
                new[k] = e
            terms[tuple(new)] = c
        return Polynomial(ring, terms)

    return RationalFunction(lift(f.num), lift(f.den))


# --------------------------------------------------------------------------
# component tensors


@dataclass
class ComponentTensor:
    """Components indexed by coordinate-number tuples; absent entries are 0.

    ``variance[k]`` is True for an upper slot.
    """

    chart: CoordinateChart
    variance: Tuple[bool, ...]
    data: Dict[Tuple[int, ...], RationalFunction] = field(default_factory=dict)

    def __post_init__(self):
        n = self.chart.dimension
        clean = {}
        for idx, v in self.data.items():
            if len(idx) != len(self.variance) or any(not 0 <= i < n for i in idx):
                raise OracleError(f"component index {idx} out of range")
            if not v.is_zero():
                clean[tuple(idx)] = v
        self.data = clean

    @property
    def rank(self) -> int:
        return len(self.variance)

    def __getitem__(self, idx) -> RationalFunction:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.data.get(idx, self.chart.zero())

    def indices(self):
        return product(range(self.chart.dimension), repeat=self.rank)

    def is_zero(self) -> bool:
        return not self.data

    def equals(self, other: "ComponentTensor") -> bool:
        if self.variance != other.variance:
            return False
        keys = set(self.data) | set(other.data)
        return all(rf_equal(self[k], other[k]) for k in keys)

    def evaluate(self, point: Mapping[str, Fraction]) -> Dict[Tuple[int, ...], Fraction]:
        out = {}
        for k, v in self.data.items():
            val = v.evaluate(point)
            if val != 0:
                out[k] = val
        return out

    def nonzero_at(self, point: Mapping[str, Fraction]) -> bool:
        return bool(self.evaluate(point))

    def extend(self, chart: CoordinateChart) -> "ComponentTensor":
        if chart == self.chart:
            return self
        return ComponentTensor(
            chart, self.variance, {k: extend_rf(v, chart.ring) for k, v in self.data.items()}
        )

    def __add__(self, other: "ComponentTensor") -> "ComponentTensor":
        if self.variance != other.variance:
            raise OracleError("adding tensors of different variance")
        data = dict(self.data)
        for k, v in other.data.items():
            data[k] = data[k] + v if k in data else v
        return ComponentTensor(self.chart, self.variance, data)

    def scaled(self, c: RationalFunction) -> "ComponentTensor":
        return ComponentTensor(self.chart, self.variance, {k: v * c for k, v in self.data.items()})

    def __str__(self):
        if not self.data:
            return "0"
        names = self.chart.variables
        lines = []
        for k in sorted(self.data):
            label = ",".join(names[i] for i in k)
            lines.append(f"[{label}] = {self.data[k]}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# metrics


def _inverse(m: List[List[RationalFunction]], chart: CoordinateChart) -> List[List[RationalFunction]]:
    n = len(m)
    a = [row[:] + [chart.const(1 if i == j else 0) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot is None:
            raise SingularMetric("metric determinant vanishes identically")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _determinant(m: List[List[RationalFunction]], chart: CoordinateChart) -> RationalFunction:
    n = len(m)
    a = [row[:] for row in m]
    det = chart.const(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot is None:
            return chart.zero()
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det = det * a[col][col]
        inv = a[col][col].inverse()
        for r in range(col + 1, n):
            if not a[r][col].is_zero():
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


class ComponentMetric:
    def __init__(
        self,
        chart: CoordinateChart,
        components: Sequence[Sequence[RationalFunction]],
        name: str = "",
        sample_points: Sequence[Mapping[str, Fraction]] = (),
    ):
        n = chart.dimension
        if len(components) != n or any(len(r) != n for r in components):
            raise OracleError(f"metric must be {n}x{n}")
        comps = [[extend_rf(c, chart.ring) for c in row] for row in components]
        for i in range(n):
            for j in range(i + 1, n):
                if not rf_equal(comps[i][j], comps[j][i]):
                    raise OracleError(f"metric is not symmetric in ({i}, {j})")
        self.chart = chart
        self.name = name
        self.components = comps
        self.det = _determinant(comps, chart)
        if self.det.is_zero():
            raise SingularMetric("metric determinant vanishes identically")
        self.inverse_components = _inverse(comps, chart)
        self.sample_points = [dict(p) for p in sample_points]
        for p in self.sample_points:
            try:
                d = self.det.evaluate(p)
            except KernelError:
                d = 0
            if d == 0:
                raise SingularMetric(f"metric {name or ''} is singular at sample point {p}")
        self._cache: Dict[str, ComponentTensor] = {}

    @property
    def dimension(self) -> int:
        return self.chart.dimension

    def with_parameters(self, params: Iterable[str]) -> "ComponentMetric":
        chart = self.chart.with_parameters(params)
        if chart == self.chart:
            return self
        return ComponentMetric(chart, self.components, self.name, self.sample_points)

    def lower(self) -> ComponentTensor:
        n = self.dimension
        return ComponentTensor(
            self.chart, (False, False),
            {(i, j): self.components[i][j] for i in range(n) for j in range(n)},
        )

    def upper(self) -> ComponentTensor:
        n = self.dimension
        return ComponentTensor(
            self.chart, (True, True),
            {(i, j): self.inverse_components[i][j] for i in range(n) for j in range(n)},
        )

    def cached(self, key: str, fn):
        if key not in self._cache:
            self._cache[key] = fn(self)
        return self._cache[key]


def christoffel(g: ComponentMetric) -> ComponentTensor:
    """Gamma^c_ab, symmetric in a, b."""

    def build(g: ComponentMetric) -> ComponentTensor:
        n, x = g.dimension, g.chart.variables
        G, Gi = g.components, g.inverse_components
        dg = [[[G[i][j].diff(x[k]) for k in range(n)] for j in range(n)] for i in range(n)]
        # lowered symbols [d, a, b] = 1/2 (d_a g_bd + d_b g_ad - d_d g_ab)
        low = {}
        for d, a, b in product(range(n), repeat=3):
            v = dg[b][d][a] + dg[a][d][b] - dg[a][b][d]
            if not v.is_zero():
                low[(d, a, b)] = v * Fraction(1, 2)
        data = {}
        for c, a, b in product(range(n), repeat=3):
            acc = None
            for d in range(n):
                if (d, a, b) in low and not Gi[c][d].is_zero():
                    term = Gi[c][d] * low[(d, a, b)]
                    acc = term if acc is None else acc + term
            if acc is not None:
                data[(c, a, b)] = acc
        return ComponentTensor(g.chart, (True, False, False), data)

    return g.cached("christoffel", build)


def riemann(g: ComponentMetric) -> ComponentTensor:
    """Riem[c, a, b, d], antisymmetric in (a, b)."""

    def build(g: ComponentMetric) -> ComponentTensor:
        n, x = g.dimension, g.chart.variables
        gam = christoffel(g)
        data = {}
        for c, a, b, d in product(range(n), repeat=4):
            if a == b:
                continue
            v = gam[c, a, d].diff(x[b]) - gam[c, b, d].diff(x[a])
            for l in range(n):
                v = v + gam[c, b, l] * gam[l, a, d] - gam[c, a, l] * gam[l, b, d]
            data[(c, a, b, d)] = v
        return ComponentTensor(g.chart, (True, False, False, False), data)

    return g.cached("riemann", build)


def ricci(g: ComponentMetric) -> ComponentTensor:
    """Ric[a, d] = sum_b Riem[b, a, b, d]."""

    def build(g: ComponentMetric) -> ComponentTensor:
        n = g.dimension
        R = riemann(g)
        data = {}
        for a, d in product(range(n), repeat=2):
            v = g.chart.zero()
            for b in range(n):
                v = v + R[b, a, b, d]
            data[(a, d)] = v
        return ComponentTensor(g.chart, (False, False), data)

    return g.cached("ricci", build)


def ricci_scalar(g: ComponentMetric) -> ComponentTensor:
    def build(g: ComponentMetric) -> ComponentTensor:
        n = g.dimension
        Ric = ricci(g)
        v = g.chart.zero()
        for a, d in product(range(n), repeat=2):
            if not g.inverse_components[a][d].is_zero():
                v = v + g.inverse_components[a][d] * Ric[a, d]
        return ComponentTensor(g.chart, (), {(): v})

    return g.cached("ricci_scalar", build)


# --------------------------------------------------------------------------
# evaluating abstract expressions


def _set_variance(t: ComponentTensor, slot: int, up: bool, g: ComponentMetric) -> ComponentTensor:
    if t.variance[slot] == up:
        return t
    n = g.dimension
    mat = g.inverse_components if up else g.components
    data: Dict[Tuple[int, ...], RationalFunction] = {}
    for idx, v in t.data.items():
        for k in range(n):
            m = mat[k][idx[slot]]
            if m.is_zero():
                continue
            new = idx[:slot] + (k,) + idx[slot + 1:]
            term = m * v
            data[new] = data[new] + term if new in data else term
    variance = t.variance[:slot] + (up,) + t.variance[slot + 1:]
    return ComponentTensor(t.chart, variance, data)


def covariant_derivative(t: ComponentTensor, g: ComponentMetric) -> ComponentTensor:
    """(D_a t)[a, ...]: new lower slot in front."""
    n, x = g.dimension, g.chart.variables
    gam = christoffel(g)
    data: Dict[Tuple[int, ...], RationalFunction] = {}

    def add(key, val):
        if not val.is_zero():
            data[key] = data[key] + val if key in data else val

    for idx, v in t.data.items():
        for a in range(n):
            add((a,) + idx, v.diff(x[a]))
    for idx, v in t.data.items():
        # idx is the summed position; spread it with Gamma
        for s, up in enumerate(t.variance):
            l = idx[s]
            for a in range(n):
                for k in range(n):
                    if up:
                        gm = gam[k, a, l]  # Gamma^k_{a l} T^{..l..}
                        sign = 1
                    else:
                        gm = gam[l, a, k]  # - Gamma^l_{a k} T_{..l..}
                        sign = -1
                    if gm.is_zero():
                        continue
                    key = (a,) + idx[:s] + (k,) + idx[s + 1:]
                    add(key, gm * v if sign > 0 else -(gm * v))
    return ComponentTensor(t.chart, (False,) + t.variance, data)


def _symbol_key(symbol) -> str:
    if isinstance(symbol, TensorSymbol):
        return symbol.name
    return str(symbol)


def _base_tensor(f: Factor, bindings: Mapping, g: ComponentMetric) -> ComponentTensor:
    kind = f.symbol.kind
    if kind == METRIC:
        return g.lower()
    if kind == RIEMANN:
        return riemann(g)
    if kind == RICCI:
        return ricci(g)
    if kind == RICCI_SCALAR:
        return ricci_scalar(g)
    name = f.symbol.name
    if name not in bindings:
        raise UnboundSymbol(f"no component binding for tensor {name}")
    t = bindings[name].extend(g.chart)
    if t.rank != f.symbol.rank:
        raise OracleError(f"binding for {name} has rank {t.rank}, expected {f.symbol.rank}")
    return t


def evaluate_factor(f: Factor, bindings: Mapping, g: ComponentMetric) -> ComponentTensor:
    t = _base_tensor(f, bindings, g)
    for s, i in enumerate(f.indices):
        t = _set_variance(t, s, i.up, g)
    for _, i in reversed(f.derivs):
        t = covariant_derivative(t, g)
        t = _set_variance(t, 0, i.up, g)
    return t


def _labelled(t: ComponentTensor, names: Sequence[str]):
    """Sum over repeated names inside one factor; returns (names, data)."""
    seen: Dict[str, int] = {}
    keep = []
    pairs = []
    for k, nm in enumerate(names):
        if nm in seen:
            pairs.append((seen[nm], k))
        else:
            seen[nm] = k
    traced = {p for pair in pairs for p in pair}
    keep = [k for k in range(len(names)) if k not in traced]
    data: Dict[Tuple[int, ...], RationalFunction] = {}
    for idx, v in t.data.items():
        if all(idx[a] == idx[b] for a, b in pairs):
            key = tuple(idx[k] for k in keep)
            data[key] = data[key] + v if key in data else v
    return [names[k] for k in keep], data


def _contract(left, right, zero):
    ln, ld = left
    rn, rd = right
    shared = [n for n in ln if n in rn]
    out_names = [n for n in ln if n not in shared] + [n for n in rn if n not in shared]
    lpos = [ln.index(n) for n in shared]
    rpos = [rn.index(n) for n in shared]
    lkeep = [k for k, n in enumerate(ln) if n not in shared]
    rkeep = [k for k, n in enumerate(rn) if n not in shared]
    rindex: Dict[Tuple[int, ...], List] = {}
    for idx, v in rd.items():
        rindex.setdefault(tuple(idx[p] for p in rpos), []).append((idx, v))
    data: Dict[Tuple[int, ...], RationalFunction] = {}
    for lidx, lv in ld.items():
        for ridx, rv in rindex.get(tuple(lidx[p] for p in lpos), ()):
            key = tuple(lidx[k] for k in lkeep) + tuple(ridx[k] for k in rkeep)
            val = lv * rv
            data[key] = data[key] + val if key in data else val
    return out_names, data


def evaluate_term(term: Term, bindings: Mapping, g: ComponentMetric) -> ComponentTensor:
    chart = g.chart
    scalar = chart.const(term.coeff)
    for name, k in term.consts:
        scalar = scalar * chart.var(name) ** k
    acc = ([], {(): scalar})
    for f in term.factors:
        t = evaluate_factor(f, bindings, g)
        acc = _contract(acc, _labelled(t, [i.name for i in f.all_indices()]), chart.zero())
    names, data = acc
    free = term.free_indices()
    order = [names.index(i.name) for i in free]
    out = {}
    for idx, v in data.items():
        if not v.is_zero():
            out[tuple(idx[p] for p in order)] = v
    return ComponentTensor(chart, tuple(i.up for i in free), out)


def evaluate_abstract(e: TensorExpr, bindings: Mapping, g: ComponentMetric) -> ComponentTensor:
    """Components of ``e`` with free indices in sorted order.

    Every connection is taken to be the Levi-Civita connection of ``g`` and
    both metric symbols evaluate to ``g``.
    """
    e.validate()
    params = sorted({n for t in e.terms for n, _ in t.consts})
    unknown = [p for p in params if p not in CONSTANTS]
    if unknown:
        raise OracleError(f"unknown constants {unknown}")
    g = g.with_parameters(params)
    bindings = {_symbol_key(k): v for k, v in bindings.items()}
    free = e.free_indices()
    result = ComponentTensor(g.chart, tuple(i.up for i in free), {})
    for t in e.terms:
        result = result + evaluate_term(t, bindings, g)
    return result


# --------------------------------------------------------------------------
# fields and the metric suite


def random_polynomial(chart: CoordinateChart, rng: random.Random, degree: int = 2, density: float = 0.6) -> RationalFunction:
    terms = {}
    for exps in product(range(degree + 1), repeat=chart.dimension):
        if sum(exps) <= degree and rng.random() < density:
            c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            if c:
                terms[exps + (0,) * len(chart.parameters)] = c
    if not terms:
        terms[(0,) * len(chart.ring)] = Fraction(1)
    return RationalFunction(Polynomial(chart.ring, terms))


def random_tensor(
    chart: CoordinateChart, variance: Sequence[bool], rng: random.Random, degree: int = 2,
    symmetry: Optional[str] = None,
) -> ComponentTensor:
    """Polynomial components; ``symmetry`` may be 'sym' or 'antisym' for rank 2."""
    variance = tuple(variance)
    n = chart.dimension
    data = {}
    for idx in product(range(n), repeat=len(variance)):
        if symmetry and len(idx) == 2 and idx[0] > idx[1]:
            continue
        if symmetry == "antisym" and len(idx) == 2 and idx[0] == idx[1]:
            continue
        data[idx] = random_polynomial(chart, rng, degree)
    if symmetry and len(variance) == 2:
        sign = -1 if symmetry == "antisym" else 1
        for (i, j), v in list(data.items()):
            if i < j:
                data[(j, i)] = v * sign
    return ComponentTensor(chart, variance, data)


def random_bindings(e: TensorExpr, g: ComponentMetric, rng: random.Random, decls=None, degree: int = 2):
    """Random polynomial components for every generic symbol of ``e``."""
    out = {}
    for t in e.terms:
        for f in t.factors:
            s = f.symbol
            if s.kind != "generic" or s.name in out:
                continue
            sym = None
            if decls is not None:
                kinds = {k for k, _ in decls.symmetries.get(s.name, ())}
                sym = "antisym" if "antisym" in kinds else ("sym" if "sym" in kinds else None)
            out[s.name] = random_tensor(g.chart, (False,) * s.rank, rng, degree, sym)
    return out


def _parse_value(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except ValueError:
        raise ParseError(f"bad coordinate value {text!r}") from None


def parse_manifest(text: str) -> Dict[str, ComponentMetric]:
    """Metric manifest::

        [name]
        coords: t x y z
        diag: -1, 1, 1 + x^2, 1      # or one ``g x y: expr`` line per entry
        point: x=0, t=1
    """
    blocks: List[Tuple[str, int, List[Tuple[int, str]]]] = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            blocks.append((line[1:-1].strip(), n, []))
        elif not blocks:
            raise ParseError("entry outside a [metric] block", n, 1)
        else:
            blocks[-1][2].append((n, line))
    out: Dict[str, ComponentMetric] = {}
    for name, lineno, lines in blocks:
        coords: Optional[Tuple[str, ...]] = None
        entries: Dict[Tuple[int, int], str] = {}
        points = []
        for n, line in lines:
            key, sep, value = line.partition(":")
            if not sep:
                raise ParseError(f"expected 'key: value' in metric {name}", n, 1)
            key = key.strip()
            if key == "coords":
                coords = tuple(value.split())
            elif coords is None:
                raise ParseError(f"metric {name}: 'coords' must come first", n, 1)
            elif key == "diag":
                parts = [p.strip() for p in value.split(",")]
                if len(parts) != len(coords):
                    raise ParseError(f"metric {name}: diag needs {len(coords)} entries", n, 1)
                for k, p in enumerate(parts):
                    entries[(k, k)] = p
            elif key.startswith("g "):
                a, b = key.split()[1:3]
                if a not in coords or b not in coords:
                    raise ParseError(f"metric {name}: unknown coordinate in {key!r}", n, 1)
                i, j = coords.index(a), coords.index(b)
                entries[(i, j)] = value.strip()
                entries.setdefault((j, i), value.strip())
            elif key == "point":
                pt = {}
                for assign in value.split(","):
                    var, eq, val = assign.partition("=")
                    if not eq or var.strip() not in coords:
                        raise ParseError(f"metric {name}: bad point entry {assign!r}", n, 1)
                    pt[var.strip()] = _parse_value(val)
                points.append({v: pt.get(v, Fraction(0)) for v in coords})
            else:
                raise ParseError(f"metric {name}: unknown key {key!r}", n, 1)
        if coords is None:
            raise ParseError(f"metric {name}: missing coords", lineno, 1)
        chart = CoordinateChart(coords)
        comps = [
            [parse_rational_function(entries.get((i, j), "0"), coords) for j in range(len(coords))]
            for i in range(len(coords))
        ]
        out[name] = ComponentMetric(chart, comps, name, points)
    return out


def manifest_text() -> str:
    return resources.files("nogo").joinpath("data/metrics.txt").read_text()


_SUITE: Optional[Dict[str, ComponentMetric]] = None


def sample_metrics() -> Dict[str, ComponentMetric]:
    """The bundled metric suite, in manifest order."""
    global _SUITE
    if _SUITE is None:
        _SUITE = parse_manifest(manifest_text())
    return _SUITE


def is_flat(g: ComponentMetric) -> bool:
    return riemann(g).is_zero()


# Identities whose component-wise truth fixes every sign convention the
# abstract engine relies on.
CONVENTION_IDENTITIES = {
    "vector commutator": "D[g,a] D[g,b] bar(T)^c - D[g,b] D[g,a] bar(T)^c + R[g]^c_{a b d} bar(T)^d",
    "covector commutator": "D[g,a] D[g,b] bar(w)_c - D[g,b] D[g,a] bar(w)_c - R[g]^d_{a b c} bar(w)_d",
    "(1,1) commutator": "D[g,a] D[g,b] bar(M)^c_e - D[g,b] D[g,a] bar(M)^c_e"
    " + R[g]^c_{a b d} bar(M)^d_e - R[g]^d_{a b e} bar(M)^c_d",
    "scalar commutator": "D[g,a] D[g,b] bar(f) - D[g,b] D[g,a] bar(f)",
    "metric compatibility": "D[g,a] g_{b c}",
    "inverse metric compatibility": "D[g,a] g^{b c}",
    "ricci contraction": "R[g]_{a d} - R[g]^b_{a b d}",
    "first bianchi": "R[g]^c_{a b d} + R[g]^c_{b d a} + R[g]^c_{d a b}",
    "riemann pair exchange": "R[g]_{c a b d} - R[g]_{b d c a}",
}


def convention_checks(g: ComponentMetric, seed: int = 0) -> Dict[str, bool]:
    """Each identity evaluated with random polynomial fields; True = exactly 0."""
    from .tensor.parse import parse_tensor

    rng = random.Random(seed)
    out = {}
    for name, text in CONVENTION_IDENTITIES.items():
        e = parse_tensor(text)
        out[name] = evaluate_abstract(e, random_bindings(e, g, rng), g).is_zero()
    Ric = ricci(g)
    out["ricci symmetry"] = all(
        rf_equal(Ric[a, b], Ric[b, a]) for a in range(g.dimension) for b in range(g.dimension)
    )
    return out


__all__ = [
    "OracleError",
    "SingularMetric",
    "UnboundSymbol",
    "CoordinateChart",
    "ComponentTensor",
    "ComponentMetric",
    "christoffel",
    "riemann",
    "ricci",
    "ricci_scalar",
    "covariant_derivative",
    "evaluate_factor",
    "evaluate_term",
    "evaluate_abstract",
    "random_polynomial",
    "random_tensor",
    "random_bindings",
    "parse_manifest",
    "manifest_text",
    "sample_metrics",
    "is_flat",
    "CONVENTION_IDENTITIES",
    "convention_checks",
]
