"""Hypothesis strategies producing index-consistent tensor expressions."""

from __future__ import annotations

from hypothesis import strategies as st

from nogo.tensor.parse import Declarations, parse_tensor

DECLS = Declarations.parse("antisym F {1 2}\nsym S {1 2}")

# (template, number of index slots); templates use {0}, {1}, ... for indices
FACTORS = [
    ("X{0}", 1),
    ("Y{0}", 1),
    ("F{0}{1}", 2),
    ("S{0}{1}", 2),
    ("D[eta,{0}] X{1}", 2),
    ("D[eta,{0}] D[eta,{1}] f", 2),
    ("D[eta,{0}] F{1}{2}", 3),
    ("eta{0}{1}", 2),
    ("f", 0),
]
CURVED_FACTORS = [
    ("bar(X){0}", 1),
    ("R[g]{0}{1}{2}{3}", 4),
    ("R[g]{0}{1}", 2),
    ("D[g,{0}] bar(X){1}", 2),
    ("D[g,{0}] D[g,{1}] bar(X){2}", 3),
    ("g{0}{1}", 2),
]
NAMES = "abcdefhijkmn"


def _fill(template: str, slots):
    """Render a factor; D[...] heads take the bare ',^a' / ',a' form."""
    out = template
    for k, (name, up) in enumerate(slots):
        token = "{" + str(k) + "}"
        pos = out.index(token)
        if out[pos - 1] == ",":
            out = out.replace(token, ("^" if up else "") + name, 1)
        else:
            out = out.replace(token, ("^" if up else "_") + "{" + name + "}", 1)
    return out


@st.composite
def tensor_terms(draw, curved: bool = False, max_factors: int = 3, only_curved: bool = False):
    if only_curved:
        pool = CURVED_FACTORS + [("bar(f)", 0)]
    else:
        pool = FACTORS + (CURVED_FACTORS if curved else [])
    chosen = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=max_factors))
    nslots = sum(n for _, n in chosen)
    order = draw(st.permutations(range(nslots)))
    npairs = draw(st.integers(0, nslots // 2))
    names = list(NAMES)
    assign = [None] * nslots
    for k in range(npairs):
        a, b = order[2 * k], order[2 * k + 1]
        up = draw(st.booleans())
        assign[a] = (names[k], up)
        assign[b] = (names[k], not up)
    free = names[npairs:]
    fi = 0
    for s in range(nslots):
        if assign[s] is None:
            assign[s] = (free[fi], draw(st.booleans()))
            fi += 1
    coeff = draw(st.sampled_from(["", "2 ", "-1/3 ", "-"]))
    parts, k = [], 0
    for template, n in chosen:
        parts.append(_fill(template, assign[k:k + n]))
        k += n
    return coeff + " ".join(parts)


@st.composite
def tensor_exprs(draw, curved: bool = False, only_curved: bool = False):
    """A sum of terms sharing one free-index signature."""
    first = draw(tensor_terms(curved=curved, only_curved=only_curved))
    e = parse_tensor(first, DECLS)
    text = first
    for extra in draw(st.lists(tensor_terms(curved=curved, only_curved=only_curved), max_size=2)):
        other = parse_tensor(extra, DECLS)
        if set(other.free_indices()) == set(e.free_indices()):
            text = f"{text} + {extra}"
    return text
