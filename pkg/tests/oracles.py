"""Independent reference implementations used only by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict

from nogo.kernel import GaussianRational, I, Polynomial

Word = str


def rewrite_normal(words: Dict[Word, GaussianRational]) -> Dict[Word, GaussianRational]:
    """Rewrite 'pq' -> 'qp' - i until every word is q...qp...p."""
    todo = dict(words)
    done: Dict[Word, GaussianRational] = {}
    while todo:
        w, c = todo.popitem()
        k = w.find("pq")
        if k < 0:
            done[w] = done.get(w, GaussianRational(0)) + c
            continue
        for new, coeff in ((w[:k] + "qp" + w[k + 2:], c), (w[:k] + w[k + 2:], c * (-I))):
            todo[new] = todo.get(new, GaussianRational(0)) + coeff
    return {w: c for w, c in done.items() if c != 0}


def as_monomials(words: Dict[Word, GaussianRational]) -> Dict[tuple, GaussianRational]:
    return {(w.count("q"), w.count("p")): c for w, c in words.items()}


def word_action(word: Word, psi: Polynomial) -> Polynomial:
    """Act letter by letter, rightmost first: q multiplies, p = -i d/dq."""
    x = Polynomial.var(("q",), "q")
    for ch in reversed(word):
        psi = x * psi if ch == "q" else psi.diff("q").scale(-I)
    return psi


def weyl_words(n: int, m: int) -> Dict[Word, GaussianRational]:
    words = []
    for pos in combinations(range(n + m), n):
        w = ["p"] * (n + m)
        for k in pos:
            w[k] = "q"
        words.append("".join(w))
    return {w: GaussianRational(Fraction(1, len(words))) for w in words}


def commutator_words(a: Dict[Word, GaussianRational], b: Dict[Word, GaussianRational]):
    out: Dict[Word, GaussianRational] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            out[wa + wb] = out.get(wa + wb, GaussianRational(0)) + ca * cb
            out[wb + wa] = out.get(wb + wa, GaussianRational(0)) - ca * cb
    return out
