"""Closed-form test inputs: sums of r^k e^{-c r} terms.

Every member has Gamma-function Mellin transforms and weighted norms, so all
suites can be checked against analytic values.  The term algebra below keeps
images under r d/dr (and hence X = -r d/dr) inside the family, which lets
the experiment runner construct exactly compatible cocycle data.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .grid import HalfLineFunction, LogGrid, sample


class GammaTerm(NamedTuple):
    coef: complex
    k: int
    c: float


Terms = tuple[GammaTerm, ...]


def make_terms(triples: Sequence[tuple[complex, int, float]]) -> Terms:
    out = []
    for coef, k, c in triples:
        if c <= 0:
            raise ValueError(f"exponential rate must be positive, got c={c}")
        if k < 1:
            raise ValueError(f"power must be a positive integer, got k={k}")
        out.append(GammaTerm(complex(coef), int(k), float(c)))
    return tuple(out)


def sample_terms(terms: Terms, grid: LogGrid) -> HalfLineFunction:
    def expr(r):
        acc = np.zeros_like(r, dtype=np.complex128)
        for coef, k, c in terms:
            acc += coef * r**k * np.exp(-c * r)
        return acc

    return sample(expr, grid)


def scale_terms(alpha: complex, terms: Terms) -> Terms:
    return tuple(GammaTerm(alpha * t.coef, t.k, t.c) for t in terms)


def add_terms(a: Terms, b: Terms) -> Terms:
    return a + b


def x_image(terms: Terms) -> Terms:
    """Terms of X f = -r d/dr f: r d/dr (r^k e^{-cr}) = k r^k e^{-cr} - c r^{k+1} e^{-cr}."""
    out = []
    for coef, k, c in terms:
        out.append(GammaTerm(-coef * k, k, c))
        out.append(GammaTerm(coef * c, k + 1, c))
    return tuple(out)


def flow_rhs(terms: Terms, m: float) -> Terms:
    """Terms of (X + m) f."""
    return add_terms(x_image(terms), scale_terms(m, terms))


def min_power(terms: Terms) -> int:
    """Smallest power with a nonzero coefficient; governs decay as r -> 0."""
    powers = [t.k for t in terms if t.coef != 0]
    if not powers:
        raise ValueError("all coefficients vanish")
    return min(powers)


def gaussian_log(grid: LogGrid) -> HalfLineFunction:
    """f(r) = exp(-(log r)^2 / 2): a Gaussian in the x coordinate."""
    return sample(lambda r: np.exp(-0.5 * np.log(r) ** 2), grid)


# The published verification family: six pure Gamma terms spanning
# k in {1,2,3}, c in {1,2}, plus two fixed combinations.
FAMILY: tuple[tuple[str, Terms], ...] = (
    ("r_exp", make_terms([(1.0, 1, 1.0)])),
    ("r_exp2", make_terms([(1.0, 1, 2.0)])),
    ("r2_exp", make_terms([(1.0, 2, 1.0)])),
    ("r2_exp2", make_terms([(1.0, 2, 2.0)])),
    ("r3_exp", make_terms([(1.0, 3, 1.0)])),
    ("r3_exp2", make_terms([(1.0, 3, 2.0)])),
    ("mix_12", make_terms([(1.0, 1, 1.0), (0.5, 2, 2.0)])),
    ("mix_23", make_terms([(2.0, 2, 1.0), (-1.0, 3, 2.0)])),
)


def family_member(name: str) -> Terms:
    for key, terms in FAMILY:
        if key == name:
            return terms
    raise KeyError(f"unknown family member {name!r}")
