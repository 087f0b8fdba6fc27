"""Random homogeneous polynomials for randomized spot checks."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

from .algebra import Chart, GradedPolynomial


@lru_cache(maxsize=None)
def monomial_pool(chart: Chart, max_len: int = 4) -> dict[int, tuple]:
    """All monomial factor tuples of word length <= max_len, keyed by degree."""
    coords = list(enumerate(chart.coordinates))
    buckets: dict[int, list] = {}

    def rec(start: int, factors: list, total: int, length: int):
        if factors:
            buckets.setdefault(total, []).append(tuple(factors))
        if length >= max_len:
            return
        for i in range(start, len(coords)):
            idx, c = coords[i]
            cap = 1 if c.degree & 1 else max_len - length
            for e in range(1, cap + 1):
                if length + e > max_len:
                    break
                factors.append((idx, e))
                rec(i + 1, factors, total + e * c.degree, length + e)
                factors.pop()

    rec(0, [], 0, 0)
    return {d: tuple(fs) for d, fs in buckets.items()}


def random_homogeneous(
    chart: Chart,
    rng: random.Random,
    degree: int | None = None,
    max_terms: int = 3,
    max_len: int = 4,
) -> GradedPolynomial:
    """A random homogeneous polynomial; picks a realizable degree when none
    is given.  May return zero when the requested degree has no monomials."""
    pool = monomial_pool(chart, max_len)
    if not pool:
        return chart.zero()
    if degree is None:
        degree = rng.choice(sorted(pool))
    candidates = pool.get(degree, ())
    if not candidates:
        return chart.zero()
    terms: dict = {}
    for factors in rng.sample(candidates, min(len(candidates), rng.randint(1, max_terms))):
        num = rng.randint(-4, 4) or 1
        den = rng.randint(1, 3)
        terms[factors] = Fraction(num, den)
    return GradedPolynomial(chart, terms)
