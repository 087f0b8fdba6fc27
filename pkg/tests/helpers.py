"""Shared generators for randomized tests."""

from __future__ import annotations

import random
from fractions import Fraction

from gradedgeo.algebra import Chart, GradedPolynomial, make_chart
from gradedgeo.cotangent import CotangentChart, build_cotangent
from gradedgeo.sampling import monomial_pool, random_homogeneous

NAMES = "abcdefgh"


def random_chart(rng: random.Random, max_coords: int = 6, degree_span: tuple[int, int] = (-3, 3)) -> Chart:
    k = rng.randint(2, max_coords)
    lo, hi = degree_span
    return make_chart([(NAMES[i], rng.randint(lo, hi)) for i in range(k)])


def random_cotangent(rng: random.Random, n: int, max_base: int = 3) -> CotangentChart:
    k = rng.randint(1, max_base)
    base = make_chart([(NAMES[i], rng.randint(-2, 2)) for i in range(k)])
    return build_cotangent(base, n)


def random_nonzero_homogeneous(chart: Chart, rng: random.Random, max_len: int = 4,
                               tries: int = 8) -> GradedPolynomial:
    for _ in range(tries):
        p = random_homogeneous(chart, rng, max_len=max_len)
        if not p.is_zero():
            return p
    return chart.one()


def random_valid_structure(rng: random.Random, n: int, want_pi0: bool = False):
    """A random multivector of total degree n+1 with vanishing self-bracket.

    Split the base into two groups: the 0-ary part uses only group-A
    coordinates, the higher parts use only group-B momenta with constant
    coefficients, so every cross bracket vanishes identically.
    """
    while True:
        degsA = [rng.choice([1, 2, 3, -1]) for _ in range(2)]
        degsB = [rng.choice([-1, 0, 1, 2]) for _ in range(3)]
        names = [f"a{i}" for i in range(len(degsA))] + [f"b{i}" for i in range(len(degsB))]
        base = make_chart(list(zip(names, degsA + degsB)))
        cc = build_cotangent(base, n)
        nA = len(degsA)
        pool = monomial_pool(cc, 4).get(n + 1, ())
        poolA = [f for f in pool if all(i < nA for i, _ in f)]
        poolB = [
            f
            for f in pool
            if all(i >= len(base) and cc.base_index(i) >= nA for i, _ in f)
            and cc.fiber_weight(f) <= 3
        ]
        terms: dict = {}
        if poolA and (want_pi0 or rng.random() < 0.5):
            terms[rng.choice(poolA)] = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        for f in rng.sample(poolB, min(len(poolB), 3)):
            if rng.random() < 0.8:
                c = rng.randint(-3, 3)
                if c:
                    terms[f] = Fraction(c)
        if not terms:
            continue
        if want_pi0 and not any(cc.fiber_weight(f) == 0 for f in terms):
            continue
        return cc, GradedPolynomial(cc, terms)
