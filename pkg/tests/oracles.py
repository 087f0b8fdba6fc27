"""Independent oracles used by the tests.

Everything here works on raw generator words (lists of coordinate indices,
repeated per exponent) and normalizes by literal bubble sort, counting one
Koszul sign per adjacent transposition.  No kernel code path is reused: the
only shared inputs are chart metadata and exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from gradedgeo.algebra import Chart, GradedPolynomial
from gradedgeo.cotangent import CotangentChart


def word_of(factors) -> list[int]:
    word = []
    for idx, exp in factors:
        word.extend([idx] * exp)
    return word


def bubble_normalize(chart: Chart, word: list[int]) -> tuple[tuple, int]:
    """Sort a generator word into chart order by adjacent swaps.

    Returns (factor tuple, sign); sign 0 when an odd generator repeats.
    """
    w = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                if chart.parity_of(w[i]) and chart.parity_of(w[i + 1]):
                    sign = -sign
                w[i], w[i + 1] = w[i + 1], w[i]
                changed = True
    for i in range(len(w) - 1):
        if w[i] == w[i + 1] and chart.parity_of(w[i]):
            return (), 0
    factors = []
    for idx in w:
        if factors and factors[-1][0] == idx:
            factors[-1] = (idx, factors[-1][1] + 1)
        else:
            factors.append((idx, 1))
    return tuple(factors), sign


def _add_term(acc: dict, factors, coeff: Fraction) -> None:
    if not coeff:
        return
    acc[factors] = acc.get(factors, Fraction(0)) + coeff
    if not acc[factors]:
        del acc[factors]


def oracle_mul(chart: Chart, a: GradedPolynomial, b: GradedPolynomial) -> GradedPolynomial:
    """Term-by-term product with bubble-sorted words."""
    acc: dict = {}
    for fa, ca in a.terms.items():
        for fb, cb in b.terms.items():
            factors, sign = bubble_normalize(chart, word_of(fa) + word_of(fb))
            if sign:
                _add_term(acc, factors, ca * cb * sign)
    return GradedPolynomial(chart, acc)


def _word_parity(chart: Chart, word: list[int]) -> int:
    p = 0
    for idx in word:
        p ^= chart.parity_of(idx)
    return p


def _word_degree(chart: Chart, word: list[int]) -> int:
    return sum(chart.degree_of(idx) for idx in word)


def _pairing(cc: CotangentChart, u: int, v: int) -> Fraction:
    """The two defining relations of the canonical bracket."""
    if cc.is_momentum(u) and not cc.is_momentum(v) and cc.base_index(u) == v:
        return Fraction(1)
    if not cc.is_momentum(u) and cc.is_momentum(v) and cc.base_index(v) == u:
        d = cc.degree_of(u)
        return Fraction(-1 if (d * (d + cc.n)) % 2 == 0 else 1)
    return Fraction(0)


def oracle_bracket(
    a: GradedPolynomial, b: GradedPolynomial, cc: CotangentChart
) -> GradedPolynomial:
    """Full bilinear expansion of the canonical bracket over monomial pairs.

    For words u_1..u_k and v_1..v_l the double Leibniz expansion reads

        {a, b} = sum_{s,t} (-1)^(p(u_{s+1..k}) p(|b|-n))
                           (-1)^((p(u_s)+n) p(v_1..t-1))
                           <u_s, v_t> . word(u_<s  v_without_t  u_>s),

    with <.,.> the defining pairing; each assembled word is bubble sorted.
    """
    acc: dict = {}
    n = cc.n
    for fa, ca in a.terms.items():
        wa = word_of(fa)
        for fb, cb in b.terms.items():
            wb = word_of(fb)
            right_par = (_word_degree(cc, wb) - n) % 2
            for s, u in enumerate(wa):
                suffix_par = _word_parity(cc, wa[s + 1 :])
                sign1 = -1 if (suffix_par and right_par) else 1
                dpar = (cc.degree_of(u) - n) % 2
                for t, v in enumerate(wb):
                    pair = _pairing(cc, u, v)
                    if not pair:
                        continue
                    prefix_par = _word_parity(cc, wb[:t])
                    sign2 = -1 if (dpar and prefix_par) else 1
                    word = wa[:s] + wb[:t] + wb[t + 1 :] + wa[s + 1 :]
                    factors, sign3 = bubble_normalize(cc, word)
                    if sign3:
                        _add_term(acc, factors, ca * cb * pair * sign1 * sign2 * sign3)
    return GradedPolynomial(cc, acc)


def classical_jacobiator(coeffs, dim: int):
    """Jacobiator of a linear bivector with pi^{ij} = sum_k coeffs[i][j][k] x_k.

    Returns the full tensor J[i][j][k][m] = sum_l (a^{il}_m a^{jk}_l + cyclic);
    the bivector is Poisson exactly when every entry vanishes.
    """
    J = [[[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for m in range(dim):
                    total = Fraction(0)
                    for l in range(dim):
                        total += coeffs[i][l][m] * coeffs[j][k][l]
                        total += coeffs[j][l][m] * coeffs[k][i][l]
                        total += coeffs[k][l][m] * coeffs[i][j][l]
                    J[i][j][k][m] = total
    return J


def jacobiator_vanishes(coeffs, dim: int) -> bool:
    J = classical_jacobiator(coeffs, dim)
    return all(
        not J[i][j][k][m]
        for i in range(dim)
        for j in range(dim)
        for k in range(dim)
        for m in range(dim)
    )


def bicrossed_jacobi(g, hstar, act, coact) -> bool:
    """Matched-pair criterion: the bicrossed sum of g and hstar, with each
    action dualized by minus transpose, satisfies the Jacobi identity."""
    dg, dh = g.dim, hstar.dim
    dim = dg + dh

    def br(i: int, j: int) -> dict:
        out: dict = {}

        def add(k, c):
            if c:
                out[k] = out.get(k, Fraction(0)) + c
                if not out[k]:
                    del out[k]

        if i < dg and j < dg:
            for k, c in g.bracket_basis(i, j).items():
                add(k, c)
        elif i >= dg and j >= dg:
            for k, c in hstar.bracket_basis(i - dg, j - dg).items():
                add(dg + k, c)
        elif i < dg:
            a = j - dg
            for r in range(dg):  # minus the dual coaction on g
                add(r, coact[a][i][r])
            for b in range(dh):  # the dual action on hstar
                add(dg + b, -act[i][a][b])
        else:
            for k, c in br(j, i).items():
                add(k, -c)
        return out

    def brv(v: dict, w: dict) -> dict:
        out: dict = {}
        for i, x in v.items():
            for j, y in w.items():
                for k, c in br(i, j).items():
                    out[k] = out.get(k, Fraction(0)) + x * y * c
                    if not out[k]:
                        del out[k]
        return out

    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                unit = lambda t: {t: Fraction(1)}
                res = brv(unit(i), br(j, k))
                for kk, c in brv(br(i, j), unit(k)).items():
                    res[kk] = res.get(kk, Fraction(0)) - c
                    if not res[kk]:
                        del res[kk]
                for kk, c in brv(unit(j), br(i, k)).items():
                    res[kk] = res.get(kk, Fraction(0)) - c
                    if not res[kk]:
                        del res[kk]
                if res:
                    return False
    return True


def restriction_projection(
    q_field, cc: CotangentChart, quotient: CotangentChart, killed: list[str]
):
    """Quotient field for a coordinate-translation action: apply the field to
    the surviving coordinates, set the killed coordinates and their momenta
    to zero, and rename.  Returns images keyed by quotient coordinate name."""
    killed_idx = {cc.index(k) for k in killed}
    killed_idx |= {cc.index(cc.momentum_of(k)) for k in killed}
    images = {}
    for c in quotient.coordinates:
        value = q_field(cc.var(c.name))
        terms = {}
        for factors, coeff in value.terms.items():
            if any(i in killed_idx for i, _ in factors):
                continue
            renamed = tuple(
                (quotient.index(cc.coordinates[i].name), e) for i, e in factors
            )
            terms[renamed] = coeff
        images[c.name] = GradedPolynomial(quotient, terms)
    return images
