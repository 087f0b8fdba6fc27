"""Shifted cotangent charts and their canonical graded Poisson calculus.

A shift-n cotangent chart pairs every base coordinate x_i (degree d_i) with a
momentum p_i of degree n - d_i; polynomials on the full chart play the role
of multivector fields on the base.  The canonical bracket is the degree -n
biderivation generated by the single relation

    {p_i, x_j} = delta_ij,

every other sign being forced by graded antisymmetry

    {a, b} = -(-1)^((|a|-n)(|b|-n)) {b, a}

and the two Leibniz rules

    {a, bc} = {a, b} c + (-1)^((|a|-n)|b|) b {a, c}
    {ab, c} = a {b, c} + (-1)^(|b|(|c|-n)) {a, c} b.

In particular {x_i, p_i} = -(-1)^(|x_i|(|x_i|+n)).  For n = 1 this bracket is
the Schouten bracket of multivector fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .algebra import (
    Chart,
    ChartMismatchError,
    Coordinate,
    DegreeError,
    Derivation,
    GradedPolynomial,
    biderivation_bracket,
)

MOMENTUM_PREFIX = "p_"


@dataclass(frozen=True)
class CotangentChart(Chart):
    """Base coordinates followed by their momenta, with a positive shift n."""

    n: int = 1
    base_size: int = 0

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.coordinates, self.n, self.base_size))

    @property
    def base(self) -> Chart:
        return Chart(self.coordinates[: self.base_size])

    def is_momentum(self, idx: int) -> bool:
        return idx >= self.base_size

    def momentum_index(self, base_idx: int) -> int:
        return self.base_size + base_idx

    def base_index(self, momentum_idx: int) -> int:
        return momentum_idx - self.base_size

    def momentum_of(self, base_name: str) -> str:
        return self.coordinates[self.momentum_index(self.base.index(base_name))].name

    def fiber_weight(self, factors) -> int:
        """Momentum word length of a monomial, counting multiplicity."""
        return sum(e for i, e in factors if i >= self.base_size)


def build_cotangent(base: Chart, n: int, prefix: str = MOMENTUM_PREFIX) -> CotangentChart:
    """Attach one momentum of degree n - |x| per base coordinate x."""
    if n < 1:
        raise ValueError(f"shift must be a positive integer, got {n}")
    base_names = set(base.names())
    momenta = []
    for c in base.coordinates:
        pname = prefix + c.name
        if pname in base_names:
            raise ValueError(f"momentum name {pname!r} collides with a base coordinate")
        momenta.append(Coordinate(pname, n - c.degree))
    return CotangentChart(tuple(base.coordinates) + tuple(momenta), n=n, base_size=len(base))


def inject_base(cc: CotangentChart, f: GradedPolynomial) -> GradedPolynomial:
    """View a polynomial on the base chart as a fiber-constant one on cc."""
    if f.chart != cc.base:
        raise ChartMismatchError("polynomial does not live on the base chart")
    return GradedPolynomial(cc, f.terms)

def restrict_to_base(cc: CotangentChart, f: GradedPolynomial) -> GradedPolynomial:
    """Inverse of inject_base; requires fiber weight zero."""
    if f.chart != cc:
        raise ChartMismatchError("polynomial does not live on the cotangent chart")
    for factors in f.terms:
        if cc.fiber_weight(factors):
            raise ValueError("polynomial contains momenta")
    return GradedPolynomial(cc.base, f.terms)


def is_base_function(cc: CotangentChart, f: GradedPolynomial) -> bool:
    return all(cc.fiber_weight(factors) == 0 for factors in f.terms)


@lru_cache(maxsize=None)
def _generator_table(cc: CotangentChart) -> tuple[Derivation, ...]:
    """For each generator g, the derivation {g, .} defined by the pairing."""
    table = []
    for idx, c in enumerate(cc.coordinates):
        if cc.is_momentum(idx):
            bidx = cc.base_index(idx)
            partner = cc.coordinates[bidx].name
            images = {partner: cc.constant(1)}
        else:
            pidx = cc.momentum_index(idx)
            partner = cc.coordinates[pidx].name
            s = -1 if (c.degree * (c.degree + cc.n)) & 1 else 1
            images = {partner: cc.constant(-s)}
        table.append(Derivation(cc, c.degree - cc.n, images))
    return tuple(table)


def canonical_bracket(
    a: GradedPolynomial, b: GradedPolynomial, cc: Optional[CotangentChart] = None
) -> GradedPolynomial:
    """The canonical degree -n Poisson bracket {a, b} on a cotangent chart."""
    if cc is None:
        cc = a.chart  # type: ignore[assignment]
    if not isinstance(cc, CotangentChart):
        raise ChartMismatchError("bracket requires a cotangent chart")
    if a.chart != cc or b.chart != cc:
        raise ChartMismatchError("operands do not live on the given cotangent chart")
    return biderivation_bracket(cc, cc.n, _generator_table(cc), a, b)


def schouten(a: GradedPolynomial, b: GradedPolynomial) -> GradedPolynomial:
    """Schouten bracket of multivector fields: the shift-1 canonical bracket."""
    cc = a.chart
    if not isinstance(cc, CotangentChart) or cc.n != 1:
        raise ChartMismatchError("Schouten bracket needs a shift-1 cotangent chart")
    return canonical_bracket(a, b, cc)


def euler_vector_field(chart: Chart) -> Derivation:
    """Degree-0 derivation with e(x) = |x| x, so e(f) = |f| f on homogeneous f."""
    images = {c.name: c.degree * chart.var(c.name) for c in chart.coordinates}
    return Derivation(chart, 0, images)


def hamiltonian_vector_field(
    h: GradedPolynomial, cc: Optional[CotangentChart] = None
) -> Derivation:
    """The derivation f -> {h, f}; degree |h| - n, so h must be homogeneous."""
    if cc is None:
        cc = h.chart  # type: ignore[assignment]
    if not isinstance(cc, CotangentChart):
        raise ChartMismatchError("Hamiltonian vector fields need a cotangent chart")
    if h.chart != cc:
        raise ChartMismatchError("Hamiltonian does not live on the given chart")
    hdeg = h.degree()
    if hdeg is None:
        hdeg = cc.n  # zero Hamiltonian: zero derivation of degree 0
    images = {c.name: canonical_bracket(h, cc.var(c.name), cc) for c in cc.coordinates}
    return Derivation(cc, hdeg - cc.n, images)


def decompose(v: GradedPolynomial) -> list[tuple[int, GradedPolynomial]]:
    """Split by momentum word length; the pieces sum back to v."""
    cc = v.chart
    if not isinstance(cc, CotangentChart):
        raise ChartMismatchError("decompose needs a cotangent chart")
    buckets: dict[int, dict] = {}
    for f, c in v.terms.items():
        buckets.setdefault(cc.fiber_weight(f), {})[f] = c
    return [(ell, GradedPolynomial(cc, t)) for ell, t in sorted(buckets.items())]


def fiber_component(v: GradedPolynomial, ell: int) -> GradedPolynomial:
    cc = v.chart
    if not isinstance(cc, CotangentChart):
        raise ChartMismatchError("fiber_component needs a cotangent chart")
    terms = {f: c for f, c in v.terms.items() if cc.fiber_weight(f) == ell}
    return GradedPolynomial(cc, terms)


def max_fiber_weight(v: GradedPolynomial) -> int:
    cc = v.chart
    if not isinstance(cc, CotangentChart):
        raise ChartMismatchError("needs a cotangent chart")
    return max((cc.fiber_weight(f) for f in v.terms), default=0)


def vector_field_symbol(cc: CotangentChart, X: Derivation) -> GradedPolynomial:
    """Fiber-linear function sum_j X(x_j) p_j with {symbol(X), f} = X(f) on base f."""
    if X.chart != cc.base:
        raise ChartMismatchError("vector field must live on the base chart")
    out = cc.zero()
    for bidx, c in enumerate(cc.base.coordinates):
        g = X.images[bidx]
        if g:
            p = cc.var(cc.coordinates[cc.momentum_index(bidx)].name)
            out = out + inject_base(cc, g) * p
    return out
