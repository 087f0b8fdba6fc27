"""Exact kernel for Z-graded commutative polynomial algebras.

Coordinates carry integer degrees (negative allowed); parity is degree mod 2
and drives every commutation sign.  Polynomials live in a unique normal form:
monomial factors sorted by chart order, the Koszul sign collected while
sorting folded into an exact rational coefficient, squares of odd coordinates
elided.  Equality of normal forms is therefore plain structural equality.

All values are immutable after construction and safe to share.
"""

from __future__ import annotations

from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

Rat = Union[int, Fraction]

# (coordinate index, exponent) pairs sorted by index; the key of a monomial.
Factors = tuple[tuple[int, int], ...]

# Optional cap on the plain total degree (sum of exponents) of any monomial
# produced by multiplication; used by the CLI --max-degree guard.
_degree_cap: ContextVar[Optional[int]] = ContextVar("gradedgeo_degree_cap", default=None)


class ChartMismatchError(ValueError):
    """Operands live on different charts."""


class DegreeError(ValueError):
    """A degree or homogeneity requirement is violated."""


class DegreeOverflowError(RuntimeError):
    """A monomial exceeded the configured total-degree cap."""

    def __init__(self, cap: int):
        super().__init__(f"intermediate polynomial exceeded the degree cap {cap}")
        self.cap = cap


def set_degree_cap(cap: Optional[int]):
    """Install a cap on monomial word length; returns a reset token."""
    return _degree_cap.set(cap)


def reset_degree_cap(token) -> None:
    _degree_cap.reset(token)


@dataclass(frozen=True)
class Coordinate:
    name: str
    degree: int

    @property
    def parity(self) -> int:
        return self.degree & 1


@dataclass(frozen=True)
class Chart:
    """An ordered tuple of named, integer-graded coordinates."""

    coordinates: tuple[Coordinate, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for i, c in enumerate(self.coordinates):
            if c.name in index:
                raise ValueError(f"duplicate coordinate name {c.name!r}")
            index[c.name] = i
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.coordinates)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.coordinates))

    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.coordinates)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no coordinate {name!r} on this chart") from None

    def degree_of(self, idx: int) -> int:
        return self.coordinates[idx].degree

    def parity_of(self, idx: int) -> int:
        return self.coordinates[idx].degree & 1

    # -- polynomial builders ------------------------------------------------

    def zero(self) -> "GradedPolynomial":
        return GradedPolynomial(self, {})

    def one(self) -> "GradedPolynomial":
        return self.constant(1)

    def constant(self, c: Rat) -> "GradedPolynomial":
        c = Fraction(c)
        return GradedPolynomial(self, {(): c} if c else {})

    def var(self, name: str) -> "GradedPolynomial":
        i = self.index(name)
        return GradedPolynomial(self, {((i, 1),): Fraction(1)})

    def monomial(self, coeff: Rat, powers: Iterable[tuple[str, int]]) -> "GradedPolynomial":
        poly = self.constant(coeff)
        for name, exp in powers:
            poly = poly * self.var(name) ** exp
        return poly


def make_chart(spec: Iterable[tuple[str, int]]) -> Chart:
    """Build a chart from (name, degree) pairs."""
    return Chart(tuple(Coordinate(n, d) for n, d in spec))


def _merge_factors(chart: Chart, fa: Factors, fb: Factors) -> tuple[Optional[Factors], int]:
    """Merge two sorted factor lists into chart order.

    Returns (factors, sign) with sign in {+1, -1}, or (None, 0) when a
    repeated odd coordinate annihilates the product.  The sign counts the
    parity of odd-odd transpositions needed to interleave fb into fa.
    """
    out = []
    sign = 0  # exponent of (-1)
    # parity mass of the not-yet-consumed part of fa
    rem_a = 0
    for idx, exp in fa:
        rem_a ^= (exp * chart.parity_of(idx)) & 1
    i = j = 0
    la, lb = len(fa), len(fb)
    while i < la and j < lb:
        ia, ea = fa[i]
        ib, eb = fb[j]
        if ia < ib:
            out.append((ia, ea))
            rem_a ^= (ea * chart.parity_of(ia)) & 1
            i += 1
        elif ia > ib:
            if (eb * chart.parity_of(ib)) & 1:
                sign ^= rem_a
            out.append((ib, eb))
            j += 1
        else:
            if chart.parity_of(ia):
                return None, 0
            out.append((ia, ea + eb))
            i += 1
            j += 1
    out.extend(fa[i:])
    out.extend(fb[j:])
    cap = _degree_cap.get()
    if cap is not None and sum(e for _, e in out) > cap:
        raise DegreeOverflowError(cap)
    return tuple(out), (-1 if sign else 1)


def _factors_degree(chart: Chart, factors: Factors) -> int:
    return sum(e * chart.degree_of(i) for i, e in factors)


def _factors_parity(chart: Chart, factors: Factors) -> int:
    p = 0
    for i, e in factors:
        p ^= (e * chart.parity_of(i)) & 1
    return p


class GradedPolynomial:
    """A polynomial in canonical form over a chart.

    ``terms`` maps sorted factor tuples to nonzero Fractions.  Do not mutate;
    build new values through the arithmetic operators.
    """

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[Factors, Fraction]):
        self.chart = chart
        self.terms = dict(terms)

    # -- predicates and degree bookkeeping ----------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def term_degrees(self) -> set[int]:
        return {_factors_degree(self.chart, f) for f in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.term_degrees()) <= 1

    def is_homogeneous_of_degree(self, d: int) -> bool:
        """Zero counts as homogeneous of every degree."""
        return all(_factors_degree(self.chart, f) == d for f in self.terms)

    def degree(self) -> Optional[int]:
        """Degree of a homogeneous polynomial; None for zero."""
        degs = self.term_degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError(f"polynomial is inhomogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def parity(self) -> int:
        d = self.degree()
        return 0 if d is None else d & 1

    def homogeneous_components(self) -> dict[int, "GradedPolynomial"]:
        buckets: dict[int, dict] = {}
        for f, c in self.terms.items():
            buckets.setdefault(_factors_degree(self.chart, f), {})[f] = c
        return {d: GradedPolynomial(self.chart, t) for d, t in sorted(buckets.items())}

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def max_word_length(self) -> int:
        return max((sum(e for _, e in f) for f in self.terms), default=0)

    # -- arithmetic ----------------------------------------------------------

    def _check_chart(self, other: "GradedPolynomial") -> None:
        if self.chart != other.chart:
            raise ChartMismatchError("operands live on different charts")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.constant(other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        self._check_chart(other)
        terms = dict(self.terms)
        for f, c in other.terms.items():
            s = terms.get(f, Fraction(0)) + c
            if s:
                terms[f] = s
            else:
                terms.pop(f, None)
        return GradedPolynomial(self.chart, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial(self.chart, {f: -c for f, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.constant(other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return self.chart.zero()
            return GradedPolynomial(self.chart, {f: v * c for f, v in self.terms.items()})
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        self._check_chart(other)
        out: dict[Factors, Fraction] = {}
        for fa, ca in self.terms.items():
            for fb, cb in other.terms.items():
                fm, sign = _merge_factors(self.chart, fa, fb)
                if not sign:
                    continue
                s = out.get(fm, Fraction(0)) + ca * cb * sign
                if s:
                    out[fm] = s
                else:
                    out.pop(fm, None)
        return GradedPolynomial(self.chart, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, exp: int):
        if not isinstance(exp, int) or exp < 0:
            raise ValueError("exponents must be nonnegative integers")
        out = self.chart.one()
        for _ in range(exp):
            out = out * self
        return out

    # -- identity ------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, GradedPolynomial)
            and self.chart == other.chart
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Factors, Fraction]]:
        return sorted(self.terms.items())

    def __repr__(self):
        from .formats import render_polynomial

        return f"<poly {render_polynomial(self)}>"


class Derivation:
    """A graded derivation of fixed degree, given by its coordinate images.

    Extends to products by the graded Leibniz rule
    ``D(uv) = D(u) v + (-1)^(|D||u|) u D(v)``.
    Every image must be homogeneous of degree (coordinate degree + D degree).
    """

    __slots__ = ("chart", "deg", "images")

    def __init__(self, chart: Chart, degree: int, images: Mapping[str, GradedPolynomial]):
        self.chart = chart
        self.deg = degree
        img: list[GradedPolynomial] = [chart.zero()] * len(chart)
        for name, poly in images.items():
            i = chart.index(name)
            if poly.chart != chart:
                raise ChartMismatchError(f"image of {name!r} lives on a different chart")
            want = chart.degree_of(i) + degree
            if not poly.is_homogeneous_of_degree(want):
                raise DegreeError(
                    f"image of {name!r} must be homogeneous of degree {want}"
                )
            img[i] = poly
        self.images = tuple(img)

    @property
    def parity(self) -> int:
        return self.deg & 1

    def image(self, name: str) -> GradedPolynomial:
        return self.images[self.chart.index(name)]

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.images)

    def __call__(self, f: GradedPolynomial) -> GradedPolynomial:
        if f.chart != self.chart:
            raise ChartMismatchError("argument lives on a different chart")
        chart = self.chart
        out = chart.zero()
        for factors, coeff in f.terms.items():
            prefix_parity = 0
            for t, (idx, exp) in enumerate(factors):
                img = self.images[idx]
                if img:
                    head = factors[:t] + (((idx, exp - 1),) if exp > 1 else ())
                    tail = factors[t + 1 :]
                    sign = -1 if (self.parity and prefix_parity) else 1
                    term = GradedPolynomial(chart, {head: coeff * exp * sign})
                    term = term * img
                    if tail:
                        term = term * GradedPolynomial(chart, {tail: Fraction(1)})
                    out = out + term
                prefix_parity ^= (exp * chart.parity_of(idx)) & 1
        return out

    def __add__(self, other: "Derivation") -> "Derivation":
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.chart != other.chart:
            raise ChartMismatchError("derivations live on different charts")
        if self.deg != other.deg and not (self.is_zero() or other.is_zero()):
            raise DegreeError("cannot add derivations of different degrees")
        deg = other.deg if self.is_zero() and not other.is_zero() else self.deg
        images = {
            c.name: a + b
            for c, a, b in zip(self.chart.coordinates, self.images, other.images)
        }
        return Derivation(self.chart, deg, images)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        images = {c.name: p * scalar for c, p in zip(self.chart.coordinates, self.images)}
        return Derivation(self.chart, self.deg, images)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.chart != other.chart or self.images != other.images:
            return False
        return self.deg == other.deg or self.is_zero()

    def __hash__(self):
        return hash((self.chart, self.images))

    def __repr__(self):
        parts = ", ".join(
            f"{c.name} -> {p!r}"
            for c, p in zip(self.chart.coordinates, self.images)
            if p
        )
        return f"<derivation deg {self.deg}: {parts or '0'}>"


def zero_derivation(chart: Chart, degree: int = 0) -> Derivation:
    return Derivation(chart, degree, {})


def biderivation_bracket(
    chart: Chart,
    n: int,
    gens: tuple[Derivation, ...],
    a: GradedPolynomial,
    b: GradedPolynomial,
) -> GradedPolynomial:
    """Extend a generator pairing to the degree -n biderivation {a, b}.

    ``gens[i]`` must be the derivation {g_i, .} of degree |g_i| - n.  The left
    slot is peeled factor by factor with the right Leibniz rule

        {u v, b} = u {v, b} + (-1)^(|v| (|b| - n)) {u, b} v,

    the right slot by applying the generator derivations.
    """
    if a.chart != chart or b.chart != chart:
        raise ChartMismatchError("operands do not live on the bracket's chart")
    out = chart.zero()
    for fb, cb in b.terms.items():
        bmono = GradedPolynomial(chart, {fb: cb})
        right_par = (_factors_parity(chart, fb) ^ n) & 1
        for fa, ca in a.terms.items():
            suffix_par = _factors_parity(chart, fa)
            for t, (idx, exp) in enumerate(fa):
                suffix_par ^= (exp * chart.parity_of(idx)) & 1
                gen = gens[idx]
                if gen.is_zero():
                    continue
                inner = gen(bmono)
                if inner.is_zero():
                    continue
                head = fa[:t] + (((idx, exp - 1),) if exp > 1 else ())
                tail = fa[t + 1 :]
                sign = -1 if (suffix_par and right_par) else 1
                term = GradedPolynomial(chart, {head: ca * exp * sign})
                term = term * inner
                if tail:
                    term = term * GradedPolynomial(chart, {tail: Fraction(1)})
                out = out + term
    return out


def commutator(d1: Derivation, d2: Derivation) -> Derivation:
    """Graded commutator [d1, d2] = d1 d2 - (-1)^(|d1||d2|) d2 d1."""
    if d1.chart != d2.chart:
        raise ChartMismatchError("derivations live on different charts")
    sign = -1 if (d1.parity and d2.parity) else 1
    images = {}
    for c in d1.chart.coordinates:
        x = d1.chart.var(c.name)
        images[c.name] = d1(d2(x)) - sign * d2(d1(x))
    return Derivation(d1.chart, d1.deg + d2.deg, images)


class AlgebraMorphism:
    """The degree-0 algebra morphism extending coordinate images.

    Maps polynomials on ``source`` to polynomials on ``target``; every source
    coordinate needs a homogeneous image of the same degree.
    """

    __slots__ = ("source", "target", "images")

    def __init__(self, source: Chart, target: Chart, images: Mapping[str, GradedPolynomial]):
        self.source = source
        self.target = target
        img: list[GradedPolynomial] = []
        missing = [c.name for c in source.coordinates if c.name not in images]
        if missing:
            raise ValueError(f"missing images for coordinates {missing}")
        for c in source.coordinates:
            poly = images[c.name]
            if poly.chart != target:
                raise ChartMismatchError(f"image of {c.name!r} is not on the target chart")
            if not poly.is_homogeneous_of_degree(c.degree):
                raise DegreeError(
                    f"image of {c.name!r} must be homogeneous of degree {c.degree}"
                )
            img.append(poly)
        self.images = tuple(img)

    def image(self, name: str) -> GradedPolynomial:
        return self.images[self.source.index(name)]

    def __call__(self, f: GradedPolynomial) -> GradedPolynomial:
        if f.chart != self.source:
            raise ChartMismatchError("argument does not live on the source chart")
        out = self.target.zero()
        for factors, coeff in f.terms.items():
            term = self.target.constant(coeff)
            for idx, exp in factors:
                term = term * self.images[idx] ** exp
            out = out + term
        return out

    def compose(self, inner: "AlgebraMorphism") -> "AlgebraMorphism":
        """self after inner: maps inner.source to self.target."""
        if inner.target != self.source:
            raise ChartMismatchError("morphisms do not compose")
        images = {c.name: self(inner.image(c.name)) for c in inner.source.coordinates}
        return AlgebraMorphism(inner.source, self.target, images)


def identity_morphism(chart: Chart) -> AlgebraMorphism:
    return AlgebraMorphism(chart, chart, {c.name: chart.var(c.name) for c in chart.coordinates})
