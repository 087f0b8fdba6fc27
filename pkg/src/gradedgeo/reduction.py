"""Moment-map reduction of symplectic charts with homological Hamiltonians.

The homological vector field is always supplied through its Hamiltonian (a
degree n+1 function), which makes it symplectic by construction.  Reduction
at the zero level works with the ideal generated by the moment-map images:
after an exact fiber-linear change of coordinates turns the generators into
chart coordinates, ideal membership is decided by setting them to zero.  The
quotient is declared by the caller (a chart plus invariant representatives)
and verified here, never computed by invariant theory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Mapping, Optional

from . import linalg
from .algebra import (
    AlgebraMorphism,
    Chart,
    ChartMismatchError,
    Coordinate,
    DegreeError,
    Derivation,
    GradedPolynomial,
    commutator,
    make_chart,
)
from .cotangent import (
    CotangentChart,
    build_cotangent,
    canonical_bracket,
    hamiltonian_vector_field,
    inject_base,
    restrict_to_base,
    vector_field_symbol,
)
from .liealg import GradedLieAlgebra, HomotopyLieBialgebra, Vec
from .poisson import (
    HomotopyPoissonStructure,
    StructureError,
    derived_bracket,
    differential,
    from_differential,
)
from .reporting import CheckItem, CheckReport


class ReductionError(StructureError):
    """A hypothesis of the reduction procedure fails; carries a witness."""


@dataclass(frozen=True)
class SymplecticQStructure:
    """T*[n]-type chart with a homological Hamiltonian of degree n+1."""

    cc: CotangentChart
    hamiltonian: GradedPolynomial

    def __post_init__(self):
        if self.hamiltonian.chart != self.cc:
            raise ChartMismatchError("Hamiltonian does not live on the chart")
        if not self.hamiltonian.is_homogeneous_of_degree(self.cc.n + 1):
            raise DegreeError(
                f"Hamiltonian must be homogeneous of degree {self.cc.n + 1}"
            )
        q = self.q_field
        if not commutator(q, q).is_zero():
            raise StructureError("Hamiltonian vector field does not square to zero")

    @property
    def q_field(self) -> Derivation:
        return hamiltonian_vector_field(self.hamiltonian, self.cc)


@dataclass(frozen=True)
class InfinitesimalAction:
    """Basis-indexed vector fields compatible with the algebra's brackets."""

    bialgebra: HomotopyLieBialgebra
    chart: Chart
    rho: Mapping[str, Derivation]

    def __post_init__(self):
        g = self.bialgebra.algebra
        for name in g.names:
            if name not in self.rho:
                raise ValueError(f"missing vector field for basis element {name!r}")
            d = self.rho[name]
            if d.chart != self.chart:
                raise ChartMismatchError(f"vector field of {name!r} lives elsewhere")
            if d.deg != g.degree(name) and not d.is_zero():
                raise DegreeError(
                    f"vector field of {name!r} must have degree {g.degree(name)}"
                )
        for i, vi in enumerate(g.names):
            for j, vj in enumerate(g.names):
                lhs = commutator(self.rho[vi], self.rho[vj])
                rhs = None
                for k, c in g.bracket_basis(i, j).items():
                    term = c * self.rho[g.names[k]]
                    rhs = term if rhs is None else rhs + term
                if rhs is None:
                    rhs = Derivation(self.chart, g.degree(vi) + g.degree(vj), {})
                if lhs != rhs:
                    raise StructureError(
                        f"bracket compatibility fails on the pair ({vi}, {vj})"
                    )

    def field(self, name: str) -> Derivation:
        return self.rho[name]


@dataclass(frozen=True)
class MomentMap:
    """Images v -> mu*(v) of degree |v| + n, closed under brackets."""

    bialgebra: HomotopyLieBialgebra
    cc: CotangentChart
    images: Mapping[str, GradedPolynomial]

    def __post_init__(self):
        g = self.bialgebra.algebra
        n = self.cc.n
        if self.bialgebra.n != n:
            raise DegreeError("bialgebra shift and chart shift disagree")
        for name in g.names:
            if name not in self.images:
                raise ValueError(f"missing moment image for {name!r}")
            f = self.images[name]
            if f.chart != self.cc:
                raise ChartMismatchError(f"moment image of {name!r} lives elsewhere")
            if not f.is_homogeneous_of_degree(g.degree(name) + n):
                raise DegreeError(
                    f"moment image of {name!r} must have degree {g.degree(name) + n}"
                )
        for i, vi in enumerate(g.names):
            for j, vj in enumerate(g.names):
                lhs = canonical_bracket(self.images[vi], self.images[vj], self.cc)
                rhs = self.cc.zero()
                for k, c in g.bracket_basis(i, j).items():
                    rhs = rhs + c * self.images[g.names[k]]
                if lhs != rhs:
                    raise StructureError(
                        f"equivariance fails on the pair ({vi}, {vj})"
                    )

    def image(self, name: str) -> GradedPolynomial:
        return self.images[name]

    def multiplicative_extension(self) -> AlgebraMorphism:
        """The algebra morphism from the shifted dual sending each coordinate
        to its moment image."""
        dual = self.bialgebra.dual
        return AlgebraMorphism(
            dual.chart, self.cc, {name: self.images[name] for name in dual.algebra.names}
        )


def cotangent_lift(
    action: InfinitesimalAction, n: Optional[int] = None
) -> tuple[InfinitesimalAction, MomentMap]:
    """Lift base vector fields to Hamiltonian fields of their momentum symbols.

    mu*(v) is the fiber-linear symbol of rho(v); the lifted field is its
    Hamiltonian vector field and restricts to rho(v) on base functions.
    """
    if n is None:
        n = action.bialgebra.n
    cc = build_cotangent(action.chart, n)
    images = {
        name: vector_field_symbol(cc, action.field(name))
        for name in action.bialgebra.algebra.names
    }
    mm = MomentMap(action.bialgebra, cc, images)
    lifted = {
        name: hamiltonian_vector_field(images[name], cc)
        for name in action.bialgebra.algebra.names
    }
    lifted_action = InfinitesimalAction(action.bialgebra, cc, lifted)
    return lifted_action, mm


def check_q_morphism_moment(
    mm: MomentMap, sqs: SymplecticQStructure, b: HomotopyLieBialgebra
) -> CheckReport:
    """Per basis element v: Q(mu* v) = mu*(dhat v), mu* extended multiplicatively."""
    if mm.cc != sqs.cc:
        raise ChartMismatchError("moment map and structure use different charts")
    ext = mm.multiplicative_extension()
    q = sqs.q_field
    items = []
    for name in b.algebra.names:
        lhs = q(mm.image(name))
        rhs = ext(b.dhat(b.dual.chart.var(name)))
        residual = lhs - rhs
        items.append(
            CheckItem(
                f"moment image of {name} intertwines the differentials",
                residual.is_zero(),
                "" if residual.is_zero() else f"residual on {name}",
            )
        )
    return CheckReport("moment map is a Q-morphism", tuple(items))


def multivector_action_extension(
    action: InfinitesimalAction, cc: CotangentChart
) -> AlgebraMorphism:
    """Multiplicative extension of v -> symbol(rho(v)) from the shifted dual
    to functions on the cotangent chart."""
    dual = action.bialgebra.dual
    images = {
        name: vector_field_symbol(cc, action.field(name))
        for name in dual.algebra.names
    }
    return AlgebraMorphism(dual.chart, cc, images)


def check_action_morphism(
    action: InfinitesimalAction, pi: GradedPolynomial, b: HomotopyLieBialgebra
) -> CheckReport:
    """Differential compatibility of the symbol extension on basis elements:
    extension(dhat v) = {pi, symbol(rho v)}."""
    cc = pi.chart
    if not isinstance(cc, CotangentChart) or cc.base != action.chart:
        raise ChartMismatchError("pi must live on the cotangent chart of the action's base")
    ext = multivector_action_extension(action, cc)
    items = []
    for name in b.algebra.names:
        lhs = ext(b.dhat(b.dual.chart.var(name)))
        rhs = canonical_bracket(pi, ext(b.dual.chart.var(name)), cc)
        residual = lhs - rhs
        items.append(
            CheckItem(
                f"action of {name} intertwines the differentials",
                residual.is_zero(),
                "" if residual.is_zero() else f"residual on {name}",
            )
        )
    return CheckReport("action is a morphism of differential bracket algebras", tuple(items))


# -- the zero-level ideal in fiber-linear normal form -------------------------


class _IdealNormalizer:
    """Rewrites the chart so the moment images become coordinates.

    Requires every generator to be fiber-linear with constant coefficients;
    the change of coordinates is an invertible mix of momenta computed by
    exact elimination.  Membership in the generated ideal is then just
    "vanishes after setting those coordinates to zero".
    """

    def __init__(self, cc: CotangentChart, generators: Mapping[str, GradedPolynomial]):
        self.cc = cc
        self.gen_names = tuple(generators)
        m = len(cc) - cc.base_size
        rows = []
        for name in self.gen_names:
            f = generators[name]
            row = [Fraction(0)] * m
            for factors, coeff in f.terms.items():
                if len(factors) != 1 or factors[0][1] != 1 or not cc.is_momentum(factors[0][0]):
                    raise ReductionError(
                        f"generator {name!r} is not constant-coefficient fiber-linear; "
                        "regularity normal form unavailable"
                    )
                row[factors[0][0] - cc.base_size] = coeff
            rows.append(row)
        self.coeffs = rows
        _, pivots = linalg.rref(rows) if rows else ([], [])
        if len(pivots) != len(rows):
            raise ReductionError(
                "moment images are linearly dependent; zero is not a regular value"
            )
        self.pivots = pivots
        # full change-of-coordinates matrix: generators first, then the
        # untouched momenta, acting on the momentum block
        change = [row[:] for row in rows]
        self.kept = [j for j in range(m) if j not in pivots]
        for j in self.kept:
            unit = [Fraction(0)] * m
            unit[j] = Fraction(1)
            change.append(unit)
        inv = linalg.inverse(change) if change else []
        if change and inv is None:
            raise ReductionError("fiber-linear change of coordinates is not invertible")
        # build the rewritten chart: base coordinates, generator coordinates,
        # then the kept momenta under their own names
        coords = list(cc.base.coordinates)
        for name in self.gen_names:
            coords.append(Coordinate(f"q_{name}", generators[name].degree()))
        for j in self.kept:
            coords.append(cc.coordinates[cc.base_size + j])
        self.new_chart = make_chart([(c.name, c.degree) for c in coords])
        nb = cc.base_size
        # old -> new: base coordinates map to themselves; old momentum p_j is
        # read off from the inverse change matrix
        images_fwd = {}
        for i, c in enumerate(cc.base.coordinates):
            images_fwd[c.name] = self.new_chart.var(c.name)
        new_momentum_names = [f"q_{name}" for name in self.gen_names] + [
            cc.coordinates[nb + j].name for j in self.kept
        ]
        for j in range(m):
            expr = self.new_chart.zero()
            for r, nm in enumerate(new_momentum_names):
                if inv[j][r]:
                    expr = expr + inv[j][r] * self.new_chart.var(nm)
            images_fwd[cc.coordinates[nb + j].name] = expr
        self.to_normal = AlgebraMorphism(cc, self.new_chart, images_fwd)
        # new -> old
        images_bwd = {}
        for i, c in enumerate(cc.base.coordinates):
            images_bwd[c.name] = cc.var(c.name)
        for r, name in enumerate(self.gen_names):
            expr = cc.zero()
            for j in range(m):
                if rows[r][j]:
                    expr = expr + rows[r][j] * cc.var(cc.coordinates[nb + j].name)
            images_bwd[f"q_{name}"] = expr
        for j in self.kept:
            nm = cc.coordinates[nb + j].name
            images_bwd[nm] = cc.var(nm)
        self.from_normal = AlgebraMorphism(self.new_chart, cc, images_bwd)
        self.q_indices = {
            self.new_chart.index(f"q_{name}") for name in self.gen_names
        }

    def normal_form(self, f: GradedPolynomial) -> GradedPolynomial:
        """Representative of f modulo the ideal: rewrite and drop q-terms."""
        g = self.to_normal(f)
        terms = {
            factors: c
            for factors, c in g.terms.items()
            if not any(i in self.q_indices for i, _ in factors)
        }
        return GradedPolynomial(self.new_chart, terms)

    def in_ideal(self, f: GradedPolynomial) -> bool:
        return self.normal_form(f).is_zero()


class _QuotientDescent:
    """Expresses normal forms in the declared quotient coordinates.

    The declared images, in normal form, must be an injective constant-linear
    map of quotient coordinates into the rewritten chart; descent applies the
    exact left inverse and verifies the round trip, so nothing outside the
    image subalgebra is silently projected away.
    """

    def __init__(self, normalizer: _IdealNormalizer, quotient: Chart,
                 images: Mapping[str, GradedPolynomial]):
        self.normalizer = normalizer
        self.quotient = quotient
        nchart = normalizer.new_chart
        reduced_images = {}
        for c in quotient.coordinates:
            if c.name not in images:
                raise ValueError(f"missing representative for quotient coordinate {c.name!r}")
            reduced_images[c.name] = normalizer.normal_form(images[c.name])
        # matrix of the induced linear map on coordinates
        rows = []
        for c in quotient.coordinates:
            f = reduced_images[c.name]
            row = [Fraction(0)] * len(nchart)
            for factors, coeff in f.terms.items():
                if len(factors) != 1 or factors[0][1] != 1:
                    raise ReductionError(
                        f"representative of {c.name!r} is not linear in the rewritten "
                        "coordinates; descent unavailable"
                    )
                row[factors[0][0]] = coeff
            rows.append(row)
        self.embed = AlgebraMorphism(quotient, nchart, reduced_images)
        if linalg.rank(rows) != len(rows):
            raise ReductionError("declared quotient representatives are linearly dependent")
        # left inverse: for each rewritten coordinate, a combination of
        # quotient coordinates (zero for directions outside the image)
        cols = len(nchart)
        left = [[Fraction(0)] * len(rows) for _ in range(cols)]
        for r in range(len(rows)):
            rhs = [Fraction(1) if i == r else Fraction(0) for i in range(len(rows))]
            sol = linalg.solve(rows, rhs)
            if sol is None:
                raise ReductionError("no exact left inverse for the quotient embedding")
            for c in range(cols):
                left[c][r] = sol[c]
        images_back = {}
        for idx, c in enumerate(nchart.coordinates):
            expr = self.quotient.zero()
            for r, qc in enumerate(quotient.coordinates):
                if left[idx][r]:
                    expr = expr + left[idx][r] * quotient.var(qc.name)
            if not expr.is_homogeneous_of_degree(c.degree):
                raise ReductionError(
                    f"quotient descent mixes degrees at coordinate {c.name!r}"
                )
            images_back[c.name] = expr
        self.project = AlgebraMorphism(nchart, quotient, images_back)

    def descend(self, f: GradedPolynomial, what: str) -> GradedPolynomial:
        """Express a normal form on the quotient chart, verifying exactness."""
        g = self.project(f)
        if self.embed(g) != f:
            raise ReductionError(
                f"{what} is not expressible in the declared quotient coordinates"
            )
        return g


@dataclass(frozen=True)
class ReductionProblem:
    sqs: SymplecticQStructure
    action: InfinitesimalAction
    moment_map: MomentMap
    quotient: CotangentChart
    representatives: Mapping[str, GradedPolynomial]

    def __post_init__(self):
        if self.moment_map.cc != self.sqs.cc or self.action.chart != self.sqs.cc:
            raise ChartMismatchError("action, moment map, and structure must share a chart")
        for name, f in self.representatives.items():
            if f.chart != self.sqs.cc:
                raise ChartMismatchError(f"representative of {name!r} lives elsewhere")


@dataclass(frozen=True)
class ReducedStructure:
    structure: SymplecticQStructure
    reduced_field: Derivation
    ideal_generators: tuple[GradedPolynomial, ...]
    reports: tuple[CheckReport, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _full_rank_over_fractions(action: InfinitesimalAction) -> bool:
    """Freeness proxy: the coefficient matrix of the action fields has full
    row rank over the fraction field, decided through minors."""
    g = action.bialgebra.algebra
    rows = [action.field(name).images for name in g.names]
    k = len(rows)
    if k == 0:
        return True
    cols = len(action.chart)
    if k > cols:
        return False
    for combo in combinations(range(cols), k):
        det = _poly_det([[rows[i][j] for j in combo] for i in range(k)], action.chart)
        if not det.is_zero():
            return True
    return False


def _poly_det(m: list[list[GradedPolynomial]], chart: Chart) -> GradedPolynomial:
    if not m:
        return chart.one()
    if len(m) == 1:
        return m[0][0]
    total = chart.zero()
    for j, entry in enumerate(m[0]):
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = entry * _poly_det(minor, chart)
        total = total + (term if j % 2 == 0 else -term)
    return total


def reduce_problem(problem: ReductionProblem) -> ReducedStructure:
    """Zero-level reduction; verifies, in order: flatness, regularity and
    freeness, coisotropy, invariance of the ideal under the homological field,
    invariance and normalizer membership of the declared representatives, and
    the descended field being homological and Hamiltonian.
    """
    sqs, mm, action = problem.sqs, problem.moment_map, problem.action
    cc = sqs.cc
    b = mm.bialgebra
    if not b.is_flat():
        raise ReductionError("bialgebra is not flat: its differential has a constant part")
    generators = {name: mm.image(name) for name in b.algebra.names}
    normalizer = _IdealNormalizer(cc, generators)
    if not _full_rank_over_fractions(action):
        raise ReductionError("action fields are linearly dependent over the fraction field")
    reports = []
    q = sqs.q_field

    items = []
    for vi, vj in product(b.algebra.names, repeat=2):
        val = canonical_bracket(generators[vi], generators[vj], cc)
        ok = normalizer.in_ideal(val)
        items.append(CheckItem(f"{{mu*{vi}, mu*{vj}}} lies in the ideal", ok))
        if not ok:
            raise ReductionError(f"coisotropy fails on the pair ({vi}, {vj})")
    reports.append(CheckReport("coisotropy of the zero level", tuple(items)))

    items = []
    for v in b.algebra.names:
        ok = normalizer.in_ideal(q(generators[v]))
        items.append(CheckItem(f"Q(mu*{v}) lies in the ideal", ok))
        if not ok:
            raise ReductionError(f"the ideal is not preserved by the homological field at {v}")
    reports.append(CheckReport("homological field preserves the ideal", tuple(items)))

    items = []
    for name, f in problem.representatives.items():
        for v in b.algebra.names:
            ok = normalizer.in_ideal(action.field(v)(f))
            items.append(CheckItem(f"representative {name} is {v}-invariant", ok))
            if not ok:
                raise ReductionError(f"invariance fails for ({name}, {v})")
            ok = normalizer.in_ideal(canonical_bracket(f, generators[v], cc))
            items.append(CheckItem(f"representative {name} normalizes the ideal against {v}", ok))
            if not ok:
                raise ReductionError(f"normalizer membership fails for ({name}, {v})")
    reports.append(CheckReport("declared representatives", tuple(items)))

    descent = _QuotientDescent(normalizer, problem.quotient, problem.representatives)
    images = {}
    for c in problem.quotient.coordinates:
        f = problem.representatives[c.name]
        images[c.name] = descent.descend(normalizer.normal_form(q(f)), f"Q({c.name})")
    reduced_field = Derivation(problem.quotient, 1, images) if any(
        not img.is_zero() for img in images.values()
    ) else Derivation(problem.quotient, 1, {})

    items = []
    sq = commutator(reduced_field, reduced_field)
    items.append(CheckItem("descended field squares to zero", sq.is_zero()))
    if not sq.is_zero():
        raise ReductionError("descended field does not square to zero")
    try:
        hp_red = from_differential(reduced_field, problem.quotient)
        items.append(CheckItem("descended field is Hamiltonian", True))
    except (StructureError, DegreeError) as exc:
        items.append(CheckItem("descended field is Hamiltonian", False, str(exc)))
        raise ReductionError(f"descended field is not symplectic: {exc}")
    reports.append(CheckReport("descended structure", tuple(items)))

    reduced = SymplecticQStructure(problem.quotient, hp_red.pi)
    return ReducedStructure(
        reduced,
        reduced_field,
        tuple(generators[v] for v in b.algebra.names),
        tuple(reports),
    )


@dataclass(frozen=True)
class QuotientComparison:
    report: CheckReport
    reduced: ReducedStructure
    pushed: HomotopyPoissonStructure


def verify_quotient_theorem(
    hp: HomotopyPoissonStructure,
    action: InfinitesimalAction,
    quotient: CotangentChart,
    representatives: Mapping[str, GradedPolynomial],
) -> QuotientComparison:
    """Two roads to the quotient structure, which must agree exactly.

    Road one lifts the action, reduces, and reads off the Hamiltonian of the
    descended field.  Road two pushes the multivector itself through the
    declared quotient identification.  Also checks directly that brackets of
    invariant base representatives stay invariant.
    """
    b = action.bialgebra
    cc = hp.cc
    if action.chart != cc.base:
        raise ChartMismatchError("action must live on the base chart of the structure")
    items = []
    morphism_report = check_action_morphism(action, hp.pi, b)
    items.append(
        CheckItem(
            "action is a morphism of differential bracket algebras",
            morphism_report.passed,
            "; ".join(i.name for i in morphism_report.failures()),
        )
    )
    if not morphism_report.passed:
        raise ReductionError("the action is not compatible with the structure")

    lifted, mm = cotangent_lift(action, cc.n)
    sqs = SymplecticQStructure(cc, hp.pi)
    problem = ReductionProblem(sqs, lifted, mm, quotient, representatives)
    reduced = reduce_problem(problem)

    normalizer = _IdealNormalizer(cc, {v: mm.image(v) for v in b.algebra.names})
    descent = _QuotientDescent(normalizer, quotient, representatives)
    pushed_pi = descent.descend(normalizer.normal_form(hp.pi), "the multivector")
    pushed = HomotopyPoissonStructure(quotient, pushed_pi)

    agree = reduced.structure.hamiltonian == pushed.pi
    items.append(
        CheckItem(
            "reduction and direct projection give the same structure",
            agree,
            "" if agree else "the two quotient Hamiltonians differ",
        )
    )

    # brackets of invariant base representatives stay invariant
    base_reps = []
    for c in quotient.base.coordinates:
        f = representatives[c.name]
        try:
            base_reps.append(restrict_to_base(cc, f))
        except ValueError:
            continue
    invariant = True
    for f in base_reps:
        for v in b.algebra.names:
            if not action.field(v)(f).is_zero():
                invariant = False
    items.append(CheckItem("base representatives are invariant", invariant))
    closed = True
    for ell in range(hp.finite_type_bound + 1):
        for tup in combinations_with_replacement(base_reps, ell):
            val = derived_bracket(hp, list(tup), ell)
            for v in b.algebra.names:
                if not action.field(v)(val).is_zero():
                    closed = False
    items.append(
        CheckItem("multibrackets of invariant representatives stay invariant", closed)
    )
    report = CheckReport("quotient theorem", tuple(items))
    return QuotientComparison(report, reduced, pushed)
