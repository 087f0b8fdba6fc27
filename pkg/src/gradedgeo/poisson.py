"""Homotopy Poisson structures on a shift-n cotangent chart.

A structure is a homogeneous element pi of total degree n+1 whose canonical
self-bracket vanishes (the master equation).  Its multibrackets are realized
purely through the derived-bracket formula

    beta_l(f_1, ..., f_l) = {...{{pi_l, f_1}, f_2}, ..., f_l}

on base functions, where pi_l is the momentum-word-length-l component, so
every sign is inherited from the canonical bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .algebra import (
    AlgebraMorphism,
    Chart,
    ChartMismatchError,
    DegreeError,
    Derivation,
    GradedPolynomial,
    commutator,
)
from .cotangent import (
    CotangentChart,
    canonical_bracket,
    decompose,
    euler_vector_field,
    fiber_component,
    hamiltonian_vector_field,
    inject_base,
    is_base_function,
    max_fiber_weight,
    restrict_to_base,
    vector_field_symbol,
)


class StructureError(ValueError):
    """An algebraic structure violates one of its defining identities."""


@dataclass(frozen=True)
class HomotopyPoissonStructure:
    """A degree n+1 multivector pi on T*[n]M; validity is checked separately."""

    cc: CotangentChart
    pi: GradedPolynomial

    def __post_init__(self):
        if not isinstance(self.cc, CotangentChart):
            raise ChartMismatchError("structure needs a cotangent chart")
        if self.pi.chart != self.cc:
            raise ChartMismatchError("pi does not live on the given chart")
        if not self.pi.is_homogeneous_of_degree(self.cc.n + 1):
            raise DegreeError(
                f"pi must be homogeneous of total degree {self.cc.n + 1}"
            )

    @property
    def n(self) -> int:
        return self.cc.n

    @property
    def finite_type_bound(self) -> int:
        return max_fiber_weight(self.pi)

    def component(self, ell: int) -> GradedPolynomial:
        return fiber_component(self.pi, ell)


@dataclass(frozen=True)
class MasterEquationResult:
    holds: bool
    residual: GradedPolynomial


def check_master_equation(cc: CotangentChart, pi: GradedPolynomial) -> MasterEquationResult:
    """residual = {pi, pi}; the structure is valid iff it vanishes."""
    hp = HomotopyPoissonStructure(cc, pi)  # validates degree and chart
    residual = canonical_bracket(hp.pi, hp.pi, cc)
    return MasterEquationResult(residual.is_zero(), residual)


def derived_bracket(
    hp: HomotopyPoissonStructure, args: list[GradedPolynomial], ell: int
) -> GradedPolynomial:
    """beta_ell on base functions, returned on the base chart.

    Degree law (homogeneous inputs): 1 + (1-ell)n + sum |f_i|.
    """
    if ell < 0:
        raise ValueError("bracket arity must be nonnegative")
    if len(args) != ell:
        raise ValueError(f"expected {ell} arguments, got {len(args)}")
    cc = hp.cc
    acc = hp.component(ell)
    for f in args:
        if f.chart == cc.base:
            f = inject_base(cc, f)
        if f.chart != cc:
            raise ChartMismatchError("argument does not live on the structure's chart")
        if not is_base_function(cc, f):
            raise ValueError("derived-bracket arguments must be free of momenta")
        acc = canonical_bracket(acc, f, cc)
    return restrict_to_base(cc, acc)


def differential(hp: HomotopyPoissonStructure) -> Derivation:
    """d = {pi, .}, a degree-1 derivation; d^2 = 0 iff the master equation holds."""
    return hamiltonian_vector_field(hp.pi, hp.cc)


def is_bracket_derivation(delta: Derivation, cc: CotangentChart) -> list[tuple[str, str]]:
    """Coordinate pairs where delta fails to be a derivation of the bracket.

    Checking generator pairs suffices: the defect is a biderivation.
    """
    bad = []
    sdeg = delta.deg & 1
    for c1 in cc.coordinates:
        w1 = cc.var(c1.name)
        s = -1 if (sdeg and ((c1.degree + cc.n) & 1)) else 1
        for c2 in cc.coordinates:
            w2 = cc.var(c2.name)
            lhs = delta(canonical_bracket(w1, w2, cc))
            rhs = canonical_bracket(delta(w1), w2, cc) + s * canonical_bracket(
                w1, delta(w2), cc
            )
            if lhs != rhs:
                bad.append((c1.name, c2.name))
    return bad


def from_differential(delta: Derivation, cc: CotangentChart | None = None) -> HomotopyPoissonStructure:
    """Invert d = {pi, .}: rebuild pi from a symplectic homological vector field.

    Preconditions, each verified and reported separately: delta has degree 1,
    squares to zero, and is a derivation of the canonical bracket.  The
    word-length l >= 1 parts are integrated with the fiber Euler identity and
    the l = 0 part is -1/(n+1) times the fiber-constant part of delta applied
    to the base Euler field (written as the fiber-linear function
    sum_j |x_j| x_j p_j); for n = 1 this is the familiar -1/2 factor.
    """
    if cc is None:
        cc = delta.chart  # type: ignore[assignment]
    if not isinstance(cc, CotangentChart):
        raise ChartMismatchError("needs a cotangent chart")
    if delta.chart != cc:
        raise ChartMismatchError("derivation does not live on the given chart")
    if delta.deg != 1 and not delta.is_zero():
        raise DegreeError(f"differential must have degree 1, got {delta.deg}")
    if not commutator(delta, delta).is_zero():
        raise StructureError("differential does not square to zero")
    bad = is_bracket_derivation(delta, cc)
    if bad:
        raise StructureError(
            f"differential is not a bracket derivation; failing pairs: {bad}"
        )
    n = cc.n
    pi = cc.zero()
    # word-length >= 1 components from images of base coordinates
    for bidx, c in enumerate(cc.base.coordinates):
        img = delta.images[bidx]
        if img.is_zero():
            continue
        if (n & 1) == 0:
            s = 1
        else:
            s = 1 if (c.degree & 1) else -1
        p = cc.var(cc.coordinates[cc.momentum_index(bidx)].name)
        for ell_minus_1, comp in decompose(img):
            pi = pi + Fraction(s, ell_minus_1 + 1) * (p * comp)
    # constant (0-ary) component via the base Euler field
    euler_sym = cc.zero()
    for bidx, c in enumerate(cc.base.coordinates):
        if c.degree:
            p = cc.var(cc.coordinates[cc.momentum_index(bidx)].name)
            euler_sym = euler_sym + c.degree * (cc.var(c.name) * p)
    pi0 = fiber_component(delta(euler_sym), 0)
    pi = pi + Fraction(-1, n + 1) * pi0
    hp = HomotopyPoissonStructure(cc, pi)
    # the reconstruction must invert the Hamiltonian map exactly
    if differential(hp) != delta:
        raise StructureError("reconstructed multivector does not regenerate the differential")
    return hp


def is_related(
    pullback: AlgebraMorphism,
    hp: HomotopyPoissonStructure,
    hp_target: HomotopyPoissonStructure,
) -> bool:
    """Does the morphism intertwine the bracket families?

    ``pullback`` maps functions on the target base chart (of ``hp_target``)
    to functions on the base chart of ``hp``.  Checking all coordinate tuples
    suffices because every bracket is a derivation in each slot.
    """
    if pullback.source != hp_target.cc.base or pullback.target != hp.cc.base:
        raise ChartMismatchError("morphism does not match the structures' base charts")
    if hp.n != hp_target.n:
        raise DegreeError("structures have different shift degrees")
    bound = max(hp.finite_type_bound, hp_target.finite_type_bound)
    coords = [hp_target.cc.base.var(c.name) for c in hp_target.cc.base.coordinates]
    for ell in range(bound + 1):
        for tup in product(coords, repeat=ell):
            lhs = pullback(derived_bracket(hp_target, list(tup), ell))
            rhs = derived_bracket(hp, [pullback(g) for g in tup], ell)
            if lhs != rhs:
                return False
    return True


CLASS_LABELS = ("zero", "Q", "Poisson", "QP", "flat-general", "curved-general")


def classify(hp: HomotopyPoissonStructure) -> str:
    """Structural label; requires the master equation."""
    result = check_master_equation(hp.cc, hp.pi)
    if not result.holds:
        raise StructureError("master equation fails; structure cannot be classified")
    support = {ell for ell, comp in decompose(hp.pi) if not comp.is_zero()}
    if not support:
        return "zero"
    if 0 in support:
        return "curved-general"
    if support == {1}:
        return "Q"
    if support == {2}:
        return "Poisson"
    if support == {1, 2}:
        return "QP"
    return "flat-general"


@dataclass(frozen=True)
class ComponentIdentity:
    name: str
    residual: GradedPolynomial

    @property
    def holds(self) -> bool:
        return self.residual.is_zero()


def check_component_identities(hp: HomotopyPoissonStructure) -> list[ComponentIdentity]:
    """For pi with components l <= 2, the four classical pieces of {pi, pi}.

    Returned residuals are the fiber-weight 0..3 components: invariance of
    the 0-ary part, the square of the vector part against the Hamiltonian
    field of the 0-ary part, Poisson invariance of the bivector under the
    vector part, and the bivector's own Jacobi defect.
    """
    cc = hp.cc
    if hp.finite_type_bound > 2:
        raise ValueError("identities are defined for components of word length <= 2 only")
    p0, p1, p2 = (hp.component(i) for i in range(3))

    def br(a, b):
        return canonical_bracket(a, b, cc)

    return [
        ComponentIdentity("zero-ary part invariant under vector part", br(p0, p1) + br(p1, p0)),
        ComponentIdentity(
            "vector part squares to Hamiltonian field of zero-ary part",
            br(p1, p1) + br(p0, p2) + br(p2, p0),
        ),
        ComponentIdentity("bivector invariant under vector part", br(p1, p2) + br(p2, p1)),
        ComponentIdentity("bivector satisfies Jacobi", br(p2, p2)),
    ]
