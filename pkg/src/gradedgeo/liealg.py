"""Graded Lie algebras by structure constants, their shifted duals, and
homotopy Lie bialgebras.

The shifted dual of an algebra g at shift n is the polynomial chart with one
coordinate per basis element, of degree |e| + n, equipped with the
structure-constant (Lie-Poisson type) bracket of degree -n.  A homotopy Lie
bialgebra of degree n is a degree-1 differential on that chart which is a
derivation of the induced bracket.

Two constructions of degree-2 bialgebras are provided: differentials of
graded Lie algebras built from left-central Courant-type brackets, and
quadratic differentials built from a pair of Lie algebras acting on each
other (the matched-pair situation).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import linalg
from .algebra import (
    Chart,
    Coordinate,
    DegreeError,
    Derivation,
    GradedPolynomial,
    biderivation_bracket,
    commutator,
    make_chart,
)
from .poisson import StructureError
from .reporting import CheckItem, CheckReport

Vec = dict[int, Fraction]  # sparse coefficient vector over a basis


def _vec(items=()) -> Vec:
    out: Vec = {}
    for k, c in items:
        c = Fraction(c)
        if c:
            out[k] = out.get(k, Fraction(0)) + c
            if not out[k]:
                del out[k]
    return out


def _vec_add(a: Vec, b: Vec, scale: Fraction = Fraction(1)) -> Vec:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, Fraction(0)) + scale * c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class GradedLieAlgebra:
    """Finite basis with integer degrees and exact structure constants.

    ``constants`` maps ordered index pairs (i, j) to sparse vectors; pairs may
    be given in either order and are completed by graded antisymmetry
    [e_i, e_j] = -(-1)^(|e_i||e_j|) [e_j, e_i].  Degree compatibility and
    antisymmetry are enforced here; the Jacobi identity is checked separately.
    """

    def __init__(
        self,
        basis: Sequence[tuple[str, int]],
        constants: Mapping[tuple[int, int], Mapping[int, Fraction]] = (),
    ):
        self.names = tuple(n for n, _ in basis)
        self.degrees = tuple(d for _, d in basis)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        self._index = {n: i for i, n in enumerate(self.names)}
        table: dict[tuple[int, int], Vec] = {}
        constants = dict(constants)
        for (i, j), vec in constants.items():
            table[(i, j)] = _vec(vec.items())
        # complete by graded antisymmetry, verifying consistency
        for (i, j), vec in list(table.items()):
            sign = -1 if (self.degrees[i] & 1) and (self.degrees[j] & 1) else 1
            mirror = {k: -sign * c for k, c in vec.items()}
            if (j, i) in table:
                if table[(j, i)] != _vec(mirror.items()):
                    raise StructureError(
                        f"structure constants for ({self.names[i]}, {self.names[j]}) "
                        "violate graded antisymmetry"
                    )
            else:
                table[(j, i)] = _vec(mirror.items())
        # diagonal entries of odd degree are symmetric and unconstrained;
        # even diagonals must vanish by antisymmetry
        for i in range(len(self.names)):
            vec = table.get((i, i), {})
            if not (self.degrees[i] & 1) and vec:
                raise StructureError(
                    f"[{self.names[i]}, {self.names[i]}] must vanish for an even element"
                )
        for (i, j), vec in table.items():
            want = self.degrees[i] + self.degrees[j]
            for k, c in vec.items():
                if self.degrees[k] != want:
                    raise DegreeError(
                        f"[{self.names[i]}, {self.names[j]}] has a component on "
                        f"{self.names[k]} of wrong degree"
                    )
        self.table = {k: v for k, v in table.items() if v}

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def degree(self, name: str) -> int:
        return self.degrees[self._index[name]]

    def bracket_basis(self, i: int, j: int) -> Vec:
        return dict(self.table.get((i, j), {}))

    def bracket(self, v: Vec, w: Vec) -> Vec:
        out: Vec = {}
        for i, a in v.items():
            for j, b in w.items():
                out = _vec_add(out, self.bracket_basis(i, j), a * b)
        return out

    def is_ordinary(self) -> bool:
        return all(d == 0 for d in self.degrees)

    def __eq__(self, other):
        return (
            isinstance(other, GradedLieAlgebra)
            and self.names == other.names
            and self.degrees == other.degrees
            and self.table == other.table
        )

    def __repr__(self):
        return f"<GradedLieAlgebra dim {self.dim}: {', '.join(self.names)}>"


@dataclass(frozen=True)
class JacobiReport:
    holds: bool
    worst_triple: Optional[tuple[str, str, str]] = None
    residual: Optional[Vec] = None


def check_graded_jacobi(g: GradedLieAlgebra) -> JacobiReport:
    """Exhaustive graded Jacobi over basis triples.

    J(i,j,k) = [e_i,[e_j,e_k]] - [[e_i,e_j],e_k] - (-1)^(|e_i||e_j|) [e_j,[e_i,e_k]].
    """
    for i in range(g.dim):
        for j in range(g.dim):
            sign = -1 if (g.degrees[i] & 1) and (g.degrees[j] & 1) else 1
            for k in range(g.dim):
                term1 = g.bracket({i: Fraction(1)}, g.bracket_basis(j, k))
                term2 = g.bracket(g.bracket_basis(i, j), {k: Fraction(1)})
                term3 = g.bracket({j: Fraction(1)}, g.bracket_basis(i, k))
                residual = _vec_add(_vec_add(term1, term2, Fraction(-1)), term3, Fraction(-sign))
                if residual:
                    return JacobiReport(False, (g.names[i], g.names[j], g.names[k]), residual)
    return JacobiReport(True)


@dataclass(frozen=True)
class ShiftedDual:
    """Chart of the shifted dual plus its structure-constant bracket."""

    algebra: GradedLieAlgebra
    n: int
    chart: Chart
    gens: tuple[Derivation, ...]

    def bracket(self, a: GradedPolynomial, b: GradedPolynomial) -> GradedPolynomial:
        return biderivation_bracket(self.chart, self.n, self.gens, a, b)

    def coordinate(self, basis_name: str) -> GradedPolynomial:
        return self.chart.var(basis_name)

    def from_vec(self, v: Vec) -> GradedPolynomial:
        out = self.chart.zero()
        for k, c in v.items():
            out = out + c * self.chart.var(self.algebra.names[k])
        return out


def realize_shifted_dual(g: GradedLieAlgebra, n: int) -> ShiftedDual:
    """Coordinates of degree |e_i| + n carrying the degree -n bracket
    {e_i, e_j} = sum_k c^k_ij e_k of the structure constants."""
    chart = make_chart([(name, deg + n) for name, deg in zip(g.names, g.degrees)])
    gens = []
    for i, name in enumerate(g.names):
        images = {}
        for j, other in enumerate(g.names):
            vec = g.bracket_basis(i, j)
            if vec:
                img = chart.zero()
                for k, c in vec.items():
                    img = img + c * chart.var(g.names[k])
                images[other] = img
        gens.append(Derivation(chart, chart.degree_of(i) - n, images))
    return ShiftedDual(g, n, chart, tuple(gens))


@dataclass(frozen=True)
class HomotopyLieBialgebra:
    """A graded Lie algebra with a degree-1 differential on its shifted dual."""

    dual: ShiftedDual
    dhat: Derivation

    def __post_init__(self):
        if self.dhat.chart != self.dual.chart:
            raise DegreeError("differential does not live on the shifted-dual chart")
        if self.dhat.deg != 1 and not self.dhat.is_zero():
            raise DegreeError("differential must have degree 1")

    @property
    def algebra(self) -> GradedLieAlgebra:
        return self.dual.algebra

    @property
    def n(self) -> int:
        return self.dual.n

    def is_flat(self) -> bool:
        """Flat means no image of the differential has a constant term."""
        return all(not img.constant_term() for img in self.dhat.images)


def trivial_bialgebra(g: GradedLieAlgebra, n: int) -> HomotopyLieBialgebra:
    dual = realize_shifted_dual(g, n)
    return HomotopyLieBialgebra(dual, Derivation(dual.chart, 1, {}))


def check_bialgebra(b: HomotopyLieBialgebra) -> CheckReport:
    """Degree, square-zero, and bracket-derivation checks for the differential.

    The derivation identity is tested on all coordinate pairs, which suffices
    since the defect is a biderivation.
    """
    items = []
    items.append(
        CheckItem(
            "differential has degree 1",
            b.dhat.deg == 1 or b.dhat.is_zero(),
            f"degree is {b.dhat.deg}",
        )
    )
    sq = commutator(b.dhat, b.dhat)
    bad_sq = [
        c.name for c, img in zip(b.dual.chart.coordinates, sq.images) if not img.is_zero()
    ]
    items.append(
        CheckItem(
            "differential squares to zero",
            not bad_sq,
            f"nonzero on {bad_sq}" if bad_sq else "",
        )
    )
    chart, n = b.dual.chart, b.n
    bad_pairs = []
    for c1 in chart.coordinates:
        w1 = chart.var(c1.name)
        s = -1 if ((c1.degree + n) & 1) else 1
        for c2 in chart.coordinates:
            w2 = chart.var(c2.name)
            lhs = b.dhat(b.dual.bracket(w1, w2))
            rhs = b.dual.bracket(b.dhat(w1), w2) + s * b.dual.bracket(w1, b.dhat(w2))
            if lhs != rhs:
                bad_pairs.append((c1.name, c2.name))
    items.append(
        CheckItem(
            "differential is a derivation of the induced bracket",
            not bad_pairs,
            f"failing pairs: {bad_pairs}" if bad_pairs else "",
        )
    )
    return CheckReport("bialgebra", tuple(items))


# -- differentials given by a linear map on the algebra ----------------------


def check_dgla(g: GradedLieAlgebra, dmap: Mapping[str, Mapping[str, Fraction]]) -> CheckReport:
    """Is (g, d) a differential graded Lie algebra?

    ``dmap[src][dst]`` is the dst-coefficient of d(src); omitted entries are
    zero.  Checks degree +1, exhaustive Jacobi, d^2 = 0, and the derivation
    rule d[x,y] = [dx,y] + (-1)^|x| [x,dy] on basis pairs.
    """
    items = []
    dvec: list[Vec] = []
    degree_ok = True
    for i, name in enumerate(g.names):
        v = _vec((g.index(t), c) for t, c in dmap.get(name, {}).items())
        dvec.append(v)
        for k in v:
            if g.degrees[k] != g.degrees[i] + 1:
                degree_ok = False
    items.append(CheckItem("differential has degree 1", degree_ok))
    jac = check_graded_jacobi(g)
    items.append(
        CheckItem(
            "graded Jacobi identity",
            jac.holds,
            f"fails on {jac.worst_triple}" if not jac.holds else "",
        )
    )

    def apply_d(v: Vec) -> Vec:
        out: Vec = {}
        for k, c in v.items():
            out = _vec_add(out, dvec[k], c)
        return out

    bad_sq = [g.names[i] for i in range(g.dim) if apply_d(dvec[i])]
    items.append(CheckItem("differential squares to zero", not bad_sq, f"nonzero on {bad_sq}" if bad_sq else ""))
    bad_pairs = []
    for i in range(g.dim):
        si = -1 if g.degrees[i] & 1 else 1
        for j in range(g.dim):
            lhs = apply_d(g.bracket_basis(i, j))
            rhs = _vec_add(
                g.bracket(dvec[i], {j: Fraction(1)}),
                g.bracket({i: Fraction(1)}, dvec[j]),
                Fraction(si),
            )
            if lhs != _vec(rhs.items()):
                bad_pairs.append((g.names[i], g.names[j]))
    items.append(
        CheckItem(
            "differential is a bracket derivation",
            not bad_pairs,
            f"failing pairs: {bad_pairs}" if bad_pairs else "",
        )
    )
    return CheckReport("dgla", tuple(items))


def dgla_to_bialgebra(
    g: GradedLieAlgebra, dmap: Mapping[str, Mapping[str, Fraction]], n: int
) -> HomotopyLieBialgebra:
    """Linear extension of a DGLA differential to the shifted dual; works for
    every shift degree n."""
    dual = realize_shifted_dual(g, n)
    images = {}
    for name, row in dmap.items():
        img = dual.chart.zero()
        for target, coeff in row.items():
            img = img + Fraction(coeff) * dual.chart.var(target)
        images[name] = img
    return HomotopyLieBialgebra(dual, Derivation(dual.chart, 1, images))


# -- left-central Courant-type brackets --------------------------------------


@dataclass(frozen=True)
class CourantAlgebraData:
    """A bilinear bracket on a vector space with an anchor onto a Lie algebra.

    ``g``: ordinary Lie algebra; ``a_basis``: names of the bracketed space;
    ``bracket[(i, j)]``: coefficients of [[a_i, a_j]] in the a-basis (no
    symmetry assumed); ``anchor``: (dim g) x (dim a) matrix of the map a -> g.
    """

    g: GradedLieAlgebra
    a_basis: tuple[str, ...]
    bracket: Mapping[tuple[int, int], Mapping[int, Fraction]]
    anchor: tuple[tuple[Fraction, ...], ...]

    @property
    def dim_a(self) -> int:
        return len(self.a_basis)

    def br(self, v: Vec, w: Vec) -> Vec:
        out: Vec = {}
        for i, a in v.items():
            for j, b in w.items():
                row = self.bracket.get((i, j), {})
                out = _vec_add(out, _vec((k, c) for k, c in row.items()), a * b)
        return out

    def anchor_of(self, v: Vec) -> Vec:
        out: Vec = {}
        for j, c in v.items():
            for i in range(self.g.dim):
                x = self.anchor[i][j] * c
                if x:
                    out = _vec_add(out, {i: x})
        return out


def _fmt_vec(names: Sequence[str], v: Vec) -> str:
    if not v:
        return "0"
    parts = []
    for k in sorted(v):
        c = v[k]
        parts.append(f"{c}*{names[k]}" if c != 1 else names[k])
    return " + ".join(parts)


@dataclass(frozen=True)
class CourantDGLA:
    gtilde: GradedLieAlgebra
    differential: dict[str, dict[str, Fraction]]
    kernel_vectors: tuple[Vec, ...]
    lifts: tuple[Vec, ...]
    report: CheckReport


def validate_courant_axioms(data: CourantAlgebraData) -> CheckReport:
    """Loday identity, anchor homomorphism, and left-centrality of the kernel."""
    items = []
    jac = check_graded_jacobi(data.g)
    items.append(
        CheckItem("base algebra satisfies Jacobi", jac.holds, f"fails on {jac.worst_triple}" if not jac.holds else "")
    )
    dim = data.dim_a
    bad = None
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                e = lambda t: {t: Fraction(1)}
                lhs = data.br(e(i), data.br(e(j), e(k)))
                rhs = _vec_add(data.br(data.br(e(i), e(j)), e(k)), data.br(e(j), data.br(e(i), e(k))))
                if lhs != rhs:
                    bad = (data.a_basis[i], data.a_basis[j], data.a_basis[k])
                    break
            if bad:
                break
        if bad:
            break
    items.append(CheckItem("bracket satisfies the Loday identity", bad is None, f"fails on {bad}" if bad else ""))
    bad = None
    for i in range(dim):
        for j in range(dim):
            lhs = data.anchor_of(data.br({i: Fraction(1)}, {j: Fraction(1)}))
            rhs = data.g.bracket(data.anchor_of({i: Fraction(1)}), data.anchor_of({j: Fraction(1)}))
            if lhs != rhs:
                bad = (data.a_basis[i], data.a_basis[j])
                break
        if bad:
            break
    items.append(CheckItem("anchor is a bracket homomorphism", bad is None, f"fails on {bad}" if bad else ""))
    kernel = linalg.kernel_basis([list(row) for row in data.anchor], data.dim_a)
    witness = None
    for kv in kernel:
        h = _vec(enumerate(kv))
        for j in range(dim):
            if data.br(h, {j: Fraction(1)}):
                witness = (_fmt_vec(data.a_basis, h), data.a_basis[j])
                break
        if witness:
            break
    items.append(
        CheckItem(
            "kernel elements bracket to zero from the left",
            witness is None,
            f"witness pair ({witness[0]}, {witness[1]})" if witness else "",
        )
    )
    items.append(
        CheckItem(
            "anchor is surjective",
            linalg.rank([list(row) for row in data.anchor]) == data.g.dim,
        )
    )
    return CheckReport("courant axioms", tuple(items))


def courant_to_dgla(
    data: CourantAlgebraData, lifts: Optional[Sequence[Vec]] = None
) -> CourantDGLA:
    """Build the graded Lie algebra ker[2] + a[1] + g with its differential.

    The bracket of (h1,a1,g1) and (h2,a2,g2) is

        ( [[b1,h2]] + [[a1,a2]] + [[a2,a1]] - [[b2,h1]],
          [[b1,a2]] - [[b2,a1]],
          [g1,g2] )

    with b_i any anchor preimage of g_i; left-centrality makes the choice
    immaterial.  The differential is kernel inclusion followed by the anchor.
    Raises StructureError when the axioms or left-centrality fail.
    """
    axioms = validate_courant_axioms(data)
    if not axioms.passed:
        raise StructureError("; ".join(f"{i.name}: {i.detail}" for i in axioms.failures()))
    anchor_rows = [list(row) for row in data.anchor]
    kernel = tuple(_vec(enumerate(kv)) for kv in linalg.kernel_basis(anchor_rows, data.dim_a))
    if lifts is None:
        lifts = []
        for i in range(data.g.dim):
            rhs = [Fraction(1) if r == i else Fraction(0) for r in range(data.g.dim)]
            sol = linalg.solve(anchor_rows, rhs)
            if sol is None:
                raise StructureError("anchor is not surjective")
            lifts.append(_vec(enumerate(sol)))
    else:
        lifts = list(lifts)
        for i, b in enumerate(lifts):
            if data.anchor_of(b) != {i: Fraction(1)}:
                raise StructureError(f"lift of {data.g.names[i]} has the wrong anchor image")
    # matrix whose columns are the kernel vectors, to solve for h-coordinates
    kmat = [[kv.get(r, Fraction(0)) for kv in kernel] for r in range(data.dim_a)]

    def h_coords(v: Vec) -> Vec:
        sol = linalg.solve(kmat, [v.get(r, Fraction(0)) for r in range(data.dim_a)])
        if sol is None:
            raise StructureError("bracket value left the kernel; left-centrality is broken")
        return _vec(enumerate(sol))

    nh, na, ng = len(kernel), data.dim_a, data.g.dim
    names = (
        [f"h{i}" for i in range(nh)]
        + [f"a_{n}" for n in data.a_basis]
        + [f"g_{n}" for n in data.g.names]
    )
    degrees = [-2] * nh + [-1] * na + [0] * ng
    A = lambda i: nh + i
    G = lambda i: nh + na + i

    def shift(v: Vec, off: int) -> Vec:
        return {k + off: c for k, c in v.items()}

    constants: dict[tuple[int, int], Vec] = {}

    def put(i: int, j: int, v: Vec) -> None:
        if v:
            constants[(i, j)] = v

    for i in range(ng):
        for j in range(ng):
            put(G(i), G(j), shift(data.g.bracket_basis(i, j), nh + na))
    for i in range(ng):
        for j in range(na):
            put(G(i), A(j), shift(data.br(lifts[i], {j: Fraction(1)}), nh))
            put(A(j), G(i), shift({k: -c for k, c in data.br(lifts[i], {j: Fraction(1)}).items()}, nh))
    for i in range(na):
        for j in range(na):
            sym = _vec_add(data.br({i: Fraction(1)}, {j: Fraction(1)}), data.br({j: Fraction(1)}, {i: Fraction(1)}))
            put(A(i), A(j), h_coords(sym))
    for i in range(ng):
        for al in range(nh):
            v = h_coords(data.br(lifts[i], kernel[al]))
            put(G(i), al, v)
            put(al, G(i), {k: -c for k, c in v.items()})
    gtilde = GradedLieAlgebra(list(zip(names, degrees)), constants)
    jac = check_graded_jacobi(gtilde)
    if not jac.holds:
        raise StructureError(f"constructed algebra fails Jacobi on {jac.worst_triple}")
    differential: dict[str, dict[str, Fraction]] = {}
    for al, kv in enumerate(kernel):
        differential[names[al]] = {names[A(j)]: c for j, c in kv.items()}
    for j in range(na):
        img = data.anchor_of({j: Fraction(1)})
        if img:
            differential[names[A(j)]] = {names[G(i)]: c for i, c in img.items()}
    report = check_dgla(gtilde, differential)
    if not report.passed:
        raise StructureError(report.summary())
    return CourantDGLA(gtilde, differential, kernel, tuple(lifts), report)


# -- matched pairs of Lie algebras -------------------------------------------


@dataclass(frozen=True)
class MatchedPairData:
    """Two ordinary Lie algebras with mutual action data.

    ``act[i][b][a]``: coefficient of h_b in e_i . h_a (the g-action on the
    vector space h, whose dual carries the Lie structure ``hstar``).
    ``coact[a][j][i]``: coefficient of gstar_j in eps_a . gstar_i (the
    hstar-action on the dual of g).  Basis labels of h are those of hstar.
    """

    g: GradedLieAlgebra
    hstar: GradedLieAlgebra
    act: tuple  # dim_g matrices, each dim_h x dim_h
    coact: tuple  # dim_h matrices, each dim_g x dim_g

    def __post_init__(self):
        if not self.g.is_ordinary() or not self.hstar.is_ordinary():
            raise DegreeError("matched pairs are built from ordinary Lie algebras")


def action_algebra(data: MatchedPairData) -> GradedLieAlgebra:
    """The graded Lie algebra h[1] + g encoding the g-action on h."""
    dh, dg = data.hstar.dim, data.g.dim
    names = [f"h_{n}" for n in data.hstar.names] + [f"g_{n}" for n in data.g.names]
    degrees = [-1] * dh + [0] * dg
    constants: dict[tuple[int, int], Vec] = {}
    for i in range(dg):
        for j in range(dg):
            vec = data.g.bracket_basis(i, j)
            if vec:
                constants[(dh + i, dh + j)] = {dh + k: c for k, c in vec.items()}
    for i in range(dg):
        for a in range(dh):
            col = _vec((b, data.act[i][b][a]) for b in range(dh))
            if col:
                constants[(dh + i, a)] = col
                constants[(a, dh + i)] = {k: -c for k, c in col.items()}
    return GradedLieAlgebra(list(zip(names, degrees)), constants)


def matched_pair_to_bialgebra(
    data: MatchedPairData,
) -> tuple[HomotopyLieBialgebra, CheckReport]:
    """Quadratic degree-2 bialgebra candidate from the dual Lie structure.

    The candidate passes check_bialgebra exactly when the mutual actions form
    a matched pair.  Raises StructureError when the g-action on h is not an
    action (the graded Jacobi precondition).
    """
    gt = action_algebra(data)
    jac = check_graded_jacobi(gt)
    if not jac.holds:
        raise StructureError(f"the action data fails Jacobi on {jac.worst_triple}")
    dual = realize_shifted_dual(gt, 2)
    chart = dual.chart
    dh, dg = data.hstar.dim, data.g.dim
    hvar = [chart.var(f"h_{n}") for n in data.hstar.names]
    gvar = [chart.var(f"g_{n}") for n in data.g.names]
    images: dict[str, GradedPolynomial] = {}
    for c in range(dh):
        img = chart.zero()
        for a in range(dh):
            for b in range(a + 1, dh):
                coeff = data.hstar.bracket_basis(a, b).get(c, Fraction(0))
                if coeff:
                    img = img - coeff * (hvar[a] * hvar[b])
        images[f"h_{data.hstar.names[c]}"] = img
    for j in range(dg):
        img = chart.zero()
        for a in range(dh):
            for i in range(dg):
                coeff = Fraction(data.coact[a][j][i])
                if coeff:
                    img = img - coeff * (hvar[a] * gvar[i])
        images[f"g_{data.g.names[j]}"] = img
    bialg = HomotopyLieBialgebra(dual, Derivation(chart, 1, images))
    return bialg, check_bialgebra(bialg)


def is_matched_pair(data: MatchedPairData) -> bool:
    return matched_pair_to_bialgebra(data)[1].passed
