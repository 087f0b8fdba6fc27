"""Execution of document tasks and report assembly."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .algebra import (
    ChartMismatchError,
    DegreeError,
    DegreeOverflowError,
    Derivation,
    GradedPolynomial,
    reset_degree_cap,
    set_degree_cap,
)
from .cotangent import CotangentChart, canonical_bracket, restrict_to_base
from .formats import (
    ActionDecl,
    BialgebraDecl,
    CotangentDecl,
    CourantDecl,
    Document,
    LetDecl,
    LieAlgebraDecl,
    MatchedPairDecl,
    MomentMapDecl,
    PoissonDecl,
    ReductionDecl,
    TaskDecl,
    render_polynomial,
)
from .liealg import (
    CourantAlgebraData,
    GradedLieAlgebra,
    HomotopyLieBialgebra,
    MatchedPairData,
    check_bialgebra,
    courant_to_dgla,
    matched_pair_to_bialgebra,
    realize_shifted_dual,
    trivial_bialgebra,
)
from .poisson import (
    HomotopyPoissonStructure,
    StructureError,
    check_master_equation,
    derived_bracket,
)
from .reduction import (
    InfinitesimalAction,
    MomentMap,
    ReductionError,
    ReductionProblem,
    SymplecticQStructure,
    cotangent_lift,
    reduce_problem,
    verify_quotient_theorem,
)
from .sampling import random_homogeneous


class DocumentError(ValueError):
    """A declaration cannot be realized as a domain object."""


@dataclass(frozen=True)
class TaskResult:
    task: str
    verdict: str  # pass | fail | error
    residual: str = ""
    details: str = ""
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.verdict == "pass"


def _linear_vec(expr: GradedPolynomial, names: tuple[str, ...]) -> dict[int, Fraction]:
    """Read a linear expression over a label chart as a coefficient vector."""
    out: dict[int, Fraction] = {}
    for factors, coeff in expr.terms.items():
        if len(factors) != 1 or factors[0][1] != 1:
            raise DocumentError(
                f"expression {render_polynomial(expr)!r} is not a linear combination"
            )
        out[factors[0][0]] = coeff
    return out


class _Builder:
    """Resolves declarations to domain objects, memoizing per document run."""

    def __init__(self, doc: Document):
        self.doc = doc
        self.decls = doc.declarations()
        self.cache: dict[str, object] = {}

    def decl(self, name: str, kind, what: str):
        d = self.decls.get(name)
        if d is None:
            raise DocumentError(f"undeclared name {name!r}")
        if not isinstance(d, kind):
            raise DocumentError(f"{name!r} is not {what}")
        return d

    def lie_algebra(self, name: str) -> GradedLieAlgebra:
        key = f"lie:{name}"
        if key not in self.cache:
            d = self.decl(name, LieAlgebraDecl, "a lie-algebra")
            index = {b: i for i, (b, _) in enumerate(d.basis)}
            constants = {}
            for left, right, expr in d.brackets:
                pair = (index[left], index[right])
                if pair in constants:
                    raise DocumentError(f"duplicate bracket [{left}, {right}] in {name!r}")
                constants[pair] = _linear_vec(expr, tuple(index))
            self.cache[key] = GradedLieAlgebra(list(d.basis), constants)
        return self.cache[key]  # type: ignore[return-value]

    def bialgebra(self, name: str, default_shift: Optional[int] = None) -> HomotopyLieBialgebra:
        key = f"bialg:{name}"
        if key not in self.cache:
            d = self.decls.get(name)
            if isinstance(d, LieAlgebraDecl):
                if default_shift is None:
                    raise DocumentError(
                        f"{name!r} is a plain lie-algebra; a shift degree is needed here"
                    )
                self.cache[key] = trivial_bialgebra(self.lie_algebra(name), default_shift)
            else:
                d = self.decl(name, BialgebraDecl, "a bialgebra")
                g = self.lie_algebra(d.algebra_name)
                dual = realize_shifted_dual(g, d.shift)
                images = {}
                for target, expr in d.images:
                    images[target] = GradedPolynomial(dual.chart, expr.terms)
                dhat = Derivation(dual.chart, 1, images)
                self.cache[key] = HomotopyLieBialgebra(dual, dhat)
        return self.cache[key]  # type: ignore[return-value]

    def poisson(self, name: str) -> HomotopyPoissonStructure:
        d = self.decl(name, PoissonDecl, "a homotopy-poisson structure")
        cc = self.decl(d.chart_name, CotangentDecl, "a cotangent chart").chart
        return HomotopyPoissonStructure(cc, d.pi)

    def polynomial(self, name: str) -> GradedPolynomial:
        d = self.decl(name, LetDecl, "a named polynomial")
        return d.value

    def action(self, name: str, bialgebra: HomotopyLieBialgebra) -> InfinitesimalAction:
        d = self.decl(name, ActionDecl, "an action")
        if isinstance(self.decls[d.chart_name], CotangentDecl):
            chart = self.decl(d.chart_name, CotangentDecl, "a chart").chart
        else:
            chart = self.decl(d.chart_name, object, "a chart").chart  # type: ignore[attr-defined]
        g = bialgebra.algebra
        rho = {}
        images_by_basis = dict(d.rho)
        for bname in g.names:
            images = dict(images_by_basis.get(bname, ()))
            rho[bname] = Derivation(chart, g.degree(bname), images)
        return InfinitesimalAction(bialgebra, chart, rho)

    def moment_map(self, name: str, bialgebra: HomotopyLieBialgebra) -> MomentMap:
        d = self.decl(name, MomentMapDecl, "a moment map")
        cc = self.decl(d.space_name, CotangentDecl, "a cotangent chart").chart
        return MomentMap(bialgebra, cc, dict(d.mu))

    def courant(self, name: str) -> CourantAlgebraData:
        d = self.decl(name, CourantDecl, "a courant declaration")
        g = self.lie_algebra(d.lie_name)
        aindex = {s: i for i, s in enumerate(d.space)}
        brackets = {}
        for left, right, expr in d.brackets:
            pair = (aindex[left], aindex[right])
            if pair in brackets:
                raise DocumentError(f"duplicate bracket [[{left}, {right}]] in {name!r}")
            brackets[pair] = _linear_vec(expr, d.space)
        anchor = [[Fraction(0)] * len(d.space) for _ in range(g.dim)]
        for src, expr in d.anchors:
            for gi, c in _linear_vec(expr, g.names).items():
                anchor[gi][aindex[src]] = c
        return CourantAlgebraData(
            g, d.space, brackets, tuple(tuple(row) for row in anchor)
        )

    def matched_pair(self, name: str) -> MatchedPairData:
        d = self.decl(name, MatchedPairDecl, "a matched-pair declaration")
        g = self.lie_algebra(d.g_name)
        hstar = self.lie_algebra(d.hstar_name)
        if not g.is_ordinary() or not hstar.is_ordinary():
            raise DocumentError("matched pairs need ordinary (degree-0) algebras")
        dg, dh = g.dim, hstar.dim
        act = [[[Fraction(0)] * dh for _ in range(dh)] for _ in range(dg)]
        for gb, hb, expr in d.act:
            i, a = g.index(gb), hstar.index(hb)
            for b, c in _linear_vec(expr, hstar.names).items():
                act[i][b][a] = c
        coact = [[[Fraction(0)] * dg for _ in range(dg)] for _ in range(dh)]
        for hb, gb, expr in d.coact:
            a, i = hstar.index(hb), g.index(gb)
            for j, c in _linear_vec(expr, g.names).items():
                coact[a][j][i] = c
        return MatchedPairData(
            g,
            hstar,
            tuple(tuple(tuple(r) for r in m) for m in act),
            tuple(tuple(tuple(r) for r in m) for m in coact),
        )

    def reduction_parts(self, name: str):
        d = self.decl(name, ReductionDecl, "a reduction declaration")
        hp = self.poisson(d.structure_name)
        b = self.bialgebra(d.bialgebra_name, default_shift=hp.n)
        action = self.action(d.action_name, b)
        quotient = self.decl(d.quotient_name, CotangentDecl, "a cotangent chart").chart
        reps = dict(d.representatives)
        mm = self.moment_map(d.moment_map_name, b) if d.moment_map_name else None
        return d, hp, b, action, quotient, reps, mm


def _beta2_symmetry_probes(hp: HomotopyPoissonStructure, seed: int, count: int = 3) -> int:
    """Seeded spot checks of the binary bracket's graded symmetry; returns the
    number of probes that ran (a failed probe raises)."""
    rng = random.Random(seed)
    base = hp.cc.base
    if len(base) == 0:
        return 0
    n = hp.n
    ran = 0
    for _ in range(count):
        f = random_homogeneous(base, rng, max_terms=2, max_len=2)
        g = random_homogeneous(base, rng, max_terms=2, max_len=2)
        if f.is_zero() or g.is_zero():
            continue
        sign = -1 if ((f.degree() + n) & 1) and ((g.degree() + n) & 1) else 1
        lhs = derived_bracket(hp, [f, g], 2)
        rhs = sign * derived_bracket(hp, [g, f], 2)
        if lhs != rhs:
            raise StructureError("randomized symmetry probe failed")
        ran += 1
    return ran


def run_task(builder: _Builder, task: TaskDecl, seed: Optional[int] = None) -> TaskResult:
    start = time.perf_counter()

    def done(verdict: str, residual: str = "", details: str = "") -> TaskResult:
        return TaskResult(
            task.label, verdict, residual, details,
            round((time.perf_counter() - start) * 1000, 3),
        )

    try:
        return _dispatch(builder, task, seed, done)
    except DegreeOverflowError as exc:
        return done("error", details=f"degree cap exceeded: {exc}")
    except (ReductionError, StructureError, DegreeError, ChartMismatchError) as exc:
        return done("fail", details=str(exc))
    except (DocumentError, ValueError, KeyError) as exc:
        return done("error", details=str(exc))


def _dispatch(builder: _Builder, task: TaskDecl, seed, done) -> TaskResult:
    verb, args = task.verb, task.args
    if verb == "CHECK-HP":
        if len(args) != 1:
            return done("error", details="CHECK-HP takes one structure name")
        hp = builder.poisson(str(args[0]))
        result = check_master_equation(hp.cc, hp.pi)
        details = ""
        if result.holds and seed is not None:
            probes = _beta2_symmetry_probes(hp, seed)
            details = f"randomized symmetry probes: {probes}"
        return done(
            "pass" if result.holds else "fail",
            residual=render_polynomial(result.residual),
            details=details,
        )
    if verb == "BRACKET":
        if len(args) != 2:
            return done("error", details="BRACKET takes two polynomial names")
        a = builder.polynomial(str(args[0]))
        b = builder.polynomial(str(args[1]))
        if not isinstance(a.chart, CotangentChart):
            return done("error", details="BRACKET operands must live on a cotangent chart")
        value = canonical_bracket(a, b, a.chart)
        return done("pass", residual=render_polynomial(value))
    if verb == "DERIVED":
        if len(args) < 2:
            return done("error", details="DERIVED takes a structure, an arity, and arguments")
        hp = builder.poisson(str(args[0]))
        if not isinstance(args[1], int):
            return done("error", details="the second DERIVED argument is the arity")
        ell = args[1]
        fs = [builder.polynomial(str(a)) for a in args[2:]]
        fs = [
            restrict_to_base(hp.cc, f) if isinstance(f.chart, CotangentChart) and f.chart == hp.cc else f
            for f in fs
        ]
        value = derived_bracket(hp, fs, ell)
        return done("pass", residual=render_polynomial(value))
    if verb == "CHECK-BIALG":
        if len(args) != 1:
            return done("error", details="CHECK-BIALG takes one bialgebra name")
        b = builder.bialgebra(str(args[0]))
        report = check_bialgebra(b)
        return done(
            "pass" if report.passed else "fail",
            details="; ".join(f"{i.name}: {i.detail}" for i in report.failures()),
        )
    if verb == "COURANT2DGLA":
        if len(args) != 1:
            return done("error", details="COURANT2DGLA takes one courant name")
        data = builder.courant(str(args[0]))
        out = courant_to_dgla(data)
        basis = ", ".join(
            f"{n}:{d}" for n, d in zip(out.gtilde.names, out.gtilde.degrees)
        )
        return done("pass", details=f"dgla basis {basis}")
    if verb == "MATCHED2BIALG":
        if len(args) != 1:
            return done("error", details="MATCHED2BIALG takes one matched-pair name")
        data = builder.matched_pair(str(args[0]))
        _, report = matched_pair_to_bialgebra(data)
        return done(
            "pass" if report.passed else "fail",
            details="; ".join(f"{i.name}: {i.detail}" for i in report.failures()),
        )
    if verb in ("REDUCE", "VERIFY-QUOTIENT"):
        if len(args) != 1:
            return done("error", details=f"{verb} takes one reduction name")
        d, hp, b, action, quotient, reps, mm = builder.reduction_parts(str(args[0]))
        if verb == "REDUCE":
            sqs = SymplecticQStructure(hp.cc, hp.pi)
            if mm is None:
                if action.chart != hp.cc.base:
                    return done("error", details="the action must live on the base chart")
                lifted, mm = cotangent_lift(action, hp.n)
            else:
                lifted = action
                if lifted.chart != hp.cc:
                    return done("error", details="with an explicit moment map the action must live on the cotangent chart")
            problem = ReductionProblem(sqs, lifted, mm, quotient, reps)
            red = reduce_problem(problem)
            return done(
                "pass",
                residual=render_polynomial(red.structure.hamiltonian),
                details="reduced Hamiltonian",
            )
        comparison = verify_quotient_theorem(hp, action, quotient, reps)
        return done(
            "pass" if comparison.report.passed else "fail",
            residual=render_polynomial(comparison.pushed.pi),
            details="; ".join(i.name for i in comparison.report.failures()),
        )
    return done("error", details=f"unhandled task verb {verb!r}")


def run_document(
    doc: Document,
    only: Optional[str] = None,
    seed: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> list[TaskResult]:
    builder = _Builder(doc)
    results = []
    for task in doc.tasks():
        if only is not None and only not in (task.label, str(task.args[0]) if task.args else ""):
            continue
        token = set_degree_cap(max_degree)
        try:
            results.append(run_task(builder, task, seed))
        finally:
            reset_degree_cap(token)
    return results
