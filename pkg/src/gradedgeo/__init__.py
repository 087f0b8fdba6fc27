"""Exact symbolic calculus for Z-graded polynomial supergeometry."""

from .algebra import (
    AlgebraMorphism,
    Chart,
    ChartMismatchError,
    Coordinate,
    DegreeError,
    DegreeOverflowError,
    Derivation,
    GradedPolynomial,
    biderivation_bracket,
    commutator,
    identity_morphism,
    make_chart,
    zero_derivation,
)
from .cotangent import (
    CotangentChart,
    build_cotangent,
    canonical_bracket,
    decompose,
    euler_vector_field,
    fiber_component,
    hamiltonian_vector_field,
    inject_base,
    is_base_function,
    restrict_to_base,
    schouten,
    vector_field_symbol,
)
from .poisson import (
    HomotopyPoissonStructure,
    MasterEquationResult,
    StructureError,
    check_component_identities,
    check_master_equation,
    classify,
    derived_bracket,
    differential,
    from_differential,
    is_related,
)
from .liealg import (
    CourantAlgebraData,
    GradedLieAlgebra,
    HomotopyLieBialgebra,
    MatchedPairData,
    check_bialgebra,
    check_dgla,
    check_graded_jacobi,
    courant_to_dgla,
    dgla_to_bialgebra,
    is_matched_pair,
    matched_pair_to_bialgebra,
    realize_shifted_dual,
    trivial_bialgebra,
    validate_courant_axioms,
)
from .reduction import (
    InfinitesimalAction,
    MomentMap,
    ReducedStructure,
    ReductionError,
    ReductionProblem,
    SymplecticQStructure,
    check_action_morphism,
    check_q_morphism_moment,
    cotangent_lift,
    reduce_problem,
    verify_quotient_theorem,
)
from .formats import Document, ParseError, parse_document, render_document, render_polynomial

__version__ = "0.1.0"
