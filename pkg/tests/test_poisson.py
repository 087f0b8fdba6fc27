import random
from fractions import Fraction
from itertools import product

import pytest

from gradedgeo.algebra import AlgebraMorphism, DegreeError, Derivation, commutator, make_chart
from gradedgeo.cotangent import (
    build_cotangent,
    canonical_bracket,
    decompose,
    euler_vector_field,
    fiber_component,
    hamiltonian_vector_field,
    restrict_to_base,
    vector_field_symbol,
)
from gradedgeo.poisson import (
    HomotopyPoissonStructure,
    StructureError,
    check_component_identities,
    check_master_equation,
    classify,
    derived_bracket,
    differential,
    from_differential,
    is_related,
)

from helpers import random_nonzero_homogeneous, random_valid_structure
from oracles import jacobiator_vanishes


def so3_structure():
    cc = build_cotangent(make_chart([("x", 0), ("y", 0), ("z", 0)]), 1)
    x, y, z = cc.var("x"), cc.var("y"), cc.var("z")
    px, py, pz = cc.var("p_x"), cc.var("p_y"), cc.var("p_z")
    pi = x * py * pz + y * pz * px + z * px * py
    return cc, pi


def linear_bivector(cc, coeffs):
    """pi = sum_{i<j} pi^{ij} p_i p_j with pi^{ij} = sum_k coeffs[i][j][k] x_k."""
    dim = cc.base_size
    pi = cc.zero()
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(dim):
                c = coeffs[i][j][k]
                if c:
                    pi = pi + c * (
                        cc.var(cc.coordinates[k].name)
                        * cc.var(cc.coordinates[cc.momentum_index(i)].name)
                        * cc.var(cc.coordinates[cc.momentum_index(j)].name)
                    )
    return pi


def antisymmetrize(coeffs, dim):
    full = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                full[i][j][k] = coeffs[i][j][k] - coeffs[j][i][k]
    return full


def test_master_equation_zero_structure():
    cc = build_cotangent(make_chart([("x", 0)]), 1)
    result = check_master_equation(cc, cc.zero())
    assert result.holds and result.residual.is_zero()


def test_master_equation_so3_and_perturbation():
    cc, pi = so3_structure()
    assert check_master_equation(cc, pi).holds
    bad = pi + cc.var("x") * cc.var("p_x") * cc.var("p_y")
    result = check_master_equation(cc, bad)
    assert not result.holds and not result.residual.is_zero()


def test_master_equation_rejects_inhomogeneous():
    cc = build_cotangent(make_chart([("x", 0)]), 1)
    with pytest.raises(DegreeError):
        check_master_equation(cc, cc.var("p_x") + cc.var("p_x") ** 2)
    with pytest.raises(DegreeError):
        check_master_equation(cc, cc.var("x"))


def test_master_equation_matches_classical_jacobiator():
    rng = random.Random(401)
    for _ in range(60):
        dim = rng.choice([3, 4])
        cc = build_cotangent(make_chart([(f"x{i}", 0) for i in range(dim)]), 1)
        raw = [
            [[Fraction(rng.randint(-2, 2)) for _ in range(dim)] for _ in range(dim)]
            for _ in range(dim)
        ]
        coeffs = antisymmetrize(raw, dim)
        pi = linear_bivector(cc, coeffs)
        assert check_master_equation(cc, pi).holds == jacobiator_vanishes(coeffs, dim)


def test_derived_bracket_kills_constants():
    cc, pi = so3_structure()
    hp = HomotopyPoissonStructure(cc, pi)
    one = cc.base.one()
    x = cc.base.var("x")
    assert derived_bracket(hp, [one, x], 2).is_zero()


def test_derived_bracket_fixed_sign_example():
    cc = build_cotangent(make_chart([("x", 0), ("y", 0)]), 1)
    pi = cc.var("x") * cc.var("p_x") * cc.var("p_y")
    hp = HomotopyPoissonStructure(cc, pi)
    x, y = cc.base.var("x"), cc.base.var("y")
    assert derived_bracket(hp, [x, y], 2) == -x


def test_derived_bracket_rejects_momenta():
    cc, pi = so3_structure()
    hp = HomotopyPoissonStructure(cc, pi)
    with pytest.raises(ValueError):
        derived_bracket(hp, [cc.var("p_x")], 1)


def test_unary_bracket_equals_hamiltonian_field():
    cc = build_cotangent(make_chart([("u", 2), ("t", 1), ("y", 0)]), 1)
    pi1 = cc.var("u") * cc.var("p_t")
    hp = HomotopyPoissonStructure(cc, pi1)
    D = hamiltonian_vector_field(pi1, cc)
    for name in ("u", "t", "y"):
        f = cc.base.var(name)
        assert derived_bracket(hp, [f], 1) == restrict_to_base(cc, D(cc.var(name)))


def test_derived_bracket_degree_law():
    rng = random.Random(402)
    for n in (1, 2):
        for _ in range(25):
            cc, pi = random_valid_structure(rng, n)
            hp = HomotopyPoissonStructure(cc, pi)
            for ell in range(min(hp.finite_type_bound, 2) + 1):
                args = []
                ok = True
                for _ in range(ell):
                    f = random_nonzero_homogeneous(cc.base, rng, max_len=2)
                    if f.is_zero():
                        ok = False
                        break
                    args.append(f)
                if not ok:
                    continue
                out = derived_bracket(hp, args, ell)
                if not out.is_zero():
                    expected = 1 + (1 - ell) * n + sum(f.degree() for f in args)
                    assert out.degree() == expected


def test_derived_bracket_graded_symmetry_on_shifted_algebra():
    rng = random.Random(403)
    for n in (1, 2):
        for _ in range(30):
            cc, pi = random_valid_structure(rng, n)
            hp = HomotopyPoissonStructure(cc, pi)
            if hp.finite_type_bound < 2:
                continue
            f = random_nonzero_homogeneous(cc.base, rng, max_len=2)
            g = random_nonzero_homogeneous(cc.base, rng, max_len=2)
            if f.is_zero() or g.is_zero():
                continue
            sign = -1 if ((f.degree() + n) & 1) and ((g.degree() + n) & 1) else 1
            assert derived_bracket(hp, [f, g], 2) == sign * derived_bracket(hp, [g, f], 2)


def test_derived_bracket_leibniz_in_last_slot():
    rng = random.Random(404)
    for _ in range(30):
        cc, pi = random_valid_structure(rng, 1)
        hp = HomotopyPoissonStructure(cc, pi)
        if hp.finite_type_bound < 2:
            continue
        f = random_nonzero_homogeneous(cc.base, rng, max_len=2)
        g = random_nonzero_homogeneous(cc.base, rng, max_len=2)
        h = random_nonzero_homogeneous(cc.base, rng, max_len=2)
        if f.is_zero() or g.is_zero() or h.is_zero():
            continue
        # beta_2(f, .) is a derivation of degree |f| + 1 - n
        n = 1
        lhs = derived_bracket(hp, [f, g * h], 2)
        sign = -1 if ((f.degree() + 1 + n) & 1) and (g.degree() & 1) else 1
        rhs = derived_bracket(hp, [f, g], 2) * h + sign * (
            g * derived_bracket(hp, [f, h], 2)
        )
        assert lhs == rhs


def test_differential_zero_structure():
    cc = build_cotangent(make_chart([("x", 0)]), 1)
    hp = HomotopyPoissonStructure(cc, cc.zero())
    assert differential(hp).is_zero()


def test_differential_squares_to_zero_iff_master_equation():
    rng = random.Random(405)
    seen_fail = 0
    cc0, pi0 = so3_structure()
    d = differential(HomotopyPoissonStructure(cc0, pi0))
    assert commutator(d, d).is_zero()
    for _ in range(40):
        dim = 3
        cc = build_cotangent(make_chart([(f"x{i}", 0) for i in range(dim)]), 1)
        raw = [
            [[Fraction(rng.randint(-1, 1)) for _ in range(dim)] for _ in range(dim)]
            for _ in range(dim)
        ]
        pi = linear_bivector(cc, antisymmetrize(raw, dim))
        holds = check_master_equation(cc, pi).holds
        sq = commutator(
            differential(HomotopyPoissonStructure(cc, pi)),
            differential(HomotopyPoissonStructure(cc, pi)),
        )
        assert holds == sq.is_zero()
        if not holds:
            seen_fail += 1
    assert seen_fail > 0


def test_differential_is_bracket_derivation_instance():
    rng = random.Random(406)
    cc, pi = so3_structure()
    hp = HomotopyPoissonStructure(cc, pi)
    d = differential(hp)
    n = 1
    for _ in range(20):
        a = random_nonzero_homogeneous(cc, rng, max_len=3)
        b = random_nonzero_homogeneous(cc, rng, max_len=3)
        sign = -1 if ((a.degree() - n) & 1) else 1
        lhs = d(canonical_bracket(a, b))
        rhs = canonical_bracket(d(a), b) + sign * canonical_bracket(a, d(b))
        assert lhs == rhs


def test_from_differential_zero():
    cc = build_cotangent(make_chart([("x", 0)]), 1)
    hp = from_differential(Derivation(cc, 1, {}), cc)
    assert hp.pi.is_zero()


def test_from_differential_roundtrip_randomized():
    rng = random.Random(407)
    with_pi0 = 0
    for case in range(60):
        n = rng.choice([1, 2])
        cc, pi = random_valid_structure(rng, n, want_pi0=(case % 3 == 0))
        hp = HomotopyPoissonStructure(cc, pi)
        if not hp.component(0).is_zero():
            with_pi0 += 1
        back = from_differential(differential(hp), cc)
        assert back.pi == pi
    assert with_pi0 >= 12


def test_from_differential_constant_branch_hand_value():
    # pure fiber-lowering differential of theta*eta: delta(p_theta) = eta,
    # delta(p_eta) = -theta; minus half of delta applied to the Euler symbol
    # recovers theta*eta exactly
    cc = build_cotangent(make_chart([("theta", 1), ("eta", 1)]), 1)
    th, et = cc.var("theta"), cc.var("eta")
    pi0 = th * et
    delta = differential(HomotopyPoissonStructure(cc, pi0))
    assert delta(cc.var("p_theta")) == et
    assert delta(cc.var("p_eta")) == -th
    euler_sym = th * cc.var("p_theta") + et * cc.var("p_eta")
    hand = Fraction(-1, 2) * fiber_component(delta(euler_sym), 0)
    assert hand == pi0
    assert from_differential(delta, cc).pi == pi0


def test_from_differential_validates_preconditions():
    cc = build_cotangent(make_chart([("x", 0), ("y", 0)]), 1)
    x, px, py = cc.var("x"), cc.var("p_x"), cc.var("p_y")
    with pytest.raises(DegreeError):
        from_differential(Derivation(cc, 0, {"x": x}), cc)
    # degree 1 but not square zero
    bad = Derivation(cc, 1, {"x": x * py, "y": x * px + 3 * x * py})
    with pytest.raises(StructureError):
        from_differential(bad, cc)
    # square zero but not a bracket derivation: d(x) = x p_y, d(y) = 0, d(p) = 0
    skew = Derivation(cc, 1, {"x": x * py})
    assert commutator(skew, skew).is_zero()
    with pytest.raises(StructureError):
        from_differential(skew, cc)


def test_is_related_identity_and_point():
    cc, pi = so3_structure()
    hp = HomotopyPoissonStructure(cc, pi)
    base = cc.base
    ident = AlgebraMorphism(base, base, {c.name: base.var(c.name) for c in base.coordinates})
    assert is_related(ident, hp, hp)
    # constant map to a point: flat structures map to the zero structure
    point = build_cotangent(make_chart([("w", 0)]), 1)
    hp_point = HomotopyPoissonStructure(point, point.zero())
    to_point = AlgebraMorphism(point.base, base, {"w": base.zero()})
    assert is_related(to_point, hp, hp_point)


def test_is_related_point_fails_for_curved():
    cc = build_cotangent(make_chart([("theta", 1), ("eta", 1)]), 1)
    hp = HomotopyPoissonStructure(cc, cc.var("theta") * cc.var("eta"))
    point = build_cotangent(make_chart([("w", 0)]), 1)
    hp_point = HomotopyPoissonStructure(point, point.zero())
    to_point = AlgebraMorphism(point.base, cc.base, {"w": cc.base.zero()})
    assert not is_related(to_point, hp, hp_point)


def test_is_related_projection_example():
    ccM = build_cotangent(make_chart([("x", 0), ("y", 0)]), 1)
    hp = HomotopyPoissonStructure(ccM, ccM.var("x") * ccM.var("p_x") * ccM.var("p_y"))
    ccN = build_cotangent(make_chart([("u", 0)]), 1)
    hp_target = HomotopyPoissonStructure(ccN, ccN.zero())
    pull = AlgebraMorphism(ccN.base, ccM.base, {"u": ccM.base.var("x")})
    assert is_related(pull, hp, hp_target)
    # pulling back along y sees the bracket: beta_2(y, y) = 0 still fine,
    # but a target with its own bivector is not related
    ccN2 = build_cotangent(make_chart([("u", 0), ("v", 0)]), 1)
    hp2 = HomotopyPoissonStructure(
        ccN2, ccN2.var("u") * ccN2.var("p_u") * ccN2.var("p_v")
    )
    pull2 = AlgebraMorphism(
        ccN2.base, ccM.base, {"u": ccM.base.var("x"), "v": ccM.base.zero()}
    )
    assert not is_related(pull2, hp, hp2)


def test_classify_labels():
    cc, pi = so3_structure()
    assert classify(HomotopyPoissonStructure(cc, pi)) == "Poisson"
    assert classify(HomotopyPoissonStructure(cc, cc.zero())) == "zero"
    ccq = build_cotangent(make_chart([("u", 2), ("t", 1), ("y", 0)]), 1)
    q_only = ccq.var("u") * ccq.var("p_t")
    assert classify(HomotopyPoissonStructure(ccq, q_only)) == "Q"
    mixed = q_only + ccq.var("u") * ccq.var("p_t") ** 2
    assert classify(HomotopyPoissonStructure(ccq, mixed)) == "QP"
    cc0 = build_cotangent(make_chart([("theta", 1), ("eta", 1)]), 1)
    curved = cc0.var("theta") * cc0.var("eta")
    assert classify(HomotopyPoissonStructure(cc0, curved)) == "curved-general"


def test_classify_flat_general():
    # a three-vector alone is flat but neither Q, Poisson, nor QP
    cc = build_cotangent(make_chart([("x", 0), ("y", 0), ("z", 0)]), 2)
    pi = cc.var("p_x") * cc.var("p_y") * cc.var("p_z")  # degrees 2+2+2 = 6... too big
    cc = build_cotangent(make_chart([("a", 1), ("b", 1), ("c", 1)]), 2)
    pi = cc.var("p_a") * cc.var("p_b") * cc.var("p_c")  # degrees 1+1+1 = 3 = n+1
    hp = HomotopyPoissonStructure(cc, pi)
    assert classify(hp) == "flat-general"


def test_classify_requires_master_equation():
    cc, pi = so3_structure()
    bad = pi + cc.var("x") * cc.var("p_x") * cc.var("p_y")
    with pytest.raises(StructureError):
        classify(HomotopyPoissonStructure(cc, bad))


def test_component_identities_pure_bivector():
    cc, pi = so3_structure()
    hp = HomotopyPoissonStructure(cc, pi)
    report = check_component_identities(hp)
    assert all(item.holds for item in report)


def test_component_identities_match_bidegree_decomposition():
    rng = random.Random(408)
    for _ in range(40):
        dim = 2
        cc = build_cotangent(make_chart([("t", 1), ("y", 0)]), 1)
        pool_pi = []
        from gradedgeo.sampling import monomial_pool

        pool = monomial_pool(cc, 3).get(2, ())
        terms = {}
        for f in rng.sample(pool, min(len(pool), 4)):
            if cc.fiber_weight(f) <= 2 and rng.random() < 0.8:
                c = rng.randint(-2, 2)
                if c:
                    terms[f] = Fraction(c)
        from gradedgeo.algebra import GradedPolynomial

        pi = GradedPolynomial(cc, terms)
        hp = HomotopyPoissonStructure(cc, pi)
        report = check_component_identities(hp)
        full = canonical_bracket(pi, pi, cc)
        by_weight = {ell: comp for ell, comp in decompose(full)}
        for ell, item in enumerate(report):
            assert item.residual == by_weight.get(ell, cc.zero())


def test_component_identities_reject_higher_components():
    cc = build_cotangent(make_chart([("a", 1), ("b", 1), ("c", 1)]), 2)
    pi = cc.var("p_a") * cc.var("p_b") * cc.var("p_c")
    with pytest.raises(ValueError):
        check_component_identities(HomotopyPoissonStructure(cc, pi))
