import random
from fractions import Fraction

import pytest

from gradedgeo.algebra import (
    AlgebraMorphism,
    ChartMismatchError,
    DegreeError,
    Derivation,
    GradedPolynomial,
    commutator,
    identity_morphism,
    make_chart,
)
from gradedgeo.cotangent import euler_vector_field

from helpers import random_chart, random_nonzero_homogeneous
from oracles import oracle_mul


def test_odd_square_vanishes():
    M = make_chart([("theta", 1)])
    th = M.var("theta")
    assert (th * th).is_zero()


def test_koszul_sign_on_odd_pair():
    M = make_chart([("theta", 1), ("eta", 1)])
    th, et = M.var("theta"), M.var("eta")
    assert et * th == -(th * et)


def test_cross_terms_cancel_against_oracle():
    M = make_chart([("x", 0), ("theta", 1)])
    x, th = M.var("x"), M.var("theta")
    product = (x + th) * (x - th)
    assert product == x * x
    assert product == oracle_mul(M, x + th, x - th)


def test_negative_even_degree_commutes():
    # a degree -2 coordinate is even and commutes without signs
    M = make_chart([("u", -2), ("theta", 1)])
    u, th = M.var("u"), M.var("theta")
    assert u * th == th * u
    assert not (u * u).is_zero()


def test_mul_oracle_randomized():
    rng = random.Random(101)
    for _ in range(200):
        chart = random_chart(rng)
        a = random_nonzero_homogeneous(chart, rng)
        b = random_nonzero_homogeneous(chart, rng)
        assert a * b == oracle_mul(chart, a, b)


def test_graded_commutativity_randomized():
    rng = random.Random(102)
    for _ in range(200):
        chart = random_chart(rng)
        a = random_nonzero_homogeneous(chart, rng)
        b = random_nonzero_homogeneous(chart, rng)
        sign = -1 if (a.degree() & 1) and (b.degree() & 1) else 1
        assert a * b == sign * (b * a)


def test_associativity_randomized():
    rng = random.Random(103)
    for _ in range(150):
        chart = random_chart(rng)
        a, b, c = (random_nonzero_homogeneous(chart, rng, max_len=3) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_degree_additivity_randomized():
    rng = random.Random(104)
    for _ in range(150):
        chart = random_chart(rng)
        a = random_nonzero_homogeneous(chart, rng)
        b = random_nonzero_homogeneous(chart, rng)
        ab = a * b
        if not ab.is_zero():
            assert ab.degree() == a.degree() + b.degree()


def test_canonical_form_association_invariance():
    rng = random.Random(105)
    for _ in range(60):
        chart = random_chart(rng)
        factors = [random_nonzero_homogeneous(chart, rng, max_len=2) for _ in range(4)]
        left = ((factors[0] * factors[1]) * factors[2]) * factors[3]
        right = factors[0] * (factors[1] * (factors[2] * factors[3]))
        inner = (factors[0] * (factors[1] * factors[2])) * factors[3]
        assert left == right == inner


def test_chart_mismatch_raises():
    a = make_chart([("x", 0)]).var("x")
    b = make_chart([("y", 0)]).var("y")
    with pytest.raises(ChartMismatchError):
        a * b


def test_zero_polynomial_is_homogeneous_of_every_degree():
    z = make_chart([("x", 0)]).zero()
    assert z.is_homogeneous_of_degree(0)
    assert z.is_homogeneous_of_degree(17)
    assert z.degree() is None


# -- derivations --------------------------------------------------------------


def test_even_leibniz_power_rule():
    M = make_chart([("x", 0), ("theta", 1)])
    D = Derivation(M, 0, {"x": M.one()})  # d/dx
    f = M.var("x") ** 2 * M.var("theta")
    assert D(f) == 2 * M.var("x") * M.var("theta")


def test_odd_derivation_second_slot_sign():
    M = make_chart([("theta", 1), ("eta", 1)])
    D = Derivation(M, -1, {"theta": M.one()})  # d/dtheta, odd
    f = M.var("theta") * M.var("eta")
    assert D(f) == M.var("eta")
    # the sign of the second Leibniz term: D(eta * theta) = -eta picked up
    g = M.var("eta") * M.var("theta")
    assert D(g) == -M.var("eta")


def test_derivations_kill_constants():
    M = make_chart([("x", 2), ("theta", 1)])
    D = Derivation(M, 1, {"theta": M.var("x")})
    assert D(M.constant(Fraction(7, 3))).is_zero()


def test_leibniz_randomized():
    rng = random.Random(106)
    for _ in range(120):
        chart = random_chart(rng, max_coords=4)
        a = random_nonzero_homogeneous(chart, rng, max_len=3)
        b = random_nonzero_homogeneous(chart, rng, max_len=3)
        coord = rng.choice(chart.coordinates)
        ddeg = rng.choice([-1, 0, 1, 2])
        image = random_nonzero_homogeneous(chart, rng, max_len=2)
        try:
            image_fixed = (
                image
                if image.is_homogeneous_of_degree(coord.degree + ddeg)
                else chart.zero()
            )
            D = Derivation(chart, ddeg, {coord.name: image_fixed})
        except DegreeError:
            continue
        sign = -1 if (D.parity and a.degree() & 1) else 1
        assert D(a * b) == D(a) * b + sign * (a * D(b))


def test_commutator_of_derivation_with_itself():
    # odd parity: [D, D] = 2 D.D on coordinates; even parity: [D, D] = 0
    M = make_chart([("x", 2), ("theta", 1)])
    Dodd = Derivation(M, 1, {"x": M.var("x") * M.var("theta"), "theta": M.var("x")})
    c = commutator(Dodd, Dodd)
    for name in ("x", "theta"):
        assert c.image(name) == 2 * Dodd(Dodd(M.var(name)))
    Deven = Derivation(M, 2, {"theta": M.var("x") * M.var("theta")})
    assert commutator(Deven, Deven).is_zero()


def test_commuting_partials():
    M = make_chart([("x", 0), ("y", 0)])
    Dx = Derivation(M, 0, {"x": M.one()})
    Dy = Derivation(M, 0, {"y": M.one()})
    assert commutator(Dx, Dy).is_zero()


def test_euler_commutator_scales_partials():
    M = make_chart([("x", -2), ("y", 3)])
    eps = euler_vector_field(M)
    Dx = Derivation(M, 2, {"x": M.one()})
    # [euler, d/dx] = -deg(x) d/dx on coordinates
    c = commutator(eps, Dx)
    assert c.image("x") == Fraction(2) * M.one()
    assert c.image("y").is_zero()


# -- morphisms ----------------------------------------------------------------


def test_pullback_identity():
    M = make_chart([("x", 0), ("theta", 1)])
    f = M.var("x") * M.var("theta") + 2 * M.var("x")
    assert identity_morphism(M)(f) == f


def test_pullback_zero_images_keep_constant_term():
    M = make_chart([("x", 0), ("y", 2)])
    phi = AlgebraMorphism(M, M, {"x": M.zero(), "y": M.zero()})
    f = M.var("x") * M.var("y") + M.constant(Fraction(5, 2))
    assert phi(f) == M.constant(Fraction(5, 2))


def test_pullback_binomial_expansion():
    source = make_chart([("u", 0)])
    target = make_chart([("x", 0), ("y", 0)])
    phi = AlgebraMorphism(source, target, {"u": target.var("x") + target.var("y")})
    x, y = target.var("x"), target.var("y")
    assert phi(source.var("u") ** 2) == x * x + 2 * x * y + y * y


def test_pullback_degree_mismatch_rejected():
    source = make_chart([("u", 1)])
    target = make_chart([("x", 0)])
    with pytest.raises(DegreeError):
        AlgebraMorphism(source, target, {"u": target.var("x")})


def test_pullback_missing_image_rejected():
    source = make_chart([("u", 0), ("v", 0)])
    target = make_chart([("x", 0)])
    with pytest.raises(ValueError):
        AlgebraMorphism(source, target, {"u": target.var("x")})


def test_pullback_is_multiplicative_randomized():
    rng = random.Random(107)
    for _ in range(60):
        target = random_chart(rng, max_coords=4)
        source_spec = []
        images = {}
        for i in range(rng.randint(1, 3)):
            img = random_nonzero_homogeneous(target, rng, max_len=2)
            source_spec.append((f"s{i}", img.degree()))
            images[f"s{i}"] = img
        source = make_chart(source_spec)
        phi = AlgebraMorphism(source, target, images)
        a = random_nonzero_homogeneous(source, rng, max_len=3)
        b = random_nonzero_homogeneous(source, rng, max_len=3)
        assert phi(a * b) == phi(a) * phi(b)
