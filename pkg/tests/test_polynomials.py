import random

import pytest

from colourproofs.errors import FieldMismatch, UnboundVariable
from colourproofs.fields import FieldSpec, field_with_kth_root
from colourproofs.polynomials import (Polynomial, cap_header, cap_from_header,
                                      poly_from_text, poly_to_text)
from conftest import random_polynomial


def x(field, cap, var, exp=1):
    return Polynomial.variable(field, cap, var, exp)


def test_char2_cancellation(gf2):
    p = x(gf2, "boolean", 0) + Polynomial.one(gf2, "boolean")
    assert (p + p).is_zero()


def test_additive_identity(gf7):
    p = x(gf7, "boolean", 0) + Polynomial.constant(gf7, "boolean", 3)
    assert p + Polynomial.zero(gf7, "boolean") == p


def test_monomial_canonicalisation(gf7):
    xy = x(gf7, "boolean", 1) * x(gf7, "boolean", 2)
    yx = x(gf7, "boolean", 2) * x(gf7, "boolean", 1)
    assert xy + yx == xy.scaled(2)


def test_boolean_cap_multilinear(gf2):
    assert x(gf2, "boolean", 0) * x(gf2, "boolean", 0) == x(gf2, "boolean", 0)


def test_roots_cap_wraps(gf4):
    y2 = x(gf4, "roots:3", 0, 2)
    assert y2 * y2 == x(gf4, "roots:3", 0, 1)


def test_difference_of_squares_boolean(gf7):
    a, b = x(gf7, "boolean", 1), x(gf7, "boolean", 2)
    assert (a + b) * (a - b) == a - b


def test_zero_polynomial_degree(gf2):
    assert Polynomial.zero(gf2, "boolean").degree == -1
    assert Polynomial.one(gf2, "boolean").degree == 0


def test_distributivity_random(gf7, gf4):
    rng = random.Random(3)
    for field, cap in ((gf7, "boolean"), (gf4, "roots:3")):
        for _ in range(60):
            a = random_polynomial(field, cap, [0, 1, 2], rng)
            b = random_polynomial(field, cap, [0, 1, 2], rng)
            c = random_polynomial(field, cap, [0, 1, 2], rng)
            assert a * (b + c) == a * b + a * c


def test_boolean_cap_sound_on_01_points(gf7):
    rng = random.Random(5)
    for _ in range(60):
        free = random_polynomial(gf7, None, [0, 1, 2], rng, max_deg_per_var=3)
        capped = free.with_cap("boolean")
        for trial in range(8):
            point = {v: gf7.element(rng.randint(0, 1)) for v in [0, 1, 2]}
            assert free.evaluate(point) == capped.evaluate(point)


def test_roots_cap_sound_on_root_points(gf4):
    rng = random.Random(6)
    w = gf4.kth_root
    for _ in range(60):
        free = random_polynomial(gf4, None, [0, 1], rng, max_deg_per_var=5)
        capped = free.with_cap("roots:3")
        for trial in range(6):
            point = {v: w ** rng.randint(0, 2) for v in [0, 1]}
            assert free.evaluate(point) == capped.evaluate(point)


def test_substitute_linear_image(gf4):
    w = gf4.kth_root
    image = Polynomial.from_terms(
        gf4, "boolean", [(((1, 1),), w), (((2, 1),), w**2)])
    y = x(gf4, "roots:3", 0)
    assert y.substitute({0: image}, "boolean") == image


def test_substitute_identity(gf7):
    rng = random.Random(8)
    p = random_polynomial(gf7, "boolean", [0, 1, 2], rng)
    assert p.substitute({}, "boolean") == p


def test_substituted_power_axiom_shape(gf4):
    # y^k - 1 under y -> sum_j x_j w^j splits into the vertex sum plus terms
    # that each mention two distinct colours
    w = gf4.kth_root
    image = Polynomial.from_terms(
        gf4, "boolean", [(((j, 1),), w**j) for j in range(3)])
    target = image.power(3) - Polynomial.one(gf4, "boolean")
    vertex = Polynomial.from_terms(
        gf4, "boolean", [(((j, 1),), gf4.one) for j in range(3)]) - Polynomial.one(gf4, "boolean")
    q = target - vertex
    assert not q.is_zero()
    for mono in q.terms:
        assert len(mono) >= 2


def test_evaluate_edge_polynomial(gf4):
    from colourproofs.encodings import roots_edge_polynomial

    w = gf4.kth_root
    edge = roots_edge_polynomial(gf4, "roots:3", 0, 1, 3)
    assert edge.evaluate({0: w, 1: w**2}).is_zero()
    # all three terms equal w^2 when both endpoints take w
    assert edge.evaluate({0: w, 1: w}) == w**2 + w**2 + w**2
    assert not edge.evaluate({0: w, 1: w}).is_zero()


def test_evaluate_constant(gf2):
    assert Polynomial.one(gf2, "boolean").evaluate({}).is_one()


def test_unbound_variable(gf2):
    with pytest.raises(UnboundVariable):
        x(gf2, "boolean", 0).evaluate({})


def test_field_mismatch(gf2, gf7):
    with pytest.raises(FieldMismatch):
        x(gf2, "boolean", 0) + x(gf7, "boolean", 0)
    with pytest.raises(FieldMismatch):
        x(gf2, "boolean", 0) + x(gf2, "roots:3", 0)


def test_text_round_trip(gf7, gf4):
    rng = random.Random(9)
    for field, cap in ((gf7, "boolean"), (gf4, "roots:3"), (gf7, None)):
        for _ in range(40):
            p = random_polynomial(field, cap, [0, 1, 5], rng, max_deg_per_var=2)
            back = poly_from_text(poly_to_text(p), field, cap)
            assert back == p
    assert cap_from_header(cap_header("roots:3")) == "roots:3"
    assert cap_from_header(cap_header(None)) is None
