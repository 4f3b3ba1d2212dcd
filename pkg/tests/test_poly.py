import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mobres.poly import (INFINITY, TRIANGULAR, TRANSLATION, NotDivisibleError, Polynomial,
                         PolynomialSyntaxError, SubstitutionMap, exact_divide,
                         format_polynomial, parse_polynomial)

from conftest import P, XY, XYZ, polynomials, random_poly, to_sympy


def test_order_examples():
    assert P("y^2 - x^3").order_at((0, 0)) == 2
    assert P("x + 1").order_at((0, 0)) == 0
    assert P("(x-1)^2*y").order_at((1, 0)) == 3
    assert Polynomial.zero(XY).order_at((5, 7)) == INFINITY


def test_derivative_examples():
    assert P("x^2 - y^2*z", XYZ).derivative("x") == P("2*x", XYZ)
    assert P("y^2 - x^3").derivative("y") == P("2*y")
    assert P("x^2", XYZ).derivative("z").is_zero()
    assert P("x^3*y").derivative("x", 2) == P("6*x*y")


def test_substitution_examples():
    chart = SubstitutionMap.build(XY, XY, {"y": P("x*y")})
    assert chart.apply(P("y^2 - x^3")) == P("x^2*y^2 - x^3")
    uy = ("u", "y")
    change = SubstitutionMap.build(XY, uy, {"x": P("u - y^2", uy)}, TRIANGULAR)
    assert change.inverse().apply(P("u", uy)) == P("x + y^2")
    lin = SubstitutionMap.build(XY, uy, {"x": P("u - y", uy)}, TRIANGULAR)
    assert lin.apply(P("(x+y)^2")) == P("u^2", uy)


def test_exact_divide_examples():
    assert exact_divide(P("x^2*y^2 - x^3"), P("x^2")) == P("y^2 - x")
    with pytest.raises(NotDivisibleError):
        exact_divide(P("x"), P("y"))
    p = P("3*x^2 - y/2")
    assert exact_divide(p, Polynomial.one(XY)) == p
    assert exact_divide(P("x^2 - y^2"), P("x + y")) == P("x - y")


def test_translate_moves_point_to_origin():
    p = P("y^2 - x^3")
    q = p.translate((1, 1))
    assert q.evaluate((0, 0)) == 0
    assert q == P("(y+1)^2 - (x+1)^3")


def test_coefficients_in():
    co = P("y^2 - x^3 + x*y", XY).coefficients_in("y")
    assert co[0] == P("-x^3", ("x",))
    assert co[1] == P("x", ("x",))
    assert co[2] == P("1", ("x",))


@given(polynomials(XYZ), polynomials(XYZ))
def test_arithmetic_matches_sympy(p, q):
    assert to_sympy(p * q) == to_sympy(p) * to_sympy(q)
    assert to_sympy(p - q) == to_sympy(p) - to_sympy(q)


@given(polynomials(XY, nonzero=True), polynomials(XY, nonzero=True))
def test_exact_divide_recovers_factor(p, q):
    assert exact_divide(p * q, q) == p


def test_order_additivity_and_min_rule():
    rng = random.Random(2024)
    pairs = 0
    for _ in range(120):
        variables = XYZ[:rng.randint(1, 3)]
        p = random_poly(rng, variables, terms=rng.randint(1, 3), deg=4)
        q = random_poly(rng, variables, terms=rng.randint(1, 3), deg=4)
        for a in [(0,) * len(variables), tuple(rng.randint(-2, 2) for _ in variables)]:
            op, oq = p.order_at(a), q.order_at(a)
            assert (p * q).order_at(a) == op + oq
            assert (p + q).order_at(a) >= min(op, oq)
        pairs += 1
    assert pairs >= 100


@given(polynomials(XY), polynomials(XY), polynomials(XY), polynomials(XY))
def test_substitution_is_ring_homomorphism(p, q, a, b):
    m = SubstitutionMap.build(XY, XY, {"x": a, "y": b})
    assert m.apply(p + q) == m.apply(p) + m.apply(q)
    assert m.apply(p * q) == m.apply(p) * m.apply(q)


@given(polynomials(XY), polynomials(("y",), max_deg=3),
       st.integers(-3, 3), st.integers(-3, 3))
def test_invertible_maps_round_trip(p, h, a, b):
    uy = ("u", "y")
    h = h.change_ring(uy)
    tri = SubstitutionMap.build(XY, uy, {"x": P("u", uy) - h}, TRIANGULAR)
    assert tri.inverse().apply(tri.apply(p)) == p
    shift = SubstitutionMap.build(XY, XY, {"x": P(f"x + {a}"), "y": P(f"y - ({b})")},
                                  TRANSLATION)
    assert shift.compose(shift.inverse()).apply(p) == p


@given(polynomials(XYZ, coeff=50))
def test_print_parse_round_trip(p):
    text = format_polynomial(p)
    assert parse_polynomial(text, XYZ) == p
    assert format_polynomial(parse_polynomial(text, XYZ)) == text


def test_rational_coefficients_print_exactly():
    p = Polynomial({(1, 0): Fraction(-3, 7), (0, 0): Fraction(1, 2)}, XY)
    assert parse_polynomial(format_polynomial(p), XY) == p


@pytest.mark.parametrize("text", ["x +", "x ** ", "2*(x", "w^2", "x^y", "x^-1"])
def test_parse_errors(text):
    with pytest.raises(PolynomialSyntaxError) as err:
        parse_polynomial(text, XY)
    assert err.value.column is not None
