import math
from fractions import Fraction

import pytest

from mobres.blowup import Chart
from mobres.handicap import (HandicapError, HandicapRule, Tag, compute_tag,
                             invariant_vector, maximal_tight_shortcut, shortcut_label)
from mobres.ideal import (Ideal, delta_power, ideals_equal, is_trivial, order_at_origin,
                          radicals_equal)
from mobres.mobile import (BOLD_REGULAR, COMBINATORIAL, Mobile, TransversalityError,
                           _local_components, build_setup, coefficient_ideal,
                           companion_ideal, composition_ideal, junior_ideal,
                           osculating_candidates, osculating_hypersurface,
                           transversality_ideal)
from mobres.poly import Polynomial

from conftest import P, XY, XYZ, run_corpus


def I(*texts, variables=XY):
    return Ideal([P(t, variables) for t in texts], variables)


def chart_for(J, c=1, variables=XY, D=None, comps=None):
    n = len(variables)
    rule = HandicapRule.empty(n)
    if D is not None:
        rule = HandicapRule(n, True, tuple(D), tuple(frozenset() for _ in range(n)))
    return Chart.root(Mobile(Ideal([P(J, variables)], variables), c, rule), comps)


# -- level ideals ----------------------------------------------------------------------

def test_companion_examples():
    cusp = I("y^2 - x^3")
    assert ideals_equal(companion_ideal(cusp, P("x^4"), 2, 3), I("y^2 - x^3", "x^8"))
    assert companion_ideal(cusp, P("x^4"), 2, 2) == cusp
    assert companion_ideal(cusp, P("x^4"), 0, 3) == cusp


def test_transversality_examples():
    assert transversality_ideal([], XY) == Ideal.unit(XY)
    assert transversality_ideal([P("x")], XY) == I("x")


def test_transversality_failure_on_tangent_flag():
    # E = {x} restricted to the flag u = x + y^2 = 0 becomes -y^2
    images = {"x": (P("-y^2", ("y",)), P("1", ("y",))), "y": (P("y", ("y",)), P("1", ("y",)))}
    with pytest.raises(TransversalityError):
        _local_components({1}, {1: P("x")}, images, ("y",), "E")


def test_composition_examples():
    assert composition_ideal(I("y^2 - x"), I("x"), I("y^2 - x")) == I("x*y^2 - x^2")
    assert composition_ideal(I("y"), I("x"), Ideal.unit(XY)) == Ideal.unit(XY)
    assert composition_ideal(I("y^2 - x"), Ideal.unit(XY), I("y")) == I("y^2 - x")


# -- osculation and coefficient ideals ----------------------------------------------------

def test_osculating_examples():
    osc = osculating_hypersurface(I("y^2 - x^3"))
    # ideal generators are stored monic, so equations agree up to a scalar
    assert osc.variable == "y" and osc.equation.monic() == P("y")
    osc = osculating_hypersurface(I("x^2 - y^2*z", variables=XYZ))
    assert osc.variable == "x" and osc.equation.monic() == P("x", XYZ)
    osc = osculating_hypersurface(I("(x+y)^2 + y^5"))
    assert osc.variable == "x" and osc.equation.monic() == P("x + y")
    assert osc.equation == osc.unit * P("x") + osc.rest


def test_alternative_osculating_picks():
    first = [o.equation for o in osculating_candidates(I("(x+y)^2 + y^5"))]
    last = [o.equation for o in osculating_candidates(I("(x+y)^2 + y^5"), "last")]
    assert sorted(map(str, first)) == sorted(map(str, last))
    assert first[0] != last[0] or len(first) == 1


def test_coefficient_ideal_examples():
    assert coefficient_ideal(I("y^2 - x^3"), 2, "y") == Ideal([P("x^3", ("x",))], ("x",))
    yz = ("y", "z")
    assert ideals_equal(coefficient_ideal(I("x^2 - y^2*z", variables=XYZ), 2, "x"),
                        Ideal([P("y^2*z", yz)], yz))
    uy = ("u", "y")
    assert coefficient_ideal(Ideal([P("u^2", uy)], uy), 2, "u").is_zero()


def test_coefficient_ideal_uses_factorial_exponents():
    # j = 0 gets exponent 3!/3 = 2, j = 1 gets 3!/2 = 3, j = 2 gets 3!/1 = 6
    yz = ("y", "z")
    K = I("x^3 + x^2*y + x*z + y^4", variables=XYZ)
    expected = Ideal([P("y^8", yz), P("z^3", yz), P("y^6", yz)], yz)
    assert ideals_equal(coefficient_ideal(K, 3, "x"), expected)


def test_junior_examples():
    J, bold = junior_ideal(I("y^2 - x^3"), 2, "y")
    assert not bold and J == Ideal([P("x^3", ("x",))], ("x",))
    uy = ("u", "y")
    J, bold = junior_ideal(Ideal([P("u^2", uy)], uy), 2, "u")
    assert bold and is_trivial(J)
    J, bold = junior_ideal(Ideal.unit(XY), 2, "y")
    assert not bold and is_trivial(J)


def test_coefficient_order_bounds_input_order():
    for text, z in [("y^2 - x^3", "y"), ("x^2 - y^2*z", "x"), ("x^3 + y^4*z + z^5", "x"),
                    ("x^2 + x*y^2 + z^3", "x")]:
        variables = XYZ if "z" in text else XY
        K = I(text, variables=variables)
        c = order_at_origin(K)
        coeff = coefficient_ideal(K, c, z)
        # integer exponents scale orders by (c-1)!, so ord K = c becomes c!
        assert order_at_origin(coeff) >= math.factorial(c)


def _coeff_ratio(K, z):
    c = order_at_origin(K)
    coeff = coefficient_ideal(K, c, z)
    if coeff.is_zero():
        return None  # e = infinity
    return Fraction(order_at_origin(coeff), math.factorial(c))


PRODUCT_PAIRS = [
    ("x^2 + y^3", "y"),
    ("x^2 + y^3", "x + y^2"),
    ("x^2 + y^2*z", "y*z"),
    ("x^2 + z^5", "x^2 + y^3"),
    ("x^2", "x + y*z"),
    ("x^3 + y^4 + z^4", "y + z"),
    ("x^2 + y*z", "x*y + z^3"),
]


@pytest.mark.parametrize("p_text,q_text", PRODUCT_PAIRS)
def test_product_formula_for_weak_maximal_contact(p_text, q_text):
    Pi = I(p_text, variables=XYZ)
    Qi = I(q_text, variables=XYZ)
    # x = 0 is osculating for P in every pair
    assert osculating_hypersurface(Pi).variable == "x"
    e_P, e_Q, e_K = (_coeff_ratio(K, "x") for K in (Pi, Qi, Pi * Qi))
    finite = [r for r in (e_P, e_Q) if r is not None]
    assert e_K == (min(finite) if finite else None)


def _top(ideal, o):
    return delta_power(ideal, o - 1)


@pytest.mark.parametrize("i_text,m_text,c,variables", [
    ("y^2 - x^3", "x", 3, XY),
    ("y^2 - x^3", "x^2", 4, XY),
    ("x^2 - y^2*z", "z^2", 4, XYZ),
    ("x^2 + y^3", "y", 3, XYZ),
])
def test_top_of_companion(i_text, m_text, c, variables):
    Ii = I(i_text, variables=variables)
    M = P(m_text, variables)
    o = order_at_origin(Ii)
    Pc = companion_ideal(Ii, M, o, c)
    rhs = _top(Ii, o) + _top(Ideal([M], variables), c - o)
    assert radicals_equal(_top(Pc, order_at_origin(Pc)), rhs)


# -- handicap bookkeeping ---------------------------------------------------------------

def test_shortcut_examples():
    sc = maximal_tight_shortcut({1: 2, 2: 3}, 4)
    assert sc.labels == (1, 2) and sc.order == 5 and sc.label == shortcut_label([1, 2])
    sc = maximal_tight_shortcut({1: 2, 2: 3}, 3)
    assert sc.labels == (2,) and sc.order == 3
    sc = maximal_tight_shortcut({7: 5}, 4)
    assert sc.labels == (7,) and sc.order == 5
    with pytest.raises(HandicapError):
        maximal_tight_shortcut({1: 1}, 2)


def test_tag_examples():
    assert compute_tag(2, 2).astuple() == (2, 2, 0, 0)
    sc = maximal_tight_shortcut({1: 2, 2: 3}, 4)
    assert compute_tag(0, 0, sc).astuple() == (0, 0, 5, 3)
    assert compute_tag(3, 4).astuple() == (3, 4, 0, 0)
    with pytest.raises(HandicapError):
        Tag(1, 1, 5, 3)
    assert invariant_vector([Tag(2, 2)], 2) == (2, 2, 0, 0, 0, 0, 0, 0)
    assert Tag(1, 2) < Tag(2, 0) < Tag(2, 1)


# -- setups ----------------------------------------------------------------------------

def test_cusp_setup():
    setup = build_setup(chart_for("y^2 - x^3"))
    assert setup.invariant == (2, 2, 0, 0, 3, 3, 0, 0)
    assert setup.stop == BOLD_REGULAR
    assert radicals_equal(Ideal(setup.center, XY), I("x", "y"))


def test_smooth_setup():
    setup = build_setup(chart_for("x"))
    assert setup.invariant == (1, 1, 0, 0, 0, 0, 0, 0)
    assert setup.stop == BOLD_REGULAR and len(setup.levels) == 1
    assert setup.center == [P("x")]


def test_combinatorial_setup():
    chart = chart_for("x^2*y^3", 4, D=[{1: 2, 2: 3}, {}], comps={1: P("x"), 2: P("y")})
    setup = build_setup(chart)
    assert setup.stop == COMBINATORIAL
    assert setup.invariant == (0, 0, 5, shortcut_label([1, 2]), 0, 0, 0, 0)
    assert radicals_equal(Ideal(setup.center, XY), I("x", "y"))


def test_setup_at_translated_point():
    setup = build_setup(chart_for("y^2 - (x-1)^3"), (1, 0))
    assert setup.invariant == (2, 2, 0, 0, 3, 3, 0, 0)
    assert radicals_equal(Ideal(setup.center, XY), I("x - 1", "y"))


def test_bold_regular_after_coordinate_change():
    setup = build_setup(chart_for("(x+y)^2", 2))
    assert setup.stop == BOLD_REGULAR
    assert setup.center == [P("x + y")]
    assert setup.invariant[:4] == (2, 2, 0, 0)


def test_m_zero_iff_o_positive_on_corpus():
    for name in ("cusp", "A3", "combinatorial"):
        _, tree, _ = run_corpus(name)
        for chart in tree.sorted_charts():
            if chart.setup is None:
                continue
            for tag in chart.setup.tags:
                assert (tag.m == (0, 0)) == (tag.o > 0) or tag == Tag()


@pytest.mark.parametrize("name", ["cusp", "umbrella", "A3", "A4"])
def test_flag_independence(name):
    _, tree, _ = run_corpus(name)
    compared = 0
    for chart in tree.sorted_charts():
        if chart.setup is None:
            continue
        alt = build_setup(chart, chart.setup.point, pick="last")
        assert alt.invariant == chart.setup.invariant, chart.id
        compared += 1
    assert compared >= 1
