import pytest

from conftest import P, XY, XYZ, run_corpus, swap_mismatches
from mobres.blowup import Chart, HYPERSURFACE_PIVOT
from mobres.handicap import HandicapRule
from mobres.ideal import Ideal, ideals_equal
from mobres.mobile import Mobile
from mobres.resolver import (BudgetExhausted, resolve_mobile, resolve_scheme,
                             separate_components, verify_chart)


def I(*gens, variables=XY):
    return Ideal([P(g, variables) for g in gens], variables)


def mobile(gens, c=1, variables=XY):
    return Mobile(I(*gens, variables=variables), c, HandicapRule.empty(len(variables)))


# -- resolve_mobile ------------------------------------------------------------------

def test_mobile_smooth_hypersurface_one_formal_blowup():
    tree, report = resolve_mobile(mobile(["x"]))
    assert report.blowups == 1
    assert report.steps[0]["center"] == ["x"]
    (leaf,) = tree.leaves()
    assert leaf.mobile.J == I("1")
    assert report.verified()


def test_mobile_cusp_first_step():
    tree, report = resolve_mobile(mobile(["y^2 - x^3"]))
    first = report.steps[0]
    assert first["invariant"] == [2, 2, 0, 0, 3, 3, 0, 0]
    assert ideals_equal(I(*first["center"]), I("x", "y"))
    assert report.status == "resolved"
    assert report.verified()
    assert all(c.status == "resolved" for c in tree.leaves())


def test_mobile_cusp_blows_up_strict_transform_formally():
    # with control 1 the smooth strict transform off the origin is itself a center
    tree, _ = resolve_mobile(mobile(["y^2 - x^3"]))
    assert any(cid.endswith("." + HYPERSURFACE_PIVOT) for cid in tree.nodes)


def test_mobile_combinatorial_example():
    _, tree, report = run_corpus("combinatorial")
    first = report.steps[0]
    assert ideals_equal(I(*first["center"]), I("x", "y"))
    assert tree.nodes["0.x"].mobile.J == I("x*y^3")
    assert report.status == "resolved" and report.verified()


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted, match="budget"):
        resolve_mobile(mobile(["y^2 - x^3"]), max_steps=1)
    with pytest.raises(ValueError):
        resolve_mobile(mobile(["x"]), max_steps=0)


# -- resolve_scheme ------------------------------------------------------------------

def test_scheme_cusp():
    _, tree, report = run_corpus("cusp")
    assert report.status == "resolved" and report.verified()
    assert ideals_equal(I(*report.steps[0]["center"]), I("x", "y"))
    for leaf in tree.leaves():
        assert verify_chart(leaf)


def test_scheme_smooth_input_zero_blowups():
    tree, report = resolve_scheme(I("y - x^2"))
    assert report.blowups == 0
    assert list(tree.nodes) == ["0"]
    assert report.verified()


def test_scheme_rejects_trivial_and_zero():
    with pytest.raises(ValueError):
        resolve_scheme(I("1"))
    with pytest.raises(ValueError):
        resolve_scheme(Ideal([], XY))


@pytest.mark.slow
def test_scheme_umbrella_first_center_is_origin():
    _, _, report = run_corpus("umbrella")
    assert report.status == "resolved" and report.verified()
    assert ideals_equal(I(*report.steps[0]["center"], variables=XYZ), I("x", "y", "z",
                                                                         variables=XYZ))


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "A4"])
def test_an_family_decreases(name):
    _, tree, report = run_corpus(name)
    assert report.status == "resolved" and report.verified()
    dec = [c for c in report.checks if c.name == "invariant-decrease"]
    assert len(dec) == len(tree.edges)
    assert all(c.passed for c in dec)


def test_scheme_is_deterministic():
    a = resolve_scheme(I("y^2 - x^3"))
    b = resolve_scheme(I("y^2 - x^3"))
    assert a[0].to_json() == b[0].to_json()
    assert a[1].to_json(a[0]) == b[1].to_json(b[0])


# -- equivariance --------------------------------------------------------------------

def test_equivariance_under_swap():
    _, tree, _ = run_corpus("cusp")
    _, other, _ = run_corpus("cusp_swapped")
    assert swap_mismatches(tree.to_json(), other.to_json()) == []


# -- separate_components -------------------------------------------------------------

@pytest.mark.parametrize("x2, coeff", [("y - x^2", "x^2"), ("y - x^3", "x^3")])
def test_separate_components_examples(x2, coeff):
    mob, comps, change = separate_components(I("y"), I(x2))
    assert mob.c == 1
    assert mob.J == Ideal([P(coeff, ("x",))], ("x",))
    assert comps == {}


def test_separate_components_errors():
    with pytest.raises(ValueError, match="components not distinct"):
        separate_components(I("y"), I("y"))
    with pytest.raises(ValueError, match="disjoint"):
        separate_components(I("y"), I("y - 1"))
    with pytest.raises(ValueError, match="not smooth"):
        separate_components(I("y^2 - x^3"), I("y"))
    with pytest.raises(ValueError, match="hypersurface"):
        separate_components(I("x", "y"), I("y"))


def test_separate_components_restricts_exceptional():
    mob, comps, _ = separate_components(I("y"), I("y - x^2"), {1: P("x"), 2: P("y")})
    assert comps == {1: P("x", ("x",))}
    assert mob.rule.E[0] == frozenset({1})


# -- verification ---------------------------------------------------------------------

def _chart(strict=None, components=None):
    return Chart.root(mobile(["x"]), components,
                      strict=None if strict is None else I(strict))


def test_verify_chart_singular_strict_transform():
    checks = []
    assert not verify_chart(_chart("y^2 - x^3", {1: P("x")}), checks)
    bad = [c for c in checks if not c.passed]
    assert bad[0].name == "strict-transform-smooth"
    assert bad[0].witness


def test_verify_chart_tangent_components():
    checks = []
    assert not verify_chart(_chart(None, {1: P("x"), 2: P("x + y^2")}), checks)
    (bad,) = [c for c in checks if not c.passed]
    assert bad.name == "normal-crossings"
    assert bad.witness == "1,2"


def test_verify_chart_normal_crossings_pass():
    checks = []
    assert verify_chart(_chart("y - 1", {1: P("x"), 2: P("y")}), checks)
    assert all(c.passed for c in checks)
