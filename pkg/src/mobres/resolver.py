"""Resolution loops for mobiles and schemes, plus the verification suite."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .blowup import (HYPERSURFACE_PIVOT, Chart, ChartTree, blowup_chart, center_charts,
                     chart_sort_key, coordinatize_center)
from .handicap import HandicapRule
from .ideal import (Ideal, IdealError, delta, delta_power, dimension, is_trivial,
                    minors, radical_contains, rational_points, reduced,
                    smoothness_check)
from .mobile import Mobile, NotCoordinable, build_setup, coefficient_ideal
from .poly import Polynomial, exact_divide

DEFAULT_MAX_STEPS = 64
NC_MAX_DIM = 4


class ResolutionError(RuntimeError):
    pass


class BudgetExhausted(ResolutionError):
    pass


@dataclass
class Check:
    name: str
    chart: str
    passed: bool
    witness: str = ""

    def to_json(self):
        out = {"name": self.name, "chart": self.chart, "passed": self.passed}
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class ResolutionReport:
    mode: str
    steps: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    caveats: list = field(default_factory=list)
    status: str = "running"

    @property
    def blowups(self):
        return len(self.steps)

    @property
    def rounds(self):
        return len({s["round"] for s in self.steps})

    def verified(self):
        return all(c.passed for c in self.checks)

    def to_json(self, tree=None):
        out = {"mode": self.mode, "status": self.status,
               "blowups": self.blowups, "rounds": self.rounds,
               "steps": self.steps,
               "verification": [c.to_json() for c in self.checks],
               "verified": self.verified(),
               "caveats": sorted(set(self.caveats))}
        if tree is not None:
            out["leaves"] = [{"id": c.id, "status": c.status} for c in tree.leaves()]
        return out


# -- locating the top stratum ---------------------------------------------------------------

def _top_monomial(chart):
    rule = chart.mobile.rule
    D = rule.D[0] if rule.D else {}
    m = Polynomial.one(chart.variables)
    for lab, mult in sorted(D.items()):
        if lab in chart.components:
            m = m * chart.components[lab] ** mult
    return m


def top_locus(chart):
    """Ideal A of the points where ord J >= c and o_n is maximal, or None."""
    J, c = chart.mobile.J, chart.mobile.c
    L = delta_power(J, c - 1)
    if is_trivial(L):
        return None
    M = _top_monomial(chart)
    I = Ideal([exact_divide(g, M) for g in J.generators], chart.variables)
    best = L
    cur = reduced(I)
    while True:
        cand = reduced(cur + L)
        if is_trivial(cand):
            return best
        best = cand
        cur = reduced(delta(cur))


def _generic_value(rng):
    return Fraction(rng.randint(2, 29))


_SMALL_VALUES = (1, -1, 2, -2, Fraction(1, 2), 3)


def _slice_points(ideal, dim, rng, tries=3):
    """Rational points of the stratum on slices fixing ``dim`` coordinates.

    Generic values first; small values as a fallback, since special points
    can only raise the invariant.
    """
    variables = ideal.variables
    for generic in (True, False):
        for subset in itertools.combinations(variables, dim):
            if generic:
                choices = [[_generic_value(rng) for _ in subset] for _ in range(tries)]
            else:
                choices = itertools.product(_SMALL_VALUES, repeat=dim)
            for values in choices:
                fixed = [Polynomial.variable(v, variables) - a for v, a in zip(subset, values)]
                piece = ideal + Ideal(fixed, variables)
                if is_trivial(piece) or dimension(piece) != 0:
                    continue
                pts, _ = rational_points(piece)
                if pts:
                    return pts
    return []


def candidate_points(chart, A, rng, caveats):
    variables = chart.variables
    n = len(variables)
    zero = (Fraction(0),) * n
    points = []
    if all(g.evaluate(zero) == 0 for g in A.generators):
        points.append(zero)
    comps = sorted(chart.components)
    for size in range(0, len(comps) + 1):
        for S in itertools.combinations(comps, size):
            ideal = A + Ideal([chart.components[lab] for lab in S], variables) \
                if S else A
            if is_trivial(ideal):
                continue
            dim = dimension(ideal)
            if dim == 0:
                pts, complete = rational_points(ideal)
                if not complete:
                    caveats.append(f"irrational points skipped on chart {chart.id}")
                points.extend(pts)
                continue
            vanish = [v for v in variables
                      if radical_contains(ideal, Polynomial.variable(v, variables))]
            zero_sub = {v: Polynomial.zero(variables) for v in vanish}
            if all(g.substitute(zero_sub, variables).is_zero() for g in ideal.generators):
                pt = tuple(Fraction(0) if v in vanish else _generic_value(rng)
                           for v in variables)
                points.append(pt)
            else:
                pts = _slice_points(ideal, dim, rng)
                if pts:
                    caveats.append(f"non-coordinate stratum of dimension {dim} sampled "
                                   f"at generic points on chart {chart.id}")
                else:
                    caveats.append(f"non-coordinate stratum of dimension {dim} skipped "
                                   f"on chart {chart.id}")
                points.extend(pts)
    seen = []
    for p in points:
        if p not in seen:
            seen.append(p)
    return seen


def locate_top(chart, rng=None, caveats=None, pick="first"):
    """Setup at the lex-maximal invariant among the candidate points, or None."""
    rng = rng or random.Random(0)
    caveats = caveats if caveats is not None else []
    A = top_locus(chart)
    if A is None:
        return None
    points = candidate_points(chart, A, rng, caveats)
    if not points:
        raise ResolutionError(f"no rational candidate point on chart {chart.id}")
    best = None
    for p in points:
        try:
            s = build_setup(chart, p, pick)
        except NotCoordinable:
            caveats.append(f"no polynomial flag at sampled point "
                           f"({', '.join(map(str, p))}) on chart {chart.id}")
            continue
        if best is None or s.invariant > best.invariant:
            best = s
    if best is None:
        raise ResolutionError(f"no candidate point with a computable setup on chart {chart.id}")
    return best


# -- verification -------------------------------------------------------------------------

def _block_check(blocks, variables):
    """Normal-crossings test for smooth pieces given by equation blocks.

    Returns the first failing subset (as indices) or None.
    """
    n = len(variables)
    for size in range(2, len(blocks) + 1):
        for subset in itertools.combinations(range(len(blocks)), size):
            eqs = [e for i in subset for e in blocks[i]]
            ideal = Ideal(eqs, variables)
            if len(eqs) > n:
                if not is_trivial(ideal):
                    return subset
                continue
            if not is_trivial(ideal + Ideal(minors(eqs, len(eqs)), variables)):
                return subset
    return None


def _strict_blocks(strict: Ideal):
    if strict is None or is_trivial(strict):
        return []
    return [list(strict.generators)]


def verify_chart(chart: Chart, checks=None):
    """Embedded-resolution checks on one chart; appends Check entries."""
    out = [] if checks is None else checks
    variables = chart.variables
    ok = True
    strict = chart.strict
    if strict is not None and not is_trivial(strict):
        n = len(variables)
        codim = n - dimension(strict)
        smooth, witness = smoothness_check(strict, codim)
        out.append(Check("strict-transform-smooth", chart.id, smooth,
                         "" if smooth else str(witness)))
        ok = ok and smooth
    for lab, eq in sorted(chart.components.items()):
        smooth, witness = smoothness_check(Ideal([eq], variables), 1)
        out.append(Check(f"exceptional-{lab}-smooth", chart.id, smooth,
                         "" if smooth else str(witness)))
        ok = ok and smooth
    if len(variables) <= NC_MAX_DIM:
        blocks = _strict_blocks(strict) + [[eq] for _, eq in sorted(chart.components.items())]
        bad = _block_check(blocks, variables)
        names = (["X"] if _strict_blocks(strict) else []) + \
            [str(lab) for lab in sorted(chart.components)]
        out.append(Check("normal-crossings", chart.id, bad is None,
                         "" if bad is None else ",".join(names[i] for i in bad)))
        ok = ok and bad is None
    return ok


def center_checks(chart: Chart, center, checks):
    """Smoothness of the center and transversality to the exceptional divisor."""
    variables = chart.variables
    gens = [p for p in center if not p.is_zero()]
    try:
        change, maps, ord_of = center_charts(variables, gens)
    except Exception as exc:  # noqa: BLE001 - reported as a failed check
        checks.append(Check("center-smooth", chart.id, False, str(exc)))
        return False
    checks.append(Check("center-smooth", chart.id, True))
    target = change.target
    if maps[0][0] == HYPERSURFACE_PIVOT:
        blocks = [[maps[0][2]]]
    else:
        Z = [v for v in target if any(y.involves(v) for _, _, y in maps)]
        blocks = [[Polynomial.variable(z, target) for z in Z]]
    for lab, eq in sorted(chart.components.items()):
        moved = change.apply(eq)
        if ord_of(moved):
            continue  # the component contains the center
        blocks.append([moved])
    ok = True
    if len(variables) <= NC_MAX_DIM:
        n = len(variables)
        for size in range(1, len(blocks)):
            for subset in itertools.combinations(range(1, len(blocks)), size):
                eqs = blocks[0] + [blocks[i][0] for i in subset]
                ideal = Ideal(eqs, target)
                if len(eqs) > n:
                    good = is_trivial(ideal)
                else:
                    good = is_trivial(ideal + Ideal(minors(eqs, len(eqs)), target))
                ok = ok and good
    checks.append(Check("center-transversal", chart.id, ok))
    return ok


def decrease_checks(tree: ChartTree, checks, caveats=None):
    """Child lex-max invariant < parent invariant on every edge.

    Children never processed (resolved leaves) get their invariant computed
    here; a child whose mobile is resolved has dropped below every value.
    """
    ok = True
    for e in sorted(tree.edges, key=lambda e: chart_sort_key(e.child)):
        parent, child = tree.nodes[e.parent], tree.nodes[e.child]
        if parent.setup is None:
            continue
        setup = child.setup
        if setup is None:
            try:
                setup = locate_top(child, random.Random(0), [])
            except ResolutionError as exc:
                if caveats is not None:
                    caveats.append(f"invariant decrease not checked on chart {child.id}: {exc}")
                continue
        if setup is None:
            checks.append(Check("invariant-decrease", child.id, True))
            continue
        good = setup.invariant < parent.setup.invariant
        checks.append(Check("invariant-decrease", child.id, good,
                            "" if good else f"{list(setup.invariant)} !< "
                                            f"{list(parent.setup.invariant)}"))
        ok = ok and good
    return ok


def verify_resolution(tree: ChartTree, scheme: bool = True, caveats=None):
    checks = []
    for chart in tree.sorted_charts():
        if chart.center is not None:
            center_checks(chart, chart.center, checks)
    decrease_checks(tree, checks, caveats)
    for leaf in tree.leaves():
        if scheme:
            verify_chart(leaf, checks)
        else:
            ok = top_locus(leaf) is None
            checks.append(Check("order-below-control", leaf.id, ok))
    return checks


# -- drivers -----------------------------------------------------------------------------

def _mobile_resolved(chart):
    return is_trivial(delta_power(chart.mobile.J, chart.mobile.c - 1))


def _run(tree: ChartTree, report: ResolutionReport, max_steps, scheme, seed, pick):
    rng = random.Random(seed)
    active = [tree.root]
    rnd = 0
    while active:
        nxt = []
        for chart in sorted(active, key=lambda c: c.id):
            if scheme and verify_chart(chart):
                chart.status = "resolved"
                continue
            setup = locate_top(chart, rng, report.caveats, pick)
            if setup is None:
                chart.status = "resolved"
                continue
            if rnd >= max_steps:
                chart.status = "active"
                report.status = "budget-exhausted"
                raise BudgetExhausted(f"step budget of {max_steps} blowup rounds exhausted")
            chart.setup, chart.center = setup, setup.center
            children = blowup_chart(tree, chart, setup, report.blowups + 1)
            chart.status = "blown-up"
            report.steps.append({
                "step": report.blowups + 1, "round": rnd, "chart": chart.id,
                "invariant": list(setup.invariant),
                "center": [str(p) for p in setup.center],
                "stop": setup.stop,
                "charts": len(tree.nodes)})
            nxt.extend(children)
        active = nxt
        rnd += 1
    report.status = "resolved"


def resolve_mobile(mobile: Mobile, components=None, max_steps=DEFAULT_MAX_STEPS,
                   seed=0, pick="first", verify=True):
    """Blow up until the controlled transform has order below c on every chart."""
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    tree = ChartTree(Chart.root(mobile, components))
    report = ResolutionReport("mobile")
    try:
        _run(tree, report, max_steps, False, seed, pick)
    finally:
        if verify and report.status == "resolved":
            report.checks = verify_resolution(tree, False, report.caveats)
    return tree, report


def resolve_scheme(X: Ideal, max_steps=DEFAULT_MAX_STEPS, seed=0, pick="first",
                   verify=True):
    """Embedded resolution with control 1 and empty handicaps."""
    if X.is_zero() or is_trivial(X):
        raise ValueError("scheme ideal must be proper and nonzero")
    n = len(X.variables)
    mobile = Mobile(X, 1, HandicapRule.empty(n))
    tree = ChartTree(Chart.root(mobile, strict=X))
    report = ResolutionReport("scheme")
    _run(tree, report, max_steps, True, seed, pick)
    if verify:
        report.checks = verify_resolution(tree, True, report.caveats)
    return tree, report


def separate_components(X1: Ideal, X2: Ideal, components=None):
    """Mobile on the smooth hypersurface X1 whose resolution separates X2 from it.

    Returns ``(mobile, restricted_components, change)`` where the mobile lives
    in the coordinates of X1 = {z = 0} after the triangular ``change``.
    """
    if X2.is_zero():
        raise ValueError("X2 must be nonzero")
    if len(X1.generators) != 1:
        raise ValueError("X1 must be a hypersurface")
    variables = X1.variables
    smooth, _ = smoothness_check(X1, 1)
    if not smooth:
        raise ValueError("X1 is not smooth")
    try:
        (z,), change = coordinatize_center(variables, list(X1.generators))
    except Exception as exc:
        raise ValueError(f"X1 not coordinatizable: {exc}") from exc
    K = Ideal([change.apply(g) for g in X2.generators], change.target)
    on_x1 = Ideal([Polynomial.variable(z, change.target)], change.target)
    c = 0
    cur = K
    while not is_trivial(cur + on_x1):
        c += 1
        cur = reduced(delta(cur))
    if c == 0:
        raise ValueError("components are already disjoint")
    coeff = coefficient_ideal(K, c, z)
    if coeff.is_zero():
        raise ValueError("components not distinct")
    rest = coeff.variables
    comps = {}
    for lab, eq in sorted((components or {}).items()):
        r = change.apply(eq).substitute({z: Polynomial.zero(change.target)},
                                         change.target)
        if not r.is_constant():
            comps[lab] = r.change_ring(rest)
    n = len(rest)
    rule = HandicapRule(n, True, tuple({} for _ in range(n)),
                        tuple(frozenset(comps) if i == 0 else frozenset()
                              for i in range(n)))
    return Mobile(coeff, math.factorial(c), rule), comps, change


__all__ = ["BudgetExhausted", "ResolutionError", "ResolutionReport", "Check",
           "locate_top", "resolve_mobile", "resolve_scheme", "separate_components",
           "top_locus", "verify_chart", "verify_resolution", "IdealError"]
