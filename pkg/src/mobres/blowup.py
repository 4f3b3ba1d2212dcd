"""Charts, coordinatized centers, blowups and transforms of ideals and mobiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .handicap import HandicapRule, ZERO_TAG
from .ideal import (Ideal, LEX, groebner_basis, ideals_equal, order_at_origin, saturate,
                    smoothness_check)
from .mobile import Mobile, Setup, coefficient_ideal
from .poly import (BLOWUP, TRIANGULAR, NotDivisibleError, Polynomial, SubstitutionMap,
                   exact_divide)


class BlowupError(RuntimeError):
    pass


@dataclass
class ExceptionalComponent:
    label: int
    equation: Polynomial
    birth_step: int


@dataclass(eq=False)
class Chart:
    id: str
    variables: tuple
    mobile: Mobile
    components: dict                  # label -> equation in chart coordinates
    births: dict                      # label -> birth step
    parent: "Chart | None" = None
    pullback: SubstitutionMap | None = None   # parent coordinates -> this chart
    path: SubstitutionMap | None = None       # root coordinates -> this chart
    strict: Ideal | None = None               # scheme mode: strict transform
    depth: int = 0
    setup_cache: dict = field(default_factory=dict, repr=False)
    # filled in by the resolver
    setup: Setup | None = None
    center: list | None = None
    status: str = "active"
    weak_top: Ideal | None = None             # I_n' on this chart (diagnostics)

    @classmethod
    def root(cls, mobile: Mobile, components=None, strict=None):
        variables = mobile.J.variables
        components = dict(sorted((components or {}).items()))
        return cls("0", variables, mobile, components,
                   {lab: 0 for lab in components},
                   path=SubstitutionMap.identity(variables), strict=strict)

    def exceptional(self):
        return [ExceptionalComponent(lab, eq, self.births[lab])
                for lab, eq in sorted(self.components.items())]

    def to_json(self):
        out = {
            "id": self.id,
            "parent": self.parent.id if self.parent else None,
            "variables": list(self.variables),
            "substitution": {v: str(p) for v, p in self.path.images},
            "exceptional": [{"label": e.label, "equation": str(e.equation),
                             "birthStep": e.birth_step} for e in self.exceptional()],
            "mobile": {"J": self.mobile.J.strings(), "c": self.mobile.c,
                       "handicap": self.mobile.rule.to_json()},
            "invariant": list(self.setup.invariant) if self.setup else None,
            "center": [str(p) for p in self.center] if self.center else None,
            "resolved": self.status == "resolved",
            "status": self.status,
        }
        if self.strict is not None:
            out["strict_transform"] = self.strict.strings()
        return out


@dataclass
class Edge:
    parent: str
    child: str
    center: list
    pivot: str

    def to_json(self):
        return {"parent": self.parent, "child": self.child,
                "center": [str(p) for p in self.center], "pivot": self.pivot}


@dataclass
class ChartTree:
    root: Chart
    nodes: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    next_label: int = 1

    def __post_init__(self):
        self.nodes[self.root.id] = self.root
        if self.root.components:
            self.next_label = max(self.root.components) + 1

    def add(self, chart: Chart, edge: Edge):
        self.nodes[chart.id] = chart
        self.edges.append(edge)

    def children(self, chart_id):
        return [self.nodes[e.child] for e in self.edges if e.parent == chart_id]

    def leaves(self):
        parents = {e.parent for e in self.edges}
        return [c for cid, c in sorted(self.nodes.items(), key=lambda t: chart_sort_key(t[0]))
                if cid not in parents]

    def sorted_charts(self):
        return [self.nodes[k] for k in sorted(self.nodes, key=chart_sort_key)]

    def to_json(self):
        return {"nodes": [c.to_json() for c in self.sorted_charts()],
                "edges": [e.to_json() for e in
                          sorted(self.edges, key=lambda e: chart_sort_key(e.child))]}


def chart_sort_key(chart_id):
    parts = chart_id.split(".")
    return (len(parts), parts)


# -- centers ---------------------------------------------------------------------------

def _fresh(variables, taken):
    k = 1
    while f"u{k}" in variables or f"u{k}" in taken:
        k += 1
    return f"u{k}"


def coordinatize_center(variables, center):
    """Find a triangular change making the center a coordinate subspace.

    Returns ``(Z, change)`` with ``change`` mapping the old coordinates to
    polynomials in the new ones and ``Z`` the new names cut out by the center.
    """
    variables = tuple(variables)
    polys = [p for p in center if not p.is_zero()]
    if not polys:
        raise BlowupError("center not coordinable: empty center")
    if len({p.monic() for p in polys}) != len(polys):
        raise BlowupError("center not coordinable: duplicate equations")
    gb = groebner_basis(Ideal(polys, variables), LEX)
    if gb.is_unit():
        raise BlowupError("center not coordinable: center is empty")
    leads = {}
    for g in gb.basis:
        exps, coef = g.leading_term(LEX.key)
        if sum(exps) != 1:
            raise BlowupError(f"center not coordinable: {g}")
        v = variables[exps.index(1)]
        leads[v] = g
    new_names = list(variables)
    images = {}
    taken = set()
    for v, g in sorted(leads.items(), key=lambda t: variables.index(t[0])):
        h = g - Polynomial.variable(v, variables)
        if any(h.involves(w) for w in leads):
            raise BlowupError(f"center not coordinable: {g}")
        if h.is_constant():
            images[v] = -h
            continue
        u = _fresh(variables, taken)
        taken.add(u)
        new_names[variables.index(v)] = u
        images[v] = (u, h)
    target = tuple(new_names)
    full = {}
    rename = {v: new_names[i] for i, v in enumerate(variables)}
    for v, img in images.items():
        if isinstance(img, tuple):
            u, h = img
            full[v] = Polynomial.variable(u, target) - h.rename(rename)
        else:
            full[v] = Polynomial.variable(v, target) + img.rename(rename)
    for v in variables:
        if v not in full:
            full[v] = Polynomial.variable(v, target)
    change = SubstitutionMap.build(variables, target, full, TRIANGULAR)
    Z = tuple(rename[v] for v in variables if v in leads)
    return Z, change


def chart_maps(variables, Z):
    """Standard chart substitutions of the blowup in the coordinate center Z."""
    variables = tuple(variables)
    if len(set(Z)) != len(Z) or any(z not in variables for z in Z):
        raise BlowupError(f"bad center {Z}")
    if len(Z) == 1:
        return [(Z[0], SubstitutionMap.identity(variables, BLOWUP))]
    out = []
    for p in Z:
        pv = Polynomial.variable(p, variables)
        images = {q: pv * Polynomial.variable(q, variables) for q in Z if q != p}
        out.append((p, SubstitutionMap.build(variables, variables, images, BLOWUP)))
    return out


def transform_ideal(I: Ideal, kind: str, chart_map: SubstitutionMap,
                    y: Polynomial | None = None, amount: int = 0) -> Ideal:
    """Total, weak or controlled transform under a chart map."""
    total = Ideal([chart_map.apply(g) for g in I.generators], chart_map.target)
    if kind == "total":
        return total
    if kind not in ("weak", "controlled"):
        raise ValueError(f"unknown transform {kind}")
    if amount == 0:
        return total
    div = y ** amount
    return Ideal([exact_divide(g, div) for g in total.generators], chart_map.target)


def strict_transform(I: Ideal, chart_map: SubstitutionMap, y: Polynomial) -> Ideal:
    total = transform_ideal(I, "total", chart_map)
    if len(total.generators) == 1:
        g = total.generators[0]
        while True:
            try:
                g = exact_divide(g, y)
            except Exception:
                break
        return Ideal([g], chart_map.target)
    return saturate(total, y)


HYPERSURFACE_PIVOT = "hyp"


def _multiplicity(f, g):
    k = 0
    while not g.is_constant():
        try:
            g = exact_divide(g, f)
        except NotDivisibleError:
            break
        k += 1
    return k


def center_charts(variables, center):
    """Coordinate change, chart maps and order function for a center.

    A coordinatizable center gives the standard charts.  A smooth hypersurface
    without triangular coordinates is blown up formally: one chart, identity
    map, and the equation itself as the new component.
    """
    try:
        Z, change = coordinatize_center(variables, center)
    except BlowupError:
        polys = [p for p in center if not p.is_zero()]
        if len(polys) != 1 or polys[0].is_constant():
            raise
        f = polys[0].monic()
        if not smoothness_check(Ideal([f], variables), 1)[0]:
            raise
        ident = SubstitutionMap.identity(variables, BLOWUP)
        return (SubstitutionMap.identity(variables), [(HYPERSURFACE_PIVOT, ident, f)],
                lambda eq: _multiplicity(f, eq))
    target = change.target
    maps = [(p, bmap, Polynomial.variable(p, target)) for p, bmap in chart_maps(target, Z)]
    return change, maps, lambda eq: eq.degree_in_subset(Z)


# -- blowups of charts ---------------------------------------------------------------------

def _monomial(D, comps, variables):
    m = Polynomial.one(variables)
    for lab, mult in sorted(D.items()):
        if lab in comps:
            m = m * comps[lab] ** mult
    return m


def blowup_chart(tree: ChartTree, chart: Chart, setup: Setup, step: int):
    """Blow up the setup's center on ``chart``; return the new charts."""
    change, maps, ord_of = center_charts(chart.variables, setup.center)
    label = tree.next_label
    tree.next_label += 1
    new_vars = change.target
    ref = setup.reference()
    n = len(chart.variables)
    c = chart.mobile.c
    # top-level split J = M * I along the center, for the product assertion
    M_top = _monomial(ref[0][3], chart.components, chart.variables)
    I_top = Ideal([exact_divide(g, M_top) for g in chart.mobile.J.generators],
                  chart.variables)
    o_top = ref[0][1]
    moved = {lab: change.apply(eq) for lab, eq in chart.components.items()}
    ord_z = {lab: ord_of(eq) for lab, eq in moved.items()}
    children = []
    for pivot, bmap, y in maps:
        full = change.compose(bmap)
        comps = {}
        for lab, eq in moved.items():
            img = bmap.apply(eq)
            if ord_z[lab]:
                img = exact_divide(img, y ** ord_z[lab])
            if img.is_constant():
                continue
            comps[lab] = img.monic()
        comps[label] = y
        births = {lab: chart.births[lab] for lab in comps if lab != label}
        births[label] = step
        D, E = [], []
        for idx in range(n):
            tag, o, cn, Dj, Ej = ref[idx]
            d = {}
            ymult = o - cn
            for lab, mult in Dj.items():
                ymult += ord_z.get(lab, 0) * mult
                if lab in comps and lab != label:
                    d[lab] = d.get(lab, 0) + mult
            if ymult < 0:
                raise BlowupError(
                    f"negative multiplicity {ymult} of the new component at level {n - idx}")
            if ymult:
                d[label] = ymult
            D.append(d)
            E.append(frozenset(lab for lab in Ej if lab in comps and lab != label))
        rule = HandicapRule(n, False, tuple(D), tuple(E),
                            tuple(ref[i][0] for i in range(n)),
                            tuple(ref[i][1] for i in range(n)), label)
        Jc = transform_ideal(chart.mobile.J, "controlled", full, y, c)
        weak = transform_ideal(I_top, "weak", full, y, o_top)
        M_new = _monomial(D[0], comps, new_vars)
        product = Ideal([M_new * g for g in weak.generators], new_vars)
        if product != Jc and not ideals_equal(product, Jc):
            raise BlowupError("J' differs from M' * I' after the blowup")
        strict = None
        if chart.strict is not None:
            strict = strict_transform(chart.strict, full, y)
        child = Chart(f"{chart.id}.{pivot}", new_vars, Mobile(Jc, c, rule), comps, births,
                      parent=chart, pullback=full, path=chart.path.compose(full),
                      strict=strict, depth=chart.depth + 1, weak_top=weak)
        children.append(child)
        tree.add(child, Edge(chart.id, child.id, setup.center, pivot))
    return children


def commutation_check(parent: Chart, child: Chart):
    """Compare (coeff_V K)^! with coeff_V'(K^v) at the child's origin.

    Uses the top level of the parent's setup.  Returns None when the check
    does not apply: setup away from the origin, non-coordinate flag or
    center, V' missing from the chart, or ord K^v dropped at the origin.
    """
    setup = parent.setup
    if setup is None or any(setup.point) or not setup.levels:
        return None
    top = setup.levels[0]
    if top.K is None or top.flag is None or top.tag.o == 0:
        return None
    variables = parent.variables
    flag = top.flag.monic()
    v = next((w for w in variables if flag == Polynomial.variable(w, variables)), None)
    pivot = child.id.rsplit(".", 1)[1]
    if v is None or pivot not in variables:
        return None
    Z, change = coordinatize_center(variables, setup.center)
    if v is None or not change.is_identity() or v not in Z:
        return None
    pivot = child.id.rsplit(".", 1)[1]
    if pivot == v:
        return None
    K, k = top.K, top.tag.k
    y = Polynomial.variable(pivot, variables)
    ord_z = min(g.degree_in_subset(Z) for g in K.generators)
    weak = transform_ideal(K, "weak", child.pullback, y, ord_z)
    if order_at_origin(weak) != k:
        return None
    rest = tuple(w for w in variables if w != v)
    coeff = coefficient_ideal(K, k, v, exact=True)
    sub = SubstitutionMap.build(rest, rest, {w: child.pullback.image(w).change_ring(rest)
                                             for w in rest})
    y_rest = Polynomial.variable(pivot, rest)
    before = transform_ideal(coeff, "controlled", sub, y_rest, math.factorial(k))
    after = coefficient_ideal(weak, k, v, exact=True)
    return ideals_equal(before, after)


__all__ = ["commutation_check", "BlowupError", "Chart", "ChartTree", "Edge", "ExceptionalComponent",
           "blowup_chart", "center_charts", "chart_maps", "coordinatize_center", "strict_transform",
           "transform_ideal", "ZERO_TAG"]
