"""Mobiles and the descent in dimension that computes the resolution invariant.

A setup is computed at the origin after translating the point of interest
there.  At each level the ideal J_i splits as M_i * I_i, the tag (o, k, m) is
recorded, and either the descent stops (combinatorial or bold regular case)
or continues with the junior ideal in an osculating hypersurface.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .handicap import (HandicapRule, Tag, ZERO_TAG, compute_tag, invariant_vector,
                       maximal_tight_shortcut)
from .ideal import Ideal, is_trivial, order_at_origin, quotient, reduced
from .poly import NotDivisibleError, Polynomial, exact_divide


class SetupError(RuntimeError):
    pass


class TransversalityError(SetupError):
    pass


class NotCoordinable(SetupError):
    pass


@dataclass
class Mobile:
    """The datum (J, c, D, E); the handicaps live in a HandicapRule."""
    J: Ideal
    c: int
    rule: HandicapRule

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("control must be at least 1")
        if self.J.is_zero():
            raise ValueError("J must not be the zero ideal")

    @property
    def n(self):
        return len(self.J.variables)


# -- the ideals of one level ---------------------------------------------------------

def companion_ideal(I: Ideal, M: Polynomial, o: int, c: int) -> Ideal:
    """P = I^(c-o) + M^o when 0 < o < c, otherwise P = I."""
    if 0 < o < c:
        return I ** (c - o) + Ideal([M ** o], I.variables)
    return I


def transversality_ideal(equations, variables) -> Ideal:
    """Product of the restricted transversal components (the unit ideal if none)."""
    q = Polynomial.one(variables)
    for eq in equations:
        q = q * eq
    return Ideal([q], variables)


def composition_ideal(P: Ideal, Q: Ideal, I: Ideal) -> Ideal:
    if I.has_unit_generator():
        return Ideal.unit(I.variables)
    return P * Q


@dataclass(frozen=True)
class Osculation:
    generator: Polynomial
    multi_index: tuple
    variable: str
    equation: Polynomial  # u * variable + h with u(0) != 0, u and h free of variable
    unit: Polynomial
    rest: Polynomial


def _multi_indices(n, total):
    """Exponent vectors of the given total, lexicographically descending."""
    out = [a for a in itertools.product(range(total + 1), repeat=n) if sum(a) == total]
    out.sort(reverse=True)
    return out


def _linear_in(g: Polynomial, v: str):
    """Split g = u * v + h with u(0) != 0 and u, h free of v, or return None."""
    coeffs = g.coefficients_in(v)
    if max(coeffs) != 1:
        return None
    u = coeffs[1].change_ring(g.variables)
    if u.constant_term() == 0:
        return None
    h = coeffs[0].change_ring(g.variables) if 0 in coeffs else Polynomial.zero(g.variables)
    return u, h


def _order_one_derivatives(P: Ideal, pick: str = "first"):
    """(generator, multi-index, derivative) for the order-one derivatives of order o-1."""
    variables = P.variables
    o = order_at_origin(P)
    if o == 0 or o == math.inf:
        raise SetupError("osculating hypersurface needs finite positive order")
    gens = sorted((g for g in P.generators if g.order() == o), key=str)
    alphas = _multi_indices(len(variables), o - 1)
    if pick == "last":
        gens, alphas = gens[::-1], alphas[::-1]
    for f in gens:
        for alpha in alphas:
            g = f
            for v, times in zip(variables, alpha):
                if times:
                    g = g.derivative(v, times)
            if g.order() == 1:
                yield f, alpha, g


def osculating_candidates(P: Ideal, pick: str = "first"):
    """All admissible osculating hypersurfaces of P in the deterministic order.

    Each is an order-one partial derivative, of total order ord P - 1, of a
    minimal-order generator, written as u*v + h.  ``pick="last"`` walks every
    choice in reverse.
    """
    order = list(P.variables)
    if pick == "last":
        order = order[::-1]
    for f, alpha, g in _order_one_derivatives(P, pick):
        lin = g.linear_part()
        for v in order:
            if not lin[v]:
                continue
            split = _linear_in(g, v)
            if split is not None:
                yield Osculation(f, alpha, v, g, split[0], split[1])


def bold_regular_flag(P: Ideal, K: Ideal, k: int, pick: str = "first"):
    """An order-one derivative g of P with K inside (g^k), or None.

    Then K is bold regular with support V(g); no coordinate change is needed.
    """
    for _, _, g in _order_one_derivatives(P, pick):
        gk = g ** k
        try:
            for h in K.generators:
                exact_divide(h, gk)
        except NotDivisibleError:
            continue
        return g
    return None


def osculating_hypersurface(P: Ideal, pick: str = "first") -> Osculation:
    for osc in osculating_candidates(P, pick):
        return osc
    raise NotCoordinable("no order-one derivative is coordinable")


def coefficient_ideal(K: Ideal, c: int, z: str, exact: bool = False) -> Ideal:
    """Sum over j < c of (coefficients of z^j)^(c!/(c-j)), in the ring without z.

    In one remaining variable the ideal is replaced by the power of that
    variable with the same order at the origin, unless ``exact`` is set.
    """
    rest = tuple(v for v in K.variables if v != z)
    parts = {}
    for f in K.generators:
        for j, a in f.coefficients_in(z).items():
            if j < c and not a.is_zero():
                parts.setdefault(j, []).append(a)
    fact = math.factorial(c)
    if len(rest) == 1 and parts and not exact:
        # one variable: locally the ideal is a power of the coordinate
        o = min(min(a.order() for a in parts[j]) * (fact // (c - j)) for j in parts)
        return Ideal([Polynomial.variable(rest[0], rest) ** o], rest)
    out = None
    for j in sorted(parts):
        piece = Ideal(parts[j], rest) ** (fact // (c - j))
        out = piece if out is None else out + piece
    if out is None:
        return Ideal([], rest)
    if len(out.generators) > 6 and not exact:
        out = reduced(out)
    return out


def junior_ideal(K: Ideal, c: int, z: str):
    """Return (J, bold_regular)."""
    rest = tuple(v for v in K.variables if v != z)
    if K.has_unit_generator():
        return Ideal.unit(rest), False
    coeff = coefficient_ideal(K, c, z)
    if coeff.is_zero():
        return Ideal.unit(rest), True
    return coeff, False


# -- setups ----------------------------------------------------------------------------

COMBINATORIAL = "combinatorial"
BOLD_REGULAR = "bold-regular"


@dataclass
class Level:
    level: int
    variables: tuple
    J: Ideal
    M: Polynomial
    I: Ideal
    control: int            # c_{i+1}
    tag: Tag
    D: dict
    E: frozenset = frozenset()
    P: Ideal | None = None
    Q: Ideal | None = None
    K: Ideal | None = None
    flag: Polynomial | None = None  # flag equation in chart coordinates
    shortcut: object = None

    def to_json(self):
        out = {"level": self.level, "variables": list(self.variables),
               "J": self.J.strings(), "M": str(self.M), "I": self.I.strings(),
               "control": self.control, "tag": list(self.tag.astuple()),
               "D": [[lab, m] for lab, m in sorted(self.D.items())],
               "E": sorted(self.E)}
        if self.K is not None:
            out["K"] = self.K.strings()
        if self.flag is not None:
            out["flag"] = str(self.flag)
        if self.shortcut is not None:
            out["shortcut"] = list(self.shortcut.labels)
        return out


@dataclass
class Setup:
    point: tuple
    n: int
    levels: list
    stop: str
    center: list            # polynomials in chart coordinates
    caveats: list = field(default_factory=list)

    @property
    def tags(self):
        return [lv.tag for lv in self.levels]

    @property
    def invariant(self):
        return invariant_vector(self.tags, self.n)

    def reference(self):
        """Per-level (tag, o, c_{i+1}, D, E) for levels n..1, zero below the stop."""
        refs = []
        for idx in range(self.n):
            if idx < len(self.levels):
                lv = self.levels[idx]
                refs.append((lv.tag, lv.tag.o, lv.control, dict(lv.D), lv.E))
            else:
                refs.append((ZERO_TAG, 0, 0, {}, frozenset()))
        return refs

    def to_json(self):
        return {"point": [str(p) for p in self.point],
                "invariant": list(self.invariant),
                "stop": self.stop, "stop_level": self.levels[-1].level,
                "center": [str(p) for p in self.center],
                "levels": [lv.to_json() for lv in self.levels]}


def _on_new_component(chart, point):
    eq = chart.components.get(chart.mobile.rule.y_label)
    return eq is not None and eq.evaluate(point) == 0


def _parent_setup(chart, point, pick):
    parent = chart.parent
    image = tuple(chart.pullback.image(v).evaluate(point) for v in parent.variables)
    return build_setup(parent, image, pick)


def _through(chart, point):
    return {lab for lab, eq in chart.components.items() if eq.evaluate(point) == 0}


def _materialize_D(chart, point, idx, tags, pick):
    rule = chart.mobile.rule
    if rule.explicit:
        return dict(rule.D[idx])
    if tuple(tags) != tuple(rule.ref_tags[:idx]) or not _through(chart, point):
        # components missing the point never enter M
        return {}
    if _on_new_component(chart, point):
        return dict(rule.D[idx])
    ps = _parent_setup(chart, point, pick)
    if idx >= len(ps.levels):
        return {}
    return {lab: m for lab, m in ps.levels[idx].D.items() if lab in chart.components}


def _materialize_E(chart, point, idx, tags, o, higher, pick):
    rule = chart.mobile.rule
    if rule.explicit:
        return frozenset(rule.E[idx])
    if not _through(chart, point):
        return frozenset()
    inside = (tuple(tags) == tuple(rule.ref_tags[:idx]) and o > 0
              and o == rule.ref_o[idx])
    if inside:
        if _on_new_component(chart, point):
            return frozenset(lab for lab in rule.E[idx] if lab in chart.components)
        ps = _parent_setup(chart, point, pick)
        if idx >= len(ps.levels):
            return frozenset()
        return frozenset(lab for lab in ps.levels[idx].E if lab in chart.components)
    return frozenset(set(chart.components) - set(higher))


def _rational_substitute(F, v, num, den):
    """den^d * F(v -> num/den) with d the degree of F in v; returns (poly, d)."""
    ring = F.variables
    coeffs = F.coefficients_in(v)
    if not coeffs:
        return F, 0
    d = max(coeffs)
    out = Polynomial.zero(ring)
    for j, a in coeffs.items():
        out = out + a.change_ring(ring) * num ** j * den ** (d - j)
    return out, d


def _restrict(eq, images, ring):
    """Restrict a chart polynomial to the flag; images are (num, den) pairs.

    The result is eq(num/den) times a power of each den, a unit at the origin.
    """
    if all(den.is_constant() for den, in ((d,) for _, d in images.values())):
        return eq.substitute({v: num.scale(1 / den.constant_term())
                              for v, (num, den) in images.items()}, ring)
    out = Polynomial.zero(ring)
    degs = {v: eq.degree_in(v) for v in eq.variables}
    for exps, c in eq.terms.items():
        term = Polynomial.constant(c, ring)
        for v, e in zip(eq.variables, exps):
            num, den = images[v]
            term = term * num ** e * den ** (degs[v] - e)
        out = out + term
    return out


def _local_components(labels, comps, to_current, ring, what):
    """Restrictions to the current flag of the listed components through the origin."""
    out = {}
    for lab in sorted(labels):
        eq = comps[lab]
        if eq.constant_term() != 0:
            continue
        r = _restrict(eq, to_current, ring)
        if r.is_zero():
            raise TransversalityError(
                f"flag contained in {what} component {lab}")
        if r.order() != 1:
            raise TransversalityError(
                f"{what} component {lab} is not transversal to the flag")
        out[lab] = r
    return out


def _change_flag(osc, K, to_current, ring):
    """Move the osculating hypersurface to {v = 0} and restrict the images to it."""
    v = osc.variable
    if osc.equation != Polynomial.variable(v, ring):
        num = Polynomial.variable(v, ring) - osc.rest
        den = osc.unit
        K = K.map(lambda g: _rational_substitute(g, v, num, den)[0], ring)
        moved = {}
        for w, (a, b) in to_current.items():
            a2, da = _rational_substitute(a, v, num, den)
            b2, db = _rational_substitute(b, v, num, den)
            moved[w] = (a2 * den ** db, b2 * den ** da)
        to_current = moved
    rest = tuple(w for w in ring if w != v)
    zero = {v: Polynomial.zero(ring)}
    restricted = {w: (a.substitute(zero, ring).change_ring(rest),
                      b.substitute(zero, ring).change_ring(rest))
                  for w, (a, b) in to_current.items()}
    return K, restricted


def _transversal(labels, comps, images, ring):
    try:
        _local_components(labels, comps, images, ring, "D")
    except TransversalityError:
        return False
    return True


def _linear_root(u):
    """(v, root) when u = a*v + b in a single variable, else None."""
    used = u.used_variables()
    if len(used) == 1 and u.total_degree() == 1:
        v = used[0]
        return v, -u.constant_term() / u.linear_part()[v]
    return None


def _divides(u, g):
    """Cheap test for u | g; exact for u = a*v + b, else attempts the division."""
    lin = _linear_root(u)
    if lin is not None:
        return g.specialize(*lin).is_zero()
    try:
        exact_divide(g, u)
    except NotDivisibleError:
        return False
    return True


def _strip_units(I, units):
    """Divide out factors that are components missing the origin (units there)."""
    gens = []
    for g in I.generators:
        for u in units:
            lin = _linear_root(u)
            while not g.is_constant() and _divides(u, g):
                if lin is None:
                    g = exact_divide(g, u)
                else:
                    g = g.divide_linear(*lin)
        gens.append(g)
    return Ideal(gens, I.variables)


def _locally_divisible(J, D, comps, images, ring):
    """Whether the D-monomial on the flag divides J in the local ring at the origin."""
    dloc = _local_components(D, comps, images, ring, "D")
    M = Polynomial.one(ring)
    for lab, eq in dloc.items():
        M = M * eq ** D[lab]
    if M.is_constant():
        return True
    maximal = Ideal([Polynomial.variable(v, ring) for v in ring], ring)
    for g in J.generators:
        try:
            exact_divide(g, M)
        except NotDivisibleError:
            if not is_trivial(quotient(Ideal([g], ring), M) + maximal):
                return False
    return True


def _choose_flag(P, K, k, to_current, ring, comps, cur_E, nxt_D, others, pick):
    """Best admissible osculating hypersurface in the deterministic order.

    Hard requirements, in order: the next D is transversal to the flag, the
    next junior ideal is divisible by its D-monomial, and the flag is not
    contained in a component of the current E.  Transversality to the
    remaining components is preferred.
    """
    best = None
    for osc in osculating_candidates(P, pick):
        K2, images = _change_flag(osc, K, to_current, ring)
        rest = tuple(w for w in ring if w != osc.variable)
        if not _transversal(nxt_D, comps, images, rest):
            score = (1, 1, 1, 1)
        else:
            Jn, bold = junior_ideal(K2, k, osc.variable)
            divisible = bold or _locally_divisible(Jn, nxt_D, comps, images, rest)
            score = (0, int(not divisible),
                     int(not _transversal(cur_E, comps, images, rest)),
                     int(not _transversal(others, comps, images, rest)))
        if best is None or score < best[0]:
            best = (score, (osc, K2, images))
        if score == (0, 0, 0, 0):
            break
    if best is None:
        raise NotCoordinable("no order-one derivative is coordinable")
    return best[1]


def build_setup(chart, point=None, pick="first") -> Setup:
    """Run the descent for the chart's mobile at ``point`` (default: origin)."""
    n = len(chart.variables)
    if point is None:
        point = (Fraction(0),) * n
    point = tuple(Fraction(p) for p in point)
    cache_key = (point, pick)
    cached = chart.setup_cache.get(cache_key)
    if cached is not None:
        return cached
    mobile = chart.mobile
    J = mobile.J.translate(point)
    comps = {lab: eq.translate(point) for lab, eq in chart.components.items()}
    ring = tuple(chart.variables)
    one = Polynomial.one(ring)
    to_current = {v: (Polynomial.variable(v, ring), one) for v in ring}
    coord_expr = {v: Polynomial.variable(v, ring) for v in ring}
    flags = []
    levels = []
    higher_E = set()
    Ji, ci = J, mobile.c
    stop, center = None, None
    for idx in range(n):
        level = n - idx
        tags = [lv.tag for lv in levels]
        D = _materialize_D(chart, point, idx, tags, pick)
        dloc = _local_components(D, comps, to_current, ring, "D")
        M = Polynomial.one(ring)
        for lab, eq in dloc.items():
            M = M * eq ** D[lab]
        try:
            I = Ideal([exact_divide(g, M) for g in Ji.generators], ring)
        except NotDivisibleError:
            # M carries unit factors that J does not: divide locally
            I = quotient(Ji, M)
        if idx == 0:
            I = _strip_units(I, [eq for eq in comps.values() if eq.constant_term() != 0])
        o = order_at_origin(I)
        if o == 0:
            ord_m = sum(D[lab] for lab in dloc)
            if ord_m < ci:
                raise SetupError(
                    f"combinatorial stop with ord M = {ord_m} below control {ci}")
            sc = maximal_tight_shortcut({lab: D[lab] for lab in dloc}, ci)
            levels.append(Level(level, ring, Ji, M, I, ci, compute_tag(0, 0, sc), D,
                                shortcut=sc))
            stop = COMBINATORIAL
            center = flags + [comps[lab] for lab in sc.labels]
            break
        E = _materialize_E(chart, point, idx, tags, o, higher_E, pick)
        higher_E |= set(E)
        qloc = _local_components(E, comps, to_current, ring, "E")
        P = companion_ideal(I, M, o, ci)
        Q = transversality_ideal([qloc[lab] for lab in sorted(qloc)], ring)
        K = composition_ideal(P, Q, I)
        k = order_at_origin(K)
        lv = Level(level, ring, Ji, M, I, ci, compute_tag(o, k), D, E, P, Q, K)
        levels.append(lv)
        if len(ring) == 1:
            lv.flag = coord_expr[ring[0]]
            flags.append(lv.flag)
            stop, center = BOLD_REGULAR, flags
            break
        g = bold_regular_flag(P, K, k, pick)
        if g is not None:
            lv.flag = g.substitute(coord_expr, tuple(chart.variables))
            flags.append(lv.flag)
            stop, center = BOLD_REGULAR, flags
            break
        nxt_D = _materialize_D(chart, point, idx + 1, tags + [lv.tag], pick)
        osc, K, to_next = _choose_flag(P, K, k, to_current, ring, comps, E, nxt_D,
                                       set(comps) - higher_E, pick)
        v = osc.variable
        if osc.equation != Polynomial.variable(v, ring):
            coord_expr[v] = osc.equation.substitute(coord_expr, tuple(chart.variables))
        lv.flag = coord_expr[v]
        flags.append(lv.flag)
        Jn, bold = junior_ideal(K, k, v)
        if bold:
            stop, center = BOLD_REGULAR, flags
            break
        new_c = math.factorial(k)
        if order_at_origin(Jn) < new_c:
            raise SetupError("coefficient ideal order dropped below the control")
        del coord_expr[v]
        ring = tuple(w for w in ring if w != v)
        to_current = to_next
        Ji, ci = Jn, new_c
    else:  # pragma: no cover - the loop always stops at dimension one
        raise SetupError("descent exceeded the ambient dimension")
    back = tuple(-p for p in point)
    setup = Setup(point, n, levels, stop, [p.translate(back).monic() for p in center])
    chart.setup_cache[cache_key] = setup
    return setup
