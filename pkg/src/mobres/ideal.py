"""Ideals of the polynomial ring over the rationals.

Gröbner bases come from Buchberger's algorithm with the product and chain
criteria.  Everything geometric in the package reduces to triviality tests
``1 in I``: over the algebraic closure an ideal has an empty zero set exactly
when it is the unit ideal.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import (INFINITY, Polynomial, PolynomialError, grevlex_key, lex_key)


class ResourceLimitError(RuntimeError):
    """The computation exceeded the configured degree or pair budget."""


class IdealError(ValueError):
    pass


@dataclass
class Limits:
    max_degree: int = int(os.environ.get("MOBRES_MAX_DEGREE", 64))
    max_pairs: int = int(os.environ.get("MOBRES_MAX_PAIRS", 10 ** 6))


LIMITS = Limits()


# -- monomial orders ---------------------------------------------------------

@dataclass(frozen=True)
class MonomialOrder:
    name: str
    block: int = 0

    def key(self, exps):
        if self.name == "grevlex":
            return grevlex_key(exps)
        if self.name == "lex":
            return lex_key(exps)
        if self.name == "block":
            return (grevlex_key(exps[:self.block]), grevlex_key(exps[self.block:]))
        raise IdealError(f"unknown monomial order {self.name}")


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(k):
    """Block order with the first ``k`` variables in an eliminating block."""
    return MonomialOrder("block", k)


# -- ideals -------------------------------------------------------------------

class Ideal:
    """A finitely generated ideal; the zero ideal is stored as ``(0)``."""

    __slots__ = ("generators", "variables")

    def __init__(self, generators: Sequence[Polynomial], variables=None):
        gens = list(generators)
        if variables is None:
            if not gens:
                raise IdealError("ideal needs generators or a variable list")
            variables = gens[0].variables
        self.variables = tuple(variables)
        seen = []
        for g in gens:
            if g.variables != self.variables:
                raise IdealError("generator lives in a different ring")
            if g.is_zero():
                continue
            g = g.monic()
            if g not in seen:
                seen.append(g)
        if not seen:
            seen = [Polynomial.zero(self.variables)]
        self.generators = tuple(seen)

    @classmethod
    def unit(cls, variables):
        return cls([Polynomial.one(variables)], variables)

    def is_zero(self):
        return self.generators[0].is_zero()

    def has_unit_generator(self):
        return any(g.is_constant() and not g.is_zero() for g in self.generators)

    def __add__(self, other):
        if isinstance(other, Polynomial):
            other = Ideal([other], self.variables)
        return Ideal(self.generators + other.generators, self.variables)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return Ideal([], self.variables)
        return Ideal([a * b for a in self.generators for b in other.generators],
                     self.variables)

    def __pow__(self, k):
        if k == 0:
            return Ideal.unit(self.variables)
        gens = self.generators
        if len(gens) == 1:
            return Ideal([gens[0] ** k], self.variables)
        out = []
        for combo in itertools.combinations_with_replacement(range(len(gens)), k):
            p = Polynomial.one(self.variables)
            for i in combo:
                p = p * gens[i]
            out.append(p)
        return Ideal(out, self.variables)

    def map(self, fn, variables=None):
        return Ideal([fn(g) for g in self.generators], variables)

    def translate(self, point):
        return self.map(lambda g: g.translate(point), self.variables)

    def __eq__(self, other):
        return (isinstance(other, Ideal) and self.variables == other.variables
                and self.generators == other.generators)

    def __hash__(self):
        return hash((self.variables, self.generators))

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    __repr__ = __str__

    def strings(self):
        return [str(g) for g in self.generators]


@dataclass(frozen=True)
class GroebnerBasis:
    basis: tuple
    order: MonomialOrder

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)

    def is_unit(self):
        return len(self.basis) == 1 and self.basis[0].is_constant() \
            and not self.basis[0].is_zero()


# -- Buchberger ------------------------------------------------------------------

def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _reduce(terms, basis, key, full=True):
    """Normal form of a term dict modulo ``basis`` (list of (lm, lc, terms))."""
    terms = dict(terms)
    rem = {}
    while terms:
        e = max(terms, key=key)
        c = terms.pop(e)
        for lm, lc, bt in basis:
            if _divides(lm, e):
                q = c / lc
                shift = tuple(x - y for x, y in zip(e, lm))
                for be, bc in bt.items():
                    if be == lm:
                        continue
                    te = tuple(x + y for x, y in zip(be, shift))
                    v = terms.get(te, 0) - q * bc
                    if v:
                        terms[te] = v
                    else:
                        terms.pop(te, None)
                break
        else:
            rem[e] = c
            if not full:
                rem.update(terms)
                return rem
    return rem


_GB_CACHE: dict = {}


def groebner_basis(ideal: Ideal, order: MonomialOrder = GREVLEX,
                   limits: Limits | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of ``ideal`` for ``order``."""
    limits = limits or LIMITS
    cache_key = (ideal.variables, ideal.generators, order)
    hit = _GB_CACHE.get(cache_key)
    if hit is not None:
        return hit
    key = order.key
    variables = ideal.variables
    if ideal.is_zero():
        gb = GroebnerBasis((Polynomial.zero(variables),), order)
        _GB_CACHE[cache_key] = gb
        return gb
    basis = []  # (lm, lc, terms)
    pairs = []
    pair_count = 0

    def add(terms):
        lm = max(terms, key=key)
        if sum(lm) > limits.max_degree:
            raise ResourceLimitError(
                f"Gröbner basis element of degree {sum(lm)} exceeds cap "
                f"{limits.max_degree}")
        idx = len(basis)
        basis.append((lm, terms[lm], terms))
        for j in range(idx):
            pairs.append((j, idx))

    for g in sorted(ideal.generators, key=lambda p: key(p.leading_term(key)[0])):
        r = _reduce(g.terms, basis, key)
        if r:
            if all(sum(e) == 0 for e in r):
                gb = GroebnerBasis((Polynomial.one(variables),), order)
                _GB_CACHE[cache_key] = gb
                return gb
            add(r)
    done = set()
    while pairs:
        pairs.sort(key=lambda p: key(_lcm(basis[p[0]][0], basis[p[1]][0])),
                   reverse=True)
        i, j = pairs.pop()
        done.add((i, j))
        pair_count += 1
        if pair_count > limits.max_pairs:
            raise ResourceLimitError(f"S-pair budget {limits.max_pairs} exhausted")
        lmi, lci, ti = basis[i]
        lmj, lcj, tj = basis[j]
        lcm = _lcm(lmi, lmj)
        if all(a == 0 or b == 0 for a, b in zip(lmi, lmj)):
            continue  # product criterion
        if _chain(i, j, lcm, basis, done):
            continue
        si = tuple(a - b for a, b in zip(lcm, lmi))
        sj = tuple(a - b for a, b in zip(lcm, lmj))
        s = {}
        for e, c in ti.items():
            s[tuple(a + b for a, b in zip(e, si))] = c / lci
        for e, c in tj.items():
            te = tuple(a + b for a, b in zip(e, sj))
            v = s.get(te, 0) - c / lcj
            if v:
                s[te] = v
            else:
                s.pop(te, None)
        r = _reduce(s, basis, key)
        if r:
            if all(sum(e) == 0 for e in r):
                gb = GroebnerBasis((Polynomial.one(variables),), order)
                _GB_CACHE[cache_key] = gb
                return gb
            add(r)
    # minimalize and interreduce
    lms = [b[0] for b in basis]
    keep = []
    for i, lm in enumerate(lms):
        if any(j != i and _divides(lms[j], lm) and (lms[j] != lm or j < i)
               for j in range(len(lms))):
            continue
        keep.append(i)
    minimal = [basis[i] for i in keep]
    reduced = []
    for idx, (lm, lc, terms) in enumerate(minimal):
        others = [b for k, b in enumerate(minimal) if k != idx]
        tail = {e: c for e, c in terms.items() if e != lm}
        tail = _reduce(tail, others, key)
        tail[lm] = lc
        reduced.append(Polynomial(tail, variables).monic(key))
    reduced.sort(key=lambda p: key(p.leading_term(key)[0]), reverse=True)
    gb = GroebnerBasis(tuple(reduced), order)
    if len(_GB_CACHE) > 20000:
        _GB_CACHE.clear()
    _GB_CACHE[cache_key] = gb
    return gb


def _chain(i, j, lcm, basis, done):
    for k in range(len(basis)):
        if k in (i, j):
            continue
        if not _divides(basis[k][0], lcm):
            continue
        a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
        if a in done and b in done:
            return True
    return False


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    key = gb.order.key
    basis = [(p.leading_term(key)[0], p.leading_term(key)[1], p.terms)
             for p in gb.basis if not p.is_zero()]
    return Polynomial(_reduce(f.terms, basis, key), f.variables)


# -- ideal-theoretic predicates -------------------------------------------------

def is_trivial(ideal: Ideal) -> bool:
    """True iff 1 lies in the ideal (empty zero set over the closure)."""
    if ideal.has_unit_generator():
        return True
    if ideal.is_zero():
        return False
    return groebner_basis(ideal).is_unit()


def contains(ideal: Ideal, f: Polynomial) -> bool:
    if f.is_zero():
        return True
    if ideal.is_zero():
        return False
    return normal_form(f, groebner_basis(ideal)).is_zero()


def _fresh_name(variables, stem="_t"):
    name = stem
    k = 0
    while name in variables:
        k += 1
        name = f"{stem}{k}"
    return name


def radical_contains(ideal: Ideal, f: Polynomial) -> bool:
    """Decide f in sqrt(I) via 1 in I + (1 - t*f)."""
    if f.is_zero():
        return True
    t = _fresh_name(ideal.variables)
    ring = (t,) + ideal.variables
    lifted = [g.change_ring(ring) for g in ideal.generators]
    tt = Polynomial.variable(t, ring)
    return is_trivial(Ideal(lifted + [1 - tt * f.change_ring(ring)], ring))


def membership(f: Polynomial, ideal: Ideal, radical: bool = False) -> bool:
    return radical_contains(ideal, f) if radical else contains(ideal, f)


def ideals_equal(a: Ideal, b: Ideal) -> bool:
    return groebner_basis(a).basis == groebner_basis(b).basis


def radicals_equal(a: Ideal, b: Ideal) -> bool:
    return (all(radical_contains(b, g) for g in a.generators)
            and all(radical_contains(a, g) for g in b.generators))


def saturate(ideal: Ideal, f: Polynomial) -> Ideal:
    """(I : f^infinity) by eliminating t from I + (1 - t*f)."""
    if f.is_zero():
        raise IdealError("cannot saturate by zero")
    if ideal.is_zero():
        return ideal
    if f.is_constant():
        return ideal
    t = _fresh_name(ideal.variables)
    ring = (t,) + ideal.variables
    tt = Polynomial.variable(t, ring)
    lifted = [g.change_ring(ring) for g in ideal.generators]
    gb = groebner_basis(Ideal(lifted + [1 - tt * f.change_ring(ring)], ring),
                        elimination_order(1))
    kept = [p.change_ring(ideal.variables) for p in gb.basis if not p.involves(t)]
    return Ideal(kept or [Polynomial.zero(ideal.variables)], ideal.variables)


def reduced(ideal: Ideal) -> Ideal:
    """The same ideal, regenerated by its reduced grevlex basis."""
    if ideal.is_zero():
        return ideal
    return Ideal(groebner_basis(ideal).basis, ideal.variables)


# -- orders and the derivative ideal ---------------------------------------------

def delta(ideal: Ideal) -> Ideal:
    """I + (all first partial derivatives of the generators)."""
    gens = list(ideal.generators)
    for g in ideal.generators:
        for v in ideal.variables:
            gens.append(g.derivative(v))
    return Ideal(gens, ideal.variables)


def delta_power(ideal: Ideal, k: int) -> Ideal:
    out = ideal
    for _ in range(k):
        if out.has_unit_generator():
            return Ideal.unit(ideal.variables)
        out = reduced(delta(out))
    return out


def max_order(ideal: Ideal):
    """Return (o, locus): the maximal order and the ideal of its locus."""
    if ideal.is_zero():
        raise IdealError("zero ideal: order is infinite")
    if is_trivial(ideal):
        raise IdealError("unit ideal: order 0 everywhere")
    o = 1
    cur = reduced(ideal)
    while True:
        nxt = reduced(delta(cur))
        if is_trivial(nxt):
            return o, cur
        o += 1
        cur = nxt


def order_at_point(ideal: Ideal, point) -> int | float:
    if len(point) != len(ideal.variables):
        raise PolynomialError("point dimension does not match variable count")
    return min(g.order_at(point) for g in ideal.generators)


def order_at_origin(ideal: Ideal):
    return min(g.order() for g in ideal.generators)


def order_along_center(ideal: Ideal, center: Sequence[str]) -> int | float:
    if len(set(center)) != len(center) or any(v not in ideal.variables for v in center):
        raise IdealError(f"center {center} is not a coordinate subset")
    return min(g.degree_in_subset(center) for g in ideal.generators)


# -- Jacobian criteria -------------------------------------------------------------

def jacobian(polys: Sequence[Polynomial]):
    return [[p.derivative(v) for v in p.variables] for p in polys]


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        term = term if j % 2 == 0 else -term
        total = term if total is None else total + term
    if total is None:
        return Polynomial.zero(m[0][0].variables)
    return total


def minors(polys: Sequence[Polynomial], size: int):
    """All size x size minors of the Jacobian matrix of ``polys``."""
    jac = jacobian(polys)
    n = len(polys[0].variables)
    out = []
    for rows in itertools.combinations(range(len(polys)), size):
        for cols in itertools.combinations(range(n), size):
            out.append(_det([[jac[r][c] for c in cols] for r in rows]))
    return out


def smoothness_check(ideal: Ideal, codim: int):
    """Jacobian criterion.  Returns (smooth, singular-locus ideal)."""
    if ideal.is_zero():
        raise IdealError("zero ideal defines the whole space")
    if is_trivial(ideal):
        return True, Ideal.unit(ideal.variables)
    n = len(ideal.variables)
    if codim > n or codim > len(ideal.generators):
        return False, ideal
    witness = ideal + Ideal(minors(ideal.generators, codim), ideal.variables)
    return is_trivial(witness), witness


def dimension(ideal: Ideal) -> int:
    """Krull dimension of the zero set (-1 if empty), from leading monomials."""
    if is_trivial(ideal):
        return -1
    n = len(ideal.variables)
    if ideal.is_zero():
        return n
    gb = groebner_basis(ideal)
    lms = [p.leading_term()[0] for p in gb.basis]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = set(subset)
            if all(any(e[i] and i not in s for i in range(n)) for e in lms):
                return size
    return 0


# -- rational points of zero-dimensional ideals ----------------------------------------

def _divisors(n):
    n = abs(n)
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def rational_roots(p: Polynomial):
    """Rational roots of a univariate polynomial and whether they exhaust it."""
    used = p.used_variables()
    var = used[0] if used else p.variables[0]
    i = p.variables.index(var)
    deg = max(e[i] for e in p.terms)
    co = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        co[e[i]] = c
    den = 1
    for c in co:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in co]
    roots = []
    low = next(j for j, c in enumerate(ints) if c)
    if low:
        roots.append(Fraction(0))
    ints = ints[low:]
    if len(ints) > 1:
        for pn in _divisors(ints[0]):
            for q in _divisors(ints[-1]):
                for cand in (Fraction(pn, q), Fraction(-pn, q)):
                    if cand not in roots and \
                            sum(c * cand ** k for k, c in enumerate(ints)) == 0:
                        roots.append(cand)
    return sorted(roots), len(roots) == _squarefree_degree(co)


def _squarefree_degree(co):
    """Degree of the squarefree part of a univariate polynomial (dense coeffs)."""
    def trim(a):
        while a and a[-1] == 0:
            a = a[:-1]
        return a

    def rem(a, b):
        a = list(a)
        while len(a) >= len(b) and a:
            q = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] -= q * c
            a = trim(a)
        return a

    def gcd(a, b):
        while b:
            a, b = b, rem(a, b)
        return a

    f = trim([Fraction(c) for c in co])
    df = trim([k * c for k, c in enumerate(f)][1:])
    if not df:
        return 0
    g = gcd(f, df)
    return (len(f) - 1) - (len(g) - 1)


def rational_points(ideal: Ideal):
    """Rational points of a zero-dimensional ideal.

    Returns ``(points, complete)``, where ``complete`` is False if some
    points have irrational coordinates, or ``None`` if the ideal is not
    zero-dimensional.
    """
    variables = ideal.variables
    if is_trivial(ideal):
        return [], True
    if dimension(ideal) != 0:
        return None
    return _solve(ideal, ())


def _solve(ideal: Ideal, prefix):
    variables = ideal.variables
    if not variables:
        return ([prefix], True)
    gb = groebner_basis(ideal, LEX)
    if gb.is_unit():
        return [], True
    last = variables[-1]
    uni = [p for p in gb.basis if p.used_variables() == (last,)]
    if not uni:
        # the last variable is free in the remaining system: not zero-dimensional
        raise IdealError("system is not zero-dimensional")
    roots, complete = rational_roots(min(uni, key=lambda p: p.total_degree()))
    points = []
    rest = variables[:-1]
    for r in roots:
        sub = {last: Polynomial.constant(r, variables)}
        gens = [g.substitute(sub, variables) for g in gb.basis]
        if any(g.is_constant() and not g.is_zero() for g in gens):
            continue
        gens = [g.change_ring(rest) for g in gens if not g.is_zero()]
        if not rest:
            points.append(prefix + (r,))
            continue
        sub_ideal = Ideal(gens or [Polynomial.zero(rest)], rest)
        if sub_ideal.is_zero():
            raise IdealError("system is not zero-dimensional")
        pts, ok = _solve(sub_ideal, ())
        complete = complete and ok
        points.extend(p + (r,) for p in pts)
    return sorted(points), complete


def intersect(a: Ideal, b: Ideal) -> Ideal:
    """I ∩ J by eliminating t from t*I + (1 - t)*J."""
    t = _fresh_name(a.variables)
    ring = (t,) + a.variables
    tt = Polynomial.variable(t, ring)
    gens = [tt * g.change_ring(ring) for g in a.generators]
    gens += [(1 - tt) * g.change_ring(ring) for g in b.generators]
    gb = groebner_basis(Ideal(gens, ring), elimination_order(1))
    kept = [p.change_ring(a.variables) for p in gb.basis if not p.involves(t)]
    return Ideal(kept or [Polynomial.zero(a.variables)], a.variables)


def quotient(ideal: Ideal, f: Polynomial) -> Ideal:
    """The ideal quotient (I : f)."""
    from .poly import exact_divide
    if f.is_constant():
        return ideal
    inter = intersect(ideal, Ideal([f], ideal.variables))
    return Ideal([exact_divide(g, f) for g in inter.generators], ideal.variables)
