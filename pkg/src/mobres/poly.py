"""Sparse multivariate polynomials over the rationals.

A :class:`Polynomial` is a map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients together with the ordered tuple of
variable names it lives in.  Values are immutable; every operation returns a
new polynomial.

Printing is canonical: terms in descending graded reverse-lexicographic order,
coefficients in lowest terms, ``^`` for powers and ``*`` between factors.
:func:`parse_polynomial` reads the same syntax back.
"""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

INFINITY = float("inf")


class PolynomialError(ValueError):
    pass


class NotDivisibleError(PolynomialError):
    """Raised by :func:`exact_divide` when the quotient is not a polynomial."""


class PolynomialSyntaxError(PolynomialError):
    def __init__(self, message, column):
        super().__init__(f"{message} (column {column})")
        self.column = column


def grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def lex_key(exps):
    return tuple(exps)


class Polynomial:
    __slots__ = ("terms", "variables", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None,
                 variables: Sequence[str] = ()):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise PolynomialError(
                    f"monomial {exps} does not match variables {self.variables}")
            coeff = Fraction(coeff)
            if coeff:
                clean[exps] = coeff
        self.terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, value, variables):
        variables = tuple(variables)
        return cls({(0,) * len(variables): value}, variables)

    @classmethod
    def variable(cls, name, variables):
        variables = tuple(variables)
        if name not in variables:
            raise PolynomialError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls({exps: 1}, variables)

    @classmethod
    def zero(cls, variables):
        return cls({}, variables)

    @classmethod
    def one(cls, variables):
        return cls.constant(1, variables)

    # -- basic queries ----------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def order(self):
        """Lowest total degree of the support (order at the origin)."""
        if not self.terms:
            return INFINITY
        return min(sum(e) for e in self.terms)

    def degree_in(self, var):
        i = self._index(var)
        return max((e[i] for e in self.terms), default=-1)

    def involves(self, var):
        i = self._index(var)
        return any(e[i] for e in self.terms)

    def used_variables(self):
        return tuple(v for i, v in enumerate(self.variables)
                     if any(e[i] for e in self.terms))

    def sorted_terms(self, key=grevlex_key):
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, key=grevlex_key):
        exps = max(self.terms, key=key)
        return exps, self.terms[exps]

    def _index(self, var):
        try:
            return self.variables.index(var)
        except ValueError:
            raise PolynomialError(f"unknown variable {var!r}") from None

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise PolynomialError(
                    f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        return Polynomial.constant(other, self.variables)

    def __add__(self, other):
        other = self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(terms, self.variables)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if len(other.terms) == 1 and len(self.terms) > 1:
            return other * self
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(terms, self.variables)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("exponent must be a natural number")
        result = Polynomial.one(self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        c = Fraction(c)
        return Polynomial({e: v * c for e, v in self.terms.items()}, self.variables)

    def monic(self, key=grevlex_key):
        if not self.terms:
            return self
        _, lc = self.leading_term(key)
        return self.scale(1 / lc)

    def mul_monomial(self, exps, coeff=1):
        coeff = Fraction(coeff)
        return Polynomial({tuple(a + b for a, b in zip(e, exps)): c * coeff
                           for e, c in self.terms.items()}, self.variables)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other, self.variables)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- calculus and substitution ---------------------------------------
    def derivative(self, var, times=1):
        i = self._index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i] < times:
                continue
            f = 1
            for t in range(times):
                f *= e[i] - t
            ne = e[:i] + (e[i] - times,) + e[i + 1:]
            terms[ne] = terms.get(ne, 0) + c * f
        return Polynomial(terms, self.variables)

    def evaluate(self, point):
        point = [Fraction(p) for p in point]
        if len(point) != len(self.variables):
            raise PolynomialError("point dimension does not match variable count")
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for p, k in zip(point, e):
                if k:
                    t *= p ** k
            total += t
        return total

    def substitute(self, images: Mapping[str, "Polynomial"], variables=None):
        """Replace every variable by its image; unmapped variables stay put.

        All images must live in ``variables`` (default: their common ring).
        """
        if variables is None:
            rings = {p.variables for p in images.values()}
            if len(rings) > 1:
                raise PolynomialError("substitution images live in different rings")
            variables = rings.pop() if rings else self.variables
        variables = tuple(variables)
        used = set(self.used_variables())
        cols = []
        for v in self.variables:
            img = images.get(v)
            if v not in used:
                cols.append(None)
                continue
            if img is None:
                img = Polynomial.variable(v, variables)
            elif img.variables != variables:
                raise PolynomialError("substitution image in wrong ring")
            cols.append(img)
        cache = [dict() for _ in cols]

        def power(i, k):
            p = cache[i].get(k)
            if p is None:
                p = cols[i] ** k
                cache[i][k] = p
            return p

        result = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(c, variables)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            for te, tc in term.terms.items():
                result[te] = result.get(te, 0) + tc
        return Polynomial(result, variables)

    def translate(self, point):
        """Return p(x + a): the point ``a`` becomes the origin."""
        point = [Fraction(p) for p in point]
        if len(point) != len(self.variables):
            raise PolynomialError("point dimension does not match variable count")
        images = {v: Polynomial({_unit(i, len(point)): 1, (0,) * len(point): a},
                                self.variables)
                  for i, (v, a) in enumerate(zip(self.variables, point)) if a}
        return self.substitute(images, self.variables)

    def specialize(self, name, value):
        """Set one variable to a constant, keeping the ring."""
        i = self.variables.index(name)
        value = Fraction(value)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            key = e[:i] + (0,) + e[i + 1:]
            out[key] = out.get(key, 0) + (c * value ** k if k else c)
        return Polynomial(out, self.variables)

    def divide_linear(self, name, root):
        """Quotient of self by (name - root); raises NotDivisibleError on a remainder."""
        i = self.variables.index(name)
        root = Fraction(root)
        rows = {}
        for e, c in self.terms.items():
            rows.setdefault(e[:i] + e[i + 1:], {})[e[i]] = c
        out = {}
        for rest, row in rows.items():
            acc = Fraction(0)
            for k in range(max(row), -1, -1):
                acc = acc * root + row.get(k, 0)
                if k == 0:
                    if acc:
                        raise NotDivisibleError("nonzero remainder")
                elif acc:
                    out[rest[:i] + (k - 1,) + rest[i:]] = acc
        return Polynomial(out, self.variables)

    def order_at(self, point):
        if len(point) != len(self.variables):
            raise PolynomialError("point dimension does not match variable count")
        if any(point):
            return self.translate(point).order()
        return self.order()

    def change_ring(self, variables):
        """Re-embed into another variable list; dropped variables must be absent."""
        variables = tuple(variables)
        idx = []
        for v in self.variables:
            idx.append(variables.index(v) if v in variables else None)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, k in enumerate(e):
                if k:
                    if idx[i] is None:
                        raise PolynomialError(
                            f"variable {self.variables[i]!r} missing from target ring")
                    ne[idx[i]] = k
            terms[tuple(ne)] = c
        return Polynomial(terms, variables)

    def rename(self, mapping: Mapping[str, str]):
        return Polynomial(self.terms, tuple(mapping.get(v, v) for v in self.variables))

    def coefficients_in(self, var):
        """Expand as sum_j a_j * var^j; returns {j: a_j} with a_j free of var.

        The coefficients live in the ring without ``var``.
        """
        i = self._index(var)
        rest = self.variables[:i] + self.variables[i + 1:]
        out = {}
        for e, c in self.terms.items():
            out.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        return {j: Polynomial(t, rest) for j, t in sorted(out.items())}

    def degree_in_subset(self, vars_subset):
        """Minimal total degree in the given variables over the support."""
        idx = [self._index(v) for v in vars_subset]
        if not self.terms:
            return INFINITY
        return min(sum(e[i] for i in idx) for e in self.terms)

    def linear_part(self):
        n = len(self.variables)
        return {self.variables[i]: self.terms.get(_unit(i, n), Fraction(0))
                for i in range(n)}

    # -- printing ---------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, {self.variables})"


def _unit(i, n):
    return tuple(1 if j == i else 0 for j in range(n))


def _heap_key(e):
    # min-heap order equal to descending grevlex
    return (-sum(e), tuple(reversed(e)))


def _degree_bounds(p):
    n = len(p.variables)
    lo = [min(e[i] for e in p.terms) for i in range(n)]
    hi = [max(e[i] for e in p.terms) for i in range(n)]
    return lo, hi


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    """Return r with p == q * r, or raise :class:`NotDivisibleError`."""
    if q.is_zero():
        raise PolynomialError("division by zero polynomial")
    if p.variables != q.variables:
        raise PolynomialError("variable mismatch in division")
    if p.is_zero():
        return Polynomial.zero(p.variables)
    if len(q.terms) == 1:
        (qe, qc), = q.terms.items()
        terms = {}
        for e, c in p.terms.items():
            ne = tuple(a - b for a, b in zip(e, qe))
            if min(ne, default=0) < 0:
                raise NotDivisibleError("polynomial is not divisible by the monomial")
            terms[ne] = c / qc
        return Polynomial(terms, p.variables)
    plo, phi = _degree_bounds(p)
    qlo, qhi = _degree_bounds(q)
    if any(a < b for a, b in zip(plo, qlo)) or any(a < b for a, b in zip(phi, qhi)) \
            or p.total_degree() < q.total_degree() or p.order() < q.order():
        raise NotDivisibleError("degree bounds rule out division")
    lead_e, lead_c = q.leading_term()
    rem = dict(p.terms)
    heap = [(_heap_key(e), e) for e in rem]
    heapq.heapify(heap)
    quot = {}
    while rem:
        _, e = heapq.heappop(heap)
        if e not in rem:
            continue  # cancelled or already handled
        ne = tuple(a - b for a, b in zip(e, lead_e))
        if min(ne) < 0:
            raise NotDivisibleError("leading term is not divisible")
        c = rem[e] / lead_c
        quot[ne] = c
        for qe, qc in q.terms.items():
            te = tuple(a + b for a, b in zip(qe, ne))
            old = rem.get(te)
            v = (old or 0) - c * qc
            if v:
                rem[te] = v
                if old is None:
                    heapq.heappush(heap, (_heap_key(te), te))
            else:
                rem.pop(te, None)
    return Polynomial(quot, p.variables)


# -- substitution maps ------------------------------------------------------

BLOWUP = "blowup-chart"
TRIANGULAR = "triangular-automorphism"
TRANSLATION = "translation"


@dataclass(frozen=True)
class SubstitutionMap:
    """Images of the source variables as polynomials in the target variables."""

    source: tuple
    target: tuple
    images: tuple  # pairs (variable, Polynomial), in source order
    kind: str = BLOWUP

    @classmethod
    def build(cls, source, target, images: Mapping[str, Polynomial], kind=BLOWUP):
        source, target = tuple(source), tuple(target)
        full = []
        for v in source:
            img = images.get(v)
            if img is None:
                img = Polynomial.variable(v, target)
            if img.variables != target:
                raise PolynomialError("image lives in the wrong ring")
            full.append((v, img))
        return cls(source, target, tuple(full), kind)

    @classmethod
    def identity(cls, variables, kind=TRIANGULAR):
        return cls.build(variables, variables, {}, kind)

    def image(self, var):
        return dict(self.images)[var]

    def apply(self, p: Polynomial) -> Polynomial:
        if p.variables != self.source:
            raise PolynomialError("polynomial does not live in the source ring")
        return p.substitute(dict(self.images), self.target)

    def compose(self, other: "SubstitutionMap") -> "SubstitutionMap":
        """Return the map doing ``self`` first, then ``other`` (images pulled back)."""
        if other.source != self.target:
            raise PolynomialError("maps are not composable")
        kind = self.kind if self.kind == other.kind else BLOWUP
        return SubstitutionMap(self.source, other.target,
                               tuple((v, other.apply(img)) for v, img in self.images),
                               kind)

    def is_identity(self):
        return self.source == self.target and all(
            img == Polynomial.variable(v, self.target) for v, img in self.images)

    def inverse(self) -> "SubstitutionMap":
        """Invert a translation or triangular map by back-substitution.

        Every image must read ``c*w + h`` with ``w`` a distinct target variable,
        ``c`` a nonzero constant and ``h`` free of ``w``; the dependencies among
        the ``h`` must be acyclic.
        """
        if self.kind == BLOWUP:
            raise PolynomialError("blowup charts are not invertible")
        if len(self.source) != len(self.target):
            raise PolynomialError("map is not a bijection of coordinates")
        raw = {}
        for v, img in self.images:
            lin = img.linear_part()
            cand = [w for w in self.target
                    if lin[w] and img.degree_in(w) == 1 and w not in raw
                    and not (img - Polynomial.variable(w, self.target).scale(lin[w]))
                    .involves(w)]
            cand.sort(key=lambda w: (w != v, self.target.index(w)))
            if not cand:
                raise PolynomialError(f"image of {v} is not coordinable")
            w = cand[0]
            c = lin[w]
            raw[w] = (v, c, img - Polynomial.variable(w, self.target).scale(c))
        images = {}

        def solve(w, depth):
            if w in images:
                return images[w]
            if depth > len(self.target):
                raise PolynomialError("map is not triangular")
            v, c, h = raw[w]
            sub = {u: solve(u, depth + 1) for u in h.used_variables()}
            hs = h.substitute(sub, self.source)
            images[w] = (Polynomial.variable(v, self.source) - hs).scale(1 / c)
            return images[w]

        for w in raw:
            solve(w, 0)
        return SubstitutionMap.build(self.target, self.source, images, self.kind)


# -- parsing and printing ---------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse the ASCII syntax: ``y^2 - x^3``, ``1/2*x*y``, ``(x+y)^2``."""
    variables = tuple(variables)
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2), col))
        else:
            tokens.append(("op", m.group(3), col))
        pos = m.end()
    tokens.append(("end", None, len(text) + 1))
    parser = _Parser(tokens, variables)
    result = parser.expr()
    kind, val, col = parser.peek()
    if kind != "end":
        raise PolynomialSyntaxError(f"unexpected {val!r}", col)
    return result


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self):
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        result = self.term().scale(sign)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                result = result + t if val == "+" else result - t
            else:
                return result

    def term(self):
        result = self.factor()
        while True:
            kind, val, col = self.peek()
            if kind == "op" and val == "*":
                self.take()
                result = result * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                d = self.factor()
                if not d.is_constant() or d.is_zero():
                    raise PolynomialSyntaxError("division by a non-constant", col)
                result = result.scale(1 / d.constant_term())
            elif kind in ("num", "var") or (kind == "op" and val == "("):
                result = result * self.factor()
            else:
                return result

    def factor(self):
        base = self.atom()
        kind, val, col = self.peek()
        if kind == "op" and val in ("^",) or (kind == "op" and val == "*"
                                              and self._double_star()):
            self.take()
            if val == "*":
                self.take()
            kind, val, col = self.take()
            if kind != "num":
                raise PolynomialSyntaxError("exponent must be a natural number", col)
            return base ** val
        return base

    def _double_star(self):
        nxt = self.tokens[self.i + 1]
        return nxt[0] == "op" and nxt[1] == "*"

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return Polynomial.constant(val, self.variables)
        if kind == "var":
            if val not in self.variables:
                raise PolynomialSyntaxError(f"unknown variable {val!r}", col)
            return Polynomial.variable(val, self.variables)
        if kind == "op" and val == "(":
            inner = self.expr()
            k2, v2, c2 = self.take()
            if not (k2 == "op" and v2 == ")"):
                raise PolynomialSyntaxError("expected ')'", c2)
            return inner
        if kind == "op" and val == "-":
            return -self.atom()
        raise PolynomialSyntaxError(
            "unexpected end of input" if kind == "end" else f"unexpected {val!r}", col)


def _format_coeff(c: Fraction):
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        mono = "*".join(v if k == 1 else f"{v}^{k}"
                        for v, k in zip(p.variables, e) if k)
        mag = abs(c)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def polynomial_ring(variables: Iterable[str]):
    """Return the variable generators of a ring, convenient in tests."""
    variables = tuple(variables)
    return tuple(Polynomial.variable(v, variables) for v in variables)
