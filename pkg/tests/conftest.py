import os
import random
import re
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from mobres.poly import Polynomial, parse_polynomial

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")

XY = ("x", "y")
XYZ = ("x", "y", "z")
EXAMPLES = os.path.join(os.path.dirname(os.path.dirname(__file__)), "jobs")


def P(text, variables=XY):
    return parse_polynomial(text, variables)


@st.composite
def polynomials(draw, variables=XY, max_terms=4, max_deg=4, coeff=5, nonzero=False):
    n = len(variables)
    terms = {}
    for _ in range(draw(st.integers(1 if nonzero else 0, max_terms))):
        exps = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        c = draw(st.integers(-coeff, coeff).filter(lambda v: v != 0))
        terms[exps] = terms.get(exps, 0) + c
    p = Polynomial(terms, variables)
    if nonzero and p.is_zero():
        p = Polynomial.one(variables)
    return p


def random_poly(rng: random.Random, variables=XY, terms=3, deg=3, low=0):
    """Random polynomial whose monomials have degree in [low, deg]."""
    n = len(variables)
    out = {}
    while len(out) < terms:
        exps = tuple(rng.randint(0, deg) for _ in range(n))
        if low <= sum(exps) <= deg:
            out[exps] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    return Polynomial(out, variables)


def to_sympy(p: Polynomial):
    import sympy
    syms = sympy.symbols(p.variables)
    if len(p.variables) == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms
    expr = sympy.Integer(0)
    for exps, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exps):
            term *= s ** e
        expr += term
    return sympy.Poly(expr, *syms, domain="QQ")


@pytest.fixture(scope="session")
def jobs_dir():
    return EXAMPLES


CORPUS = {os.path.splitext(f)[0]: open(os.path.join(EXAMPLES, f), encoding="utf-8").read()
          for f in sorted(os.listdir(EXAMPLES)) if f.endswith(".job")}

_RUNS = {}


def run_corpus(name):
    """Resolve a corpus job once per session; returns (spec, tree, report)."""
    from mobres.cli import run_job
    from mobres.jobio import parse_job
    if name not in _RUNS:
        spec = parse_job(CORPUS[name])
        tree, report = run_job(spec)
        _RUNS[name] = (spec, tree, report)
    return _RUNS[name]


SWAP = {"x": "y", "y": "x"}


def _swap_text(text):
    return re.sub(r"\b[xy]\b", lambda m: SWAP[m.group(0)], text)


def _swap_id(cid):
    return ".".join(SWAP.get(part, part) for part in cid.split("."))


def swap_mismatches(data_a, data_b):
    """Chart ids where tree b, with x and y exchanged, differs from tree a."""
    from mobres.ideal import Ideal, ideals_equal

    def ideal(strings, v, swap=False):
        return Ideal([P(_swap_text(s) if swap else s, v) for s in strings or []], v)

    a = {n["id"]: n for n in data_a["nodes"]}
    b = {_swap_id(n["id"]): n for n in data_b["nodes"]}
    bad = sorted(set(a) ^ set(b))
    for cid in sorted(set(a) & set(b)):
        na, nb = a[cid], b[cid]
        v = tuple(na["variables"])
        same = (tuple(nb["variables"]) == v
                and na["invariant"] == nb["invariant"]
                and na["status"] == nb["status"]
                and na["mobile"]["c"] == nb["mobile"]["c"]
                and na["mobile"]["handicap"] == nb["mobile"]["handicap"]
                and ideals_equal(ideal(na["mobile"]["J"], v), ideal(nb["mobile"]["J"], v, True))
                and (na["center"] is None) == (nb["center"] is None)
                and ideals_equal(ideal(na["center"], v), ideal(nb["center"], v, True))
                and ideals_equal(ideal(na.get("strict_transform"), v),
                                 ideal(nb.get("strict_transform"), v, True))
                and {e["label"]: P(e["equation"], v) for e in na["exceptional"]}
                == {e["label"]: P(_swap_text(e["equation"]), v) for e in nb["exceptional"]}
                and {k: P(s, v) for k, s in na["substitution"].items()}
                == {SWAP.get(k, k): P(_swap_text(s), v) for k, s in nb["substitution"].items()})
        if not same:
            bad.append(cid)
    return bad


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
