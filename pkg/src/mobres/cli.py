"""Command line entry point: ``resolve --input job.txt``."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .blowup import BlowupError
from .handicap import HandicapRule
from .ideal import Ideal, ResourceLimitError
from .jobio import JobError, JobSpec, emit_outputs, parse_job
from .mobile import Mobile, NotCoordinable, SetupError
from .poly import Polynomial, parse_polynomial
from .resolver import (DEFAULT_MAX_STEPS, BudgetExhausted, ResolutionError,
                       resolve_mobile, resolve_scheme)

EXIT_OK, EXIT_VERIFY, EXIT_BUDGET, EXIT_REJECTED = 0, 1, 2, 3
ENV_MAX_STEPS = "RESOLVE_MAX_STEPS"

log = logging.getLogger("mobres")


def build_mobile(spec: JobSpec):
    """Mobile and root components of a mobile-mode job."""
    variables = spec.variables
    n = len(variables)
    J = Ideal([parse_polynomial(g, variables) for g in spec.generators], variables)
    D = [dict() for _ in range(n)]
    E = [set() for _ in range(n)]
    comps = {}
    for level, label, var, mult in spec.D:
        D[n - level][label] = D[n - level].get(label, 0) + mult
        comps[label] = Polynomial.variable(var, variables)
    for level, label, var in spec.E:
        E[n - level].add(label)
        comps[label] = Polynomial.variable(var, variables)
    rule = HandicapRule(n, True, tuple(D), tuple(frozenset(e) for e in E))
    return Mobile(J, spec.control, rule), comps


def run_job(spec: JobSpec):
    max_steps = spec.max_steps or DEFAULT_MAX_STEPS
    if spec.mode == "scheme":
        X = Ideal([parse_polynomial(g, spec.variables) for g in spec.generators],
                  spec.variables)
        return resolve_scheme(X, max_steps=max_steps, seed=spec.seed, verify=spec.verify)
    mobile, comps = build_mobile(spec)
    return resolve_mobile(mobile, comps, max_steps=max_steps, seed=spec.seed,
                          verify=spec.verify)


def make_parser():
    p = argparse.ArgumentParser(
        prog="resolve",
        description="Strong desingularization of ideals and varieties over Q by mobiles.")
    p.add_argument("--input", required=True, help="job file ('-' for stdin)")
    p.add_argument("--mode", choices=("mobile", "scheme"))
    p.add_argument("--control", type=int)
    p.add_argument("--max-steps", type=int,
                   help=f"budget of blowup rounds (env {ENV_MAX_STEPS}, default "
                        f"{DEFAULT_MAX_STEPS})")
    p.add_argument("--emit", choices=("json", "dot", "both"))
    p.add_argument("--verify", action="store_true", default=None,
                   help="run the verification suite (on by default)")
    p.add_argument("--trace", action="store_true", default=None,
                   help="also write trace.json with every setup")
    p.add_argument("--seed", type=int, help="seed for generic points")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s")
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        spec = parse_job(text)
        max_steps = args.max_steps
        if max_steps is None and os.environ.get(ENV_MAX_STEPS):
            max_steps = int(os.environ[ENV_MAX_STEPS])
        over = dict(mode=args.mode, control=args.control, max_steps=max_steps,
                    emit=args.emit, verify=args.verify, trace=args.trace, seed=args.seed)
        if args.mode == "scheme" and args.control is None:
            over["control"] = 1
        spec = spec.with_overrides(**over)
    except (OSError, JobError, ValueError) as exc:
        log.error("input rejected: %s", exc)
        return EXIT_REJECTED
    try:
        tree, report = run_job(spec)
    except BudgetExhausted as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    except ResourceLimitError as exc:
        log.error("resource cap hit: %s", exc)
        return EXIT_BUDGET
    except (NotCoordinable, ResolutionError) as exc:
        log.error("input rejected: %s", exc)
        return EXIT_REJECTED
    except (SetupError, BlowupError) as exc:
        log.error("assertion failed: %s", exc)
        return EXIT_VERIFY
    for path in emit_outputs(tree, report, spec, args.out):
        log.info("wrote %s", path)
    log.info("%d blowups in %d rounds, %d charts", report.blowups, report.rounds,
             len(tree.nodes))
    if spec.verify and not report.verified():
        failed = [c for c in report.checks if not c.passed]
        for c in failed:
            log.error("check %s failed on chart %s %s", c.name, c.chart, c.witness)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
