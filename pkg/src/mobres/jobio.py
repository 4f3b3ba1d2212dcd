"""Job files and output emission.

A job is a line-oriented ``key: value`` file::

    vars: x y
    J: y^2 - x^3
    mode: scheme

Mobile-mode jobs may add ``control:`` and handicap lines ``D: level label:var mult``
(several triples per line separated by ``;``) and ``E: level label:var``.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, replace
from importlib import resources

from .blowup import chart_sort_key
from .poly import PolynomialSyntaxError, format_polynomial, parse_polynomial

KEYS = ("vars", "J", "mode", "control", "D", "E", "max_steps", "emit", "verify",
        "trace", "seed")
MODES = ("mobile", "scheme")
EMITS = ("json", "dot", "both")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class JobError(ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class JobSpec:
    variables: tuple
    generators: tuple
    mode: str = "scheme"
    control: int = 1
    D: tuple = ()          # (level, label, variable, multiplicity)
    E: tuple = ()          # (level, label, variable)
    max_steps: int | None = None
    emit: str = "both"
    verify: bool = True
    trace: bool = False
    seed: int = 0

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        spec = replace(self, **kw)
        validate(spec)
        return spec


def _bool(text, line, col):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise JobError(f"expected a boolean, got {text.strip()!r}", line, col)


def _int(text, line, col):
    try:
        return int(text.strip())
    except ValueError:
        raise JobError(f"expected an integer, got {text.strip()!r}", line, col) from None


def _handicap(value, line, col, key):
    out = []
    offset = col
    for chunk in value.split(";"):
        parts = chunk.split()
        pos = offset + (len(chunk) - len(chunk.lstrip()))
        offset += len(chunk) + 1
        if not parts:
            continue
        if len(parts) not in (2, 3) or ":" not in parts[1]:
            raise JobError(f"{key} entries read 'level label:variable mult'", line, pos)
        level = _int(parts[0], line, pos)
        lab_text, _, var = parts[1].partition(":")
        label = _int(lab_text, line, pos)
        mult = _int(parts[2], line, pos) if len(parts) == 3 else 1
        if key == "E" and mult != 1:
            raise JobError("E entries are reduced (multiplicity 1)", line, pos)
        if key == "D":
            out.append((level, label, var, mult))
        else:
            out.append((level, label, var))
    return out


def parse_job(text: str) -> JobSpec:
    fields = {}
    D, E = [], []
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        if ":" not in stripped:
            raise JobError("expected 'key: value'", lineno, len(raw) - len(raw.lstrip()) + 1)
        key, _, value = stripped.partition(":")
        key_col = len(key) - len(key.lstrip()) + 1
        key = key.strip()
        vcol = len(key) + key_col + 1 + (len(value) - len(value.lstrip()))
        if key not in KEYS:
            raise JobError(f"unknown key {key!r}", lineno, key_col)
        if key in ("D", "E"):
            (D if key == "D" else E).extend(_handicap(value, lineno, vcol, key))
            lines.setdefault(key, lineno)
            continue
        if key in fields:
            raise JobError(f"duplicate key {key!r}", lineno, key_col)
        fields[key] = (value.strip(), lineno, vcol)
    if "vars" not in fields:
        raise JobError("missing 'vars:' line")
    if "J" not in fields:
        raise JobError("missing 'J:' line")
    vtext, vline, vcol = fields["vars"]
    variables = tuple(vtext.replace(",", " ").split())
    if not variables:
        raise JobError("no variables given", vline, vcol)
    for v in variables:
        if not _NAME.match(v):
            raise JobError(f"bad variable name {v!r}", vline, vcol + vtext.find(v))
    if len(set(variables)) != len(variables):
        raise JobError("duplicate variable", vline, vcol)
    jtext, jline, jcol = fields["J"]
    gens = []
    offset = 0
    for chunk in jtext.split(";"):
        start = offset
        offset += len(chunk) + 1
        if not chunk.strip():
            continue
        try:
            p = parse_polynomial(chunk, variables)
        except PolynomialSyntaxError as exc:
            raise JobError(str(exc), jline, jcol + start + (exc.column or 0)) from None
        gens.append(format_polynomial(p))
    if not gens:
        raise JobError("no generators given", jline, jcol)
    kw = {}
    if "mode" in fields:
        mtext, mline, mcol = fields["mode"]
        if mtext not in MODES:
            raise JobError(f"mode must be one of {', '.join(MODES)}", mline, mcol)
        kw["mode"] = mtext
    if "control" in fields:
        kw["control"] = _int(*fields["control"])
    if "max_steps" in fields:
        kw["max_steps"] = _int(*fields["max_steps"])
    if "seed" in fields:
        kw["seed"] = _int(*fields["seed"])
    if "emit" in fields:
        etext, eline, ecol = fields["emit"]
        if etext not in EMITS:
            raise JobError(f"emit must be one of {', '.join(EMITS)}", eline, ecol)
        kw["emit"] = etext
    for key in ("verify", "trace"):
        if key in fields:
            kw[key] = _bool(*fields[key])
    spec = JobSpec(variables, tuple(gens), D=tuple(D), E=tuple(E), **kw)
    try:
        validate(spec)
    except JobError as exc:
        line = None
        msg = str(exc)
        if "control" in msg and "control" in fields:
            line = fields["control"][1]
        elif ("D" in msg or "handicap" in msg) and "D" in lines:
            line = lines["D"]
        elif "E " in msg and "E" in lines:
            line = lines["E"]
        raise JobError(msg, line) from None
    return spec


def validate(spec: JobSpec):
    if spec.mode not in MODES:
        raise JobError(f"unknown mode {spec.mode!r}")
    if spec.control < 1:
        raise JobError("control must be at least 1")
    if spec.max_steps is not None and spec.max_steps < 1:
        raise JobError("max_steps must be at least 1")
    if spec.emit not in EMITS:
        raise JobError(f"unknown emit target {spec.emit!r}")
    if spec.mode == "scheme":
        if spec.control != 1:
            raise JobError("scheme mode uses control 1")
        if spec.D or spec.E:
            raise JobError("scheme mode takes no handicap lines")
    n = len(spec.variables)
    seen = {}
    for entry in list(spec.D) + list(spec.E):
        level, label, var = entry[:3]
        if not 1 <= level <= n:
            raise JobError(f"handicap level {level} outside 1..{n}")
        if label < 1:
            raise JobError("handicap labels are positive")
        if var not in spec.variables:
            raise JobError(f"unknown variable {var!r} in handicap")
        if seen.setdefault(label, var) != var:
            raise JobError(f"label {label} names two different components")
        if len(entry) == 4 and entry[3] < 0:
            raise JobError("D multiplicities are nonnegative")


def format_job(spec: JobSpec) -> str:
    lines = [f"vars: {' '.join(spec.variables)}",
             f"J: {'; '.join(spec.generators)}",
             f"mode: {spec.mode}"]
    if spec.mode == "mobile":
        lines.append(f"control: {spec.control}")
    for level, label, var, mult in spec.D:
        lines.append(f"D: {level} {label}:{var} {mult}")
    for level, label, var in spec.E:
        lines.append(f"E: {level} {label}:{var}")
    if spec.max_steps is not None:
        lines.append(f"max_steps: {spec.max_steps}")
    if spec.emit != "both":
        lines.append(f"emit: {spec.emit}")
    if not spec.verify:
        lines.append("verify: false")
    if spec.trace:
        lines.append("trace: true")
    if spec.seed:
        lines.append(f"seed: {spec.seed}")
    return "\n".join(lines) + "\n"


# -- outputs -------------------------------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def tree_dot(tree) -> str:
    out = ["digraph charts {", "  node [shape=box, fontname=\"monospace\"];"]
    for chart in tree.sorted_charts():
        inv = "(" + ",".join(str(x) for x in chart.setup.invariant) + ")" if chart.setup else "-"
        flag = "resolved" if chart.status == "resolved" else f"unresolved ({chart.status})"
        label = f"{chart.id}\\n{inv}\\n{flag}"
        out.append(f'  "{chart.id}" [label="{label}"];')
    for e in sorted(tree.edges, key=lambda e: chart_sort_key(e.child)):
        out.append(f'  "{e.parent}" -> "{e.child}" [label="{e.pivot}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def trace_json(tree):
    return {"setups": [{"chart": c.id, "setup": c.setup.to_json()}
                       for c in tree.sorted_charts() if c.setup is not None]}


def emit_outputs(tree, report, spec: JobSpec, out_dir: str):
    """Write the requested files; returns the list of paths written."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def put(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)

    if spec.emit in ("json", "both"):
        put("tree.json", dumps(tree.to_json()))
    if spec.emit in ("dot", "both"):
        put("tree.dot", tree_dot(tree))
    put("report.json", dumps(report.to_json(tree)))
    if spec.trace:
        put("trace.json", dumps(trace_json(tree)))
    return written


def load_schema(name):
    text = resources.files("mobres.schema").joinpath(name).read_text(encoding="utf-8")
    return json.loads(text)


__all__ = ["JobError", "JobSpec", "emit_outputs", "format_job", "load_schema",
           "parse_job", "tree_dot", "validate"]
