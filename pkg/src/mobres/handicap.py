"""Tags, shortcuts, invariant vectors and the handicap bookkeeping of a chart."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping


class HandicapError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Tag:
    """Per-level value (o, k, m) with m = (ord N, lab N); compared lexicographically."""
    o: int = 0
    k: int = 0
    ord_n: int = 0
    lab_n: int = 0

    def __post_init__(self):
        if self.o > 0 and (self.ord_n, self.lab_n) != (0, 0):
            raise HandicapError("m must be (0,0) when o > 0")

    def astuple(self):
        return (self.o, self.k, self.ord_n, self.lab_n)

    @property
    def m(self):
        return (self.ord_n, self.lab_n)


ZERO_TAG = Tag()


def compute_tag(o, k=0, shortcut=None):
    if o > 0 or shortcut is None:
        return Tag(o, k)
    return Tag(0, 0, shortcut.order, shortcut.label)


def flatten(tags):
    return tuple(x for t in tags for x in t.astuple())


def invariant_vector(tags, n):
    """Pad the tags (t_n, ..., t_d) with zero tags to length n and flatten."""
    tags = list(tags) + [ZERO_TAG] * (n - len(tags))
    return flatten(tags)


@dataclass(frozen=True)
class Shortcut:
    labels: tuple
    order: int
    label: int


def shortcut_label(labels):
    """Bitmask over the birth-ordered component labels."""
    return sum(1 << (lab - 1) for lab in set(labels))


def maximal_tight_shortcut(entries: Mapping[int, int], c: int) -> Shortcut:
    """Lexicographically (order, label)-maximal tight shortcut of order >= c."""
    items = sorted((lab, mult) for lab, mult in entries.items() if mult > 0)
    if sum(m for _, m in items) < c:
        raise HandicapError("no tight shortcut: divisor order below the control")
    best = None
    for size in range(1, len(items) + 1):
        for combo in itertools.combinations(items, size):
            order = sum(m for _, m in combo)
            if order < c:
                continue
            # a subset is tight if dropping any single component falls below c
            if any(order - m >= c for _, m in combo):
                continue
            labels = tuple(lab for lab, _ in combo)
            cand = Shortcut(labels, order, shortcut_label(labels))
            if best is None or (cand.order, cand.label) > (best.order, best.label):
                best = cand
    if best is None:
        raise HandicapError("no tight shortcut")
    return best


@dataclass
class HandicapRule:
    """How a chart's handicaps are materialized at a point.

    An explicit rule lists D_i and E_i directly (index 0 is level n).  A
    transformed rule keeps the data of the parent's setup along the center
    together with the reference tags that select between the two branches.
    """
    n: int
    explicit: bool = True
    D: tuple = ()            # tuple of {label: mult}, level n first
    E: tuple = ()            # tuple of frozenset(label)
    ref_tags: tuple = ()     # Tag per level, level n first
    ref_o: tuple = ()
    y_label: int | None = None

    @classmethod
    def empty(cls, n):
        return cls(n, True, tuple({} for _ in range(n)),
                   tuple(frozenset() for _ in range(n)))

    def to_json(self):
        out = {"explicit": self.explicit,
               "D": [[[lab, m] for lab, m in sorted(d.items())] for d in self.D],
               "E": [sorted(e) for e in self.E]}
        if not self.explicit:
            out["reference_tags"] = [list(t.astuple()) for t in self.ref_tags]
            out["reference_orders"] = list(self.ref_o)
            out["new_component"] = self.y_label
        return out


@dataclass
class LevelHandicap:
    """Handicaps materialized at one point for one level."""
    D: dict = field(default_factory=dict)
    E: frozenset = frozenset()
