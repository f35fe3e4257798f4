"""Finite function families and their translations into sequences on discrete spaces.

A :class:`FunctionFamily` is a finite set of functions ``{0..m-1} -> {0..r-1}``,
the desk-scale stand-in for a subset of the Baire space.  Comparison
functions ``g`` range over all of ``{0..r-1}^m`` for the everywhere-different
property and over ``{0..r-2}^m`` for the two "above" properties (nothing can
exceed the top value).

The chain construction behind :func:`dominating_to_tiny` and
:func:`unbounded_to_b_tiny` is our own choice; its only justification is the
exhaustive agreement checks in the test suite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import _limits
from .sequences import FamilySequence, SequenceKind
from .spaces import DiscretePoints, mask, points_of

__all__ = [
    "FunctionFamily",
    "PropertyKind",
    "FamilyProperty",
    "DIF",
    "ABOVE",
    "often_above",
    "has_property",
    "dif_to_one_tiny",
    "one_tiny_to_dif",
    "dominating_to_tiny",
    "unbounded_to_b_tiny",
    "min_family_size",
    "all_families",
]

Func = tuple[int, ...]


@dataclass(frozen=True)
class FunctionFamily:
    m: int
    r: int
    funcs: tuple[Func, ...]

    def __post_init__(self) -> None:
        funcs = tuple(tuple(int(v) for v in f) for f in self.funcs)
        object.__setattr__(self, "funcs", funcs)
        if self.m < 0 or self.r < 1:
            raise ValueError("need m >= 0 and r >= 1")
        if len(set(funcs)) != len(funcs):
            raise ValueError("functions must be distinct")
        for f in funcs:
            if len(f) != self.m or any(not 0 <= v < self.r for v in f):
                raise ValueError(f"{list(f)} is not a function {self.m} -> {self.r}")

    def __len__(self) -> int:
        return len(self.funcs)

    def to_json(self) -> dict:
        return {"m": self.m, "r": self.r, "funcs": [list(f) for f in self.funcs]}

    @classmethod
    def from_json(cls, obj: dict) -> FunctionFamily:
        return cls(int(obj["m"]), int(obj["r"]), tuple(tuple(f) for f in obj["funcs"]))


class PropertyKind(str, Enum):
    EVERYWHERE_DIFFERENT = "dif"
    EVERYWHERE_ABOVE = "above"
    OFTEN_ABOVE = "often"


@dataclass(frozen=True)
class FamilyProperty:
    kind: PropertyKind
    t: Optional[int] = None

    def __str__(self) -> str:
        return self.kind.value if self.t is None else f"{self.kind.value}:{self.t}"

    @classmethod
    def parse(cls, text: str) -> FamilyProperty:
        name, _, arg = text.partition(":")
        kind = PropertyKind(name)
        if kind is PropertyKind.OFTEN_ABOVE:
            if not arg:
                raise ValueError("often needs a threshold, e.g. often:2")
            return cls(kind, int(arg))
        return cls(kind)


DIF = FamilyProperty(PropertyKind.EVERYWHERE_DIFFERENT)
ABOVE = FamilyProperty(PropertyKind.EVERYWHERE_ABOVE)


def often_above(t: int) -> FamilyProperty:
    return FamilyProperty(PropertyKind.OFTEN_ABOVE, t)


def _beats(f: Func, g: Func, p: FamilyProperty) -> bool:
    if p.kind is PropertyKind.EVERYWHERE_DIFFERENT:
        return all(a != b for a, b in zip(f, g))
    if p.kind is PropertyKind.EVERYWHERE_ABOVE:
        return all(a > b for a, b in zip(f, g))
    return sum(a > b for a, b in zip(f, g)) >= p.t


def _comparisons(m: int, r: int, p: FamilyProperty):
    top = r if p.kind is PropertyKind.EVERYWHERE_DIFFERENT else r - 1
    return itertools.product(range(top), repeat=m)


def has_property(F: FunctionFamily, p: FamilyProperty, cap: Optional[int] = None) -> tuple[bool, Optional[Func]]:
    """Exhaustive check of ``forall g exists f in F beating g``.

    Returns ``(True, None)`` or ``(False, g)`` with the first failing ``g``.
    """
    _limits.enforce(F.r**F.m, cap, "comparison functions")
    for g in _comparisons(F.m, F.r, p):
        if not any(_beats(f, g, p) for f in F.funcs):
            return False, g
    return True, None


def dif_to_one_tiny(F: FunctionFamily) -> FamilySequence:
    """Cells ``A^i_n = {f : f(i) = n}`` on the discrete space with one point per function."""
    if not F.funcs:
        raise ValueError("the family must be nonempty")
    families = []
    for i in range(F.m):
        cells = [mask(x for x, f in enumerate(F.funcs) if f[i] == n) for n in range(F.r)]
        families.append(tuple(c for c in cells if c))
    return FamilySequence(DiscretePoints(len(F.funcs)), tuple(families), SequenceKind.ONE_TINY)


def _disjointify(fam: tuple[int, ...], n_points: int) -> list[int]:
    """Assign each point to the lowest-index member containing it."""
    out = [0] * len(fam)
    for x in range(n_points):
        for k, u in enumerate(fam):
            if u >> x & 1:
                out[k] |= 1 << x
                break
    return out


def one_tiny_to_dif(seq: FamilySequence, refine: bool = False) -> FunctionFamily:
    """``f_x(i)`` is the index of the member of family ``i`` containing ``x``.

    Families must partition the points; with ``refine=True`` overlapping
    families are first disjointified by lowest-index membership.  Points with
    identical codes give the same function and collapse to one.
    """
    space = seq.space
    if not isinstance(space, DiscretePoints):
        raise TypeError("one_tiny_to_dif needs a sequence on a discrete space")
    n_points = space.n
    cols = []
    for i, fam in enumerate(seq.families):
        overlap = any(a & b for a, b in itertools.combinations(fam, 2))
        if overlap and not refine:
            raise ValueError(f"family {i} is not a partition; pass refine=True")
        cells = _disjointify(fam, n_points)
        cols.append([next(k for k, c in enumerate(cells) if c >> x & 1) for x in range(n_points)])
    funcs = tuple(dict.fromkeys(tuple(col[x] for col in cols) for x in range(n_points)))
    r = max((len(f) for f in seq.families), default=1)
    return FunctionFamily(len(seq.families), r, funcs)


def _chain_families(F: FunctionFamily) -> tuple[tuple[int, ...], ...]:
    families = []
    for i in range(F.m):
        chain = [mask(x for x, f in enumerate(F.funcs) if f[i] <= n) for n in range(F.r)]
        families.append(tuple(dict.fromkeys(c for c in chain if c)))
    return tuple(families)


def dominating_to_tiny(F: FunctionFamily) -> FamilySequence:
    """Chains ``A^i_n = {f : f(i) <= n}`` for ``n < r``; empty and repeated members dropped."""
    if not F.funcs:
        raise ValueError("the family must be nonempty")
    return FamilySequence(DiscretePoints(len(F.funcs)), _chain_families(F), SequenceKind.TINY)


def unbounded_to_b_tiny(F: FunctionFamily) -> FamilySequence:
    """Same chains as :func:`dominating_to_tiny`, tagged for the b-tiny check."""
    if not F.funcs:
        raise ValueError("the family must be nonempty")
    return FamilySequence(DiscretePoints(len(F.funcs)), _chain_families(F), SequenceKind.B_TINY)


def all_families(m: int, r: int, max_size: int, min_size: int = 1):
    """Every family of distinct functions ``m -> r`` with size in range, in order."""
    funcs = list(itertools.product(range(r), repeat=m))
    for size in range(min_size, min(max_size, len(funcs)) + 1):
        for combo in itertools.combinations(funcs, size):
            yield FunctionFamily(m, r, combo)


def min_family_size(m: int, r: int, p: FamilyProperty, cap: Optional[int] = None) -> Optional[int]:
    """Least ``|F|`` with property ``p``, or None when no family has it."""
    total = r**m
    _limits.enforce(sum(math.comb(total, k) for k in range(1, total + 1)) * total, cap, "family search")
    for size in range(1, total + 1):
        for F in all_families(m, r, size, min_size=size):
            if has_property(F, p, cap)[0]:
                return size
    return None


def describe_points(F: FunctionFamily, u: int) -> list[list[int]]:
    return [list(F.funcs[x]) for x in points_of(u)]
