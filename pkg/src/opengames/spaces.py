"""Finite and exact-rational spaces, and the density predicate everything else uses.

Open sets of a finite space are plain ``int`` bitmasks over the points.  Open
sets of the interval space are :class:`IntervalOpen` values, finite unions of
open intervals in (0, 1) with :class:`fractions.Fraction` endpoints.  Every
space exposes the same small set algebra (``union``, ``intersection``,
``subset``, ``dense``) so the game and sequence code never branches on kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Sequence, Union

__all__ = [
    "FinitePoints",
    "DiscretePoints",
    "IntervalOpen",
    "IntervalSpace",
    "Space",
    "OpenSet",
    "is_dense",
    "meets",
    "measure_union",
    "load_space",
    "space_to_json",
    "mask",
    "points_of",
]


def mask(points: Iterable[int]) -> int:
    """Bitmask with the given point indices set."""
    out = 0
    for p in points:
        if p < 0:
            raise ValueError(f"negative point index {p}")
        out |= 1 << p
    return out


def points_of(u: int) -> list[int]:
    return [i for i in range(u.bit_length()) if u >> i & 1]


class _BitSpace:
    """Set algebra shared by the two finite kinds."""

    n: int

    @property
    def basis(self) -> tuple[int, ...]:  # pragma: no cover - overridden
        raise NotImplementedError

    @property
    def empty(self) -> int:
        return 0

    @property
    def whole(self) -> int:
        return (1 << self.n) - 1

    def _check_mask(self, u: Any) -> None:
        if isinstance(u, bool) or not isinstance(u, int):
            raise TypeError(f"{u!r} is not an open set of a finite space")
        if u < 0 or u >> self.n:
            raise TypeError(f"{u:#b} has points outside 0..{self.n - 1}")

    def is_open(self, u: Any) -> bool:
        try:
            self._check_mask(u)
        except TypeError:
            return False
        return self._interior(u) == u

    def _interior(self, u: int) -> int:
        return reduce(lambda acc, b: acc | b if b & ~u == 0 else acc, self.basis, 0)

    def require_open(self, u: Any) -> int:
        self._check_mask(u)
        if self._interior(u) != u:
            raise TypeError(f"{points_of(u)} is not a union of basis elements")
        return u

    def union(self, sets: Iterable[int]) -> int:
        return reduce(int.__or__, sets, 0)

    def join(self, a: int, b: int) -> int:
        return a | b

    def intersection(self, a: int, b: int) -> int:
        # the basis need not be closed under intersection, so keep the open part
        return self._interior(a & b)

    def subset(self, a: int, b: int) -> bool:
        return a & ~b == 0

    def is_empty(self, u: int) -> bool:
        return u == 0

    def dense(self, u: int) -> bool:
        """True iff ``u`` meets every basis element."""
        return all(u & b for b in self.basis)

    def open_sets(self) -> list[int]:
        """Every open set, ascending by mask value (includes the empty set)."""
        seen = {0}
        for b in self.basis:
            seen |= {u | b for u in seen}
        return sorted(seen)

    def encode(self, u: int) -> list[int]:
        return points_of(u)

    def decode(self, obj: Any) -> int:
        if not isinstance(obj, list) or not all(isinstance(p, int) for p in obj):
            raise TypeError(f"finite open set must be a list of point indices, got {obj!r}")
        return self.require_open(mask(obj))

    def describe(self, u: int) -> str:
        return "{" + ",".join(map(str, points_of(u))) + "}"


@dataclass(frozen=True)
class FinitePoints(_BitSpace):
    """``n`` points with an explicit basis; open means union of basis elements."""

    n: int
    basis_masks: tuple[int, ...]
    kind: str = field(default="finite", init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a space needs at least one point")
        full = (1 << self.n) - 1
        for b in self.basis_masks:
            if b == 0:
                raise ValueError("basis elements must be nonempty")
            if b & ~full:
                raise ValueError(f"basis element {points_of(b)} has points outside 0..{self.n - 1}")

    @classmethod
    def from_lists(cls, n: int, basis: Sequence[Sequence[int]]) -> FinitePoints:
        return cls(n, tuple(mask(b) for b in basis))

    @property
    def basis(self) -> tuple[int, ...]:
        return self.basis_masks

    def to_json(self) -> dict:
        return {"kind": "finite", "n": self.n, "basis": [points_of(b) for b in self.basis_masks]}


@dataclass(frozen=True)
class DiscretePoints(_BitSpace):
    """``n`` isolated points; every subset is open."""

    n: int
    kind: str = field(default="discrete", init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a space needs at least one point")

    @property
    def basis(self) -> tuple[int, ...]:
        return tuple(1 << i for i in range(self.n))

    def _interior(self, u: int) -> int:
        return u

    def dense(self, u: int) -> bool:
        return u == self.whole

    def open_sets(self) -> list[int]:
        return list(range(1 << self.n))

    def to_json(self) -> dict:
        return {"kind": "discrete", "n": self.n}


def _frac(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("interval endpoints must be exact, not float")
    return Fraction(x)


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class IntervalOpen:
    """A finite union of open intervals inside (0, 1), kept sorted and disjoint.

    Overlapping intervals are merged.  Intervals that merely touch stay apart
    because the shared endpoint is not in either of them.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        raw = []
        for a, b in self.intervals:
            a, b = _frac(a), _frac(b)
            if not (0 <= a and b <= 1):
                raise ValueError(f"interval ({a}, {b}) leaves [0, 1]")
            if a < b:
                raw.append((a, b))
        raw.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in raw:
            if merged and a < merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def of(cls, *pairs: tuple[Any, Any]) -> IntervalOpen:
        return cls(tuple((_frac(a), _frac(b)) for a, b in pairs))

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __or__(self, other: IntervalOpen) -> IntervalOpen:
        return IntervalOpen(self.intervals + other.intervals)

    def __and__(self, other: IntervalOpen) -> IntervalOpen:
        out = []
        i = j = 0
        xs, ys = self.intervals, other.intervals
        while i < len(xs) and j < len(ys):
            a = max(xs[i][0], ys[j][0])
            b = min(xs[i][1], ys[j][1])
            if a < b:
                out.append((a, b))
            if xs[i][1] < ys[j][1]:
                i += 1
            else:
                j += 1
        return IntervalOpen(tuple(out))

    def to_json(self) -> list[list[str]]:
        return [[_fmt(a), _fmt(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, obj: Any) -> IntervalOpen:
        if not isinstance(obj, list) or not all(
            isinstance(p, (list, tuple)) and len(p) == 2 for p in obj
        ):
            raise TypeError(f"interval open set must be a list of [lo, hi] pairs, got {obj!r}")
        return cls.of(*((Fraction(str(a)), Fraction(str(b))) for a, b in obj))

    def __str__(self) -> str:
        if not self.intervals:
            return "∅"
        return " ∪ ".join(f"({a},{b})" for a, b in self.intervals)


@dataclass(frozen=True)
class IntervalSpace:
    """(0, 1) with the measure calculus standing in for the density topology.

    A family is dense exactly when its union has Lebesgue measure 1.
    """

    kind: str = field(default="interval", init=False, repr=False)

    @property
    def empty(self) -> IntervalOpen:
        return IntervalOpen()

    @property
    def whole(self) -> IntervalOpen:
        return IntervalOpen.of((0, 1))

    def is_open(self, u: Any) -> bool:
        return isinstance(u, IntervalOpen)

    def require_open(self, u: Any) -> IntervalOpen:
        if not isinstance(u, IntervalOpen):
            raise TypeError(f"{u!r} is not an open set of the interval space")
        return u

    def union(self, sets: Iterable[IntervalOpen]) -> IntervalOpen:
        pieces: tuple = ()
        for s in sets:
            pieces += s.intervals
        return IntervalOpen(pieces)

    def join(self, a: IntervalOpen, b: IntervalOpen) -> IntervalOpen:
        return a | b

    def intersection(self, a: IntervalOpen, b: IntervalOpen) -> IntervalOpen:
        return a & b

    def subset(self, a: IntervalOpen, b: IntervalOpen) -> bool:
        return (a & b) == a

    def is_empty(self, u: IntervalOpen) -> bool:
        return not u.intervals

    def dense(self, u: IntervalOpen) -> bool:
        return u.measure == 1

    def open_sets(self) -> list[IntervalOpen]:
        raise TypeError("the interval space has no finite list of open sets")

    def encode(self, u: IntervalOpen) -> list[list[str]]:
        return u.to_json()

    def decode(self, obj: Any) -> IntervalOpen:
        return IntervalOpen.from_json(obj)

    def describe(self, u: IntervalOpen) -> str:
        return str(u)

    def to_json(self) -> dict:
        return {"kind": "interval"}


Space = Union[FinitePoints, DiscretePoints, IntervalSpace]
OpenSet = Union[int, IntervalOpen]


def is_dense(space: Space, family: Iterable[OpenSet]) -> bool:
    """Whether the union of ``family`` is dense in ``space``.

    Raises :class:`TypeError` when a member is not an open set of ``space``.
    """
    members = [space.require_open(u) for u in family]
    return space.dense(space.union(members))


def meets(u: OpenSet, v: OpenSet) -> bool:
    if isinstance(u, IntervalOpen) and isinstance(v, IntervalOpen):
        return bool(u & v)
    if isinstance(u, int) and isinstance(v, int) and not isinstance(u, bool) and not isinstance(v, bool):
        return u & v != 0
    raise TypeError(f"cannot intersect {type(u).__name__} with {type(v).__name__}")


def measure_union(sets: Iterable[IntervalOpen]) -> Fraction:
    """Exact Lebesgue measure of a union of interval open sets."""
    sets = list(sets)
    for s in sets:
        if not isinstance(s, IntervalOpen):
            raise TypeError(f"{s!r} is not an IntervalOpen")
    return IntervalSpace().union(sets).measure


def load_space(obj: dict) -> Space:
    kind = obj.get("kind")
    if kind == "finite":
        return FinitePoints.from_lists(int(obj["n"]), obj["basis"])
    if kind == "discrete":
        return DiscretePoints(int(obj["n"]))
    if kind == "interval":
        return IntervalSpace()
    raise ValueError(f"unknown space kind {kind!r}")


def space_to_json(space: Space) -> dict:
    return space.to_json()
