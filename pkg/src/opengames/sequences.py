"""Tiny, 1-tiny, weak tiny and b-tiny sequences, checked exhaustively at scale.

Every notion here quantifies over infinitely many indices in its original
form.  A :class:`FamilySequence` is a finite prefix, and a verdict of
``HOLDS_AT_SCALE`` only says that no selection over the available indices
defeats it.  Selections are enumerated in lexicographic order, so the first
defeating selection found is reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence

from . import _limits
from .games import GameKind
from .spaces import OpenSet, Space, load_space

__all__ = [
    "SequenceKind",
    "Status",
    "FamilySequence",
    "DefeatWitness",
    "Verification",
    "verify_one_tiny",
    "verify_tiny",
    "verify_weak_tiny",
    "verify_b_tiny",
    "weak_defeats_to_tiny_defeat",
    "tail_tiny_defeats",
    "witness_union",
    "sequence_to_strategy",
]


class SequenceKind(str, Enum):
    TINY = "tiny"
    ONE_TINY = "one-tiny"
    WEAK_TINY = "weak"
    B_TINY = "b-tiny"


class Status(str, Enum):
    HOLDS_AT_SCALE = "HOLDS_AT_SCALE"
    DEFEATED = "DEFEATED"


@dataclass(frozen=True)
class FamilySequence:
    """A finite prefix of open families, each with dense union."""

    space: Space
    families: tuple[tuple[OpenSet, ...], ...]
    kind_claimed: SequenceKind = SequenceKind.TINY

    def __post_init__(self) -> None:
        fams = tuple(tuple(f) for f in self.families)
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "kind_claimed", SequenceKind(self.kind_claimed))
        for n, fam in enumerate(fams):
            members = [self.space.require_open(u) for u in fam]
            if not self.space.dense(self.space.union(members)):
                raise ValueError(f"family {n} does not have dense union")

    def __len__(self) -> int:
        return len(self.families)

    def tail(self, k: int) -> FamilySequence:
        return FamilySequence(self.space, self.families[k:], self.kind_claimed)

    def with_kind(self, kind: SequenceKind) -> FamilySequence:
        return FamilySequence(self.space, self.families, kind)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "kind": self.kind_claimed.value,
            "families": [[self.space.encode(u) for u in fam] for fam in self.families],
        }

    @classmethod
    def from_json(cls, obj: dict, space: Optional[Space] = None) -> FamilySequence:
        if space is None:
            space = load_space(obj["space"])
        fams = tuple(tuple(space.decode(u) for u in fam) for fam in obj["families"])
        return cls(space, fams, SequenceKind(obj.get("kind", "tiny")))


@dataclass(frozen=True)
class DefeatWitness:
    """Member indices chosen from each family; their union is dense.

    ``threshold`` is set for b-tiny defeats: every set of at least that many
    indices already has dense union.
    """

    choices: tuple[tuple[int, ...], ...]
    threshold: Optional[int] = None

    def to_json(self, seq: FamilySequence) -> dict:
        out: dict = {
            "choices": [list(c) for c in self.choices],
            "sets": [[seq.space.encode(seq.families[n][i]) for i in c] for n, c in enumerate(self.choices)],
        }
        if self.threshold is not None:
            out["threshold"] = self.threshold
        return out


@dataclass(frozen=True)
class Verification:
    status: Status
    witness: Optional[DefeatWitness] = None
    explored: int = 0

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS_AT_SCALE

    def to_json(self, seq: FamilySequence) -> dict:
        out: dict = {"status": self.status.value, "explored": self.explored}
        if self.witness is not None:
            out["witness"] = self.witness.to_json(seq)
        return out


def witness_union(seq: FamilySequence, witness: DefeatWitness, indices: Optional[Sequence[int]] = None) -> OpenSet:
    """Union of the witnessed selection, optionally over a subset of indices."""
    idx = range(len(witness.choices)) if indices is None else indices
    return seq.space.union(seq.families[n][i] for n in idx for i in witness.choices[n])


def _maximal_options(seq: FamilySequence, s: Optional[int]) -> list[list[tuple[int, ...]]]:
    # density is monotone, so only the largest allowed subfamilies can defeat
    opts = []
    for fam in seq.families:
        size = len(fam) if s is None else min(s, len(fam))
        opts.append(list(itertools.combinations(range(len(fam)), size)))
    return opts


def _search(seq: FamilySequence, options: list[list[tuple[int, ...]]], cap: Optional[int]) -> Verification:
    """First selection (lexicographic) with dense union, memoizing dead states."""
    size = math.prod(len(o) for o in options)
    _limits.enforce(size, cap, "selection space")
    space = seq.space
    unions = [[space.union(seq.families[n][i] for i in c) for c in opts] for n, opts in enumerate(options)]
    dead: set = set()
    explored = 0
    chosen: list[tuple[int, ...]] = []
    m = len(options)

    def dfs(n: int, acc: OpenSet) -> bool:
        nonlocal explored
        if n == m:
            explored += 1
            return space.dense(acc)
        key = (n, acc)
        if key in dead:
            return False
        for opt, u in zip(options[n], unions[n]):
            chosen.append(opt)
            if dfs(n + 1, space.join(acc, u)):
                return True
            chosen.pop()
        dead.add(key)
        return False

    if dfs(0, space.empty):
        return Verification(Status.DEFEATED, DefeatWitness(tuple(chosen)), explored)
    return Verification(Status.HOLDS_AT_SCALE, None, explored)


def verify_one_tiny(seq: FamilySequence, cap: Optional[int] = None) -> Verification:
    """Exhaustive over choice functions picking one member per family."""
    if any(not fam for fam in seq.families):
        raise ValueError("every family must be nonempty")
    return _search(seq, [[(i,) for i in range(len(fam))] for fam in seq.families], cap)


def verify_tiny(seq: FamilySequence, s: Optional[int] = None, cap: Optional[int] = None) -> Verification:
    """Exhaustive over subfamilies of size at most ``s`` (``None`` = any size).

    Only subfamilies of the largest allowed size are enumerated; a dense
    selection of smaller subfamilies always extends to one of those.
    """
    return _search(seq, _maximal_options(seq, s), cap)


def verify_weak_tiny(seq: FamilySequence, s: Optional[int] = None, cap: Optional[int] = None) -> Verification:
    """Defeated iff some selection makes every tail union dense.

    For a selection ``E_0..E_{m-1}`` the tail ``k`` is the union of ``E_n`` for
    ``n >= k``; all tails ``k < m`` must be dense for a defeat.
    """
    options = _maximal_options(seq, s)
    size = math.prod(len(o) for o in options)
    _limits.enforce(size, cap, "selection space")
    space = seq.space
    unions = [[space.union(seq.families[n][i] for i in c) for c in opts] for n, opts in enumerate(options)]
    explored = 0
    for pick in itertools.product(*(range(len(o)) for o in options)):
        explored += 1
        acc = space.empty
        ok = True
        for n in reversed(range(len(options))):
            acc = space.join(acc, unions[n][pick[n]])
            if not space.dense(acc):
                ok = False
                break
        if ok:
            witness = DefeatWitness(tuple(options[n][p] for n, p in enumerate(pick)))
            return Verification(Status.DEFEATED, witness, explored)
    return Verification(Status.HOLDS_AT_SCALE, None, explored)


def verify_b_tiny(
    seq: FamilySequence, s: Optional[int] = None, t: Optional[int] = None, cap: Optional[int] = None
) -> Verification:
    """Holds iff every selection has some ``t`` indices with non-dense union.

    ``t`` stands in for the infinite index subsequence and defaults to
    ``ceil(m / 2)``.  Index sets larger than ``t`` only grow the union, so
    checking sets of exactly ``t`` indices is enough.
    """
    m = len(seq)
    if t is None:
        t = math.ceil(m / 2)
    if not 1 <= t <= max(m, 1):
        raise ValueError(f"threshold t={t} must lie in 1..{m}")
    options = _maximal_options(seq, s)
    size = math.prod(len(o) for o in options)
    _limits.enforce(size * math.comb(m, t), cap, "selection space")
    space = seq.space
    unions = [[space.union(seq.families[n][i] for i in c) for c in opts] for n, opts in enumerate(options)]
    subsets = list(itertools.combinations(range(m), t))
    explored = 0
    for pick in itertools.product(*(range(len(o)) for o in options)):
        explored += 1
        if all(space.dense(space.union(unions[n][pick[n]] for n in sub)) for sub in subsets):
            witness = DefeatWitness(tuple(options[n][p] for n, p in enumerate(pick)), threshold=t)
            return Verification(Status.DEFEATED, witness, explored)
    return Verification(Status.HOLDS_AT_SCALE, None, explored)


def tail_tiny_defeats(seq: FamilySequence, s: Optional[int] = None) -> list[Optional[DefeatWitness]]:
    """For each tail ``k``, the first tiny defeat of ``families[k:]`` (or None)."""
    return [verify_tiny(seq.tail(k), s).witness for k in range(len(seq))]


def weak_defeats_to_tiny_defeat(per_k_witnesses: Sequence[Optional[DefeatWitness]]) -> DefeatWitness:
    """Merge tail defeats into one selection: ``E'_n`` is the union of ``E^k_n`` for ``k <= n``.

    ``per_k_witnesses[k]`` must defeat the tail starting at ``k`` and so
    carries choices for indices ``k..m-1``.  Every tail union of the result
    contains the corresponding witness's union and is therefore dense.
    """
    m = len(per_k_witnesses)
    for k, w in enumerate(per_k_witnesses):
        if w is None:
            raise ValueError(f"missing defeat witness for tail {k}")
        if len(w.choices) != m - k:
            raise ValueError(f"witness for tail {k} covers {len(w.choices)} indices, expected {m - k}")
    combined = []
    for n in range(m):
        picked: set[int] = set()
        for k in range(n + 1):
            picked.update(per_k_witnesses[k].choices[n - k])
        combined.append(tuple(sorted(picked)))
    return DefeatWitness(tuple(combined))


_STRATEGY_KINDS = {
    SequenceKind.TINY: {GameKind.G7},
    SequenceKind.WEAK_TINY: {GameKind.G7_SIGMA},
    SequenceKind.ONE_TINY: {GameKind.G2},
}


class SequenceStrategy:
    """II plays family ``n mod m`` at round ``n``; I's moves are ignored."""

    def __init__(self, seq: FamilySequence, kind: GameKind) -> None:
        self.seq = seq
        self.kind = kind

    def __call__(self, history: tuple) -> tuple:
        return self.seq.families[len(history) % len(self.seq)]

    def __repr__(self) -> str:
        return f"SequenceStrategy({self.kind.value}, m={len(self.seq)})"


def sequence_to_strategy(seq: FamilySequence, kind: Any) -> SequenceStrategy:
    kind = GameKind(kind)
    if len(seq) == 0:
        raise ValueError("cannot build a strategy from an empty sequence")
    allowed = _STRATEGY_KINDS.get(seq.kind_claimed, set())
    if kind not in allowed:
        raise ValueError(f"a {seq.kind_claimed.value} sequence does not give a strategy for {kind.value}")
    return SequenceStrategy(seq, kind)
