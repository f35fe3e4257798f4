"""An open dense set in a product whose vertical sections are all non-dense.

X is the set of leaves of the ``k``-ary tree of depth ``d``; its basic open
sets are cones.  Level ``n`` of the labeled tree is the set of depth-``n``
cones, each labeled by its node.  Y carries a refining 1-tiny sequence whose
members are enumerated by nodes of the same tree.  The set ``E`` is the union
of boxes ``U x V^n_{label(U)}``.

Leaves of X are isolated points, so a box over a single leaf meets ``E`` only
through that leaf's section.  Density of ``E`` is therefore checked against
cones of depth below ``d``, the finite stand-in for "every open set has
points deeper in the tree".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import _limits
from .sequences import FamilySequence, SequenceKind, Verification, verify_one_tiny
from .spaces import DiscretePoints, FinitePoints, Space, mask

__all__ = [
    "KUConstructionError",
    "LabeledPiTree",
    "RefiningOneTiny",
    "refine_sequence",
    "build_canonical_tree",
    "Box",
    "build_E",
    "check_E_dense",
    "section_not_dense",
    "branch_chain",
    "ku_report",
]

Label = tuple[int, ...]


class KUConstructionError(ValueError):
    pass


def _cone(tau: Sequence[int], d: int, k: int) -> int:
    """Leaves below node ``tau``; leaves are numbered in lexicographic order."""
    span = k ** (d - len(tau))
    start = 0
    for v in tau:
        start = start * k + v
    start *= span
    return mask(range(start, start + span))


def _disjoint(sets: Sequence[int]) -> bool:
    return all(not a & b for a, b in itertools.combinations(sets, 2))


@dataclass(frozen=True)
class LabeledPiTree:
    """Levels ``B_0..B_d`` of disjoint open sets with node labels, validated on construction."""

    space: Space
    depth: int
    branching: int
    levels: tuple[tuple[int, ...], ...]
    labels: tuple[tuple[Label, ...], ...]

    def __post_init__(self) -> None:
        problem = self.problem()
        if problem:
            raise KUConstructionError(problem)

    def problem(self) -> Optional[str]:
        sp, k = self.space, self.branching
        if len(self.levels) != self.depth + 1 or len(self.labels) != self.depth + 1:
            return "need one level and one label list for each n = 0..d"
        for n, (level, labels) in enumerate(zip(self.levels, self.labels)):
            if len(level) != len(labels):
                return f"level {n} has {len(level)} sets but {len(labels)} labels"
            for u, lab in zip(level, labels):
                if not sp.is_open(u) or sp.is_empty(u):
                    return f"level {n} has a member that is not a nonempty open set"
                if len(lab) != n or any(not 0 <= v < k for v in lab):
                    return f"level {n} label {list(lab)} is not a node of depth {n}"
            if not _disjoint(level):
                return f"level {n} is not pairwise disjoint"
            if not sp.dense(sp.union(level)):
                return f"level {n} does not have dense union"
        for n in range(self.depth):
            upper, lower = self.levels[n], self.levels[n + 1]
            for i, v in enumerate(lower):
                parents = [p for p, u in enumerate(upper) if sp.subset(v, u)]
                if not parents:
                    return f"level {n + 1} member {i} is inside no member of level {n}"
                lab, plab = self.labels[n + 1][i], self.labels[n][parents[0]]
                if lab[:n] != plab:
                    return f"coherence: label {list(lab)} does not extend parent label {list(plab)}"
            for p, u in enumerate(upper):
                below = {self.labels[n + 1][i] for i, v in enumerate(lower) if sp.subset(v, u)}
                want = {self.labels[n][p] + (i,) for i in range(k)}
                if below != want:
                    return f"surjectivity: children of {list(self.labels[n][p])} carry {sorted(map(list, below))}"
        return None

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "branching": self.branching,
            "levels": [
                [{"set": self.space.encode(u), "label": list(lab)} for u, lab in zip(level, labels)]
                for level, labels in zip(self.levels, self.labels)
            ],
        }


def build_canonical_tree(d: int, k: int, cap: Optional[int] = None) -> LabeledPiTree:
    """Leaves of the ``k``-ary tree of depth ``d`` with cones as basis; level ``n`` = depth-``n`` cones."""
    if d < 0 or k < 1:
        raise ValueError("need d >= 0 and k >= 1")
    _limits.enforce(k**d, cap, "tree leaves")
    basis = [_cone(tau, d, k) for n in range(d + 1) for tau in itertools.product(range(k), repeat=n)]
    space = FinitePoints(k**d, tuple(basis))
    levels, labels = [], []
    for n in range(d + 1):
        nodes = list(itertools.product(range(k), repeat=n))
        levels.append(tuple(_cone(tau, d, k) for tau in nodes))
        labels.append(tuple(nodes))
    tree = LabeledPiTree(space, d, k, tuple(levels), tuple(labels))
    for sigma in itertools.product(range(k), repeat=d):
        branch_chain(tree, sigma)
    return tree


def branch_chain(tree: LabeledPiTree, sigma: Sequence[int]) -> list[int]:
    """Nested ``U_1 >= .. >= U_d`` with ``label(U_n) = sigma[:n]``; raises if there is none."""
    sigma = tuple(sigma)
    sp = tree.space
    chain: list[int] = []
    current = sp.whole
    for n in range(1, len(sigma) + 1):
        found = [
            u
            for u, lab in zip(tree.levels[n], tree.labels[n])
            if lab == sigma[:n] and sp.subset(u, current)
        ]
        if not found:
            raise KUConstructionError(f"no level-{n} set labeled {list(sigma[:n])} below the chain")
        current = found[0]
        chain.append(current)
    return chain


@dataclass(frozen=True)
class RefiningOneTiny:
    """Disjoint, refining families on Y with members enumerated by nodes ``sigma``."""

    space: Space
    families: tuple[tuple[int, ...], ...]
    branching: int
    enumeration: dict = field(hash=False, compare=False)

    def __post_init__(self) -> None:
        sp, k = self.space, self.branching
        for n, fam in enumerate(self.families, start=1):
            if not fam or any(sp.is_empty(u) for u in fam):
                raise KUConstructionError(f"family {n} must consist of nonempty sets")
            if not _disjoint(fam):
                raise KUConstructionError(f"family {n} is not pairwise disjoint")
            if not sp.dense(sp.union(fam)):
                raise KUConstructionError(f"family {n} does not have dense union")
            if n > 1 and any(not any(sp.subset(v, u) for u in self.families[n - 2]) for v in fam):
                raise KUConstructionError(f"family {n} does not refine family {n - 1}")
            for sigma in itertools.product(range(k), repeat=n):
                v = self.enumeration.get(sigma)
                if v is None:
                    raise KUConstructionError(f"missing V^{n}_{list(sigma)}")
                if v not in fam:
                    raise KUConstructionError(f"V^{n}_{list(sigma)} is not a member of family {n}")

    def __len__(self) -> int:
        return len(self.families)

    def V(self, sigma: Sequence[int]) -> int:
        try:
            return self.enumeration[tuple(sigma)]
        except KeyError:
            raise KUConstructionError(f"missing V^{len(sigma)}_{list(sigma)}") from None

    def as_sequence(self) -> FamilySequence:
        return FamilySequence(self.space, self.families, SequenceKind.ONE_TINY)

    def to_json(self) -> dict:
        return {
            "sequence": self.as_sequence().to_json(),
            "branching": self.branching,
            "enumeration": [
                {"sigma": list(s), "set": self.space.encode(v)} for s, v in sorted(self.enumeration.items())
            ],
        }


def _lowest_index(fam: Sequence[int], space: Space) -> list[int]:
    out, seen = [], space.empty
    for u in fam:
        out.append(u & ~seen)
        seen |= u
    return out


def refine_sequence(seq: FamilySequence, k: int, depth: Optional[int] = None) -> RefiningOneTiny:
    """Make the families disjoint and refining, then enumerate them by nodes.

    Each family is disjointified by lowest index and intersected with the
    previous refined family.  ``V^{n+1}_{tau i}`` is the ``i``-th (cyclically)
    member of the next family lying outside ``V^n_tau``, so consecutive
    members along a branch avoid one another whenever possible.
    """
    if k < 1:
        raise ValueError("branching must be at least 1")
    if not isinstance(seq.space, DiscretePoints):
        raise TypeError("refinement needs a sequence on a discrete space")
    depth = len(seq) if depth is None else depth
    if depth > len(seq):
        raise KUConstructionError(f"sequence has {len(seq)} families, depth {depth} requested")
    sp = seq.space
    families: list[tuple[int, ...]] = []
    for n in range(depth):
        cells = [c for c in _lowest_index(seq.families[n], sp) if c]
        if families:
            cells = [a & b for a in families[-1] for b in cells if a & b]
        families.append(tuple(cells))
    enumeration: dict[Label, int] = {}
    for n in range(1, depth + 1):
        fam = families[n - 1]
        for tau in itertools.product(range(k), repeat=n - 1):
            prev = enumeration.get(tau)
            outside = [v for v in fam if prev is None or not v & prev] or list(fam)
            for i in range(k):
                enumeration[tau + (i,)] = outside[i % len(outside)]
    return RefiningOneTiny(sp, tuple(families), k, enumeration)


@dataclass(frozen=True)
class Box:
    level: int
    label: Label
    x: int
    y: int


def build_E(tree: LabeledPiTree, seq: RefiningOneTiny) -> list[Box]:
    """One box ``U x V^n_{label(U)}`` for each ``U`` in levels ``1..d``."""
    if tree.depth > len(seq):
        raise KUConstructionError(f"tree depth {tree.depth} exceeds sequence length {len(seq)}")
    if tree.branching != seq.branching:
        raise KUConstructionError("tree and enumeration use different branching")
    return [
        Box(n, lab, u, seq.V(lab))
        for n in range(1, tree.depth + 1)
        for u, lab in zip(tree.levels[n], tree.labels[n])
    ]


def check_E_dense(E: Sequence[Box], tree: LabeledPiTree, y_space: Space) -> tuple[bool, Optional[tuple[int, int]]]:
    """Every box ``W x U`` (``W`` a cone above the leaves, ``U`` basic in Y) meets ``E``.

    Returns ``(False, (W, U))`` for the first box missed.
    """
    depths = range(tree.depth) if tree.depth else [0]
    for n in depths:
        for w in tree.levels[n]:
            for u in y_space.basis:
                if not any(b.x & w and b.y & u for b in E):
                    return False, (w, u)
    return True, None


def section_not_dense(E: Sequence[Box], sigma: Sequence[int], tree: LabeledPiTree, y_space: Space) -> tuple[bool, list[int]]:
    """Section of ``E`` at the leaf of branch ``sigma``: ``(not dense, members)``."""
    sigma = tuple(sigma)
    if len(sigma) != tree.depth:
        raise ValueError(f"branch must have length {tree.depth}")
    point = _cone(sigma, tree.depth, tree.branching)
    members = [b.y for b in E if b.x & point]
    return not y_space.dense(y_space.union(members)), members


def ku_report(tree: LabeledPiTree, seq: RefiningOneTiny) -> dict:
    E = build_E(tree, seq)
    dense, miss = check_E_dense(E, tree, seq.space)
    ysp = seq.space
    branches = []
    for sigma in itertools.product(range(tree.branching), repeat=tree.depth):
        ok, members = section_not_dense(E, sigma, tree, ysp)
        branches.append({"sigma": list(sigma), "section": ysp.encode(ysp.union(members)), "not_dense": ok})
    verification: Verification = verify_one_tiny(seq.as_sequence())
    out: dict[str, Any] = {
        "depth": tree.depth,
        "branching": tree.branching,
        "boxes": len(E),
        "E_dense": dense,
        "sections_not_dense": all(b["not_dense"] for b in branches),
        "branches": branches,
        "y_one_tiny": verification.to_json(seq.as_sequence()),
    }
    if miss is not None:
        out["missed_box"] = {"x": tree.space.encode(miss[0]), "y": ysp.encode(miss[1])}
    return out
