"""Threshold families on (0, 1): single picks stay below measure 1/2, finite
subfamilies reach measure 1.

Family ``n`` (``n = 1..T``) is the split of (0, 1) into ``3**n`` equal open
intervals.  This is one instance of "all open sets of measure at most
``3**-n``", and it is enough for both halves of the separation of G from G7.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .sequences import FamilySequence, SequenceKind, verify_tiny
from .spaces import IntervalOpen, IntervalSpace, measure_union

__all__ = [
    "ThresholdSequence",
    "build_threshold_sequence",
    "MeasureBound",
    "one_tiny_by_measure",
    "max_choice_measure",
    "GreedyTrace",
    "greedy_defeat",
    "separation_report",
]


@dataclass(frozen=True)
class ThresholdSequence:
    families: tuple[tuple[IntervalOpen, ...], ...]

    def __post_init__(self) -> None:
        for n, fam in enumerate(self.families, start=1):
            cap = Fraction(1, 3**n)
            if any(u.measure > cap for u in fam):
                raise ValueError(f"family {n} has a member of measure above 1/3^{n}")
            if measure_union(fam) != 1:
                raise ValueError(f"family {n} does not have measure-1 union")

    @property
    def length(self) -> int:
        return len(self.families)

    def as_sequence(self) -> FamilySequence:
        return FamilySequence(IntervalSpace(), self.families, SequenceKind.ONE_TINY)


def build_threshold_sequence(T: int) -> ThresholdSequence:
    if T < 1:
        raise ValueError("T must be at least 1")
    fams = []
    for n in range(1, T + 1):
        d = 3**n
        fams.append(tuple(IntervalOpen.of((Fraction(i, d), Fraction(i + 1, d))) for i in range(d)))
    return ThresholdSequence(tuple(fams))


@dataclass(frozen=True)
class MeasureBound:
    bound: Fraction
    samples: tuple[Fraction, ...] = ()
    seed: Optional[int] = None

    @property
    def below_half(self) -> bool:
        return self.bound < Fraction(1, 2)

    def to_json(self) -> dict:
        return {
            "bound": f"{self.bound.numerator}/{self.bound.denominator}",
            "samples": [f"{s.numerator}/{s.denominator}" for s in self.samples],
            "seed": self.seed,
        }


def one_tiny_by_measure(seq: ThresholdSequence, samples: int = 0, seed: int = 0) -> MeasureBound:
    """Bound on the measure of any one-pick-per-family union, plus sampled checks.

    The bound is the sum of the largest member measures, which for the
    threshold families is ``(1 - 3**-T) / 2``.
    """
    bound = sum((max(u.measure for u in fam) for fam in seq.families), Fraction(0))
    rng = random.Random(seed)
    measured = []
    for _ in range(samples):
        pick = [rng.choice(fam) for fam in seq.families]
        value = measure_union(pick)
        if value > bound:
            raise AssertionError(f"sampled union {value} exceeds bound {bound}")
        measured.append(value)
    return MeasureBound(bound, tuple(measured), seed if samples else None)


def max_choice_measure(seq: ThresholdSequence) -> tuple[Fraction, int]:
    """Largest union measure over every choice function, and how many were checked."""
    best = Fraction(0)
    count = 0
    for pick in itertools.product(*seq.families):
        count += 1
        best = max(best, measure_union(pick))
    return best, count


@dataclass
class GreedyTrace:
    selections: list[tuple[IntervalOpen, ...]] = field(default_factory=list)
    cumulative: list[Fraction] = field(default_factory=list)
    bound_met: list[bool] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.bound_met)

    def to_json(self) -> dict:
        return {
            "rounds": [
                {
                    "n": n,
                    "selected": [u.to_json() for u in sel],
                    "cumulative": f"{c.numerator}/{c.denominator}",
                    "target": f"{max(0, n - 1)}/{n}",
                    "met": met,
                }
                for n, (sel, c, met) in enumerate(
                    zip(self.selections, self.cumulative, self.bound_met), start=1
                )
            ],
            "ok": self.ok,
        }


def greedy_defeat(seq: ThresholdSequence, n_target: int, budget: Optional[int] = None) -> GreedyTrace:
    """Round ``n`` picks up to ``budget`` members of family ``n`` by largest gain.

    Ties go to the leftmost member.  After round ``n`` the covered measure is
    compared with ``1 - 1/n``.
    """
    if not 1 <= n_target <= seq.length:
        raise ValueError(f"n_target must lie in 1..{seq.length}")
    covered = IntervalOpen()
    trace = GreedyTrace()
    for n in range(1, n_target + 1):
        fam = sorted(seq.families[n - 1], key=lambda u: u.intervals)
        chosen: list[IntervalOpen] = []
        while budget is None or len(chosen) < budget:
            base = covered.measure
            best, gain = None, Fraction(0)
            for u in fam:
                g = (covered | u).measure - base
                if g > gain:
                    best, gain = u, g
            if best is None:
                break
            chosen.append(best)
            covered = covered | best
        trace.selections.append(tuple(chosen))
        trace.cumulative.append(covered.measure)
        trace.bound_met.append(covered.measure >= 1 - Fraction(1, n))
    return trace


def separation_report(T: int, samples: int = 0, seed: int = 0, budget: Optional[int] = None) -> dict:
    """One-pick unions are bounded below 1/2; finite picks are dense."""
    seq = build_threshold_sequence(T)
    bound = one_tiny_by_measure(seq, samples, seed)
    trace = greedy_defeat(seq, T, budget)
    defeat_round = next((n for n, c in enumerate(trace.cumulative, start=1) if c == 1), None)
    tiny = verify_tiny(seq.as_sequence(), s=None)
    return {
        "T": T,
        "one_tiny": {**bound.to_json(), "below_half": bound.below_half},
        "greedy": trace.to_json(),
        "defeat_round": defeat_round,
        "tiny_verdict": tiny.status.value,
    }
