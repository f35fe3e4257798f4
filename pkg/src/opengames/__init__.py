"""Open-open games, tiny sequences, and the finite instances that exercise them."""

from ._limits import CAP_ENV, DEFAULT_CAP, SearchCapExceeded
from .games import GameKind, Outcome, Player, ProtocolError, TableStrategy, Transcript, cross_play, legal, play
from .sequences import (
    FamilySequence,
    SequenceKind,
    Status,
    sequence_to_strategy,
    verify_b_tiny,
    verify_one_tiny,
    verify_tiny,
    verify_weak_tiny,
    weak_defeats_to_tiny_defeat,
)
from .spaces import DiscretePoints, FinitePoints, IntervalOpen, IntervalSpace, is_dense, load_space

__all__ = [
    "CAP_ENV",
    "DEFAULT_CAP",
    "SearchCapExceeded",
    "GameKind",
    "Outcome",
    "Player",
    "ProtocolError",
    "TableStrategy",
    "Transcript",
    "cross_play",
    "legal",
    "play",
    "FamilySequence",
    "SequenceKind",
    "Status",
    "sequence_to_strategy",
    "verify_b_tiny",
    "verify_one_tiny",
    "verify_tiny",
    "verify_weak_tiny",
    "weak_defeats_to_tiny_defeat",
    "DiscretePoints",
    "FinitePoints",
    "IntervalOpen",
    "IntervalSpace",
    "is_dense",
    "load_space",
]
