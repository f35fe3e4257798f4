"""Rules and a truncated-play referee for G, G2, G4, G7 and G7^sigma.

A move is either a single open set or a tuple of open sets (a family).  A
strategy is any callable mapping the tuple of the *opponent's* moves so far to
the next move; :class:`TableStrategy` is the file-backed variant.

Infinite games are cut at ``T`` rounds.  ``UNDETERMINED_II_LEADING`` only says
the accumulated set is not yet dense; it never claims a win for II.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Optional, Sequence

from .spaces import OpenSet, Space

__all__ = [
    "GameKind",
    "Player",
    "Outcome",
    "Verdict",
    "Transcript",
    "TableStrategy",
    "ProtocolError",
    "legal",
    "play",
    "cross_play",
    "exhaustive_adversary",
    "CrossPlayReport",
    "mover_at",
    "move_shape",
]

Move = Any  # an open set, or a tuple of open sets
Strategy = Callable[[tuple], Optional[Move]]


class GameKind(str, Enum):
    G = "G"
    G2 = "G2"
    G4 = "G4"
    G7 = "G7"
    G7_SIGMA = "G7_SIGMA"


class Player(str, Enum):
    I = "I"  # noqa: E741
    II = "II"

    @property
    def other(self) -> Player:
        return Player.II if self is Player.I else Player.I


class Outcome(str, Enum):
    I_WINS_AT_T = "I_WINS_AT_T"
    UNDETERMINED_II_LEADING = "UNDETERMINED_II_LEADING"
    ILLEGAL = "ILLEGAL"


class ProtocolError(ValueError):
    """The history handed to :func:`legal` is not a legal play prefix."""


FIRST_MOVER = {
    GameKind.G: Player.I,
    GameKind.G2: Player.II,
    GameKind.G4: Player.I,
    GameKind.G7: Player.II,
    GameKind.G7_SIGMA: Player.II,
}

# "open" for a single open set, "family" for a tuple of open sets
SHAPES = {
    (GameKind.G, Player.I): "open",
    (GameKind.G, Player.II): "open",
    (GameKind.G2, Player.II): "family",
    (GameKind.G2, Player.I): "open",
    (GameKind.G4, Player.I): "family",
    (GameKind.G4, Player.II): "family",
    (GameKind.G7, Player.II): "family",
    (GameKind.G7, Player.I): "family",
    (GameKind.G7_SIGMA, Player.II): "family",
    (GameKind.G7_SIGMA, Player.I): "family",
}


def mover_at(kind: GameKind, index: int) -> Player:
    first = FIRST_MOVER[kind]
    return first if index % 2 == 0 else first.other


def move_shape(kind: GameKind, player: Player) -> str:
    return SHAPES[(kind, player)]


def _normalize(move: Any) -> Any:
    if isinstance(move, list):
        return tuple(move)
    return move


def _is_family(move: Any) -> bool:
    return isinstance(move, tuple)


def _open_nonempty(space: Space, u: Any) -> Optional[str]:
    if _is_family(u) or not space.is_open(u):
        return "not an open set"
    if space.is_empty(u):
        return "empty open set"
    return None


def _family_ok(space: Space, fam: Any, need_dense: bool) -> Optional[str]:
    if not _is_family(fam):
        return "expected a family of open sets"
    if not fam:
        return "empty family"
    for u in fam:
        reason = _open_nonempty(space, u)
        if reason:
            return f"family member: {reason}"
    if need_dense and not space.dense(space.union(fam)):
        return "family union is not dense"
    return None


def _violation(space: Space, kind: GameKind, history: Sequence[Move], move: Move) -> Optional[str]:
    """Reason the move is illegal at this point, or None."""
    mover = mover_at(kind, len(history))
    prev = history[-1] if history else None
    if kind is GameKind.G:
        reason = _open_nonempty(space, move)
        if reason or mover is Player.I:
            return reason
        if not space.subset(move, prev):
            return "II's set is not inside I's set"
        return None
    if kind is GameKind.G2:
        if mover is Player.II:
            return _family_ok(space, move, need_dense=True)
        if _is_family(move) or move not in prev:
            return "pick is not a member of II's family"
        return None
    if kind in (GameKind.G7, GameKind.G7_SIGMA):
        if mover is Player.II:
            return _family_ok(space, move, need_dense=True)
        if not _is_family(move):
            return "expected a finite subfamily"
        if any(u not in prev for u in move):
            return "selection is not a subfamily of II's family"
        return None
    # G4
    if mover is Player.I:
        return _family_ok(space, move, need_dense=False)
    reason = _family_ok(space, move, need_dense=False)
    if reason:
        return reason
    if len(move) != len(prev):
        return "II's family must have the same size as I's"
    for v in prev:
        if not any(space.subset(w, v) for w in move):
            return "some member of I's family contains no member of II's"
    return None


def legal(space: Space, kind: GameKind, history: Sequence[Move], move: Move) -> bool:
    """Whether ``move`` is legal after ``history`` (both players' moves, in order).

    Raises :class:`ProtocolError` if ``history`` itself is not a legal prefix.
    """
    kind = GameKind(kind)
    history = [_normalize(h) for h in history]
    for i, h in enumerate(history):
        reason = _violation(space, kind, history[:i], h)
        if reason:
            raise ProtocolError(f"history move {i} by {mover_at(kind, i).value}: {reason}")
    return _violation(space, kind, history, _normalize(move)) is None


def _collected(space: Space, kind: GameKind, move: Move) -> OpenSet:
    """What the round-closing move adds to the set I is trying to make dense."""
    if kind in (GameKind.G, GameKind.G2):
        return move
    return space.union(move)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    round: Optional[int] = None
    player: Optional[Player] = None
    reason: Optional[str] = None
    tails: Optional[tuple[bool, ...]] = None

    def to_json(self) -> dict:
        out: dict = {"outcome": self.outcome.value}
        if self.round is not None:
            out["round"] = self.round
        if self.player is not None:
            out["player"] = self.player.value
        if self.reason is not None:
            out["reason"] = self.reason
        if self.tails is not None:
            out["tail_dense"] = list(self.tails)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Verdict:
        return cls(
            Outcome(obj["outcome"]),
            obj.get("round"),
            Player(obj["player"]) if "player" in obj else None,
            obj.get("reason"),
            tuple(obj["tail_dense"]) if "tail_dense" in obj else None,
        )


@dataclass
class Transcript:
    kind: GameKind
    T: int
    rounds: list[tuple[Player, Move]] = field(default_factory=list)
    verdict: Optional[Verdict] = None

    def to_json(self, space: Space) -> dict:
        return {
            "kind": self.kind.value,
            "T": self.T,
            "rounds": [
                {"mover": p.value, "move": encode_move(space, self.kind, p, m)} for p, m in self.rounds
            ],
            "verdict": self.verdict.to_json() if self.verdict else None,
        }

    @classmethod
    def from_json(cls, space: Space, obj: dict) -> Transcript:
        kind = GameKind(obj["kind"])
        rounds = []
        for r in obj["rounds"]:
            p = Player(r["mover"])
            rounds.append((p, decode_move(space, kind, p, r["move"])))
        verdict = Verdict.from_json(obj["verdict"]) if obj.get("verdict") else None
        return cls(kind, int(obj["T"]), rounds, verdict)


def encode_move(space: Space, kind: GameKind, player: Player, move: Move) -> Any:
    if move_shape(kind, player) == "family":
        return [space.encode(u) for u in move]
    return space.encode(move)


def decode_move(space: Space, kind: GameKind, player: Player, obj: Any) -> Move:
    if move_shape(kind, player) == "family":
        if not isinstance(obj, list):
            raise TypeError(f"expected a list of open sets, got {obj!r}")
        return tuple(space.decode(u) for u in obj)
    return space.decode(obj)


def _history_key(space: Space, moves: Iterable[Move]) -> str:
    def canon(m: Move) -> Any:
        if _is_family(m):
            return sorted((space.encode(u) for u in m), key=json.dumps)
        return space.encode(m)

    return json.dumps([canon(m) for m in moves], sort_keys=True)


class TableStrategy:
    """History-keyed lookup strategy with an optional default move.

    Keys are canonical serializations of the opponent's moves so far (points
    sorted, family members sorted).  An unknown history with no default
    yields ``None``, which the referee records as illegal.
    """

    def __init__(
        self,
        space: Space,
        kind: GameKind,
        player: Player,
        table: Optional[dict[str, Move]] = None,
        default: Optional[Move] = None,
    ) -> None:
        self.space = space
        self.kind = GameKind(kind)
        self.player = Player(player)
        self.table = dict(table or {})
        self.default = _normalize(default)

    def add(self, history: Sequence[Move], move: Move) -> None:
        self.table[_history_key(self.space, history)] = _normalize(move)

    def __call__(self, history: tuple) -> Optional[Move]:
        return self.table.get(_history_key(self.space, history), self.default)

    @classmethod
    def from_json(cls, space: Space, obj: dict) -> TableStrategy:
        kind = GameKind(obj["kind"])
        player = Player(obj.get("player", "II"))
        opp = player.other
        strat = cls(space, kind, player)
        if obj.get("default") is not None:
            strat.default = decode_move(space, kind, player, obj["default"])
        for row in obj.get("table", []):
            hist = [decode_move(space, kind, opp, h) for h in row["history"]]
            strat.add(hist, decode_move(space, kind, player, row["move"]))
        return strat

    def to_json(self) -> dict:
        rows = []
        for key, move in sorted(self.table.items()):
            rows.append(
                {"history": json.loads(key), "move": encode_move(self.space, self.kind, self.player, move)}
            )
        out: dict = {"kind": self.kind.value, "player": self.player.value, "table": rows}
        out["default"] = (
            None
            if self.default is None
            else encode_move(self.space, self.kind, self.player, self.default)
        )
        return out


def _tails(space: Space, per_round: Sequence[OpenSet]) -> tuple[bool, ...]:
    tails = []
    acc = space.empty
    for u in reversed(per_round):
        acc = space.join(acc, u)
        tails.append(space.dense(acc))
    return tuple(reversed(tails))


def _final_verdict(space: Space, kind: GameKind, per_round: Sequence[OpenSet]) -> Verdict:
    if kind is GameKind.G7_SIGMA:
        tails = _tails(space, per_round)
        if tails and all(tails):
            return Verdict(Outcome.I_WINS_AT_T, tails=tails)
        return Verdict(Outcome.UNDETERMINED_II_LEADING, tails=tails)
    return Verdict(Outcome.UNDETERMINED_II_LEADING)


def play(space: Space, kind: GameKind, strat_I: Strategy, strat_II: Strategy, T: int) -> Transcript:
    """Run ``T`` rounds, stopping early on an illegal move or on I's win.

    For G7^sigma the whole ``T`` rounds are always played and the verdict
    carries the density of every tail union; it reads ``I_WINS_AT_T`` only when
    all tails are dense.
    """
    kind = GameKind(kind)
    if T < 1:
        raise ValueError("T must be at least 1")
    strategies = {Player.I: strat_I, Player.II: strat_II}
    transcript = Transcript(kind, T)
    history: list[Move] = []
    per_round: list[OpenSet] = []
    acc = space.empty
    for r in range(T):
        for _ in range(2):
            mover = mover_at(kind, len(history))
            opp = tuple(m for i, m in enumerate(history) if mover_at(kind, i) is not mover)
            move = _normalize(strategies[mover](opp))
            reason = "no move" if move is None else _violation(space, kind, history, move)
            if reason:
                transcript.verdict = Verdict(Outcome.ILLEGAL, r, mover, reason)
                return transcript
            history.append(move)
            transcript.rounds.append((mover, move))
        gained = _collected(space, kind, history[-1])
        per_round.append(gained)
        acc = space.join(acc, gained)
        if kind is not GameKind.G7_SIGMA and space.dense(acc):
            transcript.verdict = Verdict(Outcome.I_WINS_AT_T, r)
            return transcript
    transcript.verdict = _final_verdict(space, kind, per_round)
    return transcript


def _nonempty_opens(space: Space) -> list[OpenSet]:
    return [u for u in space.open_sets() if not space.is_empty(u)]


def exhaustive_adversary(max_size: Optional[int] = None) -> Callable[[Space, GameKind, tuple], list]:
    """All legal moves for whoever is to move, in a fixed order.

    ``max_size`` bounds the size of families the adversary builds or selects
    (G7 selections, G4 families, II's families).  Families built from scratch
    need a finite space.
    """

    def options(space: Space, kind: GameKind, history: tuple) -> list:
        mover = mover_at(kind, len(history))
        prev = history[-1] if history else None
        if kind is GameKind.G:
            if mover is Player.I:
                return _nonempty_opens(space)
            return [v for v in _nonempty_opens(space) if space.subset(v, prev)]
        if kind is GameKind.G2 and mover is Player.I:
            return list(dict.fromkeys(prev))
        if kind in (GameKind.G7, GameKind.G7_SIGMA) and mover is Player.I:
            members = list(dict.fromkeys(prev))
            top = len(members) if max_size is None else min(max_size, len(members))
            return [tuple(c) for size in range(top + 1) for c in itertools.combinations(members, size)]
        opens = _nonempty_opens(space)
        top = len(opens) if max_size is None else min(max_size, len(opens))
        if kind is GameKind.G4 and mover is Player.I:
            return [tuple(c) for size in range(1, top + 1) for c in itertools.combinations(opens, size)]
        if kind is GameKind.G4:
            return [
                tuple(c)
                for c in itertools.combinations_with_replacement(opens, len(prev))
                if _violation(space, kind, history, tuple(c)) is None
            ]
        # II's dense families in G2/G7/G7_SIGMA
        return [
            tuple(c)
            for size in range(1, top + 1)
            for c in itertools.combinations(opens, size)
            if space.dense(space.union(c))
        ]

    return options


@dataclass
class CrossPlayReport:
    kind: GameKind
    role: Player
    T: int
    counts: Counter = field(default_factory=Counter)
    lines: list[tuple[tuple, Verdict]] = field(default_factory=list)
    complete: bool = True

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def survives(self) -> bool:
        """II: no line reaches I's win.  I: every line does."""
        if not self.complete:
            return False
        wins = self.counts[Outcome.I_WINS_AT_T]
        if self.role is Player.II:
            return wins == 0
        return wins == self.total

    def winning_lines(self) -> list[tuple]:
        return [adv for adv, v in self.lines if v.outcome is Outcome.I_WINS_AT_T]

    def surviving_lines(self) -> list[tuple]:
        return [adv for adv, v in self.lines if v.outcome is not Outcome.I_WINS_AT_T]

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "role": self.role.value,
            "T": self.T,
            "counts": {k.value: v for k, v in sorted(self.counts.items())},
            "complete": self.complete,
            "survives": self.survives,
        }


def cross_play(
    space: Space,
    kind: GameKind,
    strategy: Strategy,
    adversary: Callable[[Space, GameKind, tuple], Iterable[Move]],
    T: int,
    budget: int = 10**6,
    role: Player = Player.II,
) -> CrossPlayReport:
    """Play ``strategy`` (as ``role``) against every line the adversary yields.

    Lines are explored depth first in the adversary's order.  After ``budget``
    finished lines the search stops and the report is flagged incomplete.
    """
    kind = GameKind(kind)
    role = Player(role)
    report = CrossPlayReport(kind, role, T)
    if T <= 0:
        return report

    def finish(adv: tuple, verdict: Verdict) -> bool:
        report.counts[verdict.outcome] += 1
        report.lines.append((adv, verdict))
        if report.total >= budget:
            report.complete = False
            return False
        return True

    def walk(history: tuple, adv: tuple, per_round: tuple, acc: OpenSet) -> bool:
        index = len(history)
        r = index // 2
        if r == T:
            return finish(adv, _final_verdict(space, kind, per_round))
        mover = mover_at(kind, index)
        if mover is role:
            opp = tuple(m for i, m in enumerate(history) if mover_at(kind, i) is not mover)
            move = _normalize(strategy(opp))
            reason = "no move" if move is None else _violation(space, kind, history, move)
            if reason:
                return finish(adv, Verdict(Outcome.ILLEGAL, r, mover, reason))
            candidates = [(move, adv)]
        else:
            candidates = []
            for move in adversary(space, kind, history):
                move = _normalize(move)
                if _violation(space, kind, history, move) is not None:
                    raise ValueError(f"adversary proposed an illegal move at round {r}")
                candidates.append((move, adv + (move,)))
        for move, line in candidates:
            nxt = history + (move,)
            if index % 2 == 1:
                gained = _collected(space, kind, move)
                new_acc = space.join(acc, gained)
                if kind is not GameKind.G7_SIGMA and space.dense(new_acc):
                    if not finish(line, Verdict(Outcome.I_WINS_AT_T, r)):
                        return False
                    continue
                if not walk(nxt, line, per_round + (gained,), new_acc):
                    return False
            elif not walk(nxt, line, per_round, acc):
                return False
        return True

    walk((), (), (), space.empty)
    return report
