"""Command-line entry point.

File formats
------------
space      {"kind": "finite", "n": 3, "basis": [[0], [1, 2]]}
           {"kind": "discrete", "n": 4} or {"kind": "interval"}
open set   finite: list of points, e.g. [0, 2]; interval: [["0", "1/3"]]
sequence   {"space": <space>, "kind": "one-tiny", "families": [[<open>, ...], ...]}
strategy   {"kind": "G2", "player": "II", "default": <move>,
            "table": [{"history": [<opponent move>, ...], "move": <move>}]}
           or {"kind": "G2", "sequence": <sequence>} to play a sequence's families
family     {"m": 2, "r": 3, "funcs": [[0, 1], [2, 2]]}

Exit codes: 0 success (or HOLDS_AT_SCALE), 1 DEFEATED or a failed check,
2 error, reported as a JSON object on stdout.  The environment variable
OMEGA_GAMES_CAP bounds every exhaustive enumeration.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Optional, TextIO

from . import _limits
from .cardinal import (
    ABOVE,
    DIF,
    FamilyProperty,
    FunctionFamily,
    dif_to_one_tiny,
    dominating_to_tiny,
    has_property,
    min_family_size,
    often_above,
    one_tiny_to_dif,
    unbounded_to_b_tiny,
)
from .density_example import separation_report
from .extraction import extract_one_tiny_G2, extract_tiny_G7
from .games import (
    GameKind,
    Player,
    TableStrategy,
    _violation,
    decode_move,
    encode_move,
    mover_at,
    move_shape,
    play,
)
from .ku_product import build_canonical_tree, ku_report, refine_sequence
from .sequences import (
    FamilySequence,
    SequenceKind,
    Status,
    sequence_to_strategy,
    verify_b_tiny,
    verify_one_tiny,
    verify_tiny,
    verify_weak_tiny,
)
from .spaces import Space, load_space

GAME_NAMES = {"g": GameKind.G, "g2": GameKind.G2, "g4": GameKind.G4, "g7": GameKind.G7, "g7-sigma": GameKind.G7_SIGMA}
SEQUENCE_FOR_GAME = {GameKind.G2: SequenceKind.ONE_TINY, GameKind.G7: SequenceKind.TINY, GameKind.G7_SIGMA: SequenceKind.WEAK_TINY}


class CliError(Exception):
    pass


def _read_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _game(name: str) -> GameKind:
    key = name.lower().replace("_", "-")
    if key in GAME_NAMES:
        return GAME_NAMES[key]
    return GameKind(name)


def _space_for(args_space: Optional[str], obj: dict) -> Space:
    if args_space:
        return load_space(_read_json(args_space))
    if "space" in obj:
        return load_space(obj["space"])
    if isinstance(obj.get("sequence"), dict) and "space" in obj["sequence"]:
        return load_space(obj["sequence"]["space"])
    raise CliError("no space given: pass --space or embed one in the file")


def _load_strategy(space: Space, obj: dict, kind: Optional[GameKind] = None) -> Callable:
    kind = kind or GameKind(obj["kind"])
    if "sequence" in obj:
        seq = FamilySequence.from_json(obj["sequence"], space)
        return sequence_to_strategy(seq.with_kind(SEQUENCE_FOR_GAME.get(kind, seq.kind_claimed)), kind)
    strat = TableStrategy.from_json(space, obj)
    if strat.kind is not kind:
        raise CliError(f"strategy is for {strat.kind.value}, game is {kind.value}")
    return strat


def _dump(obj: Any, out: TextIO) -> None:
    json.dump(obj, out, indent=2)
    out.write("\n")


# --- interactive play ---------------------------------------------------


def _human(space: Space, kind: GameKind, me: Player, inp: TextIO, err: TextIO) -> Callable:
    """A strategy that asks for each move and re-prompts until it is legal."""
    mine: list = []
    shape = "a list of open sets" if move_shape(kind, me) == "family" else "one open set"

    def history(theirs: tuple) -> list:
        out, a, b = [], iter(mine), iter(theirs)
        for i in range(len(mine) + len(theirs)):
            out.append(next(a) if mover_at(kind, i) is me else next(b))
        return out

    def strategy(theirs: tuple):
        hist = history(theirs)
        if theirs:
            err.write(f"opponent played: {json.dumps(encode_move(space, kind, me.other, theirs[-1]))}\n")
        while True:
            err.write(f"round {len(mine) + 1}, your move as {me.value} ({shape}, JSON): ")
            err.flush()
            line = inp.readline()
            if not line:
                raise CliError("input ended before the game did")
            try:
                move = decode_move(space, kind, me, json.loads(line))
            except (ValueError, TypeError) as exc:
                err.write(f"could not read that: {exc}\n")
                continue
            reason = _violation(space, kind, hist, move)
            if reason:
                err.write(f"illegal move: {reason}\n")
                continue
            mine.append(move)
            return move

    return strategy


# --- subcommands --------------------------------------------------------


def cmd_play(args, out: TextIO, inp: TextIO, err: TextIO) -> int:
    kind = _game(args.game)
    obj = _read_json(args.strategy_ii)
    space = _space_for(args.space, obj)
    strat_II = _load_strategy(space, obj, kind)
    if args.interactive_i:
        strat_I = _human(space, kind, Player.I, inp, err)
    elif args.strategy_i:
        strat_I = TableStrategy.from_json(space, {**_read_json(args.strategy_i), "player": "I"})
    else:
        raise CliError("player I needs --strategy-i or --interactive-i")
    transcript = play(space, kind, strat_I, strat_II, args.rounds)
    _dump(transcript.to_json(space), out)
    return 0


VERIFIERS = {
    "one-tiny": lambda seq, a, cap: verify_one_tiny(seq, cap),
    "tiny": lambda seq, a, cap: verify_tiny(seq, a.s, cap),
    "weak": lambda seq, a, cap: verify_weak_tiny(seq, a.s, cap),
    "b-tiny": lambda seq, a, cap: verify_b_tiny(seq, a.s, a.t, cap),
}


def cmd_verify(args, out: TextIO, *_) -> int:
    seq = FamilySequence.from_json(_read_json(args.sequence))
    result = VERIFIERS[args.kind](seq, args, _limits.default_cap())
    _dump({"kind": args.kind, **result.to_json(seq)}, out)
    return 0 if result.status is Status.HOLDS_AT_SCALE else 1


def cmd_extract(args, out: TextIO, *_) -> int:
    kind = _game(args.game)
    if kind not in (GameKind.G7, GameKind.G2):
        raise CliError("extraction is defined for g7 and g2")
    obj = _read_json(args.strategy)
    space = _space_for(args.space, obj)
    strategy = _load_strategy(space, obj, kind)
    cap = _limits.default_cap()
    if kind is GameKind.G7:
        result = extract_tiny_G7(strategy, space, args.depth, args.width, args.s)
    else:
        result = extract_one_tiny_G2(strategy, space, args.rounds, args.index_bound, cap=cap)
    _dump(result.to_json(), out)
    return 0 if result.audit.ok else 1


def cmd_transform(args, out: TextIO, *_) -> int:
    cap = _limits.default_cap()
    if args.source == "one-tiny":
        if not args.sequence:
            raise CliError("--from one-tiny needs --sequence")
        seq = FamilySequence.from_json(_read_json(args.sequence))
        F = one_tiny_to_dif(seq, refine=args.refine)
        holds = verify_one_tiny(seq, cap).holds
        prop = has_property(F, DIF, cap)[0]
        _dump({"family": F.to_json(), "one_tiny_holds": holds, "dif": prop, "agree": holds == prop}, out)
        return 0 if holds == prop else 1
    if not args.family:
        raise CliError(f"--from {args.source} needs --family")
    F = FunctionFamily.from_json(_read_json(args.family))
    if args.source == "dif":
        seq, prop = dif_to_one_tiny(F), DIF
        result = verify_one_tiny(seq, cap)
    elif args.source == "dominating":
        seq, prop = dominating_to_tiny(F), ABOVE
        result = verify_tiny(seq, None, cap)
    else:
        t = args.t if args.t is not None else max(1, -(-F.m // 2))
        seq, prop = unbounded_to_b_tiny(F), often_above(t)
        result = verify_b_tiny(seq, None, t, cap)
    has = has_property(F, prop, cap)[0]
    _dump(
        {
            "sequence": seq.to_json(),
            "property": str(prop),
            "property_holds": has,
            "verification": result.to_json(seq),
            "agree": has == result.holds,
        },
        out,
    )
    return 0 if has == result.holds else 1


def cmd_ku(args, out: TextIO, *_) -> int:
    seq = FamilySequence.from_json(_read_json(args.y_sequence))
    tree = build_canonical_tree(args.depth, args.branching, _limits.default_cap())
    report = ku_report(tree, refine_sequence(seq, args.branching, args.depth))
    _dump(report, out)
    return 0 if report["E_dense"] and report["sections_not_dense"] else 1


def cmd_density(args, out: TextIO, *_) -> int:
    _dump(separation_report(args.T, args.samples, args.seed, args.budget), out)
    return 0


def cmd_min_size(args, out: TextIO, *_) -> int:
    size = min_family_size(args.m, args.r, FamilyProperty.parse(args.property), _limits.default_cap())
    out.write(("none" if size is None else str(size)) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opengames",
        description="Open-open games and tiny sequences at finite scale.",
        epilog=__doc__.split("File formats", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="referee one game and print the transcript")
    p.add_argument("--space", help="space JSON (optional if the strategy embeds one)")
    p.add_argument("--game", required=True, help="g, g2, g4, g7 or g7-sigma")
    p.add_argument("--strategy-ii", required=True, help="strategy file for player II")
    p.add_argument("--strategy-i", help="strategy file for player I")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--interactive-i", action="store_true", help="play I from the terminal")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("verify", help="check a sequence exhaustively")
    p.add_argument("--sequence", required=True)
    p.add_argument("--kind", required=True, choices=sorted(VERIFIERS))
    p.add_argument("--s", type=int, help="largest subfamily size (default: any)")
    p.add_argument("--t", type=int, help="index threshold for b-tiny (default: ceil(m/2))")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extract", help="extract a sequence from a strategy for II")
    p.add_argument("--game", required=True, choices=["g7", "g2"])
    p.add_argument("--strategy", required=True)
    p.add_argument("--space")
    p.add_argument("--depth", type=int, default=2, help="tree depth (g7)")
    p.add_argument("--width", type=int, default=2, help="tree width (g7)")
    p.add_argument("--s", type=int, help="subfamily size for the tiny check (g7)")
    p.add_argument("--rounds", type=int, default=2, help="rounds of the counter-strategy (g2)")
    p.add_argument("--index-bound", type=int, default=2, help="values of rho are below this (g2)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("transform", help="map between function families and sequences")
    p.add_argument("--from", dest="source", required=True, choices=["dif", "dominating", "unbounded", "one-tiny"])
    p.add_argument("--family")
    p.add_argument("--sequence")
    p.add_argument("--t", type=int)
    p.add_argument("--refine", action="store_true", help="disjointify overlapping families first")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("ku", help="product set with dense union and non-dense sections")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--branching", type=int, required=True)
    p.add_argument("--y-sequence", required=True)
    p.set_defaults(func=cmd_ku)

    p = sub.add_parser("density-demo", help="measure example separating G from G7")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--samples", type=int, default=0, help="random choice functions to measure")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help="members the greedy picks per family")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("min-size", help="least size of a family with a property")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--property", required=True, help="dif, above or often:T")
    p.set_defaults(func=cmd_min_size)
    return parser


def main(argv: Optional[list[str]] = None, out: TextIO = None, inp: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    inp = inp or sys.stdin
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, inp, err)
    except (CliError, ValueError, TypeError, KeyError, OSError, _limits.SearchCapExceeded) as exc:
        _dump({"error": type(exc).__name__, "message": str(exc).strip("'\"")}, out)
        return 2


if __name__ == "__main__":
    sys.exit(main())
