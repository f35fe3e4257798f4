"""Turn a strategy for II into candidate tiny / 1-tiny sequences, with audits.

G7: the strategy's answers are unrolled into a tree ``U_tau`` indexed by
finite sequences, each node's children forming an increasing chain.  The
families ``U^n_k`` are intersections across a whole tree level.

G2: the strategy is unrolled lazily, then the counter-strategy ``c`` for
G7^sigma plays the families ``U(m, j)``.  From a line of play the families
``W_n`` are built.  Every selection from them is mapped to a single branch
``f`` of the tree, whose nodes are I's moves in a play against the original
strategy.

All results hold "at scale": tree width, depth, the bound ``M`` on the values
of ``rho`` and the number of rounds are finite truncations.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from . import _limits
from .games import GameKind, Outcome, Transcript, _family_ok, _normalize, play
from .sequences import FamilySequence, SequenceKind, Verification, verify_one_tiny, verify_tiny
from .spaces import OpenSet, Space

__all__ = [
    "ExtractionError",
    "WidthInsufficient",
    "Audit",
    "IndexedTree",
    "grow_tree_G7",
    "check_tree",
    "compute_Unk",
    "TinyExtraction",
    "extract_tiny_G7",
    "transfer_check",
    "StrategyTree",
    "build_U_rho",
    "build_U_family",
    "CSchedule",
    "run_counter_strategy_c",
    "counter_strategy_lines",
    "WEntry",
    "build_W_families",
    "FAssembly",
    "assemble_f",
    "replay_branch",
    "OneTinyExtraction",
    "extract_one_tiny_G2",
]

Node = tuple[int, ...]


class ExtractionError(ValueError):
    def __init__(self, tau: Node, reason: str) -> None:
        super().__init__(f"at node {list(tau)}: {reason}")
        self.tau = tau
        self.reason = reason


class WidthInsufficient(ExtractionError):
    """The family ``U_n`` is not dense at the given width."""

    def __init__(self, n: int, evidence: str) -> None:
        ValueError.__init__(self, f"WIDTH_INSUFFICIENT: family {n} not dense ({evidence})")
        self.tau = ()
        self.n = n
        self.reason = evidence


@dataclass
class Audit:
    checks: Counter = field(default_factory=Counter)
    failures: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks[name] += 1
        if not ok:
            self.failures.append(f"{name}: {detail}" if detail else name)
        return ok

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: Audit) -> None:
        self.checks.update(other.checks)
        self.failures.extend(other.failures)

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": dict(sorted(self.checks.items())), "failures": self.failures, **self.info}


# --- G7 -----------------------------------------------------------------


@dataclass
class IndexedTree:
    """Open sets ``U_tau`` for every ``tau`` of length at most ``depth`` over ``range(width)``."""

    space: Space
    depth: int
    width: int
    nodes: dict[Node, OpenSet]
    _unk: dict = field(default_factory=dict, repr=False)

    def node(self, tau: Sequence[int]) -> OpenSet:
        tau = tuple(tau)
        if tau not in self.nodes:
            raise IndexError(f"node {list(tau)} is outside depth {self.depth}, width {self.width}")
        return self.nodes[tau]

    def level(self, n: int):
        return itertools.product(range(self.width), repeat=n)


def grow_tree_G7(strategy: Callable[[tuple], Any], space: Space, d: int, w: int) -> IndexedTree:
    """Unroll a G7 strategy for II into an increasing-chain tree.

    Child ``n`` of ``tau`` is ``U_tau`` joined with the first ``n + 1`` members
    of the strategy's family at ``tau``; the matching move for I is exactly
    that prefix.
    """
    if d < 0 or w < 1:
        raise ValueError("need depth >= 0 and width >= 1")
    nodes: dict[Node, OpenSet] = {(): space.empty}
    moves: dict[Node, tuple] = {(): ()}
    for depth in range(d):
        for tau in itertools.product(range(w), repeat=depth):
            fam = _normalize(strategy(moves[tau]))
            reason = "no move" if fam is None else _family_ok(space, fam, need_dense=True)
            if reason:
                raise ExtractionError(tau, reason)
            cum = nodes[tau]
            for n in range(w):
                if n < len(fam):
                    cum = space.join(cum, fam[n])
                nodes[tau + (n,)] = cum
                moves[tau + (n,)] = moves[tau] + (fam[: n + 1],)
            if not space.dense(cum):
                raise ExtractionError(tau, f"the first {w} members do not have dense union")
    return IndexedTree(space, d, w, nodes)


def check_tree(tree: IndexedTree) -> Audit:
    """Chains increase, children contain the parent, and each chain is dense."""
    audit = Audit()
    sp = tree.space
    for depth in range(tree.depth):
        for sigma in tree.level(depth):
            kids = [tree.nodes[sigma + (n,)] for n in range(tree.width)]
            for a, b in zip(kids, kids[1:]):
                audit.check("tree_chain", sp.subset(a, b), f"at {list(sigma)}")
            parent = tree.nodes[sigma]
            for n, u in enumerate(kids):
                audit.check("tree_parent", sp.subset(parent, u), f"at {list(sigma) + [n]}")
            audit.check("tree_dense", sp.dense(sp.union(kids)), f"at {list(sigma)}")
    return audit


def compute_Unk(tree: IndexedTree, n: int, k: int) -> OpenSet:
    """``U^1_k = U_k``; ``U^n_k`` intersects ``U_{sigma k}`` over all ``sigma`` of length ``n-1`` with ``U^{n-1}_k``."""
    if not (1 <= n <= tree.depth and 0 <= k < tree.width):
        raise IndexError(f"U^{n}_{k} is outside depth {tree.depth}, width {tree.width}")
    key = (n, k)
    if key not in tree._unk:
        if n == 1:
            value = tree.nodes[(k,)]
        else:
            value = compute_Unk(tree, n - 1, k)
            for sigma in tree.level(n - 1):
                value = tree.space.intersection(value, tree.nodes[sigma + (k,)])
        tree._unk[key] = value
    return tree._unk[key]


@dataclass
class TinyExtraction:
    tree: IndexedTree
    sequence: FamilySequence
    chains: list[list[OpenSet]]
    audit: Audit
    verification: Verification

    def to_json(self) -> dict:
        return {
            "sequence": self.sequence.to_json(),
            "verification": self.verification.to_json(self.sequence),
            "audit": self.audit.to_json(),
        }


def extract_tiny_G7(
    strategy: Callable[[tuple], Any], space: Space, d: int, w: int, s: Optional[int] = None
) -> TinyExtraction:
    """Families ``{U^n_k : k < w}`` for ``n = 1..d`` and their audit.

    Raises :class:`WidthInsufficient` when some family is not dense at width
    ``w``.  The audit records, for each ``n``, the least ``k`` with ``U^n_k``
    dense, and checks ``U^n_{k_n}`` is inside ``U_{k_1..k_n}`` for every
    sequence of indices.
    """
    if d < 1:
        raise ValueError("depth must be at least 1")
    tree = grow_tree_G7(strategy, space, d, w)
    audit = check_tree(tree)
    chains = [[compute_Unk(tree, n, k) for k in range(w)] for n in range(1, d + 1)]
    dense_at = {}
    for n, chain in enumerate(chains, start=1):
        k0 = next((k for k, u in enumerate(chain) if space.dense(u)), None)
        if k0 is None:
            raise WidthInsufficient(n, f"U^{n}_{w - 1} = {space.describe(chain[-1])}")
        dense_at[n] = k0
        for k in range(w - 1):
            audit.check("unk_ascending", space.subset(chain[k], chain[k + 1]), f"n={n}, k={k}")
        if n > 1:
            for k in range(w):
                audit.check("unk_antitone", space.subset(chain[k], chains[n - 2][k]), f"n={n}, k={k}")
    for n in range(1, d + 1):
        for ks in tree.level(n):
            audit.check(
                "unk_inside_branch",
                space.subset(chains[n - 1][ks[-1]], tree.nodes[ks]),
                f"U^{n}_{ks[-1]} vs U_{list(ks)}",
            )
    audit.info["dense_at"] = dense_at
    families = tuple(tuple(u for u in chain if not space.is_empty(u)) for chain in chains)
    seq = FamilySequence(space, families, SequenceKind.TINY)
    return TinyExtraction(tree, seq, chains, audit, verify_tiny(seq, s))


def transfer_check(ex: TinyExtraction, s: int) -> tuple[bool, Optional[Node]]:
    """Check that ``U^1_{k_1} | .. | U^d_{k_d}`` is not dense whenever every ``k_n < s``.

    The union lies inside the node ``U_{k_1..k_d}``, so this holds whenever
    I's first ``s`` picks never beat the strategy.  Returns the first
    failing index tuple.
    """
    space = ex.tree.space
    width = min(s, ex.tree.width)
    for ks in itertools.product(range(width), repeat=len(ex.chains)):
        union = space.union(ex.chains[n][k] for n, k in enumerate(ks))
        if space.dense(union):
            return False, ks
    return True, None


# --- G2 -----------------------------------------------------------------


class StrategyTree:
    """Lazy tree of a G2 strategy: ``U_tau`` is I's pick ``tau[-1]`` from II's answer to ``U_{tau|1}, ..``.

    Families are enumerated cyclically, so any index is valid.
    """

    def __init__(self, strategy: Callable[[tuple], Any], space: Space) -> None:
        self.strategy = strategy
        self.space = space
        self._families: dict[Node, tuple] = {}
        self._nodes: dict[Node, OpenSet] = {(): space.empty}

    def family(self, tau: Sequence[int]) -> tuple:
        tau = tuple(tau)
        if tau not in self._families:
            history = tuple(self.node(tau[:i]) for i in range(1, len(tau) + 1))
            fam = _normalize(self.strategy(history))
            reason = "no move" if fam is None else _family_ok(self.space, fam, need_dense=True)
            if reason:
                raise ExtractionError(tau, reason)
            self._families[tau] = fam
        return self._families[tau]

    def node(self, tau: Sequence[int]) -> OpenSet:
        tau = tuple(tau)
        if tau not in self._nodes:
            fam = self.family(tau[:-1])
            self._nodes[tau] = fam[tau[-1] % len(fam)]
        return self._nodes[tau]


def build_U_rho(tree: Any, m: int, j: int, rho: Sequence[int]) -> OpenSet:
    """Intersection over ``sigma in j^m`` of the union of ``U_{sigma + rho[:i]}``, ``i = 1..j^m``."""
    width = j**m
    rho = tuple(rho)
    if len(rho) != width:
        raise ValueError(f"rho must have length j^m = {width}")
    space = tree.space
    value = None
    for sigma in itertools.product(range(j), repeat=m):
        u = space.union(tree.node(sigma + rho[:i]) for i in range(1, width + 1))
        value = u if value is None else space.intersection(value, u)
    return value


def build_U_family(tree: Any, m: int, j: int, M: int, cap: Optional[int] = None) -> list[tuple[Node, OpenSet]]:
    """``(rho, U_rho(m, j))`` for every ``rho : j^m -> M``, lexicographic in ``rho``."""
    width = j**m
    _limits.enforce(M**width, cap, f"U({m},{j}) family")
    return [(rho, build_U_rho(tree, m, j, rho)) for rho in itertools.product(range(M), repeat=width)]


@dataclass
class CSchedule:
    """Round ``r`` (1-based) of ``c`` plays ``U(m[r-1], j[r-1])``; ``a[r-1]`` bounds I's answer."""

    m: list[int] = field(default_factory=lambda: [1])
    j: list[int] = field(default_factory=lambda: [1])
    a: list[int] = field(default_factory=list)
    families: list[list[tuple[Node, OpenSet]]] = field(default_factory=list)
    selections: list[list[tuple[Node, OpenSet]]] = field(default_factory=list)
    family_dense: list[bool] = field(default_factory=list)
    truncated: bool = False

    @property
    def rounds(self) -> int:
        return len(self.selections)

    def law_holds(self) -> bool:
        return all(
            self.m[r + 1] == self.m[r] + self.j[r] ** self.m[r] and self.j[r + 1] > max(self.j[r], self.a[r])
            for r in range(self.rounds)
        )

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "j": self.j,
            "a": self.a,
            "family_sizes": [len(f) for f in self.families],
            "family_dense": self.family_dense,
            "selections": [[list(rho) for rho, _ in sel] for sel in self.selections],
            "truncated": self.truncated,
        }


def _advance(schedule: CSchedule, fam, chosen) -> None:
    r = schedule.rounds
    a = max((max(rho) for rho, _ in chosen), default=0)
    schedule.families.append(fam)
    schedule.selections.append(list(chosen))
    schedule.a.append(a)
    schedule.m.append(schedule.m[r] + schedule.j[r] ** schedule.m[r])
    schedule.j.append(max(schedule.j[r], a) + 1)


def run_counter_strategy_c(
    tree: Any,
    R: int,
    M: int,
    adversary: Optional[Callable[[int, list], Sequence[int]]] = None,
    cap: Optional[int] = None,
) -> CSchedule:
    """Play ``c`` for ``R`` rounds against ``adversary(round, family) -> positions``.

    The default adversary takes the first member each round.  If a family
    would exceed the cap the schedule stops early and is flagged truncated.
    """
    adversary = adversary or (lambda r, fam: [0])
    schedule = CSchedule()
    space = tree.space
    for r in range(R):
        m, j = schedule.m[r], schedule.j[r]
        try:
            fam = build_U_family(tree, m, j, M, cap)
        except _limits.SearchCapExceeded:
            schedule.truncated = True
            break
        schedule.family_dense.append(space.dense(space.union(u for _, u in fam)))
        _advance(schedule, fam, [fam[p] for p in adversary(r, fam)])
    return schedule


def counter_strategy_lines(tree: Any, R: int, M: int, cap: Optional[int] = None):
    """Every line of ``c`` against single-member answers, depth first."""
    space = tree.space

    def walk(schedule: CSchedule):
        r = schedule.rounds
        if r == R:
            yield schedule
            return
        m, j = schedule.m[r], schedule.j[r]
        try:
            fam = build_U_family(tree, m, j, M, cap)
        except _limits.SearchCapExceeded:
            schedule.truncated = True
            yield schedule
            return
        dense = space.dense(space.union(u for _, u in fam))
        for entry in fam:
            nxt = CSchedule(
                list(schedule.m), list(schedule.j), list(schedule.a),
                list(schedule.families), list(schedule.selections),
                schedule.family_dense + [dense],
            )
            _advance(nxt, fam, [entry])
            yield from walk(nxt)

    yield from walk(CSchedule())


@dataclass(frozen=True)
class WEntry:
    """``W(k_1..k_n; rho_1..rho_n)``: rounds are 1-based and strictly increasing."""

    ks: tuple[int, ...]
    rhos: tuple[Node, ...]
    value: OpenSet


def build_W_families(schedule: CSchedule, space: Space) -> list[list[WEntry]]:
    """``W_n`` for ``n = 1..rounds``; empty intersections are left out."""
    R = schedule.rounds
    out = []
    for n in range(1, R + 1):
        fam = []
        for ks in itertools.combinations(range(R), n):
            for picks in itertools.product(*(schedule.selections[k] for k in ks)):
                value = picks[0][1]
                for _, u in picks[1:]:
                    value = space.intersection(value, u)
                if not space.is_empty(value):
                    fam.append(WEntry(tuple(k + 1 for k in ks), tuple(rho for rho, _ in picks), value))
        out.append(fam)
    return out


@dataclass
class FAssembly:
    f: list[int]
    s: list[int]
    blocks: list[tuple[int, int, int]]  # (round a, start, stop) of each copied rho
    audit: Audit


def assemble_f(selection: Sequence[WEntry], schedule: CSchedule, tree: Any) -> FAssembly:
    """Build the branch ``f`` covering the selected ``W``'s and audit the containments.

    ``s_n`` is the least round of the ``n``-th ``W`` not used before; the
    rounds ``s_n`` in increasing order each contribute their ``rho`` as a
    block starting at ``m_a``, gaps are padded with 0, and the prefix before
    the first block is all 0.
    """
    used: list[int] = []
    owner: dict[int, Node] = {}
    for n, w in enumerate(selection, start=1):
        if len(w.ks) != n or any(x >= y for x, y in zip(w.ks, w.ks[1:])):
            raise ValueError(f"selection {n} must use {n} strictly increasing rounds, got {list(w.ks)}")
        if w.ks[-1] > schedule.rounds:
            raise ValueError(f"selection {n} uses round {w.ks[-1]} beyond the schedule")
        k = min(x for x in w.ks if x not in used)
        used.append(k)
        owner[k] = w.rhos[w.ks.index(k)]
    order = sorted(used)
    f: list[int] = []
    blocks = []
    if order:
        f = [0] * schedule.m[order[0] - 1]
    for idx, a in enumerate(order):
        start, stop = schedule.m[a - 1], schedule.m[a]
        if len(f) != start:
            raise AssertionError("block does not start where the previous one stopped")
        f.extend(owner[a])
        blocks.append((a, start, stop))
        if idx + 1 < len(order):
            f.extend([0] * (schedule.m[order[idx + 1] - 1] - stop))

    audit = Audit()
    space = tree.space
    branch_union = space.union(tree.node(f[:i]) for i in range(1, len(f) + 1))
    for n, (w, a) in enumerate(zip(selection, used), start=1):
        m_a, j_a = schedule.m[a - 1], schedule.j[a - 1]
        rho = owner[a]
        sigma = f[:m_a]
        audit.check("sigma_in_range", all(v < j_a for v in sigma), f"W_{n}: prefix {sigma} not below j={j_a}")
        u_rho = build_U_rho(tree, m_a, j_a, rho)
        audit.check("W_inside_U_rho", space.subset(w.value, u_rho), f"W_{n} round {a}")
        block = space.union(tree.node(f[: m_a + i]) for i in range(1, j_a**m_a + 1))
        audit.check("U_rho_inside_block", space.subset(u_rho, block), f"W_{n} round {a}")
        audit.check("W_inside_branch", space.subset(w.value, branch_union), f"W_{n}")
    return FAssembly(f, used, blocks, audit)


def replay_branch(strategy: Callable[[tuple], Any], space: Space, f: Sequence[int]) -> Transcript:
    """Play G2 where I picks member ``f[r]`` (cyclically) of II's family in round ``r``."""

    def player_one(history: tuple) -> OpenSet:
        fam = history[-1]
        return fam[f[len(history) - 1] % len(fam)]

    return play(space, GameKind.G2, player_one, strategy, max(1, len(f)))


@dataclass
class OneTinyExtraction:
    schedules: list[CSchedule]
    w_families: list[list[list[WEntry]]]
    sequence: Optional[FamilySequence]
    verification: Optional[Verification]
    audit: Audit
    defeats: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict = {
            "lines": len(self.schedules),
            "schedules": [s.to_json() for s in self.schedules[:8]],
            "audit": self.audit.to_json(),
            "defeats": self.defeats[:8],
        }
        if self.sequence is not None:
            out["sequence"] = self.sequence.to_json()
            out["verification"] = self.verification.to_json(self.sequence)
        return out


def extract_one_tiny_G2(
    strategy: Callable[[tuple], Any],
    space: Space,
    R: int = 2,
    M: int = 2,
    adversary: Optional[Callable[[int, list], Sequence[int]]] = None,
    cap: Optional[int] = None,
) -> OneTinyExtraction:
    """Run ``c`` against every single-member line (or the given adversary) and audit each.

    For each line the ``W_n`` are built; for every selection of one ``W`` per
    family the branch ``f`` is assembled and replayed against ``strategy``.
    Whenever a selection has dense union the replay must end in I's win,
    because I's picks contain it.  The first line whose ``W_n`` are all
    dense yields the output sequence.
    """
    tree = StrategyTree(strategy, space)
    if adversary is None:
        schedules = list(counter_strategy_lines(tree, R, M, cap))
    else:
        schedules = [run_counter_strategy_c(tree, R, M, adversary, cap)]
    audit = Audit()
    w_all = []
    sequence = None
    defeats = []
    for line, sched in enumerate(schedules):
        audit.check("schedule_law", sched.law_holds(), f"line {line}: m={sched.m}, j={sched.j}, a={sched.a}")
        if sched.rounds and sched.m[:2] != [1, 2]:
            audit.check("schedule_start", False, f"line {line}: m starts {sched.m[:2]}")
        fams = build_W_families(sched, space)
        w_all.append(fams)
        if not fams or any(not fam for fam in fams):
            continue
        dense = [space.dense(space.union(w.value for w in fam)) for fam in fams]
        if sequence is None and all(dense):
            sequence = FamilySequence(space, tuple(tuple(w.value for w in fam) for fam in fams), SequenceKind.ONE_TINY)
        _limits.enforce(len(list(itertools.product(*fams))), cap, "W selections")
        for selection in itertools.product(*fams):
            assembly = assemble_f(selection, sched, tree)
            audit.merge(assembly.audit)
            union = space.union(w.value for w in selection)
            if space.dense(union):
                replay = replay_branch(strategy, space, assembly.f)
                won = replay.verdict.outcome is Outcome.I_WINS_AT_T
                audit.check("defeat_implies_I_wins", won, f"line {line}, f={assembly.f}")
                defeats.append({"line": line, "f": assembly.f, "replay": replay.verdict.outcome.value})
    audit.info["lines"] = len(schedules)
    audit.info["lines_with_dense_W"] = sum(
        1 for fams in w_all if fams and all(fam and space.dense(space.union(w.value for w in fam)) for fam in fams)
    )
    verification = verify_one_tiny(sequence, cap) if sequence is not None else None
    return OneTinyExtraction(schedules, w_all, sequence, verification, audit, defeats)
