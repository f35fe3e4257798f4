import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opengames.cardinal import FunctionFamily, dif_to_one_tiny, dominating_to_tiny, unbounded_to_b_tiny
from opengames.density_example import build_threshold_sequence
from opengames.games import GameKind, Outcome, cross_play, exhaustive_adversary
from opengames.sequences import (
    DefeatWitness,
    FamilySequence,
    SequenceKind,
    Status,
    sequence_to_strategy,
    tail_tiny_defeats,
    verify_b_tiny,
    verify_one_tiny,
    verify_tiny,
    verify_weak_tiny,
    weak_defeats_to_tiny_defeat,
    witness_union,
)
from opengames.spaces import DiscretePoints, FinitePoints, mask

D2 = DiscretePoints(2)


def seq_of(n, *families, kind=SequenceKind.TINY):
    return FamilySequence(DiscretePoints(n), tuple(tuple(mask(u) for u in fam) for fam in families), kind)


def crossing():
    """Two partitions of four points into pairs: any pair from each misses a point."""
    return seq_of(4, [[0, 1], [2, 3]], [[0, 2], [1, 3]])


def test_one_tiny_defeated_on_two_points():
    seq = seq_of(2, [[0], [1]], [[0], [1]])
    result = verify_one_tiny(seq)
    assert result.status is Status.DEFEATED
    assert result.witness.choices == ((0,), (1,))


def test_non_dense_family_is_rejected():
    with pytest.raises(ValueError):
        seq_of(3, [[0], [1]])


def test_members_must_be_open():
    sp = FinitePoints.from_lists(3, [[0, 1], [2]])
    with pytest.raises(TypeError):
        FamilySequence(sp, ((mask([0]), mask([1, 2])),))


def test_transform_of_two_constants_holds():
    F = FunctionFamily(1, 2, ((0,), (1,)))
    assert verify_one_tiny(dif_to_one_tiny(F)).holds


def test_family_within_size_bound_defeats_tiny():
    seq = crossing()
    assert verify_tiny(seq, 2).status is Status.DEFEATED
    assert verify_tiny(seq, 1).holds


def test_threshold_sequence_is_not_tiny():
    seq = build_threshold_sequence(2).as_sequence()
    assert verify_tiny(seq, None).status is Status.DEFEATED


def test_chain_sequences_defeated_once_any_member_is_allowed():
    # the top chain member is the whole space, so s >= 1 always defeats
    F = FunctionFamily(2, 3, ((2, 2), (1, 0), (0, 1), (2, 0), (0, 2)))
    seq = dominating_to_tiny(F)
    assert seq.space == DiscretePoints(5)
    assert verify_tiny(seq, 1).status is Status.DEFEATED
    assert verify_tiny(seq, 0).holds


def test_weak_tiny_single_family_matches_tiny():
    seq = seq_of(3, [[0], [1, 2]])
    for s in (None, 1):
        assert verify_weak_tiny(seq, s).status == verify_tiny(seq, s).status


def test_weak_defeated_when_last_family_is_a_partition():
    seq = seq_of(3, [[0, 1], [2]], [[0], [1], [2]])
    result = verify_weak_tiny(seq, None)
    assert result.status is Status.DEFEATED
    sp = seq.space
    for k in range(len(seq)):
        assert sp.dense(witness_union(seq, result.witness, range(k, len(seq))))


def test_weak_holds_when_tails_fail():
    seq = crossing()
    assert verify_weak_tiny(seq, 1).holds
    assert verify_weak_tiny(seq.tail(0), None).status is Status.DEFEATED


def test_b_tiny_full_subsequence_matches_tiny():
    seq = seq_of(4, [[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]])
    for s in (1, 2):
        assert verify_b_tiny(seq, s, t=3).status == verify_tiny(seq, s).status


def test_b_tiny_single_index_holds_with_non_dense_members():
    seq = seq_of(4, [[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]])
    assert verify_b_tiny(seq, 1, t=1).holds
    assert verify_b_tiny(seq, 1, t=2).holds
    assert verify_b_tiny(seq, 2, t=2).status is Status.DEFEATED


def test_b_tiny_threshold_and_default():
    seq = crossing()
    with pytest.raises(ValueError):
        verify_b_tiny(seq, 1, t=3)
    defeat = verify_b_tiny(seq, None)
    assert defeat.witness.threshold == 1


def test_unbounded_chain_sequence_defeated_with_full_selections():
    F = FunctionFamily(2, 2, ((1, 0), (0, 1)))
    assert verify_b_tiny(unbounded_to_b_tiny(F), None, t=1).status is Status.DEFEATED


def test_combiner_single_tail():
    w = DefeatWitness(((0, 1),))
    assert weak_defeats_to_tiny_defeat([w]).choices == ((0, 1),)


def test_combiner_two_singleton_tails():
    seq = seq_of(2, [[0], [1]], [[0, 1]])
    witnesses = tail_tiny_defeats(seq, 1)
    combined = weak_defeats_to_tiny_defeat(witnesses)
    assert len(combined.choices[1]) <= 2
    for k in range(2):
        assert seq.space.dense(witness_union(seq, combined, range(k, 2)))


def test_combiner_partition_instance():
    seq = seq_of(3, [[0], [1], [2]], [[0, 1], [2]], [[0], [1, 2]])
    combined = weak_defeats_to_tiny_defeat(tail_tiny_defeats(seq, None))
    for k in range(3):
        assert seq.space.dense(witness_union(seq, combined, range(k, 3)))


def test_combiner_needs_every_tail():
    with pytest.raises(ValueError):
        weak_defeats_to_tiny_defeat([DefeatWitness(((0,), (0,))), None])
    with pytest.raises(ValueError):
        weak_defeats_to_tiny_defeat([DefeatWitness(((0,),)), DefeatWitness(((0,),))])


def test_one_tiny_strategy_survives_g2():
    F = FunctionFamily(2, 2, ((0, 0), (1, 1), (0, 1), (1, 0)))
    seq = dif_to_one_tiny(F)
    assert seq.space.n == 4 and verify_one_tiny(seq).holds
    strategy = sequence_to_strategy(seq, GameKind.G2)
    report = cross_play(seq.space, GameKind.G2, strategy, exhaustive_adversary(), len(seq))
    assert report.complete and report.survives and report.total == 4


def test_tiny_strategy_survives_small_selections():
    seq = crossing()
    assert verify_tiny(seq, 1).holds
    strategy = sequence_to_strategy(seq, GameKind.G7)
    report = cross_play(seq.space, GameKind.G7, strategy, exhaustive_adversary(max_size=1), len(seq))
    assert report.complete and report.survives
    report = cross_play(seq.space, GameKind.G7, strategy, exhaustive_adversary(max_size=2), len(seq))
    assert report.counts[Outcome.I_WINS_AT_T] > 0


def test_strategy_kind_checks():
    with pytest.raises(ValueError):
        sequence_to_strategy(FamilySequence(D2, (), SequenceKind.TINY), GameKind.G7)
    with pytest.raises(ValueError):
        sequence_to_strategy(crossing(), GameKind.G2)
    with pytest.raises(ValueError):
        sequence_to_strategy(crossing().with_kind(SequenceKind.ONE_TINY), GameKind.G7)
    assert sequence_to_strategy(crossing().with_kind(SequenceKind.WEAK_TINY), "G7_SIGMA")


def test_sequence_json_round_trip():
    seq = crossing().with_kind(SequenceKind.B_TINY)
    again = FamilySequence.from_json(seq.to_json())
    assert again == seq
    interval = build_threshold_sequence(2).as_sequence()
    assert FamilySequence.from_json(interval.to_json()) == interval


@st.composite
def sequences(draw, max_points=4, max_len=3):
    n = draw(st.integers(1, max_points))
    whole = (1 << n) - 1
    fams = []
    for _ in range(draw(st.integers(1, max_len))):
        fam = draw(st.lists(st.integers(1, whole), min_size=1, max_size=3, unique=True))
        covered = 0
        for u in fam:
            covered |= u
        if covered != whole:
            fam.append(whole & ~covered)
        fams.append(tuple(fam))
    return FamilySequence(DiscretePoints(n), tuple(fams))


@settings(max_examples=150)
@given(sequences(), st.sampled_from([1, 2, None]))
def test_one_tiny_defeat_implies_tiny_defeat(seq, s):
    if verify_one_tiny(seq).status is Status.DEFEATED:
        assert verify_tiny(seq, s).status is Status.DEFEATED


@settings(max_examples=150)
@given(sequences(), st.sampled_from([1, 2, None]))
def test_weak_defeat_is_a_tiny_defeat(seq, s):
    weak = verify_weak_tiny(seq, s)
    if weak.status is Status.DEFEATED:
        assert verify_tiny(seq, s).status is Status.DEFEATED
    if verify_tiny(seq, s).holds:
        assert weak.holds


@settings(max_examples=150)
@given(sequences(), st.sampled_from([1, None]))
def test_combined_tail_defeats_defeat_weak(seq, s):
    witnesses = tail_tiny_defeats(seq, s)
    if all(w is not None for w in witnesses):
        combined = weak_defeats_to_tiny_defeat(witnesses)
        for k in range(len(seq)):
            assert seq.space.dense(witness_union(seq, combined, range(k, len(seq))))


@settings(max_examples=150)
@given(sequences(), st.sampled_from([1, 2, None]))
def test_witnesses_recheck(seq, s):
    for result in (verify_one_tiny(seq), verify_tiny(seq, s), verify_weak_tiny(seq, s)):
        if result.witness is not None:
            assert seq.space.dense(witness_union(seq, result.witness))
    b = verify_b_tiny(seq, s)
    if b.witness is not None:
        for sub in itertools.combinations(range(len(seq)), b.witness.threshold):
            assert seq.space.dense(witness_union(seq, b.witness, sub))


@settings(max_examples=150)
@given(sequences(), st.randoms(), st.sampled_from([1, None]))
def test_verdicts_invariant_under_permutations(seq, rnd, s):
    n = seq.space.n
    perm = list(range(n))
    rnd.shuffle(perm)

    def relabel(u):
        return mask(perm[p] for p in range(n) if u >> p & 1)

    fams = []
    for fam in seq.families:
        fam = [relabel(u) for u in fam]
        rnd.shuffle(fam)
        fams.append(tuple(fam))
    other = FamilySequence(seq.space, tuple(fams))
    assert verify_one_tiny(other).status == verify_one_tiny(seq).status
    assert verify_tiny(other, s).status == verify_tiny(seq, s).status
    assert verify_weak_tiny(other, s).status == verify_weak_tiny(seq, s).status
    assert verify_b_tiny(other, s).status == verify_b_tiny(seq, s).status
