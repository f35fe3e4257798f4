import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opengames.spaces import (
    DiscretePoints,
    FinitePoints,
    IntervalOpen,
    IntervalSpace,
    is_dense,
    load_space,
    mask,
    measure_union,
    meets,
    points_of,
    space_to_json,
)

F = Fraction


def brute_dense(n, basis, family):
    """Point-by-point oracle: some point of every basis element lies in some member."""
    covered = {p for u in family for p in range(n) if u >> p & 1}
    return all(any(b >> p & 1 and p in covered for p in range(n)) for b in basis)


def test_discrete_density_examples():
    d3 = DiscretePoints(3)
    assert is_dense(d3, [mask([0]), mask([1]), mask([2])])
    assert not is_dense(d3, [mask([0]), mask([1])])


def test_interval_density_example():
    assert is_dense(IntervalSpace(), [IntervalOpen.of((0, F(1, 2))), IntervalOpen.of((F(1, 2), 1))])


def test_meets_examples():
    assert meets(mask([0, 1]), mask([1, 2]))
    assert not meets(mask([0]), mask([1]))
    assert meets(IntervalOpen.of((0, F(1, 3))), IntervalOpen.of((F(1, 4), F(1, 2))))
    with pytest.raises(TypeError):
        meets(mask([0]), IntervalOpen.of((0, F(1, 2))))


def test_measure_union_examples():
    assert measure_union([IntervalOpen.of((0, F(1, 2))), IntervalOpen.of((F(1, 4), F(3, 4)))]) == F(3, 4)
    assert measure_union([]) == 0
    thirds = [IntervalOpen.of((F(i, 3), F(i + 1, 3))) for i in range(3)]
    assert measure_union(thirds) == 1


def test_non_open_member_is_a_type_error():
    sp = FinitePoints.from_lists(3, [[0, 1], [2]])
    with pytest.raises(TypeError):
        is_dense(sp, [mask([0])])
    with pytest.raises(TypeError):
        measure_union([mask([0])])


def test_interval_normalization():
    u = IntervalOpen.of((F(1, 2), F(3, 4)), (0, F(1, 4)), (F(1, 8), F(1, 3)))
    assert u.intervals == ((0, F(1, 3)), (F(1, 2), F(3, 4)))
    assert u.measure == F(1, 3) + F(1, 4)
    touching = IntervalOpen.of((0, F(1, 2)), (F(1, 2), 1))
    assert len(touching.intervals) == 2
    with pytest.raises(ValueError):
        IntervalOpen.of((0, F(3, 2)))
    with pytest.raises(TypeError):
        IntervalOpen.of((0.0, 0.5))


def test_space_json_round_trip():
    for sp in (FinitePoints.from_lists(4, [[0], [1], [2, 3]]), DiscretePoints(8), IntervalSpace()):
        assert load_space(space_to_json(sp)) == sp
    u = IntervalOpen.of((F(1, 4), F(1, 2)))
    assert IntervalOpen.from_json(u.to_json()) == u
    assert u.to_json() == [["1/4", "1/2"]]
    with pytest.raises(ValueError):
        load_space({"kind": "sphere"})


def test_open_sets_are_unions_of_basis():
    sp = FinitePoints.from_lists(3, [[0, 1], [1, 2]])
    opens = sp.open_sets()
    assert opens == sorted({0, mask([0, 1]), mask([1, 2]), mask([0, 1, 2])})
    for u in opens:
        assert u == sp.union(b for b in sp.basis if b & ~u == 0)


def _all_bases(n):
    nonempty = range(1, 1 << n)
    for size in range(1, len(nonempty) + 1):
        yield from itertools.combinations(nonempty, size)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_density_matches_oracle_exhaustively(n):
    # every basis and every family of open sets for tiny n
    for basis in _all_bases(n):
        sp = FinitePoints(n, basis)
        opens = sp.open_sets()
        for size in range(0, 3):
            for fam in itertools.combinations(opens, size):
                assert is_dense(sp, fam) == brute_dense(n, basis, fam)


@st.composite
def space_and_family(draw):
    n = draw(st.integers(1, 6))
    basis = draw(st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=8, unique=True))
    sp = FinitePoints(n, tuple(basis))
    fam = draw(st.lists(st.sets(st.sampled_from(basis)).map(lambda s: sp.union(s)), max_size=4))
    return sp, fam


@settings(max_examples=300)
@given(space_and_family())
def test_density_matches_oracle(case):
    sp, fam = case
    assert is_dense(sp, fam) == brute_dense(sp.n, sp.basis, fam)


@settings(max_examples=200)
@given(space_and_family(), st.data())
def test_density_is_monotone(case, data):
    sp, fam = case
    extra = data.draw(st.lists(st.sampled_from(sp.basis), max_size=3))
    if is_dense(sp, fam):
        assert is_dense(sp, fam + extra)


rationals = st.fractions(min_value=0, max_value=1, max_denominator=24)


@st.composite
def interval(draw):
    a, b = sorted((draw(rationals), draw(rationals)))
    return IntervalOpen.of((a, b)) if a < b else IntervalOpen()


@given(st.lists(interval(), max_size=5), st.randoms())
def test_measure_is_order_independent(sets, rnd):
    shuffled = list(sets)
    rnd.shuffle(shuffled)
    assert measure_union(sets) == measure_union(shuffled)


@given(st.lists(interval(), min_size=1, max_size=3))
def test_measure_inclusion_exclusion(sets):
    total = Fraction(0)
    for k in range(1, len(sets) + 1):
        for combo in itertools.combinations(sets, k):
            inter = combo[0]
            for u in combo[1:]:
                inter = inter & u
            total += (-1) ** (k + 1) * inter.measure
    assert measure_union(sets) == total


def test_points_of_inverts_mask():
    assert points_of(mask([0, 3, 5])) == [0, 3, 5]
