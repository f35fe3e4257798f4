import itertools

import pytest

from opengames.cardinal import FunctionFamily, all_families, dif_to_one_tiny
from opengames.ku_product import (
    Box,
    KUConstructionError,
    LabeledPiTree,
    RefiningOneTiny,
    branch_chain,
    build_canonical_tree,
    build_E,
    check_E_dense,
    ku_report,
    refine_sequence,
    section_not_dense,
)
from opengames.sequences import FamilySequence, SequenceKind, verify_one_tiny
from opengames.spaces import DiscretePoints, FinitePoints, mask


def dif_y():
    return dif_to_one_tiny(FunctionFamily(2, 2, ((0, 0), (1, 1), (0, 1), (1, 0))))


def test_depth_one_tree():
    tree = build_canonical_tree(1, 2)
    assert tree.levels[1] == (mask([0]), mask([1]))
    assert tree.labels[1] == ((0,), (1,))


def test_depth_two_children_carry_every_extension():
    tree = build_canonical_tree(2, 2)
    sp = tree.space
    for u, lab in zip(tree.levels[1], tree.labels[1]):
        below = {l for v, l in zip(tree.levels[2], tree.labels[2]) if sp.subset(v, u)}
        assert below == {lab + (0,), lab + (1,)}


def test_broken_coherence_is_rejected():
    tree = build_canonical_tree(2, 2)
    labels = list(tree.labels)
    labels[2] = ((1, 0),) + labels[2][1:]
    with pytest.raises(KUConstructionError, match="coherence"):
        LabeledPiTree(tree.space, 2, 2, tree.levels, tuple(labels))


def test_missing_extension_is_rejected():
    tree = build_canonical_tree(2, 2)
    labels = list(tree.labels)
    labels[2] = ((0, 1),) + labels[2][1:]
    with pytest.raises(KUConstructionError, match="surjectivity"):
        LabeledPiTree(tree.space, 2, 2, tree.levels, tuple(labels))


def test_overlapping_level_is_rejected():
    tree = build_canonical_tree(1, 2)
    with pytest.raises(KUConstructionError, match="disjoint"):
        LabeledPiTree(tree.space, 1, 2, (tree.levels[0], (mask([0, 1]), mask([1]))), tree.labels)


def test_branch_chain_is_nested():
    tree = build_canonical_tree(3, 2)
    for sigma in itertools.product(range(2), repeat=3):
        chain = branch_chain(tree, sigma)
        assert all(tree.space.subset(b, a) for a, b in zip(chain, chain[1:]))
        assert chain[-1] == 1 << int("".join(map(str, sigma)), 2)


def test_refinement_is_disjoint_and_refining():
    y = refine_sequence(dif_y(), 2)
    assert y.families[0] == (mask([0, 2]), mask([1, 3]))
    assert sorted(y.families[1]) == [1, 2, 4, 8]
    # consecutive members along a branch avoid each other
    for tau in itertools.product(range(2), repeat=1):
        for i in range(2):
            assert not y.V(tau + (i,)) & y.V(tau)


def test_refinement_of_overlapping_families():
    seq = FamilySequence(DiscretePoints(3), ((mask([0, 1]), mask([1, 2])), (mask([0]), mask([1, 2]))))
    y = refine_sequence(seq, 2)
    assert y.families == ((mask([0, 1]), mask([2])), (mask([0]), mask([1]), mask([2])))


def test_refinement_needs_a_discrete_space():
    seq = FamilySequence(FinitePoints.from_lists(2, [[0, 1]]), ((3,),))
    with pytest.raises(TypeError):
        refine_sequence(seq, 2)


def test_enumeration_must_be_total():
    y = refine_sequence(dif_y(), 2)
    partial = {k: v for k, v in y.enumeration.items() if k != (1, 1)}
    with pytest.raises(KUConstructionError, match="missing"):
        RefiningOneTiny(y.space, y.families, 2, partial)


def test_box_count_is_one_per_level_member():
    tree = build_canonical_tree(2, 2)
    E = build_E(tree, refine_sequence(dif_y(), 2))
    assert len(E) == sum(len(level) for level in tree.levels[1:])


def test_depth_one_boxes():
    tree = build_canonical_tree(1, 2)
    y = refine_sequence(dif_y(), 2, depth=1)
    E = build_E(tree, y)
    assert E == [Box(1, (0,), mask([0]), y.V((0,))), Box(1, (1,), mask([1]), y.V((1,)))]


def test_canonical_instance():
    tree = build_canonical_tree(2, 2)
    y = refine_sequence(dif_y(), 2)
    E = build_E(tree, y)
    assert check_E_dense(E, tree, y.space) == (True, None)
    for sigma in itertools.product(range(2), repeat=2):
        ok, members = section_not_dense(E, sigma, tree, y.space)
        assert ok and len(members) == 2


def test_removing_deepest_boxes_breaks_density():
    tree = build_canonical_tree(2, 2)
    y = refine_sequence(dif_y(), 2)
    E = [b for b in build_E(tree, y) if b.level < 2]
    dense, miss = check_E_dense(E, tree, y.space)
    assert not dense and miss is not None


def test_defeated_sequence_has_a_dense_section():
    seq = FamilySequence(DiscretePoints(2), ((mask([0]), mask([1])),) * 2, SequenceKind.ONE_TINY)
    tree = build_canonical_tree(2, 2)
    y = refine_sequence(seq, 2)
    E = build_E(tree, y)
    sections = {sigma: section_not_dense(E, sigma, tree, y.space)[0] for sigma in itertools.product(range(2), repeat=2)}
    assert not all(sections.values())
    assert sections[(0, 0)] is False


def test_depth_zero_section_is_empty():
    tree = build_canonical_tree(0, 2)
    y = refine_sequence(dif_y(), 2, depth=0)
    E = build_E(tree, y)
    assert E == []
    assert section_not_dense(E, (), tree, y.space) == (True, [])
    assert check_E_dense(E, tree, y.space)[0] is False


def test_construction_errors():
    tree = build_canonical_tree(3, 2)
    with pytest.raises(KUConstructionError):
        build_E(tree, refine_sequence(dif_y(), 2))
    with pytest.raises(KUConstructionError):
        build_E(build_canonical_tree(2, 3), refine_sequence(dif_y(), 2))
    with pytest.raises(KUConstructionError):
        refine_sequence(dif_y(), 2, depth=3)
    with pytest.raises(ValueError):
        section_not_dense([], (0,), tree, DiscretePoints(2))


def test_every_holding_instance_gives_non_dense_sections():
    # a one-tiny Y forces non-dense sections regardless of density of E
    tree = build_canonical_tree(2, 2)
    for F in all_families(2, 3, 4):
        seq = dif_to_one_tiny(F)
        y = refine_sequence(seq, 2)
        if not verify_one_tiny(y.as_sequence()).holds:
            continue
        E = build_E(tree, y)
        for sigma in itertools.product(range(2), repeat=2):
            assert section_not_dense(E, sigma, tree, y.space)[0]


def test_report_shape():
    report = ku_report(build_canonical_tree(2, 2), refine_sequence(dif_y(), 2))
    assert report["E_dense"] and report["sections_not_dense"]
    assert report["boxes"] == 6 and len(report["branches"]) == 4
    assert report["y_one_tiny"]["status"] == "HOLDS_AT_SCALE"
