import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coalgebra_kit.chain import (
    TERMINAL_POINT,
    chain_to_json,
    check_compatible,
    decode_value,
    element_to_tree,
    encode_value,
    forget_metrics,
    hausdorff_chain,
    kripke_chain,
    sequence_of,
    sequence_to_tree,
    tree_to_element,
    trees_as_level,
)
from coalgebra_kit.errors import BudgetExceeded, IncompatibleSequence
from coalgebra_kit.functors import Comp, Const, Hd, Id, Pf, Prod, eval_map, parse_functor
from coalgebra_kit.metrics import INF, FinMetricSpace, is_nonexpanding
from coalgebra_kit.trees import LEAF, RawTree, canonize, partial_n, truncate
from coalgebra_kit.values import FiniteSet, Tag

from oracles import brute_subsets, path_tree, random_tree, seeded


def sizes(levels):
    return [len(l) for l in levels]


# --- set-valued chains --------------------------------------------------------------------


def test_pf_tower_sizes():
    assert sizes(kripke_chain(Pf(), 4)) == [1, 2, 4, 16, 65536]


def test_pf_levels_match_subset_enumeration():
    levels = kripke_chain(Pf(), 3)
    for prev, level in zip(levels, levels[1:]):
        assert set(level.carrier) == brute_subsets(prev.carrier)


def test_pf_budget():
    with pytest.raises(BudgetExceeded) as info:
        kripke_chain(Pf(), 5)
    assert info.value.level == 5
    assert "budget-exceeded" in str(info.value)
    with pytest.raises(BudgetExceeded) as info:
        kripke_chain(Pf(), 4, budget=1000)
    assert info.value.level == 4


def test_identity_chain():
    assert sizes(kripke_chain(Id(), 3)) == [1, 1, 1, 1]


def test_labelled_powerset_chain():
    F = Comp(Pf(), Prod((Const(FiniteSet([0, 1])), Id())))
    assert sizes(kripke_chain(F, 2)) == [1, 4, 2**8]


def test_level_zero_is_terminal():
    level = kripke_chain(Pf(), 0)[0]
    assert list(level.carrier) == [TERMINAL_POINT] and level.connect is None


@pytest.mark.parametrize(
    "text, N", [("Pf", 3), ("Id", 3), ("C2 * Id", 3), ("C1 + Id", 3), ("Pf(C2 * Id)", 2), ("Pf(Id + C1)", 2), ("Id * Id", 3)]
)
def test_chain_functoriality(text, N):
    F = parse_functor(text)
    levels = kripke_chain(F, N, budget=5000)
    for lower, upper in zip(levels[1:], levels[2:]):
        assert upper.connect == eval_map(F, lower.connect)
        assert all(upper.connect(x) in lower.carrier for x in upper.carrier)


# --- metric chains ------------------------------------------------------------------------------


def test_hausdorff_chain_matches_pf_chain():
    metric = hausdorff_chain(Hd(), 3)
    sets = kripke_chain(Pf(), 3)
    for m, s in zip(forget_metrics(metric), sets):
        assert m.carrier == s.carrier
        if s.connect is not None:
            assert m.connect == s.connect


def test_hausdorff_chain_distances():
    for level in hausdorff_chain(Hd(), 3):
        X = level.metric
        nonzero = {X.d(p, q) for p in X.points for q in X.points if p != q}
        assert nonzero <= {1, INF}


def test_hausdorff_connect_maps_nonexpanding():
    levels = hausdorff_chain(Hd(), 3)
    for lower, upper in zip(levels, levels[1:]):
        assert is_nonexpanding(upper.connect, upper.metric, lower.metric)


def test_hausdorff_identity_chain():
    for level in hausdorff_chain(Id(), 2):
        assert len(level) == 1 and level.metric.d(TERMINAL_POINT, TERMINAL_POINT) == 0


def test_labelled_hausdorff_chain():
    sigma = FinMetricSpace((0, 1), [[0, "1/2"], ["1/2", 0]])
    F = Comp(Hd(), Prod((Const(sigma), Id())))
    levels = hausdorff_chain(F, 2)
    assert sizes(levels) == [1, 4, 256]
    X = levels[2].metric
    assert {X.d(p, q) for p in X.points for q in X.points} == {0, Fraction(1, 2), INF}
    for lower, upper in zip(levels, levels[1:]):
        assert is_nonexpanding(upper.connect, upper.metric, lower.metric)


def test_metric_budget_counts_table_entries():
    with pytest.raises(BudgetExceeded) as info:
        hausdorff_chain(Hd(), 4)
    assert info.value.level == 4


# --- trees as chain elements --------------------------------------------------------------------------


def test_trees_as_level_examples():
    assert list(trees_as_level(0)) == [LEAF]
    assert set(trees_as_level(1)) == {LEAF, canonize(RawTree.of(RawTree()))}
    assert len(trees_as_level(2)) == 4
    assert len(trees_as_level(3)) == 16
    with pytest.raises(BudgetExceeded):
        trees_as_level(5)


@pytest.mark.parametrize("n", range(4))
def test_trees_biject_with_chain_levels(n):
    levels = kripke_chain(Pf(), n)
    trees = trees_as_level(n)
    images = {tree_to_element(t, n) for t in trees}
    assert images == set(levels[n].carrier)
    assert len(images) == len(trees)
    for x in levels[n].carrier:
        assert tree_to_element(element_to_tree(x), n) == x
        if n:
            assert tree_to_element(truncate(element_to_tree(x), n - 1), n - 1) == levels[n].connect(x)


def test_root_destructuring_is_bijective():
    # trees of height <= n correspond to finite sets of trees of height <= n - 1
    for n in range(1, 4):
        lower = trees_as_level(n - 1)
        children = {frozenset(c for _, c in t.edges) for t in trees_as_level(n)}
        assert children == brute_subsets(lower)


# --- compatible sequences ---------------------------------------------------------------------------------


def test_check_compatible_examples():
    id_levels = kripke_chain(Id(), 3)
    assert check_compatible([TERMINAL_POINT] * 4, id_levels)
    levels = kripke_chain(Pf(), 2)
    leaf1 = frozenset([TERMINAL_POINT])
    assert check_compatible([TERMINAL_POINT, leaf1, frozenset([frozenset()])], levels)
    assert not check_compatible([TERMINAL_POINT, frozenset(), frozenset([frozenset()])], levels)


def test_check_compatible_level_mismatch():
    levels = kripke_chain(Pf(), 2)
    with pytest.raises(IncompatibleSequence):
        check_compatible([TERMINAL_POINT, frozenset([frozenset()])], levels)
    with pytest.raises(IncompatibleSequence):
        check_compatible([TERMINAL_POINT] * 4, levels)


def test_sequence_to_tree_examples():
    for N in range(5):
        assert sequence_to_tree(sequence_of(canonize(path_tree(N)), N)) is canonize(path_tree(N))
        assert sequence_to_tree(sequence_of(LEAF, N)) is LEAF


def test_sequence_to_tree_rejects_incompatible():
    with pytest.raises(IncompatibleSequence):
        sequence_to_tree([TERMINAL_POINT, frozenset(), frozenset([frozenset()])])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random(seed):
    t = canonize(random_tree(seeded(seed), 4))
    N = t.height
    seq = sequence_of(t, N)
    back = sequence_to_tree(seq)
    assert back is t
    assert all(tree_to_element(partial_n(back, n), n) == seq[n] for n in range(N + 1))


# --- serialization ---------------------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "value", [(), (1, "a"), Tag(1, 3), frozenset([frozenset(), (0, ())]), canonize(RawTree.of(RawTree()))]
)
def test_value_codec(value):
    assert decode_value(json.loads(json.dumps(encode_value(value)))) == value


def test_chain_json():
    doc = chain_to_json(Pf(), kripke_chain(Pf(), 2))
    assert doc["sizes"] == [1, 2, 4]
    assert doc["levels"][2]["connect"] == [0, 1, 1, 1]
    metric = chain_to_json(Hd(), hausdorff_chain(Hd(), 1))
    assert metric["levels"][1]["dist"] == [["0", "inf"], ["inf", "0"]]
    assert chain_to_json(Pf(), kripke_chain(Pf(), 2), sizes_only=True) == {"functor": "Pf", "sizes": [1, 2, 4]}
