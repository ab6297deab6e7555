from itertools import chain, combinations

import numpy as np
import pytest
from hypothesis import given
from strategies import complexes, random_complex

from clustertree import (
    BoxCluster,
    ClusterSet,
    ShiftedGrid,
    axiom_tree,
    build_complex_abstract,
    build_complex_from_cells,
    check_a1,
    check_a2,
    check_a3,
    enumerate_axiom_clusters,
    is_cluster_tree,
    is_finer,
    verify_cluster,
)
from clustertree.axioms import MAX_ENUMERATION_REGIONS
from clustertree.exceptions import EnumerationCapError, GeometryMissingError, PreconditionError
from clustertree.fixtures import example1_complex, fig_hartigan

F = frozenset


def test_a1_examples():
    cx = fig_hartigan()
    assert not check_a1({1, 2}, cx)
    assert check_a1({1, 3}, cx)
    assert check_a1({1}, cx)
    with pytest.raises(KeyError):
        check_a1({7}, cx)
    with pytest.raises(PreconditionError):
        check_a1(set(), cx)


def test_a2_id_sets_and_boxes():
    assert check_a2({1, 2}, fig_hartigan())
    cx = example1_complex()  # cells [-1,0), [0,1), [1,2)
    assert check_a2(BoxCluster([((-1,), (1,))]), cx)
    assert not check_a2(BoxCluster([((0,), (0.5,))]), cx)
    # two halves that together cover the region are fine
    assert check_a2(BoxCluster([((0,), (0.5,)), ((0.5,), (1,))]), cx)
    # touching a region only on its boundary does not split it
    assert check_a2(BoxCluster([((-1,), (0,)), ((2,), (3,))]), cx)
    with pytest.raises(GeometryMissingError):
        check_a2(BoxCluster([((0,), (1,))]), fig_hartigan())


def test_a2_in_two_dims():
    g = ShiftedGrid(2, 1)
    cx = build_complex_from_cells([((0, 0), 2), ((1, 0), 1)], g)
    assert check_a2(BoxCluster([((0, 0), (1, 1))]), cx)
    assert not check_a2(BoxCluster([((0, 0), (0.5, 1))]), cx)


def test_a3_examples():
    cx = fig_hartigan()
    assert check_a3({1}, cx)
    assert not check_a3({1, 3}, cx)
    assert check_a3({1, 2, 3}, cx)


def test_a3_ties_fail():
    cx = build_complex_abstract([(0, 2), (1, 2)], [(0, 1)], [(0, 1)])
    verdict = verify_cluster({0}, cx)
    assert not verdict.a3 and verdict.a3_tie and verdict.a3_witness == 1
    assert enumerate_axiom_clusters(cx).as_set() == {F({0, 1})}


def test_verdict_witnesses():
    v = verify_cluster({1, 2}, fig_hartigan())
    assert not v.a1 and v.a1_witness == (1, 2)
    assert v.a3 and v.a2
    assert not v.ok
    d = verify_cluster({1, 3}, fig_hartigan()).to_dict()
    assert d["A3"] is False and d["A3_witness"] == 2 and d["A3_tie"] is False


def test_enumeration_examples():
    assert enumerate_axiom_clusters(fig_hartigan()).as_set() == {F({1}), F({2}), F({1, 2, 3})}
    assert enumerate_axiom_clusters(build_complex_abstract([(0, 1)])).as_set() == {F({0})}
    assert enumerate_axiom_clusters(example1_complex()).as_set() == {F({0}), F({0, 1}), F({0, 1, 2})}


def test_enumeration_cap():
    cx = build_complex_abstract([(k, 1) for k in range(MAX_ENUMERATION_REGIONS + 1)])
    with pytest.raises(EnumerationCapError):
        enumerate_axiom_clusters(cx)


def test_cluster_tree_and_finer():
    assert is_cluster_tree([{1}, {1, 2}])
    assert not is_cluster_tree([{1, 2}, {2, 3}])
    assert is_cluster_tree([])
    assert not is_finer([{1}], [{1}, {2}])
    assert is_finer([{1}, {2}], [{1}, {2}])
    assert is_finer([{1}, {2}, {1, 2}], [{1, 2}])


def test_cluster_set():
    cs = ClusterSet([{2}, {1}, {1}], fig_hartigan())
    assert len(cs) == 2 and {1} in cs and {3} not in cs
    with pytest.raises(KeyError):
        ClusterSet([{9}], fig_hartigan())


def _powerset(ids):
    return chain.from_iterable(combinations(ids, r) for r in range(1, len(ids) + 1))


@given(complexes(n_max=7))
def test_enumeration_agrees_with_pointwise_checks(cx):
    found = enumerate_axiom_clusters(cx).as_set()
    for subset in _powerset(cx.ids):
        ok = check_a1(subset, cx) and check_a2(subset, cx) and check_a3(subset, cx)
        assert ok == (F(subset) in found)


@given(complexes(n_max=8))
def test_axiom_tree_is_finest(cx):
    tree = axiom_tree(cx)
    oracle = enumerate_axiom_clusters(cx)
    assert is_cluster_tree(oracle)
    assert is_finer(oracle, tree.clusters())
    assert is_finer(tree.clusters(), oracle)
    for c in tree.clusters():
        assert verify_cluster(c, cx).ok


def test_sweep_clusters_satisfy_axioms_on_larger_complexes():
    rng = np.random.default_rng(4)
    for _ in range(30):
        cx = random_complex(rng, 40, n_min=20)
        for c in axiom_tree(cx).clusters():
            assert verify_cluster(c, cx).ok
