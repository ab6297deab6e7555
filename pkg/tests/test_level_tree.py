import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from strategies import blobs, complexes, random_complex, random_laminar

from clustertree import (
    Dendrogram,
    Forest,
    ShiftedGrid,
    axiom_forest,
    axiom_tree,
    build_complex_abstract,
    build_complex_from_cells,
    enumerate_axiom_clusters,
    export_forest,
    export_tree,
    forest_from_json,
    hartigan_forest,
    hartigan_tree,
    sweep_forest,
    sweep_tree,
    tree_from_json,
)
from clustertree.exceptions import (
    DisconnectedSupportError,
    EmptyComplexError,
    NotInClassError,
    PreconditionError,
    SchemaError,
)
from clustertree.fixtures import example1_complex, fig_hartigan

F = frozenset


def test_fig_hartigan_sweeps():
    cx = fig_hartigan()
    assert hartigan_tree(cx).cluster_heights() == {F({1}): 3, F({1, 2}): 2, F({1, 2, 3}): 1}
    assert axiom_tree(cx).cluster_heights() == {F({1}): 3, F({2}): 2, F({1, 2, 3}): 1}


def test_single_region():
    tree = sweep_tree(build_complex_abstract([(0, 5)]))
    assert tree.cluster_heights() == {F({0}): 5}
    assert tuple(tree.roots) == (0,)


def test_equal_levels_form_one_batch():
    cx = build_complex_abstract([(0, 2), (1, 2), (2, 1)], [(0, 1), (1, 2)], [(0, 1), (1, 2)])
    assert sweep_tree(cx).cluster_set() == {F({0, 1}), F({0, 1, 2})}


def test_unchanged_component_not_repeated():
    # 0 and 1 are separate at level 3; the batch at level 2 only touches 1
    cx = build_complex_abstract(
        [(0, 3), (1, 3), (2, 2), (3, 1)], [(1, 2), (0, 3), (2, 3)], [(1, 2), (0, 3), (2, 3)]
    )
    assert sweep_tree(cx).cluster_heights() == {
        F({0}): 3, F({1}): 3, F({1, 2}): 2, F({0, 1, 2, 3}): 1
    }


def test_axiom_tree_requires_class_f():
    cx = build_complex_abstract([(0, 1), (1, 2)], [(0, 1)], [])
    with pytest.raises(NotInClassError):
        axiom_tree(cx)
    # the touch graph is connected, so the Hartigan tree exists
    assert hartigan_tree(cx).cluster_set() == {F({1}), F({0, 1})}
    assert len(axiom_forest(cx)) == 2


def test_disconnected_and_empty():
    cx = build_complex_abstract([(0, 1), (1, 2)])
    with pytest.raises(DisconnectedSupportError):
        hartigan_tree(cx)
    forest = hartigan_forest(cx)
    assert len(forest) == 2 and forest.labels == {0: 0, 1: 1}
    with pytest.raises(EmptyComplexError):
        sweep_tree(build_complex_abstract([]))
    with pytest.raises(EmptyComplexError):
        sweep_forest(build_complex_abstract([]))


def test_eight_separated_blobs():
    g = ShiftedGrid(2, 1)
    cells = [((4 * k, 0), k + 1) for k in range(8)] + [((4 * k + 1, 0), 1) for k in range(8)]
    forest = sweep_forest(build_complex_from_cells(cells, g))
    assert len(forest.trees) == 8


def test_connected_forest_is_the_tree():
    cx = example1_complex()
    forest = sweep_forest(cx)
    assert len(forest) == 1 and forest.trees[0] == sweep_tree(cx)


def test_from_clusters_validation():
    with pytest.raises(ValueError):
        Dendrogram.from_clusters([{0, 1}, {1, 2}], [1, 1])
    with pytest.raises(ValueError):
        Dendrogram.from_clusters([{0}, {0, 1}], [1, 2])  # parent above child
    with pytest.raises(ValueError):
        Dendrogram.from_clusters([{0}])
    with pytest.raises(ValueError):
        Dendrogram.from_clusters([{0}, {0}], [1, 1])
    with pytest.raises(ValueError):
        Dendrogram.from_clusters([set()], [1])


def test_from_clusters_matches_sweep():
    cx = fig_hartigan()
    tree = Dendrogram.from_clusters([{1, 2, 3}, {2}, {1}], complex=cx)
    assert tree == axiom_tree(cx)


def test_json_single_node():
    tree = sweep_tree(build_complex_abstract([(4, 1.5)]))
    doc = json.loads(export_tree(tree))
    assert doc == {"schema": "v1", "nodes": [{"id": 0, "regions": [4], "height": 1.5, "parent": None}]}


def test_dot_export():
    dot = export_tree(axiom_tree(fig_hartigan()), "dot")
    assert dot.startswith("digraph")
    assert dot.count("label=\"{") == 3
    assert dot.count("->") == 2
    with pytest.raises(ValueError):
        export_tree(axiom_tree(fig_hartigan()), "svg")


def test_round_trip_rational_heights():
    tree = sweep_tree(example1_complex())
    text = export_tree(tree)
    assert '"1/3"' in text
    assert tree_from_json(text) == tree


def test_forest_round_trip():
    cx = build_complex_abstract([(0, 1), (1, 2), (2, 3)], [(1, 2)], [(1, 2)])
    forest = sweep_forest(cx)
    back = forest_from_json(export_forest(forest))
    assert isinstance(back, Forest)
    assert back.cluster_set() == forest.cluster_set()
    assert "t1_" in export_forest(forest, "dot")


def test_tree_json_errors():
    with pytest.raises(SchemaError):
        tree_from_json('{"schema": "v9", "nodes": []}')
    with pytest.raises(SchemaError):
        tree_from_json('{"nodes": [{"id": 3, "regions": [1], "height": 1, "parent": null}]}')
    with pytest.raises(SchemaError):
        tree_from_json("not json")
    bad_parent = (
        '{"nodes": [{"id": 0, "regions": [1], "height": 2, "parent": null},'
        ' {"id": 1, "regions": [1, 2], "height": 1, "parent": null}]}'
    )
    with pytest.raises(SchemaError):
        tree_from_json(bad_parent)
    overlap = (
        '{"nodes": [{"id": 0, "regions": [1, 2], "height": 2, "parent": null},'
        ' {"id": 1, "regions": [2, 3], "height": 1, "parent": null}]}'
    )
    with pytest.raises(PreconditionError):
        tree_from_json(overlap)


@given(complexes(n_max=9, connected=False))
def test_sweep_is_laminar_with_monotone_heights(cx):
    for mode in ("touch", "neighbor"):
        forest = sweep_forest(cx, mode)
        for tree in forest.trees:
            for k, p in enumerate(tree.parent):
                if p is not None:
                    assert tree.cluster(k) < tree.cluster(p)
                    assert tree.height[p] < tree.height[k]
                # height is the cluster infimum
                assert tree.height[k] == min(cx.level(i) for i in tree.cluster(k))


@given(complexes(n_max=9))
def test_axiom_tree_matches_enumeration(cx):
    assert axiom_tree(cx).cluster_set() == enumerate_axiom_clusters(cx).as_set()


@given(blobs())
def test_round_trip_property(cx):
    tree = hartigan_tree(cx)
    assert tree_from_json(export_tree(tree), cx) == tree


def test_neighbor_sweep_is_finer_than_touch_sweep_levels():
    # each touch-sweep cluster is a union of neighbor-sweep clusters at the same level
    rng = np.random.default_rng(3)
    for _ in range(50):
        cx = random_complex(rng, 9)
        touch = sweep_tree(cx, "touch")
        nbr = sweep_tree(cx, "neighbor").cluster_heights()
        for c, h in touch.cluster_heights().items():
            parts = [d for d, hd in nbr.items() if d <= c and hd >= h]
            assert frozenset().union(*parts) == c


def test_random_laminar_helper():
    rng = np.random.default_rng(0)
    fam = random_laminar(rng, range(6))
    assert frozenset(range(6)) in fam
    Dendrogram.from_clusters(fam, [Fraction(1, len(c)) for c in fam])
