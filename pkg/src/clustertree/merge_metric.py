"""Merge heights and the merge distortion distance between dendrograms.

The merge height of two regions is the height of the smallest cluster
containing both, i.e. of their lowest common ancestor.  Regions in
different trees of a forest, or outside every cluster, merge at height 0.

For dendrograms whose clusters are unions of regions, merge heights are
constant on each region, so the distortion over all point pairs reduces
exactly to a maximum over region pairs ("regions" mode).  The "points"
mode evaluates merge heights at sample points and only gives a lower
bound on the supremum.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .exceptions import GeometryMissingError, PreconditionError
from .level_tree import Dendrogram, Forest
from .regions import Adjacency, RegionComplex, region_at

__all__ = [
    "DistortionResult",
    "MergeHeightTable",
    "is_isomorphic",
    "merge_distortion",
    "merge_height",
    "merge_height_maximin",
    "merge_height_table",
    "merge_heights_at_points",
    "sup_norm_distance",
]

Tree = Union[Dendrogram, Forest]
ZERO = Fraction(0)


def _locate(tree: Tree, region: int):
    """(dendrogram, node) of the smallest cluster containing ``region``."""
    if isinstance(tree, Forest):
        k = tree.labels.get(region)
        if k is None:
            return None, None
        sub = tree.trees[k]
        return sub, sub.leaf.get(region)
    return tree, tree.leaf.get(region)


def _known(tree: Tree, region: int) -> bool:
    cx = tree.complex
    return cx is None or region in cx or region in tree.regions


def merge_height(tree: Tree, i: int, j: int) -> Fraction:
    """Height of the smallest cluster containing regions ``i`` and ``j``."""
    for r in (i, j):
        if not _known(tree, r):
            raise KeyError(f"unknown region id {r!r}")
    ti, ni = _locate(tree, i)
    tj, nj = _locate(tree, j)
    if ni is None or nj is None or ti is not tj:
        return ZERO
    path = set(ti.ancestors(ni))
    for k in tj.ancestors(nj):
        if k in path:
            return ti.height[k]
    return ZERO


def merge_height_maximin(complex: RegionComplex, adjacency, i: int, j: int) -> Fraction:
    """Best bottleneck level over adjacency paths from ``i`` to ``j``.

    Widest-path search (Dijkstra with max-min relaxation); 0 without a path.
    """
    complex.check_ids((i, j))
    adjacency = Adjacency(adjacency)
    best = {i: complex.level(i)}
    heap = [(-best[i], i)]
    done = set()
    while heap:
        neg, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == j:
            return -neg
        done.add(u)
        for v in complex.adjacent(u, adjacency):
            cand = min(-neg, complex.level(v))
            if cand > best.get(v, ZERO):
                best[v] = cand
                heapq.heappush(heap, (-cand, v))
    return ZERO


@dataclass(frozen=True)
class MergeHeightTable:
    """Symmetric matrix of merge heights indexed by region id."""

    ids: tuple[int, ...]
    values: tuple[tuple[Fraction, ...], ...]

    def __getitem__(self, key) -> Fraction:
        i, j = key
        pos = {r: k for k, r in enumerate(self.ids)}
        return self.values[pos[i]][pos[j]]

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.values])


def merge_height_table(tree: Tree, ids: Sequence[int] | None = None) -> MergeHeightTable:
    if ids is None:
        cx = _complex_of(tree)
        ids = cx.ids if cx is not None else tuple(sorted(tree.regions))
    ids = tuple(ids)
    rows = []
    for a, i in enumerate(ids):
        rows.append(tuple(merge_height(tree, i, j) for j in ids))
    return MergeHeightTable(ids, tuple(rows))


def _complex_of(tree: Tree) -> RegionComplex | None:
    return tree.complex


@dataclass(frozen=True)
class DistortionResult:
    value: Fraction | float
    mode: str  # "exact" or "sampled"
    witness_pair: tuple | None

    def to_dict(self) -> dict:
        value = float(self.value)
        out = {"d_M": value, "mode": self.mode, "witness_pair": list(self.witness_pair or ())}
        if self.mode == "sampled":
            out["note"] = "sampled lower bound"
        return out


def _domain(t1: Tree, t2: Tree) -> tuple[int, ...]:
    cx1, cx2 = _complex_of(t1), _complex_of(t2)
    if cx1 is not None and cx2 is not None:
        if set(cx1.ids) != set(cx2.ids):
            raise PreconditionError("trees are defined over different region sets")
        if cx1.grid is not None and cx2.grid is not None:
            if cx1.grid != cx2.grid or any(
                cx1.region(i).cells != cx2.region(i).cells for i in cx1.ids
            ):
                raise PreconditionError("trees are defined over different region geometry")
        return cx1.ids
    return tuple(sorted(t1.regions | t2.regions))


def _regions_at(complex: RegionComplex, P: np.ndarray) -> list:
    if complex.grid is None:
        raise GeometryMissingError("points mode needs a complex with geometry")
    return [region_at(p, complex) for p in P]


def _merge_of_regions(tree: Tree, ri: Sequence, rj: Sequence) -> np.ndarray:
    cache: dict = {}
    out = np.zeros(len(ri))
    for k, (a, b) in enumerate(zip(ri, rj)):
        if a is None or b is None:
            continue
        key = (a, b) if a <= b else (b, a)
        if key not in cache:
            cache[key] = float(merge_height(tree, *key))
        out[k] = cache[key]
    return out


def merge_heights_at_points(tree: Tree, complex: RegionComplex, X, Y) -> np.ndarray:
    """Merge heights (floats) of point pairs ``(X[k], Y[k])``; 0 where a
    point lies outside the support."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return _merge_of_regions(tree, _regions_at(complex, X), _regions_at(complex, Y))


def merge_distortion(t1: Tree, t2: Tree, points=None) -> DistortionResult:
    """Merge distortion distance between two dendrograms.

    Without ``points`` the distance is exact, computed over all pairs of
    regions (trees must share the region set).  With ``points`` (an
    ``(n, d)`` array), every pair of sample points is used and the result
    is a sampled lower bound; both trees need complexes with geometry.
    """
    if points is None:
        ids = _domain(t1, t2)
        best, witness = ZERO, None
        for a, i in enumerate(ids):
            for j in ids[a:]:
                gap = abs(merge_height(t1, i, j) - merge_height(t2, i, j))
                if gap > best or witness is None:
                    best, witness = gap, (i, j)
        return DistortionResult(best, "exact", witness)

    cx1, cx2 = _geometric_complex(t1), _geometric_complex(t2)
    P = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = np.triu_indices(len(P))
    r1, r2 = _regions_at(cx1, P), _regions_at(cx2, P)
    m1 = _merge_of_regions(t1, [r1[k] for k in a], [r1[k] for k in b])
    m2 = _merge_of_regions(t2, [r2[k] for k in a], [r2[k] for k in b])
    gaps = np.abs(m1 - m2)
    k = int(np.argmax(gaps))
    return DistortionResult(float(gaps[k]), "sampled", (int(a[k]), int(b[k])))


def _geometric_complex(tree: Tree) -> RegionComplex:
    cx = tree.complex
    if cx is None or cx.grid is None:
        raise GeometryMissingError("points mode needs trees built on a complex with geometry")
    return cx


def sup_norm_distance(f1: RegionComplex, f2, points=None) -> Fraction | float:
    """Sup-norm distance between two piecewise-constant densities, or between
    one and an analytic density.

    Complex vs complex is exact and needs the same regions (same geometry
    when both have it); a region present in only one complex contributes
    its level.  Against a density spec the value is the maximum of
    ``|f1 - f2|`` over ``points``, an estimate from below.
    """
    if isinstance(f2, RegionComplex):
        if f1.grid is not None and f2.grid is not None:
            if f1.grid != f2.grid:
                raise PreconditionError("complexes live on different grids")
            shared = set(f1.ids) & set(f2.ids)
            if any(f1.region(i).cells != f2.region(i).cells for i in shared):
                raise PreconditionError("complexes have different region geometry")
        elif (f1.grid is None) != (f2.grid is None):
            raise PreconditionError("cannot compare a geometric and an abstract complex")
        best = ZERO
        for i in set(f1.ids) | set(f2.ids):
            a = f1.level(i) if i in f1 else ZERO
            b = f2.level(i) if i in f2 else ZERO
            best = max(best, abs(a - b))
        return best

    if points is None:
        raise PreconditionError("sampling points are required against an analytic density")
    if f1.grid is None:
        raise GeometryMissingError("complex has no geometry")
    P = np.atleast_2d(np.asarray(points, dtype=float))
    g = np.array([_value_at(f1, p) for p in P])
    return float(np.max(np.abs(g - f2(P))))


def _value_at(complex: RegionComplex, point) -> float:
    r = region_at(point, complex)
    return 0.0 if r is None else float(complex.level(r))


def _shape_labels(tree: Dendrogram, codes: dict) -> list[int]:
    # Bottom-up AHU labelling; ``codes`` is shared so labels are comparable
    # across trees.
    label = [0] * len(tree)
    order, stack = [], list(tree.roots)
    while stack:
        k = stack.pop()
        order.append(k)
        stack.extend(tree.children[k])
    for k in reversed(order):
        key = tuple(sorted(label[c] for c in tree.children[k]))
        label[k] = codes.setdefault(key, len(codes))
    return label


def is_isomorphic(t1: Tree, t2: Tree) -> bool:
    """Order isomorphism of the two cluster posets (heights ignored)."""
    codes: dict = {}

    def forms(t):
        trees = t.trees if isinstance(t, Forest) else (t,)
        out = []
        for d in trees:
            label = _shape_labels(d, codes)
            out.extend(label[r] for r in d.roots)
        return sorted(out)

    return forms(t1) == forms(t2)
