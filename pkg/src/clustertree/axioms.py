"""Decision procedures for the three clustering axioms.

A1  the cluster's regions form a connected subgraph of the neighbor graph;
A2  the cluster is a union of whole regions;
A3  the lowest level inside the cluster strictly exceeds every level of
    a neighboring region outside it.

:func:`enumerate_axiom_clusters` scans every region subset and is the
brute-force reference for :func:`clustertree.level_tree.axiom_tree`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import EnumerationCapError, GeometryMissingError, InvariantError, PreconditionError
from .numbers import as_fraction
from .regions import Adjacency, RegionComplex

__all__ = [
    "AxiomVerdict",
    "BoxCluster",
    "ClusterSet",
    "check_a1",
    "check_a2",
    "check_a3",
    "enumerate_axiom_clusters",
    "is_cluster_tree",
    "is_finer",
    "verify_cluster",
]

MAX_ENUMERATION_REGIONS = 20


@dataclass(frozen=True)
class ClusterSet:
    """Candidate collection of clusters (sets of region ids)."""

    clusters: tuple[frozenset[int], ...]
    complex: RegionComplex | None = None

    def __init__(self, clusters: Iterable[Iterable[int]], complex: RegionComplex | None = None):
        unique = []
        seen = set()
        for c in clusters:
            c = frozenset(c)
            if c not in seen:
                seen.add(c)
                unique.append(c)
        unique.sort(key=lambda c: (len(c), sorted(c)))
        if complex is not None:
            for c in unique:
                complex.check_ids(c)
        object.__setattr__(self, "clusters", tuple(unique))
        object.__setattr__(self, "complex", complex)

    def __iter__(self):
        return iter(self.clusters)

    def __len__(self):
        return len(self.clusters)

    def __contains__(self, cluster) -> bool:
        return frozenset(cluster) in set(self.clusters)

    def as_set(self) -> frozenset[frozenset[int]]:
        return frozenset(self.clusters)


@dataclass(frozen=True)
class BoxCluster:
    """Geometric cluster: union of half-open boxes ``(lower, upper)``."""

    boxes: tuple

    def __init__(self, boxes: Iterable[tuple[Sequence, Sequence]]):
        exact = tuple(
            (tuple(as_fraction(v) for v in lo), tuple(as_fraction(v) for v in hi)) for lo, hi in boxes
        )
        object.__setattr__(self, "boxes", exact)


def _as_ids(cluster, complex: RegionComplex) -> frozenset[int]:
    ids = frozenset(cluster)
    if not ids:
        raise PreconditionError("cluster must be nonempty")
    complex.check_ids(ids)
    return ids


def _a1_violation(ids: frozenset[int], complex: RegionComplex):
    start = min(ids)
    reached = {start}
    stack = [start]
    while stack:
        for j in complex.adjacent(stack.pop(), Adjacency.NEIGHBOR):
            if j in ids and j not in reached:
                reached.add(j)
                stack.append(j)
    if reached == ids:
        return None
    return (start, min(ids - reached))


def check_a1(cluster: Iterable[int], complex: RegionComplex) -> bool:
    """Whether the cluster is connected through neighboring regions."""
    return _a1_violation(_as_ids(cluster, complex), complex) is None


def _box_overlap(lo1, hi1, lo2, hi2) -> tuple | None:
    lo = tuple(max(a, b) for a, b in zip(lo1, lo2))
    hi = tuple(min(a, b) for a, b in zip(hi1, hi2))
    if all(l < h for l, h in zip(lo, hi)):
        return lo, hi
    return None


def _union_volume(boxes) -> Fraction:
    # Coordinate compression: exact for a handful of boxes.
    if not boxes:
        return Fraction(0)
    d = len(boxes[0][0])
    axes = [sorted({b[0][i] for b in boxes} | {b[1][i] for b in boxes}) for i in range(d)]

    def rec(i, active):
        if i == d:
            return Fraction(1) if active else Fraction(0)
        total = Fraction(0)
        for a, b in zip(axes[i], axes[i][1:]):
            inside = [bx for bx in active if bx[0][i] <= a and b <= bx[1][i]]
            if inside:
                total += (b - a) * rec(i + 1, inside)
        return total

    return rec(0, boxes)


def _a2_violation(cluster: BoxCluster, complex: RegionComplex):
    """Region that the geometric cluster meets but does not cover."""
    if complex.grid is None:
        raise GeometryMissingError("geometric clusters need a complex with geometry")
    cell_volume = complex.grid.exact_scale ** complex.grid.dim
    for region in complex.regions:
        covered = Fraction(0)
        for cell in region.cells:
            cb = complex.grid.cell_box(cell)
            pieces = [p for b in cluster.boxes if (p := _box_overlap(cb.lower, cb.upper, *b))]
            covered += _union_volume(pieces)
        if 0 < covered < cell_volume * len(region.cells):
            return region.id
    return None


def check_a2(cluster, complex: RegionComplex) -> bool:
    """Whether the cluster is a union of whole regions.

    A cluster given as region ids always is.  A geometric cluster, given as
    a list of half-open boxes ``(lower, upper)``, passes when every region
    it meets with positive volume is covered up to a null set.
    """
    if isinstance(cluster, BoxCluster):
        return _a2_violation(cluster, complex) is None
    _as_ids(cluster, complex)
    return True


def _a3_gap(ids: frozenset[int], complex: RegionComplex):
    inside = min(complex.level(i) for i in ids)
    outside = set()
    for i in ids:
        outside |= complex.adjacent(i, Adjacency.NEIGHBOR)
    outside -= ids
    if not outside:
        return inside, None, None
    top = max(outside, key=lambda j: (complex.level(j), -j))
    return inside, complex.level(top), top


def check_a3(cluster: Iterable[int], complex: RegionComplex) -> bool:
    """Strict density gap between the cluster and its outside neighbors.

    Vacuously true without outside neighbors.  Ties fail.
    """
    inside, outside, _ = _a3_gap(_as_ids(cluster, complex), complex)
    return outside is None or inside > outside


@dataclass(frozen=True)
class AxiomVerdict:
    cluster: tuple[int, ...]
    a1: bool
    a2: bool
    a3: bool
    a1_witness: tuple[int, int] | None = None
    a3_witness: int | None = None
    a3_tie: bool = False

    @property
    def ok(self) -> bool:
        return self.a1 and self.a2 and self.a3

    def to_dict(self) -> dict:
        return {
            "cluster": list(self.cluster),
            "A1": self.a1,
            "A2": self.a2,
            "A3": self.a3,
            "A1_witness": list(self.a1_witness) if self.a1_witness else None,
            "A3_witness": self.a3_witness,
            "A3_tie": self.a3_tie,
        }


def verify_cluster(cluster: Iterable[int], complex: RegionComplex) -> AxiomVerdict:
    """All three verdicts with witnesses.

    ``a1_witness`` is a pair of regions in the cluster not joined by a
    neighbor chain inside it; ``a3_witness`` the densest outside neighbor
    when A3 fails, with ``a3_tie`` set when the failure is an exact tie.
    """
    ids = _as_ids(cluster, complex)
    gap = _a1_violation(ids, complex)
    inside, outside, top = _a3_gap(ids, complex)
    a3 = outside is None or inside > outside
    return AxiomVerdict(
        cluster=tuple(sorted(ids)),
        a1=gap is None,
        a2=True,
        a3=a3,
        a1_witness=gap,
        a3_witness=None if a3 else top,
        a3_tie=(not a3) and inside == outside,
    )


def is_cluster_tree(clusters: Iterable[Iterable[int]]) -> bool:
    """Any two clusters are disjoint or nested."""
    cs = [frozenset(c) for c in clusters]
    for a in range(len(cs)):
        for b in range(a + 1, len(cs)):
            x, y = cs[a], cs[b]
            if x & y and not (x <= y or y <= x):
                return False
    return True


def is_finer(c1: Iterable[Iterable[int]], c2: Iterable[Iterable[int]]) -> bool:
    """Every cluster of ``c2`` is a cluster of ``c1``."""
    have = {frozenset(c) for c in c1}
    return all(frozenset(c) in have for c in c2)


def enumerate_axiom_clusters(complex: RegionComplex, cap: int = MAX_ENUMERATION_REGIONS) -> ClusterSet:
    """Every nonempty region subset satisfying A1 and A3 (A2 is implicit).

    Exponential in the number of regions; refuses more than ``cap``.
    """
    ids = complex.ids
    m = len(ids)
    if m > cap:
        raise EnumerationCapError(f"{m} regions exceeds the enumeration cap of {cap}")
    pos = {r: k for k, r in enumerate(ids)}
    levels = [complex.level(r) for r in ids]
    nbr = [0] * m
    for i, j in complex.neighbor_edges:
        nbr[pos[i]] |= 1 << pos[j]
        nbr[pos[j]] |= 1 << pos[i]

    found = []
    for mask in range(1, 1 << m):
        members = [k for k in range(m) if mask >> k & 1]
        # A1: flood fill inside the mask
        start = members[0]
        seen = 1 << start
        frontier = seen
        while frontier:
            k = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = nbr[k] & mask & ~seen
            seen |= new
            frontier |= new
        if seen != mask:
            continue
        # A3
        around = 0
        for k in members:
            around |= nbr[k]
        around &= ~mask
        low = min(levels[k] for k in members)
        if around:
            high = max(levels[k] for k in range(m) if around >> k & 1)
            if not low > high:
                continue
        found.append(frozenset(ids[k] for k in members))

    result = ClusterSet(found, complex)
    if not is_cluster_tree(result):
        raise InvariantError("axiom clusters are not nested")
    return result
