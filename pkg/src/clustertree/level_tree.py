"""Dendrograms built by descending level sweeps.

The sweep adds regions in decreasing order of level (equal levels as one
batch), merging adjacent active regions with a disjoint-set structure.
Every component that changes during a batch is emitted as a cluster whose
height is the batch level; a component that persists unchanged is not
re-emitted.  On the touch graph this yields the Hartigan tree, on the
neighbor graph the finest tree satisfying the axioms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from typing import Iterable, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .exceptions import (
    DisconnectedSupportError,
    EmptyComplexError,
    NotInClassError,
    PreconditionError,
    SchemaError,
)
from .numbers import as_fraction, decode_number, encode_number
from .regions import Adjacency, RegionComplex, classify

__all__ = [
    "Dendrogram",
    "Forest",
    "axiom_forest",
    "axiom_tree",
    "export_forest",
    "export_tree",
    "forest_from_json",
    "hartigan_forest",
    "hartigan_tree",
    "sweep_forest",
    "sweep_tree",
    "tree_from_json",
]

SCHEMA_VERSION = "v1"


class Dendrogram:
    """Cluster tree over region ids with a non-increasing height function.

    Clusters are stored implicitly: node ``k`` owns the regions whose
    smallest enclosing cluster is ``k``, and its cluster is the union of
    what it and its descendants own.  This keeps long chains (the usual
    output of a sweep) linear in size.

    Nodes are ordered by decreasing height, then smallest region id, then
    size, so equal trees have identical node numbering.
    """

    def __init__(self, parent, height, own, complex: RegionComplex | None = None):
        self.parent: tuple[int | None, ...] = tuple(parent)
        self.height: tuple[Fraction, ...] = tuple(as_fraction(h) for h in height)
        self.own: tuple[frozenset[int], ...] = tuple(frozenset(o) for o in own)
        self.complex = complex
        n = len(self.parent)
        if not (len(self.height) == len(self.own) == n):
            raise ValueError("parent, height and own must have equal length")
        children: list[list[int]] = [[] for _ in range(n)]
        for k, p in enumerate(self.parent):
            if p is not None:
                children[p].append(k)
        self.children: tuple[tuple[int, ...], ...] = tuple(tuple(c) for c in children)
        self.roots: tuple[int, ...] = tuple(k for k, p in enumerate(self.parent) if p is None)
        self.leaf: dict[int, int] = {}
        for k, regs in enumerate(self.own):
            for r in regs:
                if r in self.leaf:
                    raise ValueError(f"region {r} owned by two nodes")
                self.leaf[r] = k
        self._cluster_cache: dict[int, frozenset[int]] = {}
        self._validate()

    def _validate(self):
        for k, p in enumerate(self.parent):
            if p is not None and self.height[p] > self.height[k]:
                raise ValueError(
                    f"height increases from node {k} ({self.height[k]}) to parent {p} "
                    f"({self.height[p]})"
                )
        # acyclic: every node reaches a root
        state = [0] * len(self.parent)
        for k in range(len(self.parent)):
            path = []
            while k is not None and state[k] == 0:
                state[k] = 1
                path.append(k)
                k = self.parent[k]
            if k is not None and state[k] == 1:
                raise ValueError("parent links contain a cycle")
            for q in path:
                state[q] = 2

    # -- construction --------------------------------------------------------

    @classmethod
    def from_clusters(
        cls,
        clusters: Iterable[Iterable[int]],
        heights: Sequence | None = None,
        complex: RegionComplex | None = None,
    ) -> "Dendrogram":
        """Build from an explicit laminar family.

        Without ``heights``, each cluster gets the minimum level of its
        regions, which requires ``complex``.
        """
        clusters = [frozenset(c) for c in clusters]
        if any(not c for c in clusters):
            raise ValueError("clusters must be nonempty")
        if len(set(clusters)) != len(clusters):
            raise ValueError("duplicate cluster")
        if heights is None:
            if complex is None:
                raise ValueError("heights or complex required")
            for c in clusters:
                complex.check_ids(c)
            heights = [min(complex.level(i) for i in c) for c in clusters]
        heights = [as_fraction(h) for h in heights]
        if len(heights) != len(clusters):
            raise ValueError("one height per cluster required")
        order = sorted(
            range(len(clusters)),
            key=lambda k: (-heights[k], min(clusters[k]), len(clusters[k]), sorted(clusters[k])),
        )
        clusters = [clusters[k] for k in order]
        heights = [heights[k] for k in order]
        n = len(clusters)
        parent: list[int | None] = [None] * n
        by_size = sorted(range(n), key=lambda k: len(clusters[k]))
        for a_pos, a in enumerate(by_size):
            for b in by_size[a_pos + 1:]:
                ca, cb = clusters[a], clusters[b]
                if ca & cb:
                    if not ca < cb:
                        raise ValueError(
                            f"clusters {sorted(ca)} and {sorted(cb)} overlap without nesting"
                        )
                    parent[a] = b
                    break
        own = [set(c) for c in clusters]
        for k, p in enumerate(parent):
            if p is not None:
                own[p] -= clusters[k]
        return cls(parent, heights, own, complex)

    # -- structure -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.parent)

    def cluster(self, node: int) -> frozenset[int]:
        cached = self._cluster_cache.get(node)
        if cached is not None:
            return cached
        out = set()
        stack = [node]
        while stack:
            k = stack.pop()
            out |= self.own[k]
            stack.extend(self.children[k])
        result = frozenset(out)
        self._cluster_cache[node] = result
        return result

    def clusters(self) -> list[frozenset[int]]:
        return [self.cluster(k) for k in range(len(self))]

    def cluster_set(self) -> frozenset[frozenset[int]]:
        return frozenset(self.clusters())

    def cluster_heights(self) -> dict[frozenset[int], Fraction]:
        return {self.cluster(k): self.height[k] for k in range(len(self))}

    @property
    def regions(self) -> frozenset[int]:
        return frozenset(self.leaf)

    def ancestors(self, node: int):
        """``node`` followed by its ancestors up to the root."""
        while node is not None:
            yield node
            node = self.parent[node]

    def _key(self):
        return tuple(
            (tuple(sorted(self.cluster(k))), self.height[k], self.parent[k]) for k in range(len(self))
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dendrogram):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self) -> str:
        return f"Dendrogram({len(self)} nodes, {len(self.roots)} root(s))"


@dataclass(frozen=True)
class Forest:
    """One dendrogram per connected component of the support."""

    trees: tuple[Dendrogram, ...]
    labels: dict  # region id -> tree index
    complex: RegionComplex | None = None

    def __len__(self) -> int:
        return len(self.trees)

    def cluster_set(self) -> frozenset[frozenset[int]]:
        return frozenset().union(*(t.cluster_set() for t in self.trees))

    @property
    def regions(self) -> frozenset[int]:
        return frozenset(self.labels)


def _sweep(complex: RegionComplex, adjacency) -> Dendrogram:
    if len(complex) == 0:
        raise EmptyComplexError("cannot sweep an empty complex")
    adjacency = Adjacency(adjacency)
    ds = DisjointSet()
    top: dict[int, int] = {}  # current root -> latest node of that component
    parent: list[int | None] = []
    height: list[Fraction] = []
    own: list[list[int]] = []
    min_id: list[int] = []

    ordered = sorted(complex.ids, key=lambda i: (-complex.level(i), i))
    for level, batch in groupby(ordered, key=complex.level):
        batch = list(batch)
        for i in batch:
            ds.add(i)
        # components touched by the batch, recorded before any merge
        old_roots = set()
        for i in batch:
            for j in complex.adjacent(i, adjacency):
                if j in ds and ds[j] in top:
                    old_roots.add(ds[j])
        for i in batch:
            for j in complex.adjacent(i, adjacency):
                if j in ds:
                    ds.merge(i, j)
        groups: dict[int, list[int]] = {}
        for i in batch:
            groups.setdefault(ds[i], []).append(i)
        merged: dict[int, list[int]] = {}
        for r in old_roots:
            merged.setdefault(ds[r], []).append(top.pop(r))
        emitted = []
        for root, members in groups.items():
            kids = merged.get(root, [])
            lowest = min(members + [min_id[c] for c in kids])
            emitted.append((lowest, root, members, kids))
        for lowest, root, members, kids in sorted(emitted):
            node = len(parent)
            parent.append(None)
            height.append(level)
            own.append(sorted(members))
            min_id.append(lowest)
            for c in kids:
                parent[c] = node
            top[root] = node
    return Dendrogram(parent, height, own, complex)


def sweep_tree(complex: RegionComplex, adjacency="touch") -> Dendrogram:
    """Level-sweep dendrogram of a complex whose adjacency graph is connected.

    Raises :class:`DisconnectedSupportError` otherwise; use
    :func:`sweep_forest` for disconnected supports.
    """
    tree = _sweep(complex, adjacency)
    if len(tree.roots) != 1:
        raise DisconnectedSupportError(
            f"{Adjacency(adjacency).value} graph has {len(tree.roots)} components; "
            "use sweep_forest"
        )
    return tree


def sweep_forest(complex: RegionComplex, adjacency="touch") -> Forest:
    if len(complex) == 0:
        raise EmptyComplexError("cannot sweep an empty complex")
    trees, labels = [], {}
    for k, comp in enumerate(complex.components(adjacency)):
        trees.append(sweep_tree(complex.subcomplex(comp), adjacency))
        labels.update(dict.fromkeys(comp, k))
    return Forest(tuple(trees), labels, complex)


def hartigan_tree(complex: RegionComplex) -> Dendrogram:
    return sweep_tree(complex, Adjacency.TOUCH)


def hartigan_forest(complex: RegionComplex) -> Forest:
    return sweep_forest(complex, Adjacency.TOUCH)


def axiom_tree(complex: RegionComplex) -> Dendrogram:
    """Finest cluster tree satisfying the three axioms.

    Requires the density to be in F (neighbor-connected support).  The
    neighbor-graph sweep emits exactly the clusters that are
    neighbor-connected and strictly denser than all outside neighbors;
    the test-suite checks this against brute-force enumeration.
    """
    report = classify(complex)
    if not report.in_F:
        raise NotInClassError(f"density is not in F: {report.reason}")
    return sweep_tree(complex, Adjacency.NEIGHBOR)


def axiom_forest(complex: RegionComplex) -> Forest:
    """Union of the finest axiom trees of the neighbor-connected components."""
    return sweep_forest(complex, Adjacency.NEIGHBOR)


# -- serialization -----------------------------------------------------------


def _tree_obj(tree: Dendrogram) -> dict:
    return {
        "nodes": [
            {
                "id": k,
                "regions": sorted(tree.cluster(k)),
                "height": encode_number(tree.height[k]),
                "parent": tree.parent[k],
            }
            for k in range(len(tree))
        ]
    }


def _dot(trees: Sequence[Dendrogram]) -> str:
    lines = ["digraph cluster_tree {", "  node [shape=box];"]
    for t, tree in enumerate(trees):
        prefix = f"t{t}_" if len(trees) > 1 else "n"
        for k in range(len(tree)):
            regs = ",".join(str(r) for r in sorted(tree.cluster(k)))
            lines.append(f'  {prefix}{k} [label="{{{regs}}}\\nh={tree.height[k]}"];')
        for k in range(len(tree)):
            p = tree.parent[k]
            if p is not None:
                lines.append(f'  {prefix}{p} -> {prefix}{k} [label="{tree.height[k]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dump_nodes(nodes, indent) -> str:
    pad = " " * indent
    body = ",\n".join(pad + json.dumps(n) for n in nodes)
    return "[\n" + body + "\n" + pad[:-2] + "]"


def export_tree(tree: Dendrogram, format: str = "json") -> str:
    """Deterministic text form of a tree: ``json`` or ``dot``.

    JSON output puts one node per line.
    """
    if format == "json":
        nodes = _tree_obj(tree)["nodes"]
        return f'{{"schema": "{SCHEMA_VERSION}", "nodes": {_dump_nodes(nodes, 2)}}}\n'
    if format == "dot":
        return _dot([tree])
    raise ValueError(f"unknown format {format!r}")


def export_forest(forest: Forest, format: str = "json") -> str:
    if format == "json":
        trees = ",\n".join(
            f'  {{"nodes": {_dump_nodes(_tree_obj(t)["nodes"], 4)}}}' for t in forest.trees
        )
        return f'{{"schema": "{SCHEMA_VERSION}", "trees": [\n{trees}\n]}}\n'
    if format == "dot":
        return _dot(forest.trees)
    raise ValueError(f"unknown format {format!r}")


def _parse_tree_obj(obj, complex) -> Dendrogram:
    try:
        nodes = obj["nodes"]
        ids = [n["id"] for n in nodes]
        if sorted(ids) != list(range(len(nodes))):
            raise SchemaError("node ids must be 0..n-1")
        nodes = sorted(nodes, key=lambda n: n["id"])
        clusters = [frozenset(int(r) for r in n["regions"]) for n in nodes]
        heights = [decode_number(n["height"]) for n in nodes]
        parents = [n["parent"] for n in nodes]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed tree document: {exc}") from None
    try:
        tree = Dendrogram.from_clusters(clusters, heights, complex)
    except ValueError as exc:
        raise PreconditionError(f"not a dendrogram: {exc}") from None
    # stored parent links must agree with containment
    position = {c: k for k, c in enumerate(tree.clusters())}
    for c, p in zip(clusters, parents):
        want = None if p is None else position[clusters[p]]
        if tree.parent[position[c]] != want:
            raise SchemaError("parent links disagree with cluster containment")
    return tree


def _load(text_or_obj):
    try:
        doc = json.loads(text_or_obj) if isinstance(text_or_obj, (str, bytes)) else text_or_obj
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("expected a JSON object")
    if doc.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('schema')!r}")
    return doc


def tree_from_json(text, complex: RegionComplex | None = None) -> Dendrogram:
    return _parse_tree_obj(_load(text), complex)


def forest_from_json(text, complex: RegionComplex | None = None) -> Forest:
    doc = _load(text)
    if "trees" not in doc:
        raise SchemaError("forest document needs a 'trees' array")
    trees = tuple(_parse_tree_obj(t, complex) for t in doc["trees"])
    labels = {}
    for k, t in enumerate(trees):
        for r in t.regions:
            if r in labels:
                raise SchemaError(f"region {r} appears in two trees")
            labels[r] = k
    return Forest(trees, labels, complex)
