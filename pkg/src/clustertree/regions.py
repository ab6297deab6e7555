"""Piecewise-constant densities over region complexes.

A :class:`RegionComplex` is a finite collection of disjoint regions, each
carrying a strictly positive level, plus two symmetric adjacency relations:

``touch``
    the union of the two closures is connected;
``neighbor``
    the interior of the union of the two closures is connected.

Every neighboring pair touches.  Complexes built from shifted-grid cells
compute both relations from the geometry; abstract complexes take them
as given.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exceptions import GeometryMissingError, InvalidAnchorError, PreconditionError, SchemaError
from .numbers import as_level, decode_number, encode_number
from .shifted_grid import CellId, ShiftedGrid

__all__ = [
    "Adjacency",
    "ClassReport",
    "Region",
    "RegionComplex",
    "build_complex_abstract",
    "build_complex_from_cells",
    "classify",
    "complex_from_json",
    "export_complex",
    "region_at",
]

SCHEMA_VERSION = "v1"


class Adjacency(str, enum.Enum):
    TOUCH = "touch"
    NEIGHBOR = "neighbor"


Edge = tuple[int, int]


def _edge(i: int, j: int) -> Edge:
    if i == j:
        raise PreconditionError(f"self-loop on region {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Region:
    id: int
    level: Fraction
    cells: tuple[CellId, ...] = ()


class RegionComplex:
    """Immutable region complex.

    Parameters
    ----------
    regions : iterable of Region
        Distinct ids, positive levels.
    touch_edges, neighbor_edges : iterable of (int, int)
        Unordered pairs; ``neighbor_edges`` must be a subset of
        ``touch_edges``.
    grid : ShiftedGrid, optional
        Present when regions carry cells, enabling point queries.
    """

    def __init__(
        self,
        regions: Iterable[Region],
        touch_edges: Iterable[Sequence[int]] = (),
        neighbor_edges: Iterable[Sequence[int]] = (),
        grid: ShiftedGrid | None = None,
    ):
        regions = list(regions)
        by_id: dict[int, Region] = {}
        for r in regions:
            if r.id in by_id:
                raise PreconditionError(f"duplicate region id {r.id}")
            if r.level <= 0:
                raise PreconditionError(f"region {r.id} has nonpositive level {r.level}")
            by_id[r.id] = r
        self._regions = dict(sorted(by_id.items()))
        self._touch = frozenset(_edge(*e) for e in touch_edges)
        self._neighbor = frozenset(_edge(*e) for e in neighbor_edges)
        for i, j in self._touch | self._neighbor:
            if i not in self._regions or j not in self._regions:
                raise PreconditionError(f"edge ({i}, {j}) references an unknown region")
        missing = self._neighbor - self._touch
        if missing:
            raise PreconditionError(
                f"neighbor edge {min(missing)} has no matching touch edge"
            )
        self.grid = grid
        self._cell_index: dict[CellId, int] = {}
        if grid is not None:
            for r in self._regions.values():
                for c in r.cells:
                    if c in self._cell_index:
                        raise PreconditionError(f"cell {c!r} assigned to two regions")
                    self._cell_index[c] = r.id
        self._adj = {
            mode: self._build_adjacency(edges)
            for mode, edges in ((Adjacency.TOUCH, self._touch), (Adjacency.NEIGHBOR, self._neighbor))
        }

    def _build_adjacency(self, edges):
        adj: dict[int, set[int]] = {i: set() for i in self._regions}
        for i, j in edges:
            adj[i].add(j)
            adj[j].add(i)
        return {i: frozenset(s) for i, s in adj.items()}

    # -- accessors -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._regions)

    def __contains__(self, region_id) -> bool:
        return region_id in self._regions

    def __repr__(self) -> str:
        return (
            f"RegionComplex({len(self)} regions, {len(self._touch)} touch, "
            f"{len(self._neighbor)} neighbor edges)"
        )

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(self._regions)

    @property
    def regions(self) -> tuple[Region, ...]:
        return tuple(self._regions.values())

    @property
    def levels(self) -> dict[int, Fraction]:
        return {i: r.level for i, r in self._regions.items()}

    def level(self, region_id: int) -> Fraction:
        return self._regions[region_id].level

    def region(self, region_id: int) -> Region:
        return self._regions[region_id]

    @property
    def touch_edges(self) -> frozenset[Edge]:
        return self._touch

    @property
    def neighbor_edges(self) -> frozenset[Edge]:
        return self._neighbor

    @property
    def has_geometry(self) -> bool:
        return self.grid is not None

    def edges(self, adjacency) -> frozenset[Edge]:
        return self._touch if Adjacency(adjacency) is Adjacency.TOUCH else self._neighbor

    def adjacent(self, region_id: int, adjacency) -> frozenset[int]:
        return self._adj[Adjacency(adjacency)][region_id]

    def check_ids(self, ids: Iterable[int]) -> None:
        for i in ids:
            if i not in self._regions:
                raise KeyError(f"unknown region id {i!r}")

    # -- derived complexes ---------------------------------------------------

    def with_levels(self, levels: Mapping[int, object]) -> "RegionComplex":
        """Same regions and adjacency, new levels."""
        regions = [Region(r.id, as_level(levels[r.id]), r.cells) for r in self._regions.values()]
        return RegionComplex(regions, self._touch, self._neighbor, self.grid)

    def scaled(self, factor) -> "RegionComplex":
        factor = as_level(factor)
        return self.with_levels({i: r.level * factor for i, r in self._regions.items()})

    def subcomplex(self, ids: Iterable[int]) -> "RegionComplex":
        keep = set(ids)
        self.check_ids(keep)
        return RegionComplex(
            [r for i, r in self._regions.items() if i in keep],
            [e for e in self._touch if e[0] in keep and e[1] in keep],
            [e for e in self._neighbor if e[0] in keep and e[1] in keep],
            self.grid,
        )

    def components(self, adjacency) -> list[frozenset[int]]:
        """Connected components of the adjacency graph, ordered by min id."""
        adj = self._adj[Adjacency(adjacency)]
        seen: set[int] = set()
        out = []
        for start in self._regions:
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in comp:
                        comp.add(j)
                        stack.append(j)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def region_of_cell(self, cell: CellId) -> int | None:
        return self._cell_index.get(cell)


def build_complex_from_cells(
    cells: Iterable[tuple[CellId | Sequence, object]], grid: ShiftedGrid
) -> RegionComplex:
    """One region per grid cell; ids follow input order starting at 0.

    ``touch`` pairs are cells with intersecting closures, ``neighbor`` pairs
    those sharing a piece of (d-1)-face.
    """
    regions = []
    index: dict[CellId, int] = {}
    for rid, (cell, level) in enumerate(cells):
        cell = cell if isinstance(cell, CellId) else CellId(cell)
        if not grid.is_valid(cell):
            raise InvalidAnchorError(f"{cell!r} is not a lattice anchor of the grid")
        if cell in index:
            raise PreconditionError(f"duplicate cell {cell!r}")
        try:
            lvl = as_level(level)
        except ValueError as exc:
            raise PreconditionError(str(exc)) from None
        index[cell] = rid
        regions.append(Region(rid, lvl, (cell,)))

    touch, neighbor = set(), set()
    for cell, rid in index.items():
        box = grid.cell_box(cell)
        for other in grid.cells_meeting(box.lower, box.upper):
            oid = index.get(other)
            if oid is None or oid <= rid:
                continue
            dim = grid.contact_dimension(cell, other)
            if dim is not None:
                touch.add((rid, oid))
                if dim == grid.dim - 1:
                    neighbor.add((rid, oid))
    return RegionComplex(regions, touch, neighbor, grid)


def build_complex_abstract(
    regions: Iterable, touch_edges: Iterable = (), neighbor_edges: Iterable = ()
) -> RegionComplex:
    """Complex without geometry.

    ``regions`` holds ``(id, level)`` pairs, ``{"id":…, "level":…}`` dicts or
    :class:`Region` objects.  The caller asserts that each region and the
    support have connected interior; only the combinatorics are checked.
    """
    parsed = []
    for r in regions:
        if isinstance(r, Region):
            parsed.append(r)
            continue
        rid, level = (r["id"], r["level"]) if isinstance(r, Mapping) else r
        try:
            parsed.append(Region(int(rid), as_level(level)))
        except ValueError as exc:
            raise PreconditionError(str(exc)) from None
    return RegionComplex(parsed, touch_edges, neighbor_edges)


@dataclass(frozen=True)
class ClassReport:
    """Membership of a complex's density in F and F_int.

    ``witness`` is a touching pair that is not neighboring when the
    internally connected property fails, or the first two neighbor-graph
    components (as sorted id tuples) when the support is disconnected.
    """

    in_F: bool
    in_F_int: bool
    witness: tuple | None = None
    reason: str = field(default="")


def classify(complex: RegionComplex) -> ClassReport:
    if len(complex) == 0:
        # The empty set counts as disconnected.
        return ClassReport(False, False, None, "empty support")
    comps = complex.components(Adjacency.NEIGHBOR)
    if len(comps) > 1:
        witness = tuple(tuple(sorted(c)) for c in comps[:2])
        return ClassReport(False, False, witness, "neighbor graph is disconnected")
    gap = sorted(complex.touch_edges - complex.neighbor_edges)
    if gap:
        return ClassReport(True, False, gap[0], "touching pair is not neighboring")
    return ClassReport(True, True)


def region_at(point: Sequence[float], complex: RegionComplex) -> int | None:
    """Region whose cells contain ``point``; ``None`` where the density is 0."""
    if complex.grid is None:
        raise GeometryMissingError("complex has no geometry")
    return complex.region_of_cell(complex.grid.cell_of(point))


# -- serialization ------------------------------------------------------------------


def export_complex(complex: RegionComplex) -> str:
    """JSON text of a complex.

    Complexes built cell by cell (one cell per region, ids ``0..n-1``)
    use the cell form ``{"dim", "scale", "cells": [{"anchor", "level"}]}``;
    anything else uses the abstract form with explicit edge lists.
    """
    rows = []
    one_cell = complex.grid is not None and all(
        len(r.cells) == 1 and r.id == k for k, r in enumerate(complex.regions)
    )
    if one_cell:
        grid = complex.grid
        head = {"schema": SCHEMA_VERSION, "dim": grid.dim, "scale": encode_number(grid.exact_scale)}
        for r in complex.regions:
            anchor = [encode_number(a) for a in r.cells[0].anchor]
            rows.append(json.dumps({"anchor": anchor, "level": encode_number(r.level)}))
        key = "cells"
    else:
        head = {"schema": SCHEMA_VERSION}
        for r in complex.regions:
            rows.append(json.dumps({"id": r.id, "level": encode_number(r.level)}))
        key = "regions"
    text = json.dumps(head)[:-1] + f', "{key}": [\n  ' + ",\n  ".join(rows) + "\n]"
    if not one_cell:
        for name, edges in (("touch", complex.touch_edges), ("neighbor", complex.neighbor_edges)):
            text += f', "{name}": {json.dumps(sorted(list(e) for e in edges))}'
    return text + "}\n"


def complex_from_json(text_or_obj) -> RegionComplex:
    """Parse either JSON form of a complex; raises :class:`SchemaError`."""
    try:
        doc = json.loads(text_or_obj) if isinstance(text_or_obj, (str, bytes)) else text_or_obj
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise SchemaError("expected a JSON object")
    if doc.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('schema')!r}")
    try:
        if "cells" in doc:
            dim, scale = doc["dim"], decode_number(doc["scale"])
            if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
                raise SchemaError("dim must be a positive integer")
            if scale <= 0:
                raise SchemaError("scale must be positive")
            cells = []
            for c in doc["cells"]:
                anchor = [decode_number(a) for a in c["anchor"]]
                if len(anchor) != dim:
                    raise SchemaError(f"anchor {c['anchor']} does not have {dim} coordinates")
                cells.append((CellId(anchor), decode_number(c["level"])))
            return build_complex_from_cells(cells, ShiftedGrid(dim, scale))
        if "regions" in doc:
            regions = [(int(r["id"]), decode_number(r["level"])) for r in doc["regions"]]
            touch = [tuple(int(v) for v in e) for e in doc.get("touch", [])]
            neighbor = [tuple(int(v) for v in e) for e in doc.get("neighbor", [])]
            if any(len(e) != 2 for e in touch + neighbor):
                raise SchemaError("edges must be pairs")
            return build_complex_abstract(regions, touch, neighbor)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed complex document: missing or bad field {exc}") from None
    except ValueError as exc:
        if isinstance(exc, (SchemaError, PreconditionError)):
            raise
        raise SchemaError(f"malformed complex document: {exc}") from None
    raise SchemaError("complex document needs 'cells' or 'regions'")
