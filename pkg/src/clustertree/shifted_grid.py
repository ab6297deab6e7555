"""Shifted ("brick wall") lattice partition of R^d.

Cells are half-open axis-aligned cubes ``[a, a + 1)^d`` in lattice units,
scaled by ``ShiftedGrid.scale``.  Anchors are stacked layer by layer:
the layer with last coordinate ``k`` is a copy of the (d-1)-dimensional
partition translated by ``k * shift_vector(d - 1)``, where the shift vector
is ``(2^-(d-1), ..., 1/4, 1/2)``.  In one and two dimensions this is the
integer grid and the familiar brick wall.  In higher dimensions the dyadic
shift guarantees that two cells whose closures meet always share a piece of
a (d-1)-face with positive measure, which is exactly the internally
connected property.

All anchor arithmetic is done with :class:`fractions.Fraction`, so lattice
membership and boundary decisions are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

from .exceptions import InvalidAnchorError
from .numbers import as_fraction

__all__ = [
    "Box",
    "CellId",
    "ShiftedGrid",
    "is_lattice_anchor",
    "shift_vector",
]


class Box(NamedTuple):
    """Half-open box ``[lower, upper)`` (exact corners)."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    @property
    def diameter(self) -> float:
        return math.sqrt(sum(float(u - l) ** 2 for l, u in zip(self.lower, self.upper)))

    def contains(self, point: Sequence[float]) -> bool:
        return all(l <= as_fraction(p) < u for p, l, u in zip(point, self.lower, self.upper))


@dataclass(frozen=True, order=True)
class CellId:
    """Anchor of a cell in lattice units (before multiplying by the scale)."""

    anchor: tuple[Fraction, ...]

    def __init__(self, anchor):
        object.__setattr__(self, "anchor", tuple(as_fraction(a) for a in anchor))

    @property
    def dim(self) -> int:
        return len(self.anchor)

    def __repr__(self) -> str:
        coords = ", ".join(str(a) for a in self.anchor)
        trailing = "," if len(self.anchor) == 1 else ""
        return f"CellId(({coords}{trailing}))"


def shift_vector(dim: int) -> tuple[Fraction, ...]:
    """Offset applied to the ``dim``-dimensional layer when the next
    coordinate increases by one."""
    return tuple(Fraction(1, 2 ** (dim - i)) for i in range(dim))


def _offset(ks: Sequence[int], i: int, d: int) -> Fraction:
    return sum((Fraction(ks[j], 2 ** (j - i)) for j in range(i + 1, d)), Fraction(0))


def _layer_indices(coords: Sequence[Fraction]) -> tuple[int, ...] | None:
    # Peel layers from the last coordinate down; every index must be an integer.
    d = len(coords)
    ks = [0] * d
    for i in range(d - 1, -1, -1):
        k = coords[i] - _offset(ks, i, d)
        if k.denominator != 1:
            return None
        ks[i] = int(k)
    return tuple(ks)


def is_lattice_anchor(coords: Sequence, dim: int) -> bool:
    """Membership in the anchor lattice ``L_dim``.

    ``L_1`` is the integers.  For ``dim >= 2`` a point belongs to
    ``L_dim`` when its last coordinate ``k`` is an integer and the prefix,
    translated back by ``k * shift_vector(dim - 1)``, belongs to
    ``L_{dim-1}``.  Because twice the shift vector is a period of
    ``L_{dim-1}``, layers with even ``k`` reproduce ``L_{dim-1}`` exactly.

    >>> is_lattice_anchor((Fraction(1, 2), 1), 2)
    True
    >>> is_lattice_anchor((Fraction(1, 2), 0), 2)
    False
    """
    if len(coords) != dim:
        raise ValueError(f"expected {dim} coordinates, got {len(coords)}")
    if dim < 1:
        raise ValueError("dim must be at least 1")
    coords = tuple(as_fraction(c) for c in coords)
    last = coords[-1]
    if last.denominator != 1:
        return False
    if dim == 1:
        return True
    shift = shift_vector(dim - 1)
    prefix = tuple(c - last * s for c, s in zip(coords[:-1], shift))
    return is_lattice_anchor(prefix, dim - 1)


@dataclass(frozen=True)
class ShiftedGrid:
    """Shifted lattice partition of R^dim with cubes of side ``scale``.

    Each cell has diameter ``scale * sqrt(dim)``.  Use
    :meth:`with_diameter` to ask for a target diameter instead.
    """

    dim: int
    scale: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if not self.scale > 0 or not math.isfinite(self.scale):
            raise ValueError(f"scale must be positive and finite, got {self.scale!r}")
        object.__setattr__(self, "_exact_scale", as_fraction(self.scale))

    @classmethod
    def with_diameter(cls, diameter: float, dim: int) -> "ShiftedGrid":
        return cls(dim, diameter / math.sqrt(dim))

    @property
    def diameter(self) -> float:
        return self.scale * math.sqrt(self.dim)

    @property
    def exact_scale(self) -> Fraction:
        return self._exact_scale

    # -- lattice bookkeeping -------------------------------------------------

    def _check(self, cell: CellId) -> tuple[int, ...]:
        if cell.dim != self.dim:
            raise InvalidAnchorError(f"{cell!r} has dimension {cell.dim}, grid has {self.dim}")
        ks = _layer_indices(cell.anchor)
        if ks is None:
            raise InvalidAnchorError(f"{cell!r} is not a lattice anchor")
        return ks

    def is_valid(self, cell: CellId) -> bool:
        return cell.dim == self.dim and _layer_indices(cell.anchor) is not None

    def _anchor(self, ks: Sequence[int]) -> CellId:
        d = self.dim
        return CellId(tuple(ks[i] + _offset(ks, i, d) for i in range(d)))

    # -- queries -------------------------------------------------------------

    def cell_of(self, point: Sequence[float]) -> CellId:
        """Cell containing ``point`` under the half-open convention."""
        if len(point) != self.dim:
            raise ValueError(f"point has {len(point)} coordinates, grid has dim {self.dim}")
        q = [as_fraction(p) / self._exact_scale for p in point]
        d = self.dim
        ks = [0] * d
        for i in range(d - 1, -1, -1):
            ks[i] = math.floor(q[i] - _offset(ks, i, d))
        return self._anchor(ks)

    def cell_box(self, cell: CellId) -> Box:
        self._check(cell)
        r = self._exact_scale
        lower = tuple(a * r for a in cell.anchor)
        return Box(lower, tuple(l + r for l in lower))

    def cells_meeting(self, lower: Sequence, upper: Sequence) -> Iterator[CellId]:
        """Cells whose closed boxes meet the closed box ``[lower, upper]``.

        Corners are in world coordinates.  Cells are produced in
        lexicographic order of their layer indices (last coordinate slowest).
        """
        r = self._exact_scale
        lo = [as_fraction(v) / r for v in lower]
        hi = [as_fraction(v) / r for v in upper]
        d = self.dim
        ks = [0] * d

        def rec(i):
            off = _offset(ks, i, d)
            for k in range(math.ceil(lo[i] - 1 - off), math.floor(hi[i] - off) + 1):
                ks[i] = k
                if i == 0:
                    yield self._anchor(ks)
                else:
                    yield from rec(i - 1)

        yield from rec(d - 1)

    def contact_dimension(self, a: CellId, b: CellId) -> int | None:
        """Affine dimension of the intersection of the two closed cells.

        ``None`` when the closures are disjoint; ``dim`` for the same cell.
        """
        self._check(a)
        self._check(b)
        touching = 0
        for x, y in zip(a.anchor, b.anchor):
            gap = abs(x - y)
            if gap > 1:
                return None
            if gap == 1:
                touching += 1
        return self.dim - touching

    def touches(self, a: CellId, b: CellId) -> bool:
        return a != b and self.contact_dimension(a, b) is not None

    def are_neighbors(self, a: CellId, b: CellId) -> bool:
        # Boxes meeting along a (d-1)-dimensional piece necessarily overlap with
        # positive (d-1)-measure there: the other coordinates overlap openly.
        return a != b and self.contact_dimension(a, b) == self.dim - 1

    def cell_neighbors(self, cell: CellId) -> list[CellId]:
        """Cells sharing a piece of (d-1)-face with ``cell``, sorted."""
        box = self.cell_box(cell)
        found = [c for c in self.cells_meeting(box.lower, box.upper) if self.are_neighbors(cell, c)]
        return sorted(found)
