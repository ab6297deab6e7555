"""Small worked examples used by the tests, the demos and ``clustertree fixtures``."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from ._files import atomic_write_text
from .discretizer import DensitySpec
from .level_tree import Dendrogram, export_tree
from .regions import RegionComplex, build_complex_abstract, build_complex_from_cells, export_complex
from .shifted_grid import ShiftedGrid

__all__ = [
    "bimodal_1d",
    "bimodal_2d",
    "example1_complex",
    "example1_trees",
    "example2_trees",
    "fig_hartigan",
    "write_fixtures",
]


def fig_hartigan() -> RegionComplex:
    """Three regions where the two densest touch only at a corner.

    ``A1`` (level 3) and ``A2`` (level 2) touch but are not neighbors;
    both are neighbors of ``A3`` (level 1).  Region ids are 1, 2, 3.
    """
    return build_complex_abstract(
        [(1, 3), (2, 2), (3, 1)],
        touch_edges=[(1, 2), (1, 3), (2, 3)],
        neighbor_edges=[(1, 3), (2, 3)],
    )


def example1_complex() -> RegionComplex:
    """Unit cells at -1, 0, 1 on the line with levels 1/2, 1/3, 1/6 (ids 0, 1, 2)."""
    grid = ShiftedGrid(1, 1)
    levels = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))
    return build_complex_from_cells([((-1,), levels[0]), ((0,), levels[1]), ((1,), levels[2])], grid)


def example1_trees() -> tuple[Dendrogram, Dendrogram]:
    """``C = {A1, A1+A2, A1+A2+A3}`` and ``C'``, which adds ``A2`` on its own.

    Heights are cluster infima, so ``A2`` and ``A1+A2`` share height 1/3
    and the extra node leaves every merge height unchanged.
    """
    cx = example1_complex()
    c = Dendrogram.from_clusters([{0}, {0, 1}, {0, 1, 2}], complex=cx)
    c_prime = Dendrogram.from_clusters([{0}, {1}, {0, 1}, {0, 1, 2}], complex=cx)
    return c, c_prime


def example2_trees() -> tuple[RegionComplex, Dendrogram, Dendrogram]:
    """Constant density on four unit cells; a flat tree and a nested one.

    Every cluster has height 1, so all merge heights inside the support
    are 1 for both trees.
    """
    grid = ShiftedGrid(1, 1)
    cx = build_complex_from_cells([((k,), 1) for k in range(4)], grid)
    flat = Dendrogram.from_clusters([{0, 1, 2, 3}], complex=cx)
    nested = Dendrogram.from_clusters([{0}, {0, 1}, {2}, {0, 1, 2, 3}], complex=cx)
    return cx, flat, nested


def bimodal_1d() -> DensitySpec:
    """``0.6 N(-2, 1) + 0.4 N(2, 1)``."""
    return DensitySpec.gaussian_mixture([0.6, 0.4], [[-2.0], [2.0]], [1.0, 1.0])


def bimodal_2d() -> DensitySpec:
    """Two equal isotropic Gaussians at ``(+-2, 0)``; saddle at the origin."""
    return DensitySpec.gaussian_mixture([0.5, 0.5], [[-2.0, 0.0], [2.0, 0.0]], [1.0, 1.0])


def write_fixtures(directory) -> list[Path]:
    """Materialize the fixtures as JSON files; returns the paths written."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    c, c_prime = example1_trees()
    files = {
        "fig_hartigan.json": export_complex(fig_hartigan()),
        "exampleA1_complex.json": export_complex(example1_complex()),
        "exampleA1_C.json": export_tree(c),
        "exampleA1_Cprime.json": export_tree(c_prime),
        "bimodal_split.json": json.dumps(bimodal_1d().to_json()) + "\n",
        "bimodal_2d.json": json.dumps(bimodal_2d().to_json()) + "\n",
    }
    written = []
    for name, text in files.items():
        written.append(atomic_write_text(out / name, text))
    return written
