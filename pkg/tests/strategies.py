"""Random complexes and dendrograms for property tests.

Levels are drawn from a handful of small integers so that ties (the hard
case for the sweep and for A3) are common.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from clustertree import Dendrogram, ShiftedGrid, build_complex_abstract, build_complex_from_cells
from clustertree.shifted_grid import CellId


def random_complex(rng, n_max=10, *, connected=True, f_int=False, level_max=4, n_min=1):
    """Abstract complex with random levels, touch graph and neighbor subgraph.

    With ``connected`` the neighbor graph contains a random spanning tree.
    With ``f_int`` every touching pair is also neighboring.
    """
    n = int(rng.integers(n_min, n_max + 1))
    levels = [Fraction(int(rng.integers(1, level_max + 1)), int(rng.integers(1, 3))) for _ in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    neighbor = set()
    if connected:
        order = rng.permutation(n)
        for k in range(1, n):
            a, b = int(order[k]), int(order[rng.integers(0, k)])
            neighbor.add((min(a, b), max(a, b)))
    density = rng.uniform(0, 0.5)
    for p in pairs:
        if rng.random() < density:
            neighbor.add(p)
    touch = set(neighbor)
    if not f_int:
        for p in pairs:
            if p not in touch and rng.random() < density:
                touch.add(p)
    return build_complex_abstract(list(enumerate(levels)), touch, neighbor)


def random_blob(rng, dim, n_max=12, level_max=4, scale=1):
    """Neighbor-connected set of shifted-grid cells grown from the origin."""
    grid = ShiftedGrid(dim, scale)
    n = int(rng.integers(1, n_max + 1))
    cells = [CellId((0,) * dim)]
    seen = set(cells)
    while len(cells) < n:
        base = cells[int(rng.integers(0, len(cells)))]
        options = [c for c in grid.cell_neighbors(base) if c not in seen]
        if not options:
            continue
        c = options[int(rng.integers(0, len(options)))]
        seen.add(c)
        cells.append(c)
    levels = [Fraction(int(rng.integers(1, level_max + 1))) for _ in cells]
    return build_complex_from_cells(list(zip(cells, levels)), grid)


def random_laminar(rng, ids, keep=0.6):
    """Random nested family over ``ids`` (always contains the whole set)."""
    out = []

    def split(block):
        out.append(frozenset(block))
        if len(block) == 1:
            return
        k = int(rng.integers(1, min(3, len(block) - 1) + 1)) + 1
        labels = rng.integers(0, k, size=len(block))
        for lab in range(k):
            part = [b for b, l in zip(block, labels) if l == lab]
            if part and len(part) < len(block) and rng.random() < keep:
                split(part)

    split(list(ids))
    return out


def random_dendrogram(rng, complex):
    return Dendrogram.from_clusters(random_laminar(rng, complex.ids), complex=complex)


# -- hypothesis wrappers ------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def complexes(draw, n_max=8, connected=True, f_int=False):
    return random_complex(np.random.default_rng(draw(seeds)), n_max, connected=connected, f_int=f_int)


@st.composite
def blobs(draw, dims=(1, 2, 3), n_max=10):
    dim = draw(st.sampled_from(dims))
    return random_blob(np.random.default_rng(draw(seeds)), dim, n_max)
