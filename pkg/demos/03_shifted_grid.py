"""
The shifted grid
================

Cells of the shifted lattice only ever meet along pieces of full faces,
so neighboring and touching coincide for any union of cells.
"""

import numpy as np

from clustertree import CellId, ShiftedGrid
from clustertree.shifted_grid import shift_vector

for d in (1, 2, 3, 4):
    g = ShiftedGrid(d, 1.0)
    origin = CellId((0,) * d)
    print(d, "shift", [str(s) for s in shift_vector(d - 1)] if d > 1 else "-",
          "face neighbors of the origin cell:", len(g.cell_neighbors(origin)))

# Brick wall in the plane.
g = ShiftedGrid(2, 1.0)
print(g.cell_neighbors(CellId((0, 0))))

# Point location is exact, boundaries follow the half-open convention.
for p in [(0.3, 0.7), (0.3, 1.2), (0.0, 1.0)]:
    print(p, "->", g.cell_of(p))

# Every touching pair really shares a face: count contact dimensions.
rng = np.random.default_rng(0)
g = ShiftedGrid(3, 0.5)
dims = {}
for p in rng.uniform(-2, 2, size=(200, 3)):
    cell = g.cell_of(p)
    box = g.cell_box(cell)
    for other in g.cells_meeting(box.lower, box.upper):
        if other != cell:
            k = g.contact_dimension(cell, other)
            dims[k] = dims.get(k, 0) + 1
print("contact dimensions seen in d=3:", dims)
