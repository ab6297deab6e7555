import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clustertree import CellId, ShiftedGrid
from clustertree.exceptions import InvalidAnchorError
from clustertree.shifted_grid import is_lattice_anchor, shift_vector

H = Fraction(1, 2)


@pytest.mark.parametrize(
    "coords, expected",
    [((0, 0), True), ((0.5, 1), True), ((0.5, 0), False), ((1.5, -1), True), ((0, 1), False)],
)
def test_lattice_membership_2d(coords, expected):
    assert is_lattice_anchor(coords, 2) is expected


def test_one_and_two_dims_are_the_familiar_grids():
    assert shift_vector(1) == (H,)
    assert all(is_lattice_anchor((k,), 1) for k in range(-3, 4))
    assert not is_lattice_anchor((H,), 1)
    # even rows are integer, odd rows are offset by one half
    for x, y in product(range(-2, 3), range(-2, 3)):
        assert is_lattice_anchor((x + (H if y % 2 else 0), y), 2)


def test_shift_vector_is_dyadic():
    assert shift_vector(3) == (Fraction(1, 8), Fraction(1, 4), H)


def test_cell_of_examples():
    g = ShiftedGrid(2, 1)
    assert g.cell_of((0.3, 0.7)) == CellId((0, 0))
    assert g.cell_of((0.3, 1.2)) == CellId((-0.5, 1))
    assert g.cell_of((0.7, 1.2)) == CellId((0.5, 1))
    # boundary point goes to the box with that corner as lower-left
    assert g.cell_of((0.0, 1.0)) == CellId((-0.5, 1))
    assert g.cell_of((0.5, 1.0)) == CellId((0.5, 1))


def test_cell_box_examples():
    assert ShiftedGrid(2, 1).cell_box(CellId((0, 0))) == ((0, 0), (1, 1))
    assert ShiftedGrid(2, 2).cell_box(CellId((0.5, 1))) == ((1, 2), (3, 4))
    with pytest.raises(InvalidAnchorError):
        ShiftedGrid(2, 1).cell_box(CellId((0.5, 0)))
    with pytest.raises(InvalidAnchorError):
        ShiftedGrid(2, 1).cell_box(CellId((0,)))


def test_neighbors_low_dims():
    assert ShiftedGrid(1, 1).cell_neighbors(CellId((0,))) == [CellId((-1,)), CellId((1,))]
    got = set(ShiftedGrid(2, 1).cell_neighbors(CellId((0, 0))))
    want = {(-1, 0), (1, 0), (-0.5, 1), (0.5, 1), (-0.5, -1), (0.5, -1)}
    assert got == {CellId(a) for a in want}
    assert not ShiftedGrid(2, 1).touches(CellId((0, 0)), CellId((1.5, 1)))


@pytest.mark.parametrize("dim, count", [(1, 2), (2, 6), (3, 14), (4, 30)])
def test_neighbor_counts(dim, count):
    # two along the first axis, then twice the previous count per extra axis
    g = ShiftedGrid(dim, 1)
    assert len(g.cell_neighbors(CellId((0,) * dim))) == count


def test_literal_half_shift_fails_in_three_dims():
    # Shifting every earlier coordinate by 1/2 on odd layers admits the
    # anchor (-1, 1/2, 1); its cube meets the origin cube only along an edge.
    def literal(coords):
        *head, last = coords
        if last.denominator != 1:
            return False
        if not head:
            return True
        if last % 2:
            head = [c + H for c in head]
        return literal(head)

    a, b = (Fraction(0),) * 3, (Fraction(-1), H, Fraction(1))
    assert literal(a) and literal(b)
    lo = [max(x, y) for x, y in zip(a, b)]
    hi = [min(x, y) + 1 for x, y in zip(a, b)]
    assert sum(l < h for l, h in zip(lo, hi)) == 1 and all(l <= h for l, h in zip(lo, hi))
    assert not ShiftedGrid(3, 1).is_valid(CellId(b))


def test_with_diameter():
    g = ShiftedGrid.with_diameter(1.0, 4)
    assert g.scale == pytest.approx(0.5)
    assert g.diameter == pytest.approx(1.0)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ShiftedGrid(0, 1)
    with pytest.raises(ValueError):
        ShiftedGrid(2, 0)
    with pytest.raises(ValueError):
        ShiftedGrid(2, 1).cell_of((0.1,))


def test_exact_decisions_with_non_dyadic_scale():
    g = ShiftedGrid(1, 0.1)
    cell = g.cell_of((0.1,))
    assert g.cell_box(cell).contains((0.1,))


points = st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=4)


@given(points, st.sampled_from([0.25, 0.3, 1.0, 2.5]))
def test_point_lies_in_its_cell_only(coords, scale):
    g = ShiftedGrid(len(coords), scale)
    cell = g.cell_of(coords)
    assert g.is_valid(cell)
    assert g.cell_box(cell).contains(coords)
    owners = [c for c in g.cells_meeting(coords, coords) if g.cell_box(c).contains(coords)]
    assert owners == [cell]


@given(st.integers(1, 4), st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_contacts_are_faces(dim, ks):
    g = ShiftedGrid(dim, 1)
    cell = g._anchor(ks[:dim])
    box = g.cell_box(cell)
    for other in g.cells_meeting(box.lower, box.upper):
        contact = g.contact_dimension(cell, other)
        if other == cell:
            assert contact == dim
        else:
            assert contact == dim - 1
            assert g.are_neighbors(cell, other) and g.are_neighbors(other, cell)


@given(st.integers(1, 4), st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_neighbor_relation_symmetric(dim, ks):
    g = ShiftedGrid(dim, 1)
    cell = g._anchor(ks[:dim])
    for other in g.cell_neighbors(cell):
        assert cell in g.cell_neighbors(other)


def test_even_layers_repeat_lower_lattice():
    rng = np.random.default_rng(0)
    for dim in (2, 3, 4):
        for _ in range(200):
            prefix = [Fraction(int(v), 8) for v in rng.integers(-40, 40, size=dim - 1)]
            k = 2 * int(rng.integers(-5, 5))
            assert is_lattice_anchor(prefix + [k], dim) == is_lattice_anchor(prefix, dim - 1)


def test_diameter():
    for d in range(1, 5):
        g = ShiftedGrid(d, 0.37)
        assert abs(g.cell_box(g.cell_of([0.1] * d)).diameter - 0.37 * math.sqrt(d)) < 1e-12
