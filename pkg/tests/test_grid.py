import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kcover.geometry import Point, UnitDisk
from kcover.grid import (PARITY_LABELS, CellId, GridError, GridParams, block_period, cell_of,
                         cell_rect, cells_of, color_set_index, disks_intersecting_cell, later,
                         order_key, partial_greater)

G2 = GridParams(2.0)


@pytest.mark.parametrize("p,expected", [((3.7, 1.2), (1, 0)), ((0, 0), (0, 0)), ((2.0, 2.0), (1, 1))])
def test_cell_of(p, expected):
    assert cell_of(Point(*p), G2) == CellId(*expected)


def test_cell_of_rejects_negative():
    with pytest.raises(GridError):
        cell_of(Point(-0.1, 1), G2)


@pytest.mark.parametrize("c,tau,expected", [
    ((0, 0), 2.0, (0, 0, 2, 2)),
    ((1, 2), 2.0, (2, 4, 4, 6)),
    ((1, 0), 1.5, (1.5, 0, 3, 1.5)),
])
def test_cell_rect(c, tau, expected):
    assert tuple(cell_rect(CellId(*c), GridParams(tau))) == pytest.approx(expected)


@pytest.mark.parametrize("first,second", [((0, 0), (1, 0)), ((2, 0), (0, 1)), ((1, 0), (0, 1))])
def test_order_key(first, second):
    assert order_key(CellId(*first)) < order_key(CellId(*second))
    assert later(CellId(*second), CellId(*first))


def test_partial_relation_leaves_diagonals_incomparable():
    a, b = CellId(1, 0), CellId(0, 1)
    assert not partial_greater(a, b) and not partial_greater(b, a)


def test_color_set_index():
    assert color_set_index(CellId(0, 0), G2) == 0
    assert color_set_index(CellId(1, 0), G2) == 1
    assert PARITY_LABELS[1] == "C3"
    assert color_set_index(CellId(4, 6), GridParams(1.0)) == 1
    assert GridParams(1.0).block_period == 3


def test_parity_labels_match_four_sets():
    labels = {(i % 2, j % 2): PARITY_LABELS[color_set_index(CellId(i, j), G2)]
              for i in range(2) for j in range(2)}
    assert labels == {(0, 0): "C1", (0, 1): "C2", (1, 0): "C3", (1, 1): "C4"}


@pytest.mark.parametrize("tau,g", [(1.0, 3), (1.5, 3), (1.9, 3), (2.0, 2), (3.0, 2), (5.0, 2)])
def test_block_period(tau, g):
    assert block_period(tau) == g


def test_disks_intersecting_cell():
    disks = [UnitDisk(Point(1, 1)), UnitDisk(Point(5.1, 1)), UnitDisk(Point(3, 1))]
    assert disks_intersecting_cell(disks, CellId(0, 0), G2) == [0, 2]


def test_tau_domain():
    with pytest.raises(GridError, match=r"tau outside \[1,5\]"):
        GridParams(0.5)
    with pytest.raises(GridError):
        GridParams(2.0, layout="hex")


@given(st.floats(0, 100), st.floats(0, 100), st.sampled_from([1.0, 1.5, 2.0, 3.7]))
def test_cell_contains_its_points(x, y, tau):
    g = GridParams(tau)
    r = cell_rect(cell_of(Point(x, y), g), g)
    assert r.xmin <= x <= r.xmax and r.ymin <= y <= r.ymax


def test_cells_of_vectorized_matches_scalar():
    xy = np.random.default_rng(3).uniform(0, 20, (200, 2))
    got = cells_of(xy, 1.5)
    want = [cell_of(Point(*p), GridParams(1.5)) for p in xy]
    assert [tuple(r) for r in got.tolist()] == [tuple(c) for c in want]


ids = [CellId(i, j) for i in range(4) for j in range(4)]


def test_order_is_strict_total_and_extends_partial():
    for a, b in itertools.product(ids, ids):
        if a != b:
            assert later(a, b) != later(b, a)
        if partial_greater(a, b):
            assert order_key(a) > order_key(b)


@pytest.mark.parametrize("tau", [1.0, 1.5, 2.0, 4.0])
def test_same_set_cells_are_period_apart(tau):
    g = GridParams(tau)
    n = g.block_period
    cells = [CellId(i, j) for i in range(3 * n) for j in range(3 * n)]
    for a, b in itertools.combinations(cells, 2):
        if color_set_index(a, g) == color_set_index(b, g):
            assert abs(a.i - b.i) >= n or abs(a.j - b.j) >= n
