from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grounded_chi.errors import BaseNotSurrounded, FrameTooSmall, SimplicityHypothesisViolated
from grounded_chi.family_model import GroundedSet
from grounded_chi.grid_topology import (
    EMPTY,
    CellSet,
    ComplementMap,
    Frame,
    check_simple,
    connected_components,
    cut,
    ext,
    flood,
    is_connected,
    simple_arc,
    surrounded_by,
)

from .conftest import column, row

ENCLOSED = CellSet([(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 1)])


def test_components_empty():
    assert connected_components(EMPTY) == []


def test_components_gap_forces_two():
    comps = connected_components(CellSet([(0, 0), (1, 0), (3, 0)]))
    assert comps == [CellSet([(0, 0), (1, 0)]), CellSet([(3, 0)])]


def test_components_block_minus_middle_column():
    block = CellSet((x, y) for x in range(5) for y in range(5) if x != 2)
    assert len(connected_components(block)) == 2


@given(st.sets(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=30))
@settings(max_examples=60, deadline=None)
def test_components_partition(cells):
    r = CellSet(cells)
    comps = connected_components(r)
    union = EMPTY
    for a, b in combinations(comps, 2):
        assert a.isdisjoint(b)
    for c in comps:
        assert is_connected(c)
        union = union | c
    assert union == r


def test_ext_of_empty_is_the_window():
    f = Frame(4, 3)
    assert ext(EMPTY, f) == f.cells()


def test_ext_column_wraps_over_top():
    f = Frame(11, 6)
    r = CellSet([(5, 0), (5, 1)])
    assert ext(r, f) == f.cells() - r


def test_ext_of_twin_arch(arch_cells):
    f = Frame(5, 3)
    out = ext(arch_cells, f)
    assert out.isdisjoint(arch_cells)
    assert out.isdisjoint(ENCLOSED)
    assert out == f.cells() - arch_cells - ENCLOSED


def test_ext_in_wider_frame(arch_cells):
    f = Frame(7, 4)
    out = ext(arch_cells, f)
    assert (6, 3) in out and (2, 3) in out
    assert out.isdisjoint(ENCLOSED)


def test_frame_too_small():
    with pytest.raises(FrameTooSmall):
        ext(CellSet([(5, 0)]), Frame(3, 3))


def test_pockets(arch_cells):
    cmap = ComplementMap(arch_cells, Frame(7, 4))
    assert cmap.pockets() == [ENCLOSED]
    assert cmap.component_at((2, 0)) == ENCLOSED
    assert cmap.label_of((0, 0)) == 0


def test_surrounded_by(arch_cells):
    f = Frame(7, 4)
    assert surrounded_by(CellSet([(2, 0)]), arch_cells, f)
    assert not surrounded_by(arch_cells, arch_cells, f)
    assert not surrounded_by(CellSet([(6, 3)]), arch_cells, f)


def test_cut_column_under_arch(arch_cells):
    r = GroundedSet("R", CellSet(column(2, 0, 3)))
    assert cut(r, arch_cells, Frame(5, 5)) == CellSet([(2, 0), (2, 1)])


def test_cut_u_shape_keeps_base_prong(arch_cells):
    u = GroundedSet("U", CellSet(column(1, 0, 3) + row(3, 1, 3) + column(3, 1, 3)))
    assert cut(u, arch_cells, Frame(5, 5)) == CellSet([(1, 0), (1, 1)])


def test_cut_disjoint_is_whole_set(arch_cells):
    r = GroundedSet("R", CellSet([(2, 0), (2, 1)]))
    assert cut(r, arch_cells, Frame(5, 5)) == r.region


def test_cut_requires_surrounded_base(arch_cells):
    r = GroundedSet("R", CellSet(column(6, 0, 2)))
    with pytest.raises(BaseNotSurrounded):
        cut(r, arch_cells, Frame(7, 4))


def test_flood_ignores_outside_seeds():
    region = CellSet(row(0, 0, 3))
    assert flood(region, [(9, 9)]) == EMPTY
    assert flood(region, [(0, 0)]) == region


def test_simple_arc_without_constraints_is_shortest():
    x = CellSet(row(0, 0, 4))
    assert simple_arc(x, (0, 0), (4, 0)) == [(i, 0) for i in range(5)]


def test_simple_arc_already_contiguous():
    x = CellSet(row(0, 0, 2))
    path = simple_arc(x, (0, 0), (2, 0), [CellSet([(1, 0), (1, 1)])])
    assert path == [(0, 0), (1, 0), (2, 0)]


def _check_arc(path, x, a, b, ys):
    assert path[0] == a and path[-1] == b
    assert len(set(path)) == len(path)
    assert all(c in x for c in path)
    for p, q in zip(path, path[1:]):
        assert abs(p[0] - q[0]) + abs(p[1] - q[1]) == 1
    for y in ys:
        hits = [n for n, c in enumerate(path) if c in y]
        if hits:
            assert hits == list(range(hits[0], hits[-1] + 1))


@given(st.sets(st.integers(1, 6), max_size=4))
@settings(max_examples=40, deadline=None)
def test_simple_arc_runs_are_contiguous(cols):
    x = CellSet((i, j) for i in range(8) for j in range(4))
    ys = [CellSet(column(c, 0, 3)) for c in sorted(cols)]
    path = simple_arc(x, (0, 0), (7, 3), ys)
    _check_arc(path, x, (0, 0), (7, 3), ys)


def test_simple_arc_middle_column_of_block():
    x = CellSet((i, j) for i in range(5) for j in range(3))
    y = CellSet(column(2, 0, 2))
    _check_arc(simple_arc(x, (0, 0), (4, 0), [y]), x, (0, 0), (4, 0), [y])


def test_simple_arc_rejects_disconnected_piece():
    x = CellSet(row(0, 0, 4))
    y = CellSet([(1, 0), (3, 0)])
    with pytest.raises(SimplicityHypothesisViolated):
        simple_arc(x, (0, 0), (4, 0), [y])


def test_check_simple_disjoint_sets_pass():
    assert check_simple([CellSet([(0, 0)]), CellSet([(2, 0)])]).passed


def test_check_simple_u_and_bar_fail():
    u = CellSet(column(0, 0, 2) + row(0, 0, 2) + column(2, 0, 2))
    bar = CellSet(row(2, 0, 2))
    report = check_simple([u, bar])
    assert not report.passed
    assert report.witness == (0, 1)
    assert len(report.components) == 2


def test_check_simple_three_sets_one_common_cell():
    a = CellSet(row(0, 0, 2))
    b = CellSet(column(1, 0, 2))
    c = CellSet([(1, 0), (1, 1), (2, 1)])
    assert check_simple([a, b, c]).passed


def _walk_set(rng, size=5, steps=6):
    cur = (int(rng.integers(size)), int(rng.integers(size)))
    cells = {cur}
    for _ in range(steps):
        dx, dy = [(1, 0), (0, 1), (-1, 0), (0, -1)][int(rng.integers(4))]
        nxt = (min(max(cur[0] + dx, 0), size - 1), min(max(cur[1] + dy, 0), size - 1))
        cells.add(nxt)
        cur = nxt
    return CellSet(cells)


def _naive_simple(sets):
    for n in range(1, len(sets) + 1):
        for sub in combinations(sets, n):
            common = sub[0]
            for s in sub[1:]:
                common = common & s
            if common and not is_connected(common):
                return False
    return True


@given(st.integers(0, 10_000), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_check_simple_matches_naive_oracle(seed, n):
    rng = np.random.default_rng(seed)
    sets = [_walk_set(rng) for _ in range(n)]
    assert check_simple(sets).passed == _naive_simple(sets)
