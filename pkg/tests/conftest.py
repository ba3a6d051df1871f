import json
from pathlib import Path

import pytest

from grounded_chi.family_model import GroundedSet, gen_bracket, gen_chain, gen_clique, make_family
from grounded_chi.grid_topology import CellSet, Frame

FIXTURES = Path(__file__).resolve().parents[1] / "data" / "fixtures"


def column(x, y0, y1):
    return [(x, y) for y in range(y0, y1 + 1)]


def row(y, x0, x1):
    return [(x, y) for x in range(min(x0, x1), max(x0, x1) + 1)]


def gset(set_id, *parts):
    cells = []
    for p in parts:
        cells.extend(p)
    return GroundedSet(set_id, CellSet(cells))


@pytest.fixture
def twin_arch():
    return gen_clique(2).family


@pytest.fixture
def arch_cells():
    """A | B of the twin arch, frame 5x3."""
    return CellSet(column(0, 0, 2) + row(2, 0, 4) + column(4, 0, 2))


@pytest.fixture
def bracket2():
    return gen_bracket(2)


@pytest.fixture
def chain6():
    return gen_chain(6).family


@pytest.fixture
def fixture_doc():
    def read(name):
        return json.loads((FIXTURES / name).read_text(encoding="utf-8"))
    return read


@pytest.fixture
def claim_step_family():
    """
    Triangle-free family in a 23x11 frame: two outer walls H1, H2 joined at
    the top, a ladder of sets y1..y5 with a 2-clique (y1, y5) whose interior
    holds y3, and a support S1 coming over the right wall into it.
    """
    sets = [
        gset("H1", column(0, 0, 9), row(9, 0, 11)),
        gset("H2", column(20, 0, 9), row(9, 11, 20)),
        gset("x", [(2, 0), (2, 1), (3, 1), (4, 1)]),
        gset("y1", column(4, 0, 6), row(6, 4, 9)),
        gset("y2", column(6, 0, 2), row(2, 4, 9)),
        gset("y3", column(9, 0, 4)),
        gset("y4", column(12, 0, 3), row(3, 9, 14)),
        gset("y5", column(14, 0, 6), row(6, 9, 14)),
        gset("w", column(16, 0, 2), row(2, 14, 16)),
        gset("z", column(18, 0, 2), row(2, 16, 18)),
        gset("S1", column(22, 0, 10), row(10, 12, 22), column(12, 5, 9), row(5, 9, 11), [(9, 4)]),
    ]
    return make_family(sets, Frame(23, 11))
