from decimal import Decimal
from itertools import combinations, product

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grounded_chi.errors import BudgetExceeded, NotPlanar, OrderViolation
from grounded_chi.family_model import gen_crossing_pillars, gen_pillars, gen_random
from grounded_chi.graph_core import (
    Coloring,
    IntersectionGraph,
    build_graph,
    chi_exact,
    color_with_at_most,
    compute_bounds,
    crosscheck_bounds,
    dsatur_greedy,
    interval_base_coloring,
    is_k_colorable,
    omega_exact,
    pillar_order_coloring,
    planar_color,
)
from grounded_chi.grid_topology import CellSet, cut

from .conftest import column, row


def graph_from_nx(g):
    ids = [f"v{n}" for n in g.nodes]
    return IntersectionGraph.from_edges(ids, [(f"v{u}", f"v{v}") for u, v in g.edges])


def complete(n):
    return graph_from_nx(nx.complete_graph(n))


def cycle(n):
    return graph_from_nx(nx.cycle_graph(n))


def brute_chi(g):
    n = len(g.ids)
    pos = {v: i for i, v in enumerate(g.ids)}
    edges = [(pos[u], pos[v]) for u, v in g.edges]
    for k in range(0, n + 1):
        for colors in product(range(k), repeat=n):
            if all(colors[a] != colors[b] for a, b in edges):
                return k
    return n


def brute_omega(g):
    for size in range(len(g.ids), 0, -1):
        for sub in combinations(g.ids, size):
            if all(g.has_edge(u, v) for u, v in combinations(sub, 2)):
                return size
    return 0


random_graphs = st.builds(
    lambda n, bits: IntersectionGraph.from_edges(
        [f"v{i}" for i in range(n)],
        [(f"v{a}", f"v{b}") for (a, b), keep in zip(combinations(range(n), 2), bits) if keep]),
    st.integers(0, 8),
    st.lists(st.booleans(), min_size=28, max_size=28),
)


def test_build_graph_twin_arch(twin_arch):
    g = build_graph(twin_arch)
    assert g.ids == ("A", "B")
    assert g.edge_set() == {frozenset({"A", "B"})}


def test_build_graph_disjoint():
    g = build_graph({"a": CellSet([(0, 0)]), "b": CellSet([(2, 0)])})
    assert g.edge_count == 0


def test_build_graph_matches_cell_sharing():
    F = gen_random(7, 12).family
    g = build_graph(F)
    for a, b in combinations(F.members, 2):
        assert g.has_edge(a.id, b.id) == a.region.intersects(b.region)


def test_omega_examples():
    assert omega_exact(IntersectionGraph.from_edges([], [])) == (0, ())
    assert omega_exact(complete(4)) == (4, ("v0", "v1", "v2", "v3"))
    size, witness = omega_exact(cycle(5))
    assert size == 2
    g = cycle(5)
    assert g.has_edge(*witness)


def test_chi_examples():
    assert chi_exact(complete(4))[0] == 4
    assert chi_exact(cycle(5))[0] == 3
    assert chi_exact(IntersectionGraph.from_edges([], [])) == (0, Coloring({}))


@given(random_graphs)
@settings(max_examples=150, deadline=None)
def test_solvers_match_exhaustive_search(g):
    chi, coloring = chi_exact(g)
    assert coloring.is_proper(g)
    assert coloring.palette == chi
    assert chi == brute_chi(g)
    assert omega_exact(g)[0] == brute_omega(g)
    assert chi >= omega_exact(g)[0]


@given(random_graphs)
@settings(max_examples=50, deadline=None)
def test_dsatur_is_proper_upper_bound(g):
    greedy = dsatur_greedy(g)
    assert greedy.is_proper(g)
    assert greedy.palette >= chi_exact(g)[0]


def test_color_with_at_most():
    assert color_with_at_most(cycle(5), 2) is None
    assert color_with_at_most(cycle(5), 3).is_proper(cycle(5))
    assert is_k_colorable(complete(3), 3)
    assert not is_k_colorable(complete(3), 2)


def test_budget_exceeded():
    g = graph_from_nx(nx.mycielski_graph(5))
    with pytest.raises(BudgetExceeded):
        chi_exact(g, budget=5)


def test_zero_budget_is_honoured():
    with pytest.raises(BudgetExceeded):
        chi_exact(cycle(5), budget=0)
    with pytest.raises(BudgetExceeded):
        color_with_at_most(cycle(5), 2, budget=0)
    assert chi_exact(cycle(4), budget=0)[0] == 2


def test_interval_coloring_examples():
    assert interval_base_coloring({"a": (0, 1), "b": (3, 4)}).palette == 1
    assert interval_base_coloring({"a": (0, 6), "b": (1, 5), "c": (2, 4)}).palette == 3
    stair = {"a": (0, 2), "b": (1, 4), "c": (3, 6), "d": (5, 8)}
    assert interval_base_coloring(stair).palette == 2


@given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 4)), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_interval_coloring_is_optimal(spans):
    intervals = {f"i{n}": (lo, lo + w) for n, (lo, w) in enumerate(spans)}
    ids = list(intervals)
    pairs = [(u, v) for u, v in combinations(ids, 2)
             if intervals[u][0] <= intervals[v][1] and intervals[v][0] <= intervals[u][1]]
    g = IntersectionGraph.from_edges(ids, pairs)
    coloring = interval_base_coloring(intervals)
    assert coloring.is_proper(g)
    assert coloring.palette == chi_exact(g)[0] == omega_exact(g)[0]


def test_pillar_order_disjoint_cuts():
    cuts = [(f"R{i}", CellSet(column(2 * i, 0, 2))) for i in range(3)]
    assert pillar_order_coloring(cuts).palette == 1


def test_pillar_order_pairwise_intersecting():
    cuts = [(f"R{i}", CellSet(column(i, 0, 1) + row(1, i, 2))) for i in range(3)]
    assert pillar_order_coloring(cuts).palette == 3


def test_pillar_order_violation():
    # R0 < R1 < R2 by disjointness but R0 meets R2
    cuts = [("R0", CellSet(column(0, 0, 3) + row(3, 0, 4))),
            ("R1", CellSet(column(2, 0, 1))),
            ("R2", CellSet(column(4, 0, 3)))]
    with pytest.raises(OrderViolation):
        pillar_order_coloring(cuts)


def test_pillar_order_on_straight_pillars():
    scene = gen_pillars(4).scene
    cuts = [(r.id, cut(r, scene.s, scene.frame)) for r in scene.pillars]
    assert pillar_order_coloring(cuts).palette == 1


@given(st.integers(0, 2_000), st.integers(2, 6))
@settings(max_examples=60, deadline=None)
def test_pillar_order_on_crossing_pillars(seed, m):
    scene = gen_crossing_pillars(seed, m).scene
    cuts = [(r.id, cut(r, scene.s, scene.frame)) for r in scene.pillars]
    coloring = pillar_order_coloring(cuts)
    g = build_graph(dict(cuts))
    assert coloring.is_proper(g)
    assert coloring.palette == omega_exact(g)[0]


def test_planar_color_examples():
    tree = graph_from_nx(nx.balanced_tree(2, 3))
    assert planar_color(tree).palette == 2
    assert planar_color(complete(4)).palette == 4
    dodeca = graph_from_nx(nx.dodecahedral_graph())
    coloring = planar_color(dodeca)
    assert coloring.is_proper(dodeca) and coloring.palette <= 4


def test_planar_color_rejects_k5():
    with pytest.raises(NotPlanar):
        planar_color(complete(5))


def test_bounds_k1():
    table = compute_bounds(1)
    assert table.xi == {1: 1}
    assert table.delta[(1, 1)] == 0


def test_bounds_k2():
    table = compute_bounds(2)
    assert table.beta[2] == 16
    assert [table.delta[(2, j)] for j in (2, 1, 0)] == [0, 30, 90]
    assert table.xi[2] == 1488


def _string_mul(a: str, b: str) -> str:
    digits = [0] * (len(a) + len(b))
    for i, da in enumerate(reversed(a)):
        for j, db in enumerate(reversed(b)):
            digits[i + j] += int(da) * int(db)
    carry = 0
    for n in range(len(digits)):
        carry, digits[n] = divmod(digits[n] + carry, 10)
    return "".join(map(str, reversed(digits))).lstrip("0") or "0"


def test_bounds_reproduce_with_string_arithmetic():
    table = compute_bounds(4)
    assert crosscheck_bounds(table) == []
    for k in range(2, 5):
        xi = str(table.xi[k - 1])
        assert _string_mul(str(8 * k), _string_mul(xi, xi)) == str(table.beta[k])
        assert table.delta[(k, k)] == 0
    assert table.xi[3] > 2 ** 32
    assert [table.xi[k] for k in range(1, 5)] == sorted(set(table.xi.values()))


def test_bounds_text_and_json():
    table = compute_bounds(2)
    text = table.format_text()
    assert "1488" in text and "beta" in text
    doc = table.to_json()
    assert doc["delta"]["2,0"] == 90
    assert Decimal(doc["xi"]["2"]) == 1488


def test_dot_export(twin_arch):
    dot = build_graph(twin_arch).to_dot()
    assert dot.startswith("graph G {")
    assert '"A" -- "B";' in dot


def test_components_sorted():
    g = IntersectionGraph.from_edges(["a", "b", "c", "d"], [("c", "d"), ("a", "b")])
    assert g.components() == [("a", "b"), ("c", "d")]
    assert g.subgraph(["a", "c"]).edge_count == 0
    assert np.isclose(nx.density(g.to_networkx()), 2 / 6)
