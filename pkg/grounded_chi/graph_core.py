"""
Intersection graphs, exact clique / coloring solvers and the bound recurrences.

Solvers are exact and budgeted: chi_exact explores at most `budget` search
nodes per connected component and raises BudgetExceeded beyond that
(budget defaults to GROUNDED_CHI_BUDGET).
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import pandas as pd

from . import config
from .errors import BudgetExceeded, NotFourColorable, NotPlanar, OrderViolation, ValidationError
from .grid_topology import CellSet, touching_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntersectionGraph:
    ids: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]
    adj: Dict[str, FrozenSet[str]] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        adj = {v: set() for v in self.ids}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "adj", {v: frozenset(n) for v, n in adj.items()})

    @classmethod
    def from_edges(cls, ids: Sequence[str], pairs: Iterable[Tuple[str, str]]):
        pos = {v: i for i, v in enumerate(ids)}
        edges = frozenset(tuple(sorted((u, v), key=pos.get)) for u, v in pairs if u != v)
        return cls(tuple(ids), edges)

    def __len__(self):
        return len(self.ids)

    def neighbors(self, v) -> FrozenSet[str]:
        return self.adj[v]

    def has_edge(self, u, v):
        return v in self.adj[u]

    @property
    def edge_count(self):
        return len(self.edges)

    def edge_set(self) -> FrozenSet[FrozenSet[str]]:
        return frozenset(frozenset(e) for e in self.edges)

    def subgraph(self, keep: Iterable[str]) -> "IntersectionGraph":
        keep = set(keep)
        ids = tuple(v for v in self.ids if v in keep)
        return IntersectionGraph(ids, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.ids)
        g.add_edges_from(self.edges)
        return g

    def components(self) -> List[Tuple[str, ...]]:
        pos = {v: i for i, v in enumerate(self.ids)}
        comps = [tuple(sorted(c, key=pos.get)) for c in nx.connected_components(self.to_networkx())]
        comps.sort(key=lambda c: pos[c[0]])
        return comps

    def to_dot(self) -> str:
        lines = ["graph G {"]
        lines += [f'  "{v}";' for v in self.ids]
        lines += [f'  "{u}" -- "{v}";' for u, v in sorted(self.edges, key=self._edge_key)]
        lines.append("}")
        return "\n".join(lines) + "\n"

    def _edge_key(self, e):
        return (self.ids.index(e[0]), self.ids.index(e[1]))


def build_graph(F) -> IntersectionGraph:
    """F is a GroundedFamily or an ordered mapping id -> CellSet."""
    if isinstance(F, Mapping):
        ids, regions = list(F.keys()), list(F.values())
    else:
        ids, regions = [m.id for m in F.members], [m.region for m in F.members]
    pairs = [(ids[i], ids[j]) for i, j in touching_pairs(regions)]
    return IntersectionGraph.from_edges(ids, pairs)


@dataclass(frozen=True)
class Coloring:
    colors: Dict[str, int] = field(default_factory=dict)

    @property
    def palette(self):
        return 1 + max(self.colors.values()) if self.colors else 0

    def __getitem__(self, v):
        return self.colors[v]

    def is_proper(self, g: IntersectionGraph):
        if any(v not in self.colors for v in g.ids):
            return False
        return all(self.colors[u] != self.colors[v] for u, v in g.edges)

    def classes(self) -> Dict[int, List[str]]:
        out = {}
        for v, c in self.colors.items():
            out.setdefault(c, []).append(v)
        return out

    def to_json(self):
        return {"colors": dict(sorted(self.colors.items())), "palette": self.palette}


def omega_exact(g: IntersectionGraph) -> Tuple[int, Tuple[str, ...]]:
    """Maximum clique by Bron-Kerbosch with pivoting and a size bound."""
    order = {v: i for i, v in enumerate(g.ids)}
    adj = {v: set(g.adj[v]) for v in g.ids}
    best: List[str] = []

    def expand(clique, cand, excl):
        nonlocal best
        if not cand and not excl:
            if len(clique) > len(best):
                best = list(clique)
            return
        if len(clique) + len(cand) <= len(best):
            return
        pivot = max(cand | excl, key=lambda u: (len(cand & adj[u]), -order[u]))
        for v in sorted(cand - adj[pivot], key=order.get):
            expand(clique + [v], cand & adj[v], excl & adj[v])
            cand = cand - {v}
            excl = excl | {v}

    expand([], set(g.ids), set())
    witness = tuple(sorted(best, key=order.get))
    return len(witness), witness


def dsatur_greedy(g: IntersectionGraph) -> Coloring:
    order = {v: i for i, v in enumerate(g.ids)}
    colors: Dict[str, int] = {}
    seen = {v: set() for v in g.ids}
    uncolored = set(g.ids)
    while uncolored:
        v = max(uncolored, key=lambda u: (len(seen[u]), len(g.adj[u]), -order[u]))
        c = 0
        while c in seen[v]:
            c += 1
        colors[v] = c
        uncolored.remove(v)
        for u in g.adj[v]:
            seen[u].add(c)
    return Coloring({v: colors[v] for v in g.ids})


class _Search:
    """DSATUR-ordered backtracking for a coloring with at most `limit` colors."""

    def __init__(self, g: IntersectionGraph, budget: int):
        self.g = g
        self.order = {v: i for i, v in enumerate(g.ids)}
        self.budget = budget
        self.nodes = 0

    def run(self, limit) -> Optional[Dict[str, int]]:
        if limit <= 0:
            return {} if not self.g.ids else None
        return self._extend({}, limit, 0)

    def _pick(self, colors):
        def key(v):
            sat = {colors[u] for u in self.g.adj[v] if u in colors}
            return (len(sat), len(self.g.adj[v]), -self.order[v])
        return max((v for v in self.g.ids if v not in colors), key=key)

    def _extend(self, colors, limit, used):
        if len(colors) == len(self.g.ids):
            return dict(colors)
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(self.budget)
        v = self._pick(colors)
        forbidden = {colors[u] for u in self.g.adj[v] if u in colors}
        # a fresh color is tried only once: colors are interchangeable
        for c in range(min(used + 1, limit)):
            if c in forbidden:
                continue
            colors[v] = c
            found = self._extend(colors, limit, max(used, c + 1))
            if found is not None:
                return found
            del colors[v]
        return None


def _component_coloring(sub: IntersectionGraph, budget, limit=None) -> Optional[Coloring]:
    greedy = dsatur_greedy(sub)
    if limit is not None and greedy.palette <= limit:
        return greedy
    lower, _ = omega_exact(sub)
    search = _Search(sub, budget)
    top = greedy.palette - 1 if limit is None else limit
    for k in range(max(lower, 1), top + 1):
        found = search.run(k)
        if found is not None:
            return Coloring(found)
    return greedy if limit is None else None


def chi_exact(g: IntersectionGraph, budget: Optional[int] = None) -> Tuple[int, Coloring]:
    """
    Exact chromatic number, component by component: DSATUR greedy gives the
    upper bound, the maximum clique the lower bound, and the search tries
    every palette size in between from the bottom.
    """
    if budget is None:
        budget = config.chi_budget()
    colors: Dict[str, int] = {}
    for comp in g.components():
        colors.update(_component_coloring(g.subgraph(comp), budget).colors)
    coloring = Coloring({v: colors[v] for v in g.ids})
    return coloring.palette, coloring


def chromatic_number(g: IntersectionGraph, budget: Optional[int] = None) -> int:
    return chi_exact(g, budget)[0]


def color_with_at_most(g: IntersectionGraph, limit: int, budget: Optional[int] = None) -> Optional[Coloring]:
    if budget is None:
        budget = config.chi_budget()
    colors: Dict[str, int] = {}
    for comp in g.components():
        found = _component_coloring(g.subgraph(comp), budget, limit)
        if found is None:
            return None
        colors.update(found.colors)
    return Coloring({v: colors[v] for v in g.ids})


def is_k_colorable(g: IntersectionGraph, k: int, budget: Optional[int] = None) -> bool:
    return color_with_at_most(g, k, budget) is not None


def base_intervals(members) -> Dict[str, Tuple[int, int]]:
    return {m.id: m.base_span for m in members}


def interval_base_coloring(intervals: Mapping[str, Tuple[int, int]]) -> Coloring:
    """Left-endpoint greedy on closed integer intervals; uses max point load colors."""
    order = sorted(intervals, key=lambda v: (intervals[v][0], intervals[v][1], v))
    active: List[Tuple[int, int]] = []
    free: List[int] = []
    colors: Dict[str, int] = {}
    fresh = 0
    for v in order:
        lo, hi = intervals[v]
        while active and active[0][0] < lo:
            _, c = heapq.heappop(active)
            heapq.heappush(free, c)
        if free:
            c = heapq.heappop(free)
        else:
            c, fresh = fresh, fresh + 1
        colors[v] = c
        heapq.heappush(active, (hi, c))
    return Coloring({v: colors[v] for v in intervals})


def pillar_order_coloring(cuts: Sequence[Tuple[str, CellSet]]) -> Coloring:
    """
    Chain decomposition of the order "R_a < R_b iff a comes first and the
    two are disjoint" (cuts given in base order). A minimum chain cover is
    read off a maximum bipartite matching, so the palette equals the largest
    set of pairwise intersecting cuts.
    """
    n = len(cuts)
    ids = [c[0] for c in cuts]
    less = {(i, j) for i, j in combinations(range(n), 2) if cuts[i][1].isdisjoint(cuts[j][1])}
    for i, j in less:
        for k in range(j + 1, n):
            if (j, k) in less and (i, k) not in less:
                raise OrderViolation(f"{ids[i]} < {ids[j]} < {ids[k]} but {ids[i]} meets {ids[k]}")

    b = nx.Graph()
    left = [("L", i) for i in range(n)]
    b.add_nodes_from(left)
    b.add_nodes_from(("R", i) for i in range(n))
    b.add_edges_from((("L", i), ("R", j)) for i, j in less)
    matching = nx.bipartite.hopcroft_karp_matching(b, top_nodes=left)
    successor = {i: matching[("L", i)][1] for i in range(n) if ("L", i) in matching}
    has_pred = set(successor.values())

    colors: Dict[str, int] = {}
    chain = 0
    for start in range(n):
        if start in has_pred:
            continue
        cur = start
        while cur is not None:
            colors[ids[cur]] = chain
            cur = successor.get(cur)
        chain += 1
    return Coloring({v: colors[v] for v in ids})


def planar_color(g: IntersectionGraph) -> Coloring:
    n, m = len(g.ids), g.edge_count
    if not n:
        return Coloring({})
    if n >= 3 and m > 3 * n - 6:
        raise NotPlanar(f"{m} edges on {n} vertices exceed 3n-6")
    planar, _ = nx.check_planarity(g.to_networkx())
    if not planar:
        raise NotPlanar("Kuratowski subgraph found")
    chi, coloring = chi_exact(g)
    if chi > 4:
        raise NotFourColorable(f"planar graph needs {chi} colors")
    return coloring


# bound recurrences

@dataclass(frozen=True)
class BoundTable:
    k_max: int
    xi: Dict[int, int]
    beta: Dict[int, int]
    delta: Dict[Tuple[int, int], int]

    def rows(self):
        out = []
        for k in range(1, self.k_max + 1):
            if k in self.beta:
                out.append({"k": k, "quantity": "beta", "j": "", "value": self.beta[k]})
            for j in range(k, -1, -1):
                if (k, j) in self.delta:
                    out.append({"k": k, "quantity": "delta", "j": j, "value": self.delta[(k, j)]})
            out.append({"k": k, "quantity": "xi", "j": "", "value": self.xi[k]})
        return out

    def format_text(self) -> str:
        df = pd.DataFrame(self.rows())
        df["value"] = df["value"].map(str)
        return df.to_string(index=False) + "\n"

    def to_json(self):
        return {
            "k_max": self.k_max,
            "xi": {str(k): v for k, v in sorted(self.xi.items())},
            "beta": {str(k): v for k, v in sorted(self.beta.items())},
            "delta": {f"{k},{j}": v for (k, j), v in sorted(self.delta.items())},
        }


def compute_bounds(k_max: int) -> BoundTable:
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    xi = {1: 1}
    beta: Dict[int, int] = {}
    delta: Dict[Tuple[int, int], int] = {(1, 1): 0}
    for k in range(2, k_max + 1):
        prev = xi[k - 1]
        beta[k] = 8 * k * prev * prev
        delta[(k, k)] = 0
        for j in range(k - 1, -1, -1):
            delta[(k, j)] = beta[k] + 2 * delta[(k, j + 1)] + 2 * prev * (k * prev + k + 2) + 2
        xi[k] = 2 ** (k + 2) * (delta[(k, 0)] + 2 * prev + 1)
    return BoundTable(k_max, xi, beta, delta)


def crosscheck_bounds(table: BoundTable) -> List[str]:
    """Re-evaluate the recurrences in Decimal arithmetic; returns mismatching entries."""
    digits = len(str(max(table.xi.values()))) * 2 + 16
    mismatches = []
    with localcontext() as ctx:
        ctx.prec = digits
        xi = {1: Decimal(1)}
        for k in range(2, table.k_max + 1):
            prev, dk = xi[k - 1], Decimal(k)
            beta = 8 * dk * prev * prev
            if beta != table.beta[k]:
                mismatches.append(f"beta[{k}]")
            d = Decimal(0)
            for j in range(k - 1, -1, -1):
                d = beta + 2 * d + 2 * prev * (dk * prev + dk + 2) + 2
                if d != table.delta[(k, j)]:
                    mismatches.append(f"delta[{k},{j}]")
            xi[k] = Decimal(2) ** (k + 2) * (d + 2 * prev + 1)
            if xi[k] != table.xi[k]:
                mismatches.append(f"xi[{k}]")
    return mismatches
