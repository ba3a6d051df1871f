"""
Structural extraction on grounded families: ladder decomposition,
externally supported layers, cliques and brackets with their interiors,
the piercing corollaries, and the inductive scaffold step.

All choices are deterministic: among equally valid candidates the one that
comes first in the base order wins, so provenance logs reproduce.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import (
    AuditFailure,
    BudgetExceeded,
    InputOverlap,
    NoSupportedLayer,
    NotAClique,
    PreconditionFailed,
    RoutingFailed,
    StageError,
    StepInfeasible,
)
from .family_model import GroundedFamily, GroundedSet, restrict_between, subfamily
from .graph_core import BoundTable, Coloring, IntersectionGraph, build_graph, chi_exact, is_k_colorable, omega_exact
from .grid_topology import EMPTY, CellSet, ComplementMap, Frame, connected_components, cut, ext, surrounded_by

logger = logging.getLogger(__name__)


def chi_of(F: GroundedFamily, budget=None) -> int:
    return chi_exact(build_graph(F), budget)[0]


def _union(sets) -> CellSet:
    out = EMPTY
    for s in sets:
        out = out | s.region
    return out


# ladder decomposition

@dataclass(frozen=True)
class LadderResult:
    blocks: Tuple[GroundedFamily, ...]
    block_colorings: Tuple[Coloring, ...]
    parity: int
    color: int
    h: GroundedFamily
    audit: dict = field(default_factory=dict)


def ladder_split(F: GroundedFamily, a: int, b: int, budget=None) -> LadderResult:
    """
    Cut F into base-order blocks of chromatic number b+1, keep the parity
    class of blocks with chi > a(b+1), color each kept block with the same
    b+1 colors and return the color class of largest chi.
    """
    g = build_graph(F)
    chi, _ = chi_exact(g, budget)
    threshold = 2 * a * (b + 1)
    if chi <= threshold:
        raise PreconditionFailed(chi, threshold)

    blocks, colorings, current = [], [], []
    for m in F.members:
        current.append(m.id)
        sub = g.subgraph(current)
        if not is_k_colorable(sub, b, budget):
            colorings.append(chi_exact(sub, budget)[1])
            blocks.append(subfamily(F, current))
            current = []
    if current:
        colorings.append(chi_exact(g.subgraph(current), budget)[1])
        blocks.append(subfamily(F, current))

    halves = []
    for parity in (0, 1):
        ids = [m.id for n, blk in enumerate(blocks) if n % 2 == parity for m in blk]
        halves.append(ids)
    parity = 0 if chi_exact(g.subgraph(halves[0]), budget)[0] > a * (b + 1) else 1
    if parity == 1 and chi_exact(g.subgraph(halves[1]), budget)[0] <= a * (b + 1):
        raise AuditFailure("neither parity class of blocks exceeds a(b+1)")

    best_color, best_chi, best_ids = 0, -1, []
    for color in range(b + 1):
        ids = [v for n, col in enumerate(colorings) if n % 2 == parity
               for v, c in col.colors.items() if c == color]
        ids = [v for v in F.ids if v in set(ids)]
        value = chi_exact(g.subgraph(ids), budget)[0]
        if value > best_chi:
            best_color, best_chi, best_ids = color, value, ids
    h = subfamily(F, best_ids)

    audit = {"chi_h": best_chi, "pairs": []}
    if best_chi <= a:
        raise AuditFailure(f"ladder class has chi {best_chi} <= {a}")
    for u, v in combinations(h.members, 2):
        if u.region.isdisjoint(v.region):
            continue
        gap = chi_of(restrict_between(F, u, v), budget)
        audit["pairs"].append({"pair": [u.id, v.id], "chi_between": gap})
        if gap <= b:
            raise AuditFailure(f"gap family between {u.id} and {v.id} has chi {gap} <= {b}")
    logger.debug("ladder: %d blocks, parity %d, color %d, chi(H)=%d", len(blocks), parity, best_color, best_chi)
    return LadderResult(tuple(blocks), tuple(colorings), parity, best_color, h, audit)


# externally supported layers

def supporters(sub: GroundedFamily, F: GroundedFamily) -> Dict[str, Optional[str]]:
    """For each member X of sub: the first Y in F meeting X and ext(sub), or None."""
    outside = ext(sub.union(), F.frame)
    out = {}
    for x in sub.members:
        out[x.id] = next((y.id for y in F.members
                          if y.region.intersects(x.region) and y.region.intersects(outside)), None)
    return out


def externally_supported(F: GroundedFamily, a: int, budget=None) -> GroundedFamily:
    g = build_graph(F)
    chi, _ = chi_exact(g, budget)
    if chi <= 2 * a:
        raise PreconditionFailed(chi, 2 * a)

    best, best_chi = None, -1
    for comp in g.components():
        value = chi_exact(g.subgraph(comp), budget)[0]
        if value > best_chi:
            best, best_chi = comp, value
    root = best[0]
    depth = nx.single_source_shortest_path_length(g.subgraph(best).to_networkx(), root)
    layers: Dict[int, List[str]] = {}
    for v in best:
        layers.setdefault(depth[v], []).append(v)
    if len(layers) == 1:
        raise NoSupportedLayer(f"component of {root} has no layer at distance >= 1")

    for d in sorted(layers):
        if d == 0:
            continue
        if chi_exact(g.subgraph(layers[d]), budget)[0] > a:
            out = subfamily(F, layers[d])
            missing = [x for x, y in supporters(out, F).items() if y is None]
            if missing:
                raise AuditFailure(f"layer {d} members without external support: {', '.join(missing)}")
            logger.debug("layer %d of %s selected (%d members)", d, root, len(out))
            return out
    raise AuditFailure(f"no layer of the component of {root} exceeds chi {a}")


# cliques and brackets

def _sorted_by_base(sets):
    return sorted(sets, key=lambda m: m.base_span[0])


def _check_clique(K):
    if len(K) < 2:
        raise NotAClique("a clique needs at least two members")
    for u, v in combinations(K, 2):
        if u.region.isdisjoint(v.region):
            raise NotAClique(f"{u.id} and {v.id} are disjoint")


def _gap_component(union: CellSet, f: Frame, lo: int, hi: int) -> CellSet:
    if lo > hi:
        return EMPTY
    return ComplementMap(union, f).component_at((lo, 0))


def int_of_clique(K: Sequence[GroundedSet], f: Frame) -> CellSet:
    """Complement component of the union at the baseline gap between the two first members."""
    K = _sorted_by_base(K)
    _check_clique(K)
    return _gap_component(_union(K), f, K[0].base_span[1] + 1, K[1].base_span[0] - 1)


@dataclass(frozen=True)
class BracketWitness:
    clique: Tuple[GroundedSet, ...]
    support: GroundedSet
    side: str  # "left": support precedes the clique, "right": it follows
    int_clique: CellSet
    int_bracket: CellSet

    @property
    def clique_ids(self):
        return tuple(m.id for m in self.clique)

    def union(self) -> CellSet:
        return _union(self.clique) | self.support.region


def int_of_bracket(K: Sequence[GroundedSet], support: GroundedSet, f: Frame) -> CellSet:
    K = _sorted_by_base(K)
    union = _union(K) | support.region
    if support.base_span[1] < K[0].base_span[0]:
        return _gap_component(union, f, support.base_span[1] + 1, K[0].base_span[0] - 1)
    return _gap_component(union, f, K[-1].base_span[1] + 1, support.base_span[0] - 1)


def make_bracket(K: Sequence[GroundedSet], support: GroundedSet, f: Frame) -> BracketWitness:
    K = tuple(_sorted_by_base(K))
    interior = int_of_clique(K, f)
    if support.base_span[1] < K[0].base_span[0]:
        side = "left"
    elif support.base_span[0] > K[-1].base_span[1]:
        side = "right"
    else:
        raise NotAClique(f"support {support.id} is not on one side of the clique")
    return BracketWitness(K, support, side, interior, int_of_bracket(K, support, f))


def bracket_is_valid(B: BracketWitness, F: GroundedFamily) -> bool:
    """Clique pairwise intersecting, support on the flagged side, support reaching int(K)."""
    ids = set(F.ids)
    if B.support.id not in ids or any(m.id not in ids for m in B.clique):
        return False
    if any(u.region.isdisjoint(v.region) for u, v in combinations(B.clique, 2)):
        return False
    lo, hi = B.clique[0].base_span[0], B.clique[-1].base_span[1]
    if B.side == "left" and B.support.base_span[1] >= lo:
        return False
    if B.side == "right" and B.support.base_span[0] <= hi:
        return False
    return B.support.region.intersects(B.int_clique)


def k_cliques(g: IntersectionGraph, k: int) -> List[Tuple[str, ...]]:
    """All k-cliques, members in base order, listed lexicographically by position."""
    pos = {v: i for i, v in enumerate(g.ids)}
    found = set()
    for maximal in nx.find_cliques(g.to_networkx()):
        if len(maximal) >= k:
            for c in combinations(sorted(maximal, key=pos.get), k):
                found.add(c)
    return sorted(found, key=lambda c: [pos[v] for v in c])


def find_bracket(F: GroundedFamily, k: int) -> Optional[BracketWitness]:
    g = build_graph(F)
    for clique in k_cliques(g, k):
        K = [F.by_id(v) for v in clique]
        interior = int_of_clique(K, F.frame) if k >= 2 else EMPTY
        if not interior:
            continue
        for s in F.members:
            if s.id in clique:
                continue
            if not (s.base_span[1] < K[0].base_span[0] or s.base_span[0] > K[-1].base_span[1]):
                continue
            if s.region.intersects(interior):
                return make_bracket(K, s, F.frame)
    return None


# piercing corollaries

@dataclass(frozen=True)
class PiercingVerdict:
    hypotheses: bool
    conclusion: bool
    witness: tuple = ()

    @property
    def holds(self):
        return not self.hypotheses or self.conclusion


def _split_pairs(x: CellSet, inside: CellSet, blocker: CellSet):
    """Pairs of cells of x & inside lying in different components of x - blocker."""
    pieces = [p for p in connected_components(x - blocker) if p.intersects(inside)]
    reps = [(p & inside).least() for p in pieces]
    return list(combinations(reps, 2))


def _separated(x: CellSet, blocker: CellSet, a, b):
    for piece in connected_components(x - blocker):
        if a in piece:
            return b not in piece
    return True


def check_surround(Z: GroundedSet, X: GroundedSet, Y: GroundedSet, f: Frame) -> PiercingVerdict:
    """
    For intersecting X, Y: if two cells of Z in one complement component C1
    of X | Y can only be joined inside Z through another component C2, then
    every such arc meets both X and Y.
    """
    if X.region.isdisjoint(Y.region):
        return PiercingVerdict(False, True)
    cmap = ComplementMap(X.region | Y.region, f)
    labels = sorted({cmap.label_of(c) for c in Z.region} - {0})
    for l1 in labels:
        c1 = cmap.component(l1)
        for l2 in labels:
            if l2 == l1:
                continue
            for a, b in _split_pairs(Z.region, c1, cmap.component(l2)):
                if not (_separated(Z.region, X.region, a, b) and _separated(Z.region, Y.region, a, b)):
                    return PiercingVerdict(True, False, (a, b))
    hypotheses = any(_split_pairs(Z.region, cmap.component(l1), cmap.component(l2))
                     for l1 in labels for l2 in labels if l1 != l2)
    return PiercingVerdict(hypotheses, True)


def check_cor_clique(X: GroundedSet, K: Sequence[GroundedSet], f: Frame,
                     cells: Optional[Tuple] = None) -> PiercingVerdict:
    """
    Hypotheses: two cells of X in int(K) that X can only join through
    ext(K), or two cells in ext(K) that X can only join through int(K).
    Conclusion: X meets every member of K.
    """
    if any(X.id == m.id or X.region == m.region for m in K):
        raise InputOverlap(f"{X.id} is a member of the clique")
    K = _sorted_by_base(K)
    interior = int_of_clique(K, f)
    exterior = ext(_union(K), f)
    if cells is not None:
        a, b = cells
        both_in = a in interior and b in interior
        both_out = a in exterior and b in exterior
        hyp = (both_in and _separated(X.region, exterior, a, b)) or \
              (both_out and _separated(X.region, interior, a, b))
        witness = (a, b) if hyp else ()
    else:
        pairs = _split_pairs(X.region, interior, exterior) or _split_pairs(X.region, exterior, interior)
        hyp = bool(pairs)
        witness = pairs[0] if pairs else ()
    conclusion = all(X.region.intersects(m.region) for m in K)
    return PiercingVerdict(hyp, conclusion, witness)


def check_cor_bracket(X: GroundedSet, B: BracketWitness, f: Frame) -> PiercingVerdict:
    """Hypotheses: X meets int(B) and ext(B). Conclusion: X meets S or all of K."""
    if X.id == B.support.id or any(X.id == m.id for m in B.clique):
        raise InputOverlap(f"{X.id} belongs to the bracket")
    outside = ext(B.union(), f)
    hyp = X.region.intersects(B.int_bracket) and X.region.intersects(outside)
    conclusion = X.region.intersects(B.support.region) or \
        all(X.region.intersects(m.region) for m in B.clique)
    witness = ((X.region & B.int_bracket).least(), (X.region & outside).least()) if hyp else ()
    return PiercingVerdict(hyp, conclusion, witness)


# the inductive scaffold step

@dataclass(frozen=True)
class Thresholds:
    """
    Stage thresholds of the scaffold construction at clique number k.
    `overrides` replaces named values for the scaled-proof mode:
    delta (dict j -> value), bootstrap_b, remainder, split_chi, step_a, step_b.
    """
    k: int
    xi_prev: int
    beta: int
    delta: Dict[int, int]
    overrides: Dict = field(default_factory=dict)

    @classmethod
    def from_bounds(cls, bounds: BoundTable, k: int, overrides: Optional[Dict] = None):
        if k < 2:
            raise StepInfeasible("precondition", "the scaffold step needs k >= 2")
        delta = {j: bounds.delta[(k, j)] for j in range(k + 1)}
        return cls(k, bounds.xi[k - 1], bounds.beta[k], delta, dict(overrides or {}))

    def delta_at(self, j):
        return self.overrides.get("delta", {}).get(j, self.delta[j])

    def bootstrap_b(self):
        return self.overrides.get("bootstrap_b", self.delta_at(0) + 2 * self.xi_prev)

    def remainder(self, j):
        x, k = self.xi_prev, self.k
        return self.overrides.get("remainder", 2 * self.delta_at(j) + 2 * x * (k * x + k + 2) + 2)

    def split_chi(self, j):
        return self.overrides.get("split_chi", self.delta_at(j) + (self.k + 1) * self.xi_prev + 1)

    def step_a(self):
        return self.overrides.get("step_a", self.xi_prev)

    def step_b(self):
        return self.overrides.get("step_b", self.k * self.xi_prev)


@dataclass(frozen=True)
class ClaimStepState:
    level: int
    scaffold: Tuple[GroundedSet, ...]
    working: GroundedFamily
    supports: Tuple[GroundedSet, ...] = ()
    log: Tuple[dict, ...] = ()

    def scaffold_union(self) -> CellSet:
        return _union(self.scaffold)


def _record(log, stage, **fields):
    entry = {"stage": stage}
    entry.update(fields)
    log.append(entry)
    logger.debug("claim step %s: %s", stage, fields)


def audit_state(state: ClaimStepState, F: GroundedFamily, thresholds: Thresholds, budget=None) -> List[dict]:
    """
    The four scaffold properties: (i) the working family is surrounded by the
    scaffold, (ii) its chi exceeds delta_j, (iii) the supports pairwise
    intersect, (iv) every member of F meeting ext(scaffold) and a working
    member meets every support. (ii) failing is StepInfeasible, the others
    are AuditFailure.
    """
    f, j = F.frame, state.level
    union = state.scaffold_union()
    checks = []
    inside = all(surrounded_by(m.region, union, f) for m in state.working)
    checks.append({"property": "surrounded", "holds": inside})
    if not inside:
        raise AuditFailure("working family is not surrounded by the scaffold")

    chi = chi_of(state.working, budget)
    target = thresholds.delta_at(j)
    checks.append({"property": "chi", "chi": chi, "target": target, "holds": chi > target})
    if chi <= target:
        raise StepInfeasible("chi-target", f"chi(G)={chi} <= delta_{j}={target}")

    for s, t in combinations(state.supports, 2):
        if s.region.isdisjoint(t.region):
            raise AuditFailure(f"supports {s.id} and {t.id} are disjoint")
    checks.append({"property": "supports-intersect", "holds": True})

    if state.supports:
        outside = ext(union, f)
        working = state.working.union()
        for w in F.members:
            if w.region.intersects(outside) and w.region.intersects(working):
                missed = [s.id for s in state.supports if w.region.isdisjoint(s.region)]
                if missed:
                    raise AuditFailure(f"{w.id} reaches ext(scaffold) and the working family but misses {missed}")
    checks.append({"property": "piercing", "holds": True})
    return checks


def _require_clique_number(F, k):
    size, witness = omega_exact(build_graph(F))
    if size > k:
        raise StepInfeasible("precondition", f"clique number {size} exceeds k={k} ({', '.join(witness)})")


def claim_bootstrap(F0: GroundedFamily, F: GroundedFamily, k: int, bounds: BoundTable,
                    overrides: Optional[Dict] = None, budget=None) -> ClaimStepState:
    """Level 0: an intersecting pair H1, H2 from a ladder class, and the sets between them."""
    thr = Thresholds.from_bounds(bounds, k, overrides)
    _require_clique_number(F, k)
    log: List[dict] = []
    try:
        ladder = ladder_split(F0, 1, thr.bootstrap_b(), budget)
    except PreconditionFailed as exc:
        raise StepInfeasible("precondition", str(exc)) from exc
    _record(log, "ladder", h=list(ladder.h.ids), parity=ladder.parity, color=ladder.color)

    pair = next(((u, v) for u, v in combinations(ladder.h.members, 2) if u.region.intersects(v.region)), None)
    if pair is None:
        raise StepInfeasible("pair", "ladder class has no intersecting pair")
    h1, h2 = pair
    blocked = h1.region | h2.region
    between = restrict_between(F0, h1, h2)
    working = subfamily(F0, [m.id for m in between if m.region.isdisjoint(blocked)])
    _record(log, "scaffold", scaffold=[h1.id, h2.id], working=list(working.ids))

    state = ClaimStepState(0, (h1, h2), working, (), ())
    checks = audit_state(state, F, thr, budget)
    _record(log, "audit", checks=checks)
    return ClaimStepState(0, (h1, h2), working, (), tuple(log))


def split_three(G: GroundedFamily, target: int, budget=None):
    """X < Y < Z with chi(X) = chi(Z) = target, X and Z the shortest such prefix / suffix."""
    g = build_graph(G)
    ids = list(G.ids)
    cut_x = None
    for n in range(1, len(ids) + 1):
        if chi_exact(g.subgraph(ids[:n]), budget)[0] >= target:
            cut_x = n
            break
    if cut_x is None:
        raise StepInfeasible("split", f"no prefix reaches chi {target}")
    rest = ids[cut_x:]
    cut_z = None
    for n in range(1, len(rest) + 1):
        if chi_exact(g.subgraph(rest[-n:]), budget)[0] >= target:
            cut_z = len(rest) - n
            break
    if cut_z is None or cut_z == 0:
        raise StepInfeasible("split", f"no suffix reaches chi {target} leaving a middle part")
    return subfamily(G, ids[:cut_x]), subfamily(G, rest[:cut_z]), subfamily(G, rest[cut_z:])


def _d_members_chi(s_union, R, D, k, bounds, f, budget):
    """
    chi(D) through the dist2 pipeline. Only a solver budget or a routing
    refusal hands over to the exact solver; every other error propagates.
    """
    from .dist2_pipeline import color_dist2

    if not len(D):
        return 0, "empty"
    try:
        coloring = color_dist2(s_union, R, D, k, bounds, f)
        return coloring.palette, "dist2"
    except (StageError, BudgetExceeded, RoutingFailed) as exc:
        cause = exc.cause if isinstance(exc, StageError) else exc
        if not isinstance(cause, (BudgetExceeded, RoutingFailed)):
            raise
        logger.warning("dist2 pipeline declined (%s); using the exact solver", exc)
        return chi_of(D, budget), "exact"


def claim_step(state: ClaimStepState, Fj: GroundedFamily, F: GroundedFamily, k: int, bounds: BoundTable,
               overrides: Optional[Dict] = None, budget=None) -> ClaimStepState:
    thr = Thresholds.from_bounds(bounds, k, overrides)
    f = F.frame
    j = state.level + 1
    log: List[dict] = list(state.log)
    _require_clique_number(F, k)
    if chi_of(state.working, budget) <= thr.delta_at(j - 1):
        raise StepInfeasible("precondition", f"chi(G') does not exceed delta_{j - 1}")

    s_prev = state.scaffold_union()
    R = [r for r in F.members if surrounded_by(r.base, s_prev, f) and r.region.intersects(s_prev)]
    cut_union = EMPTY
    for r in R:
        cut_union = cut_union | cut(r, s_prev, f)
    D = subfamily(state.working, [m.id for m in state.working if m.region.intersects(cut_union)])
    chi_d, method = _d_members_chi(s_prev, R, D, k, bounds, f, budget)
    _record(log, "dist2", level=j, pillars=[r.id for r in R], d=list(D.ids), chi=chi_d, method=method)
    if chi_d > thr.beta:
        raise AuditFailure(f"members near the pillars need {chi_d} > beta_k={thr.beta} colors")

    rest = subfamily(state.working, [v for v in state.working.ids if v not in set(D.ids)])
    g = build_graph(rest)
    chi_rest = chi_exact(g, budget)[0]
    if chi_rest <= thr.remainder(j):
        raise StepInfeasible("remainder", f"chi={chi_rest} <= {thr.remainder(j)}")
    best, best_chi = None, -1
    for comp in g.components():
        value = chi_exact(g.subgraph(comp), budget)[0]
        if value > best_chi:
            best, best_chi = comp, value
    G2 = subfamily(rest, best)

    X, Y, Z = split_three(G2, thr.split_chi(j), budget)
    _record(log, "split", x=list(X.ids), y=list(Y.ids), z=list(Z.ids))
    try:
        ladder = ladder_split(Y, thr.step_a(), thr.step_b(), budget)
    except PreconditionFailed as exc:
        raise StepInfeasible("ladder", str(exc)) from exc
    cliques = k_cliques(build_graph(ladder.h), k)
    if not cliques:
        raise StepInfeasible("clique", f"ladder class {list(ladder.h.ids)} holds no {k}-clique")
    K = [Y.by_id(v) for v in cliques[0]]
    interior = int_of_clique(K, f)
    P = next((m for m in Y.members if m.region <= interior), None)
    if P is None:
        raise StepInfeasible("interior", f"no member of Y lies inside int({', '.join(cliques[0])})")
    outside = ext(s_prev, f)
    S_j = next((s for s in Fj.members
                if s.region.intersects(P.region) and s.region.intersects(outside)), None)
    if S_j is None:
        raise StepInfeasible("support", f"nothing in F_{j} touches {P.id} and ext(scaffold)")
    if S_j.base_span[1] < G2[0].base_span[0]:
        source = X
    elif S_j.base_span[0] > G2[len(G2) - 1].base_span[1]:
        source = Z
    else:
        raise StepInfeasible("side", f"{S_j.id} is neither before nor after G''")
    bracket = make_bracket(K, S_j, f)
    _record(log, "bracket", clique=list(bracket.clique_ids), support=S_j.id, side=bracket.side, p=P.id)

    blocked = _union(K) | S_j.region
    working = subfamily(source, [m.id for m in source if m.region.isdisjoint(blocked)])
    scaffold = list(state.scaffold)
    for m in K + [S_j]:
        if all(m.id != s.id for s in scaffold):
            scaffold.append(m)
    new_state = ClaimStepState(j, tuple(scaffold), working, state.supports + (S_j,), ())
    checks = audit_state(new_state, F, thr, budget)
    _record(log, "audit", level=j, working=list(working.ids), checks=checks)
    return ClaimStepState(j, tuple(scaffold), working, new_state.supports, tuple(log))


def supported_chain(F: GroundedFamily, k: int, a: int, budget=None) -> List[GroundedFamily]:
    """F_0, ..., F_k with F_{j-1} an externally supported layer of F_j and F_k one of F."""
    chain = [externally_supported(F, a, budget)]
    for _ in range(k):
        chain.append(externally_supported(chain[-1], a, budget))
    chain.reverse()
    return chain


def run_claim_chain(chain: Sequence[GroundedFamily], F: GroundedFamily, k: int, bounds: BoundTable,
                    overrides: Optional[Dict] = None, budget=None):
    """Bootstrap on chain[0] and step upward; stops at the first infeasible stage."""
    states = []
    try:
        states.append(claim_bootstrap(chain[0], F, k, bounds, overrides, budget))
        for j in range(1, min(k, len(chain) - 1) + 1):
            states.append(claim_step(states[-1], chain[j], F, k, bounds, overrides, budget))
    except StepInfeasible as exc:
        logger.info("scaffold chain stopped at level %d: %s", len(states), exc)
        return states, exc
    return states, None


def provenance_lines(states: Sequence[ClaimStepState]) -> List[dict]:
    return [dict(entry) for entry in (states[-1].log if states else ())]


def write_provenance(states: Sequence[ClaimStepState], path) -> Path:
    """One JSON object per line, in the order the choices were made."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = provenance_lines(states)
    with path.open("w", encoding="utf-8") as fh:
        for entry in lines:
            fh.write(json.dumps(entry, sort_keys=True, default=str) + "\n")
    logger.info("wrote %d provenance records to %s", len(lines), path)
    return path
