"""
Coloring the members of D that reach into the pillars R under an arc S.

Stages, each usable on its own:
  build_pillar_context  pocket J, rim, pillar cuts, neighbor regions I_i
  pillar_classes        chain classes of the cuts, D split by first cut met
  clip                  leftclip / rightclip of every member
  color_rightclips      phi^R: same color => rightclips disjoint
  attach_to_baseline    leftclips of one phi^R class turned into a grounded family
  final_four_color      psi on one (phi^R, phi^L) cell through a planar component graph
  color_dist2           everything, D^L minus D^R handled on the mirrored scene

Trace files (JSON) hold the frame, S, pillars, members, I regions, clip
overlays and the final color tuples, and feed `render`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import (
    AuditFailure,
    CliqueBoundViolated,
    ClipDisjointnessViolated,
    GroundedError,
    HypothesisViolated,
    MemberMissesAllPillars,
    NotSurrounded,
    PillarMissesS,
    PillarsNotDisjoint,
    RoutingFailed,
    SimplicityHypothesisViolated,
    StageError,
    ValidationError,
)
from .family_model import GroundedFamily, GroundedSet, make_family
from .graph_core import (
    BoundTable,
    Coloring,
    IntersectionGraph,
    build_graph,
    chi_exact,
    omega_exact,
    pillar_order_coloring,
    planar_color,
)
from .grid_topology import (
    EMPTY,
    CellSet,
    ComplementMap,
    Frame,
    boundary_neighbors,
    check_simple,
    connected_components,
    cut,
    flood,
    is_connected,
    shortest_path,
    surrounded_by,
)

logger = logging.getLogger(__name__)

Oracle = Callable[[IntersectionGraph, int], Coloring]


@dataclass(frozen=True)
class PillarContext:
    """
    I has m+1 entries: I[0] and I[m] are empty, I[i] (0 < i < m) is the
    part of the pocket neighboring both the i-th and (i+1)-th pillar.
    """
    frame: Frame
    s: CellSet
    rim: CellSet
    pocket: CellSet
    pillar_ids: Tuple[str, ...]
    cuts: Tuple[CellSet, ...]
    neighbors: Tuple[CellSet, ...]
    I: Tuple[CellSet, ...]
    p: Optional[Tuple[int, int]] = None
    q: Optional[Tuple[int, int]] = None

    @property
    def m(self):
        return len(self.cuts)

    def pillars_union(self) -> CellSet:
        out = EMPTY
        for c in self.cuts:
            out = out | c
        return out


def build_pillar_context(s: CellSet, pillars: Sequence[GroundedSet], f: Frame,
                         disjoint: bool = True) -> PillarContext:
    """
    With disjoint=False the cuts may cross; I regions are then only
    meaningful inside one pillar class, where cuts are pairwise disjoint.
    """
    pillars = sorted(pillars, key=lambda r: r.base_span[0])
    for r in pillars:
        if r.region.isdisjoint(s):
            raise PillarMissesS(f"{r.id} never reaches S")
        if not surrounded_by(r.base, s, f):
            raise NotSurrounded(f"base of {r.id} is not surrounded by S")

    cmap = ComplementMap(s, f)
    pocket = EMPTY
    if pillars:
        labels = {cmap.label_of(r.base.least()) for r in pillars}
        if len(labels) > 1:
            raise NotSurrounded("pillar bases lie in different pockets of S")
        pocket = cmap.component(labels.pop())
    else:
        pockets = cmap.pockets()
        pocket = pockets[0] if pockets else EMPTY
    rim = boundary_neighbors(pocket) & s
    base_rim = rim.row(0).sorted()

    cuts = tuple(cut(r, s, f) & pocket for r in pillars)
    if disjoint:
        for (a, ca), (b, cb) in combinations(zip(pillars, cuts), 2):
            if ca.intersects(cb):
                raise PillarsNotDisjoint(f"{a.id} and {b.id} intersect below S")
    free = pocket
    for c in cuts:
        free = free - c
    neighbors = tuple(flood(free, boundary_neighbors(c) & free) for c in cuts)
    m = len(cuts)
    I = [EMPTY] * (m + 1)
    for i in range(1, m):
        I[i] = neighbors[i - 1] & neighbors[i]
    ctx = PillarContext(f, s, rim, pocket, tuple(r.id for r in pillars), cuts, neighbors, tuple(I),
                        tuple(base_rim[0]) if base_rim else None,
                        tuple(base_rim[-1]) if base_rim else None)
    logger.debug("pillar context: %d pillars, pocket of %d cells", m, len(pocket))
    return ctx


def _sequence_positions(ctx: PillarContext, region: CellSet) -> List[int]:
    """Positions met in R_1, I_1, R_2, ..., I_{m-1}, R_m (even: pillars, odd: I)."""
    hit = []
    for i, c in enumerate(ctx.cuts):
        if region.intersects(c):
            hit.append(2 * i)
        if i + 1 < ctx.m and region.intersects(ctx.I[i + 1]):
            hit.append(2 * i + 1)
    return hit


def audit_context(ctx: PillarContext, probes: int = 40, seed: int = 0) -> dict:
    """
    Raises AuditFailure unless: I regions are pairwise disjoint and miss
    every pillar; no pocket cell neighbors two non-consecutive pillars;
    a pocket path between two pillars crosses every pillar in between; a
    pocket path meets an interval of R_1, I_1, ..., R_m.
    """
    inner = [r for r in ctx.I if r]
    for a, b in combinations(inner, 2):
        if a.intersects(b):
            raise AuditFailure("I regions overlap")
    pillars = ctx.pillars_union()
    if any(r.intersects(pillars) for r in inner):
        raise AuditFailure("an I region meets a pillar")
    for i, j in combinations(range(ctx.m), 2):
        if j > i + 1 and ctx.neighbors[i].intersects(ctx.neighbors[j]):
            raise AuditFailure(f"a cell neighbors pillars {i + 1} and {j + 1}")

    crossing = 0
    for i, j in combinations(range(ctx.m), 2):
        path = shortest_path(ctx.pocket, ctx.cuts[i].least(), ctx.cuts[j].least())
        if path is None:
            raise AuditFailure(f"pillars {i + 1} and {j + 1} are not joined inside the pocket")
        cells = CellSet(path)
        for between in range(i + 1, j):
            if cells.isdisjoint(ctx.cuts[between]):
                raise AuditFailure(f"path from pillar {i + 1} to {j + 1} skips pillar {between + 1}")
        crossing += 1

    rng = np.random.default_rng(seed)
    cells = ctx.pocket.sorted()
    intervals = 0
    for _ in range(probes if len(cells) > 1 else 0):
        a, b = rng.choice(len(cells), size=2, replace=False).tolist()
        path = shortest_path(ctx.pocket, cells[a], cells[b])
        hit = _sequence_positions(ctx, CellSet(path))
        if hit and hit != list(range(hit[0], hit[-1] + 1)):
            raise AuditFailure(f"path {cells[a]} -> {cells[b]} meets {hit}, not an interval")
        intervals += 1
    return {"crossing_probes": crossing, "interval_probes": intervals}


# pillar classes

@dataclass(frozen=True)
class PillarClass:
    color: int
    pillars: Tuple[str, ...]
    members: Tuple[GroundedSet, ...]


def pillar_classes(ctx: PillarContext, D: Sequence[GroundedSet]) -> List[PillarClass]:
    """Members go to the class of the first cut (in pillar order) they meet."""
    coloring = pillar_order_coloring(list(zip(ctx.pillar_ids, ctx.cuts)))
    by_color: Dict[int, List[GroundedSet]] = {}
    for x in D:
        first = next((i for i, c in enumerate(ctx.cuts) if x.region.intersects(c)), None)
        if first is None:
            raise HypothesisViolated(x.id)
        by_color.setdefault(coloring[ctx.pillar_ids[first]], []).append(x)
    out = []
    for color in sorted(coloring.classes()):
        pillars = tuple(v for v in ctx.pillar_ids if coloring[v] == color)
        out.append(PillarClass(color, pillars, tuple(by_color.get(color, ()))))
    return out


# clipping

@dataclass(frozen=True)
class MemberClip:
    first: int
    last: int
    leftclip: CellSet
    rightclip: CellSet


@dataclass(frozen=True)
class ClipView:
    clips: Dict[str, MemberClip]

    def __getitem__(self, set_id) -> MemberClip:
        return self.clips[set_id]

    def leftclips(self, ids=None) -> Dict[str, CellSet]:
        return {v: self.clips[v].leftclip for v in (ids if ids is not None else self.clips)}

    def rightclips(self, ids=None) -> Dict[str, CellSet]:
        return {v: self.clips[v].rightclip for v in (ids if ids is not None else self.clips)}


def clip(ctx: PillarContext, D: Sequence[GroundedSet]) -> ClipView:
    clips = {}
    for x in D:
        hits = [i for i, c in enumerate(ctx.cuts) if x.region.intersects(c)]
        if not hits:
            raise MemberMissesAllPillars(f"{x.id} meets no pillar")
        first, last = hits[0], hits[-1]
        clips[x.id] = MemberClip(first, last, x.region - ctx.I[first], x.region - ctx.I[last + 1])
    return ClipView(clips)


def audit_clips(view: ClipView, omega_bound: Optional[int] = None) -> dict:
    """Clips are connected, both clipped families are simple, and optionally omega(clips) <= bound."""
    report = {}
    for side, regions in (("left", view.leftclips()), ("right", view.rightclips())):
        for v, r in regions.items():
            if not is_connected(r):
                raise AuditFailure(f"{side}clip of {v} is not connected")
        simple = check_simple(list(regions.values()))
        if not simple.passed:
            raise AuditFailure(f"{side}clips are not simple")
        size = omega_exact(build_graph(regions))[0] if regions else 0
        if omega_bound is not None and size > omega_bound:
            raise CliqueBoundViolated(f"{side}clips hold a clique of {size} > {omega_bound}")
        report[f"omega_{side}"] = size
    return report


# oracles for the induction hypothesis

def exact_oracle(g: IntersectionGraph, level: int) -> Coloring:
    return chi_exact(g)[1]


def recursive_oracle(g: IntersectionGraph, level: int) -> Coloring:
    """Level 1 is built directly (a clique-free family takes one color); above it the exact solver stands in."""
    if level <= 1:
        if g.edge_count:
            raise CliqueBoundViolated(f"level-1 family has {g.edge_count} intersecting pairs")
        return Coloring({v: 0 for v in g.ids})
    logger.debug("no constructive coloring at level %d; exact solver used", level)
    return chi_exact(g)[1]


def color_rightclips(view: ClipView, members: Sequence[GroundedSet], k: int,
                     oracle: Oracle = exact_oracle) -> Coloring:
    regions = view.rightclips([x.id for x in members])
    g = build_graph(regions)
    size, witness = omega_exact(g)
    if size > k - 1:
        raise CliqueBoundViolated(f"rightclips of {', '.join(witness)} pairwise intersect (k={k})")
    return oracle(g, k - 1)


# attaching leftclips to the baseline

@dataclass(frozen=True)
class Attached:
    family: GroundedFamily
    mapping: Dict[str, str]
    routed: Tuple[str, ...] = ()
    inserted: Dict[int, int] = field(default_factory=dict)


def _vertical_column(c: CellSet) -> Optional[int]:
    xs = {cell.x for cell in c}
    rows = sorted(cell.y for cell in c)
    if len(xs) != 1 or rows[0] != 0 or rows != list(range(rows[0], rows[-1] + 1)):
        return None
    return xs.pop()


def _insert_columns(regions: Dict[str, CellSet], x_b: int, f: int) -> Dict[str, CellSet]:
    """Shift cells with x >= x_b right by f; a row run crossing the seam is stretched over the new columns."""
    out = {}
    for v, r in regions.items():
        cells = [(c.x + f, c.y) if c.x >= x_b else (c.x, c.y) for c in r]
        for c in r:
            if c.x == x_b and (x_b - 1, c.y) in r:
                cells.extend((x_b + t, c.y) for t in range(f))
        out[v] = CellSet(cells)
    return out


def attach_to_baseline(ctx: PillarContext, M: Sequence[GroundedSet], view: ClipView) -> Attached:
    """
    Grounded family whose intersection graph equals that of leftclip(M).
    Floating leftclips get a tail through columns inserted just left of
    their first pillar: the member attached lowest on the pillar takes the
    column nearest to it, so tails never cross.
    """
    regions = view.leftclips([x.id for x in M])
    floating: Dict[int, List[str]] = {}
    for v, r in regions.items():
        if not r.row(0):
            floating.setdefault(view[v].first, []).append(v)

    width = ctx.frame.width
    routed, inserted = [], {}
    for first in sorted(floating, key=lambda i: -ctx.cuts[i].least().x):
        members = floating[first]
        x_b = _vertical_column(ctx.cuts[first])
        if x_b is None:
            raise RoutingFailed(first, members)
        attach_rows = {v: min(c.y for c in regions[v] & ctx.cuts[first]) for v in members}
        members = sorted(members, key=attach_rows.get)
        f = len(members)
        regions = _insert_columns(regions, x_b, f)
        width += f
        inserted[x_b] = f
        for j, v in enumerate(members):
            col, y = x_b + f - 1 - j, attach_rows[v]
            tail = CellSet([(x, y) for x in range(col, x_b + f)] + [(col, t) for t in range(y)])
            others = [u for u in regions if u != v]
            if any(tail.intersects(regions[u]) for u in others):
                raise RoutingFailed(first, members)
            regions[v] = regions[v] | tail
            routed.append(v)

    frame = Frame(width, ctx.frame.height)
    try:
        fam = make_family([GroundedSet(v, r) for v, r in regions.items()], frame)
    except (ValidationError, SimplicityHypothesisViolated) as exc:
        raise AuditFailure(f"attached family is not a valid grounded family: {exc}") from exc
    before = build_graph(view.leftclips([x.id for x in M]))
    after = build_graph(fam)
    if before.edge_set() != after.edge_set():
        raise AuditFailure("attached family changed the leftclip intersection graph")
    logger.debug("attached %d members, %d routed", len(fam), len(routed))
    return Attached(fam, {v: v for v in regions}, tuple(routed), inserted)


# the final four colors

@dataclass(frozen=True)
class ComponentMap:
    components: Tuple[Tuple[int, CellSet], ...]
    left: Dict[str, int]
    right: Dict[str, int]
    graph: IntersectionGraph

    def to_json(self):
        return {
            "components": [{"corridor": i, "cells": c.to_list()} for i, c in self.components],
            "left": dict(sorted(self.left.items())),
            "right": dict(sorted(self.right.items())),
        }


def component_map(ctx: PillarContext, N: Sequence[GroundedSet], view: ClipView) -> ComponentMap:
    """
    Components of (union of N) & I_i per corridor i; the pieces one member
    leaves behind on its left (or right) are merged into one node.
    """
    cut_left = {x.id: x.region - view[x.id].leftclip for x in N}
    cut_right = {x.id: x.region - view[x.id].rightclip for x in N}
    nodes: List[Tuple[int, CellSet]] = []
    for i in range(1, ctx.m):
        corridor = ctx.I[i]
        union = EMPTY
        for x in N:
            if (cut_left[x.id] and view[x.id].first == i) or (cut_right[x.id] and view[x.id].last + 1 == i):
                union = union | (x.region & corridor)
        nodes.extend((i, c) for c in connected_components(union))

    merge = nx.utils.UnionFind(range(len(nodes)))
    touched = {}
    for side, pieces in (("L", cut_left), ("R", cut_right)):
        for v, piece in pieces.items():
            hit = [n for n, (_, c) in enumerate(nodes) if c.intersects(piece)]
            if piece and not hit:
                raise AuditFailure(f"{v}: clipped part outside every corridor component")
            if hit:
                merge.union(*hit)
                touched[(side, v)] = hit[0]

    names = {}
    for n in range(len(nodes)):
        names.setdefault(merge[n], f"C{len(names)}")
    left = {v: names[merge[n]] for (side, v), n in touched.items() if side == "L"}
    right = {v: names[merge[n]] for (side, v), n in touched.items() if side == "R"}
    comps = []
    for root, name in names.items():
        cells = EMPTY
        corridor = None
        for n, (i, c) in enumerate(nodes):
            if merge[n] == root:
                cells = cells | c
                corridor = i if corridor is None else corridor
        comps.append((corridor, cells))
    pairs = [(left[v], right[v]) for v in left if v in right]
    for a, b in pairs:
        if a == b:
            raise AuditFailure("a member leaves both clipped parts in one component")
    graph = IntersectionGraph.from_edges(list(names.values()), pairs)
    return ComponentMap(tuple(comps), left, right, graph)


def final_four_color(ctx: PillarContext, N: Sequence[GroundedSet], view: ClipView) -> Coloring:
    ids = [x.id for x in N]
    for side, regions in (("left", view.leftclips(ids)), ("right", view.rightclips(ids))):
        for u, v in combinations(ids, 2):
            if regions[u].intersects(regions[v]):
                raise ClipDisjointnessViolated(f"{side}clips of {u} and {v} intersect")
    cmap = component_map(ctx, N, view)
    phi = planar_color(cmap.graph)
    psi = {}
    for v in ids:
        if v in cmap.left:
            psi[v] = phi[cmap.left[v]]
        elif v in cmap.right:
            psi[v] = 0 if phi[cmap.right[v]] != 0 else 1
        else:
            psi[v] = 0
    coloring = Coloring(psi)
    g = build_graph({x.id: x.region for x in N})
    if not coloring.is_proper(g) or coloring.palette > 4:
        raise AuditFailure(f"final coloring of {ids} is not a proper 4-coloring")
    return coloring


# the whole pipeline

def mirror_scene(s: CellSet, pillars: Sequence[GroundedSet], D: Sequence[GroundedSet], f: Frame):
    w = f.width
    return (s.mirror_x(w),
            [GroundedSet(r.id, r.region.mirror_x(w)) for r in pillars],
            [GroundedSet(x.id, x.region.mirror_x(w)) for x in D])


@dataclass
class Dist2Trace:
    frame: Frame
    s: CellSet
    pillars: Dict[str, CellSet]
    members: Dict[str, CellSet]
    I: List[CellSet] = field(default_factory=list)
    classes: Dict[int, List[str]] = field(default_factory=dict)
    sides: Dict[str, str] = field(default_factory=dict)
    clipped: Dict[str, CellSet] = field(default_factory=dict)
    components: List[dict] = field(default_factory=list)
    tuples: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    palette: int = 0
    oracle_palette: int = 0

    def to_json(self):
        return {
            "trace": "dist2",
            "frame": self.frame.to_json(),
            "S": self.s.to_list(),
            "pillars": {v: r.to_list() for v, r in self.pillars.items()},
            "members": {v: r.to_list() for v, r in self.members.items()},
            "I": [r.to_list() for r in self.I],
            "classes": {str(c): ids for c, ids in sorted(self.classes.items())},
            "sides": dict(sorted(self.sides.items())),
            "clipped": {v: r.to_list() for v, r in sorted(self.clipped.items())},
            "components": self.components,
            "colors": {v: list(t) for v, t in sorted(self.tuples.items())},
            "palette": self.palette,
            "oracle_palette": self.oracle_palette,
        }


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except GroundedError as exc:
        raise StageError(name, exc) from exc


def _color_right_side(ctx, members, k, oracle, trace, mirrored=False):
    """(phi^R, phi^L, psi) for members whose rightclip keeps a base."""
    out = {}
    if not members:
        return out, 0
    view = _stage("clip", clip, ctx, members)
    phi_r = _stage("rightclips", color_rightclips, view, members, k, oracle)
    widest = phi_r.palette
    for _, ids in sorted(phi_r.classes().items()):
        M = [x for x in members if x.id in ids]
        attached = _stage("attach", attach_to_baseline, ctx, M, view)
        g = build_graph(attached.family)
        size, witness = omega_exact(g)
        if size > k - 1:
            raise StageError("leftclips", CliqueBoundViolated(f"leftclips of {', '.join(witness)} pairwise intersect"))
        phi_l = oracle(g, k - 1)
        widest = max(widest, phi_l.palette)
        for _, cell_ids in sorted(phi_l.classes().items()):
            N = [x for x in M if x.id in cell_ids]
            psi = _stage("final", final_four_color, ctx, N, view)
            if not mirrored:
                trace.components.extend(component_map(ctx, N, view).to_json()["components"])
            for x in N:
                out[x.id] = (phi_r[x.id], phi_l[x.id], psi[x.id])
    if not mirrored:
        for x in members:
            trace.clipped[x.id] = x.region - view[x.id].rightclip
    return out, widest


def run_dist2(s: CellSet, pillars: Sequence[GroundedSet], D: Sequence[GroundedSet], k: int,
              bounds: Optional[BoundTable] = None, frame: Optional[Frame] = None,
              oracle: Oracle = exact_oracle) -> Tuple[Coloring, Dist2Trace]:
    members = list(D.members if isinstance(D, GroundedFamily) else D)
    if frame is None:
        frame = D.frame if isinstance(D, GroundedFamily) else None
    if frame is None:
        raise HypothesisViolated("-", "a frame is required")
    trace = Dist2Trace(frame, s, {r.id: r.region for r in pillars}, {x.id: x.region for x in members})
    if not members:
        return Coloring({}), trace

    ctx = _stage("context", build_pillar_context, s, pillars, frame, False)
    reach = ctx.pillars_union()
    for x in members:
        if not surrounded_by(x.region, s, frame):
            raise StageError("hypotheses", NotSurrounded(f"{x.id} is not surrounded by S"))
        if x.region.isdisjoint(reach):
            raise HypothesisViolated(x.id)
    everything = {r.id: r.region for r in pillars}
    everything.update({x.id: x.region for x in members})
    size, witness = omega_exact(build_graph(everything))
    if size > k:
        raise StageError("hypotheses", CliqueBoundViolated(f"{', '.join(witness)} form a clique above k={k}"))

    classes = _stage("classes", pillar_classes, ctx, members)
    by_pillar = {r.id: r for r in pillars}
    tuples: Dict[str, Tuple[int, ...]] = {}
    widest = 0
    for pc in classes:
        if not pc.members:
            continue
        trace.classes[pc.color] = [x.id for x in pc.members]
        class_pillars = [by_pillar[v] for v in pc.pillars]
        sub = _stage("context", build_pillar_context, s, class_pillars, frame)
        trace.I.extend(r for r in sub.I if r)
        view = _stage("clip", clip, sub, pc.members)
        right = [x for x in pc.members if view[x.id].rightclip.row(0)]
        left = [x for x in pc.members if not view[x.id].rightclip.row(0)]
        colored, p = _color_right_side(sub, right, k, oracle, trace)
        widest = max(widest, p)
        for v, t in colored.items():
            tuples[v] = (pc.color, 0) + t
            trace.sides[v] = "right"
        if left:
            ms, mp, mx = mirror_scene(s, class_pillars, left, frame)
            mctx = _stage("context", build_pillar_context, ms, mp, frame)
            colored, p = _color_right_side(mctx, mx, k, oracle, trace, mirrored=True)
            widest = max(widest, p)
            for v, t in colored.items():
                tuples[v] = (pc.color, 1) + t
                trace.sides[v] = "left"

    index = {t: n for n, t in enumerate(sorted(set(tuples.values())))}
    coloring = Coloring({x.id: index[tuples[x.id]] for x in members})
    g = build_graph({x.id: x.region for x in members})
    if not coloring.is_proper(g):
        raise AuditFailure("combined dist2 coloring is not proper")
    bound = 8 * k * widest * widest
    if coloring.palette > bound:
        raise AuditFailure(f"palette {coloring.palette} exceeds 8k p^2 = {bound}")
    if bounds is not None and k in bounds.beta and widest <= bounds.xi[k - 1] and coloring.palette > bounds.beta[k]:
        raise AuditFailure(f"palette {coloring.palette} exceeds beta_{k}={bounds.beta[k]}")
    trace.tuples = tuples
    trace.palette = coloring.palette
    trace.oracle_palette = widest
    logger.info("dist2: %d members, %d classes, palette %d (oracle %d)",
                len(members), len(trace.classes), coloring.palette, widest)
    return coloring, trace


def color_dist2(s: CellSet, pillars: Sequence[GroundedSet], D, k: int, bounds: Optional[BoundTable] = None,
                frame: Optional[Frame] = None, oracle: Oracle = exact_oracle) -> Coloring:
    return run_dist2(s, pillars, D, k, bounds, frame, oracle)[0]
