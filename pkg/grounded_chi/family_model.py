"""
Grounded sets and families, the base order, pierced families and their
reduction, instance generators, and the family / scene file format.

File format (JSON, UTF-8):
  {"frame": {"width": W, "height": H},
   "pierced": false,
   "sets": [{"id": "A", "cells": [[x, y], ...], "role": "D"}, ...]}
"role" is present only in scene files ("S", "pillar" or "D"). Pierced files
hold cells with -H < y < H.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .errors import (
    BasesOverlap,
    FrameTooSmall,
    GenerationBudgetExceeded,
    InvalidPierced,
    ParseError,
    ValidationError,
)
from .graph_core import Coloring, build_graph, interval_base_coloring, omega_exact
from .grid_topology import (
    STEPS,
    Cell,
    CellSet,
    Frame,
    check_simple,
    connected_components,
    is_connected,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundedSet:
    id: str
    region: CellSet
    base: CellSet = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        region = self.region if isinstance(self.region, CellSet) else CellSet(self.region)
        object.__setattr__(self, "region", region)
        if not region:
            raise ValidationError(f"{self.id}: empty region")
        if region.bbox.min_y < 0:
            raise ValidationError(f"{self.id}: cells below the baseline")
        base = region.row(0)
        if not base:
            raise ValidationError(f"{self.id}: misses the baseline")
        if base.bbox.width != len(base):
            raise ValidationError(f"{self.id}: base is not contiguous")
        if not is_connected(region):
            raise ValidationError(f"{self.id}: region is not 4-connected")
        object.__setattr__(self, "base", base)

    @property
    def base_span(self) -> Tuple[int, int]:
        return (self.base.bbox.min_x, self.base.bbox.max_x)


def precedes(a: GroundedSet, b: GroundedSet) -> bool:
    (a0, a1), (b0, b1) = a.base_span, b.base_span
    if a0 <= b1 and b0 <= a1:
        raise BasesOverlap(a.id, b.id)
    return a1 < b0


@dataclass(frozen=True)
class GroundedFamily:
    members: Tuple[GroundedSet, ...]
    frame: Frame

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(m.id for m in self.members)

    def by_id(self, set_id) -> GroundedSet:
        for m in self.members:
            if m.id == set_id:
                return m
        raise KeyError(set_id)

    def index(self, set_id) -> int:
        return self.ids.index(set_id)

    def regions(self) -> Dict[str, CellSet]:
        return {m.id: m.region for m in self.members}

    def union(self) -> CellSet:
        out = CellSet()
        for m in self.members:
            out = out | m.region
        return out


def _base_key(m):
    return m.base_span[0]


def validate(F: GroundedFamily):
    """Raise ValidationError naming the first violated family invariant."""
    seen = set()
    for m in F.members:
        if m.id in seen:
            raise ValidationError(f"duplicate id: {m.id}")
        seen.add(m.id)
        try:
            F.frame.check(m.region)
        except FrameTooSmall as exc:
            raise ValidationError(f"{m.id} does not fit the frame: {exc}") from exc
    for prev, cur in zip(F.members, F.members[1:]):
        if prev.base_span[1] >= cur.base_span[0]:
            raise ValidationError(f"bases overlap: {prev.id},{cur.id}")
    report = check_simple([m.region for m in F.members])
    if not report.passed:
        ids = ",".join(F.members[i].id for i in report.witness)
        raise ValidationError(f"not simple: intersection of {ids} has {len(report.components)} components")


def make_family(sets: Iterable[GroundedSet], frame: Frame, check=True) -> GroundedFamily:
    members = sorted(sets, key=_base_key)
    fam = GroundedFamily(tuple(members), frame)
    if check:
        validate(fam)
    return fam


def subfamily(F: GroundedFamily, ids: Iterable[str]) -> GroundedFamily:
    keep = set(ids)
    return GroundedFamily(tuple(m for m in F.members if m.id in keep), F.frame)


def restrict_between(F: GroundedFamily, lo: Optional[GroundedSet] = None,
                     hi: Optional[GroundedSet] = None) -> GroundedFamily:
    """Members strictly between lo and hi; None stands for -inf / +inf."""
    lo_x = lo.base_span[1] if lo is not None else None
    hi_x = hi.base_span[0] if hi is not None else None
    keep = []
    for m in F.members:
        m0, m1 = m.base_span
        if lo_x is not None and m0 <= lo_x:
            continue
        if hi_x is not None and m1 >= hi_x:
            continue
        keep.append(m)
    return GroundedFamily(tuple(keep), F.frame)


# pierced families and the reduction

@dataclass(frozen=True)
class PiercedFamily:
    """Members meet row 0 in one run; the frame spans -height < y < height."""
    members: Tuple[Tuple[str, CellSet], ...]
    frame: Frame

    @property
    def ids(self):
        return tuple(i for i, _ in self.members)


def base_interval(cells: CellSet) -> Tuple[int, int]:
    row = cells.row(0)
    return (row.bbox.min_x, row.bbox.max_x)


def validate_pierced(P: PiercedFamily):
    for set_id, cells in P.members:
        if not cells or not is_connected(cells):
            raise InvalidPierced(f"{set_id}: not 4-connected")
        row = cells.row(0)
        if not row:
            raise InvalidPierced(f"{set_id}: misses the piercing row")
        if row.bbox.width != len(row):
            raise InvalidPierced(f"{set_id}: piercing run is not contiguous")
        box = cells.bbox
        if box.min_x < 0 or box.max_x >= P.frame.width or abs(box.min_y) >= P.frame.height \
                or box.max_y >= P.frame.height:
            raise InvalidPierced(f"{set_id}: does not fit the frame")


def upper_half(cells: CellSet) -> CellSet:
    return CellSet(c for c in cells if c.y >= 0)


def lower_half_mirrored(cells: CellSet) -> CellSet:
    return CellSet((c.x, -c.y) for c in cells if c.y <= 0)


@dataclass(frozen=True)
class ClassPlan:
    color: int
    ids: Tuple[str, ...]
    upper: GroundedFamily
    lower: GroundedFamily


@dataclass(frozen=True)
class ReductionPlan:
    base_coloring: Coloring
    classes: Tuple[ClassPlan, ...]

    def combine(self, upper: Mapping[int, Coloring], lower: Mapping[int, Coloring]) -> Coloring:
        """
        Color each member by the triple (class, upper color, lower color)
        packed into one index of the product palette.
        """
        up_size = max([upper[c.color].palette for c in self.classes] + [1])
        low_size = max([lower[c.color].palette for c in self.classes] + [1])
        colors = {}
        for plan in self.classes:
            for set_id in plan.ids:
                up = upper[plan.color].colors[set_id]
                low = lower[plan.color].colors[set_id]
                colors[set_id] = (plan.color * up_size + up) * low_size + low
        return Coloring(colors)

    def palette_bound(self, upper: Mapping[int, Coloring], lower: Mapping[int, Coloring]) -> int:
        up_size = max([upper[c.color].palette for c in self.classes] + [1])
        low_size = max([lower[c.color].palette for c in self.classes] + [1])
        return len(self.classes) * up_size * low_size


def reduce_pierced_to_grounded(P: PiercedFamily) -> ReductionPlan:
    validate_pierced(P)
    intervals = {set_id: base_interval(cells) for set_id, cells in P.members}
    base_coloring = interval_base_coloring(intervals)
    regions = dict(P.members)
    classes = []
    for color, ids in sorted(base_coloring.classes().items()):
        halves = {"upper": [], "lower": []}
        for set_id in ids:
            up = upper_half(regions[set_id])
            low = lower_half_mirrored(regions[set_id])
            for name, part in (("upper", up), ("lower", low)):
                if not is_connected(part):
                    raise InvalidPierced(f"{set_id}: {name} half is not 4-connected")
                halves[name].append(GroundedSet(set_id, part))
        try:
            upper = make_family(halves["upper"], P.frame)
            lower = make_family(halves["lower"], P.frame)
        except ValidationError as exc:
            raise InvalidPierced(f"class {color}: {exc}") from exc
        classes.append(ClassPlan(color, tuple(m.id for m in upper.members), upper, lower))
    logger.info("pierced family of %d members split into %d base classes", len(P.members), len(classes))
    return ReductionPlan(base_coloring, tuple(classes))


# generators

@dataclass(frozen=True)
class Scene:
    """A dist2 scene: the enclosing region S, pillars and D-members."""
    frame: Frame
    s: CellSet
    pillars: Tuple[GroundedSet, ...]
    d: Tuple[GroundedSet, ...] = ()

    def family(self) -> GroundedFamily:
        return make_family(self.pillars + self.d, self.frame, check=False)


@dataclass(frozen=True)
class Generated:
    family: GroundedFamily
    witness: dict = field(default_factory=dict)
    rejected: int = 0
    scene: Optional[Scene] = None


def label(i):
    return chr(ord("A") + i) if i < 26 else f"K{i}"


def _column(x, y0, y1):
    return [(x, y) for y in range(y0, y1 + 1)]


def _row(y, x0, x1):
    lo, hi = min(x0, x1), max(x0, x1)
    return [(x, y) for x in range(lo, hi + 1)]


def _clique_cells(k, x0=0, height=2, spacing=4):
    """Pillars at x0, x0+spacing, ... all joined along row `height` to a common apex."""
    xs = [x0 + spacing * i for i in range(k)]
    apex = x0 + spacing * (k - 1) // 2
    return [_column(px, 0, height) + _row(height, px, apex) for px in xs]


def _fit(frame, default, sets):
    frame = frame or default
    for s in sets:
        frame.check(s.region)
    return frame


def gen_clique(k, frame: Optional[Frame] = None) -> Generated:
    cells = _clique_cells(k)
    sets = [GroundedSet(label(i), CellSet(c)) for i, c in enumerate(cells)]
    frame = _fit(frame, Frame(4 * (k - 1) + 1, 3), sets)
    fam = make_family(sets, frame)
    return Generated(fam, {"clique": list(fam.ids)})


def gen_bracket(k, frame: Optional[Frame] = None) -> Generated:
    """Clique plus a support coming from the right, over the top, down into int(K)."""
    height = 2
    cells = _clique_cells(k, height=height)
    xs = 4 * (k - 1) + 2
    support = _column(xs, 0, height + 1) + _row(height + 1, 2, xs) + _column(2, height - 1, height)
    sets = [GroundedSet(label(i), CellSet(c)) for i, c in enumerate(cells)]
    sets.append(GroundedSet("S", CellSet(support)))
    frame = _fit(frame, Frame(xs + 1, height + 2), sets)
    fam = make_family(sets, frame)
    return Generated(fam, {"clique": [label(i) for i in range(k)], "support": "S", "side": "right"})


def gen_chain(n) -> Generated:
    """Path family: X_i meets exactly X_{i-1} and X_{i+1}."""
    sets = []
    for i in range(n):
        x = 3 * i
        sets.append(GroundedSet(f"X{i}", CellSet(_column(x, 0, 1) + _row(1, x, x + 3))))
    fam = make_family(sets, Frame(3 * n + 1, 2))
    return Generated(fam, {"chain": list(fam.ids)})


def gen_clique_with_pockets(k) -> Generated:
    """
    A k-clique with pillars six columns apart and, under the arch in every
    gap, an intersecting pair of small sets disjoint from the clique.
    """
    height = 3
    sets = [GroundedSet(f"C{i}", CellSet(c))
            for i, c in enumerate(_clique_cells(k, height=height, spacing=6))]
    for g in range(k - 1):
        x = 6 * g
        sets.append(GroundedSet(f"P{g}a", CellSet(_column(x + 1, 0, 1) + _row(1, x + 1, x + 3))))
        sets.append(GroundedSet(f"P{g}b", CellSet(_column(x + 5, 0, 1) + _row(1, x + 3, x + 5))))
    fam = make_family(sets, Frame(6 * (k - 1) + 1, height + 1))
    return Generated(fam, {"clique": [f"C{i}" for i in range(k)]})


def juxtapose(families: Sequence[GroundedFamily], gap=1) -> GroundedFamily:
    """Families side by side, left to right; ids get an F<n>. prefix on clashes."""
    all_ids = [i for F in families for i in F.ids]
    prefix = len(set(all_ids)) != len(all_ids)
    sets, offset, height = [], 0, 1
    for n, F in enumerate(families):
        for m in F.members:
            new_id = f"F{n}.{m.id}" if prefix else m.id
            sets.append(GroundedSet(new_id, m.region.translate(offset)))
        offset += F.frame.width + gap
        height = max(height, F.frame.height)
    return make_family(sets, Frame(max(offset - gap, 1), height))


PILLAR_SPACING = 4
SCENE_HEIGHT = 6


def _pillar_layout(m, height):
    xs = [3 + PILLAR_SPACING * i for i in range(m)]
    width = xs[-1] + 4 if xs else 4
    s = _column(0, 0, height) + _column(width - 1, 0, height) + _row(height, 0, width - 1)
    return xs, width, CellSet(s)


def gen_pillars(m, frame: Optional[Frame] = None, height=SCENE_HEIGHT) -> Generated:
    """Arc S over p=(0,0)..q=(W-1,0) and m disjoint pillars from the baseline up to S."""
    xs, width, s = _pillar_layout(m, height)
    pillars = [GroundedSet(f"R{i + 1}", CellSet(_column(x, 0, height))) for i, x in enumerate(xs)]
    frame = frame or Frame(width, height + 1)
    frame.check(s)
    fam = make_family(pillars, frame)
    scene = Scene(frame, s, fam.members)
    return Generated(fam, {"S": "S", "pillars": list(fam.ids)}, scene=scene)


def gen_crossing_pillars(seed, m, steps=8, height=SCENE_HEIGHT) -> Generated:
    """
    Arc S as in gen_pillars and m pillars that may cross each other: each a
    random walk from its own base cell, finished by a straight climb to S.
    The family is not required to be simple.
    """
    rng = np.random.default_rng(seed)
    width = 2 * m + 3
    s = CellSet(_column(0, 0, height) + _column(width - 1, 0, height) + _row(height, 0, width - 1))
    frame = Frame(width, height + 1)
    xs = sorted(rng.choice(range(1, width - 1), size=m, replace=False).tolist())

    def allowed(c):
        return 1 <= c.x < width - 1 and 1 <= c.y < height

    pillars = []
    for i, bx in enumerate(xs):
        cells = _walk(rng, (bx, 1), steps, allowed)
        top = cells[-1]
        cells += _column(top.x, top.y, height)
        cells.append((bx, 0))
        pillars.append(GroundedSet(f"R{i + 1}", CellSet(cells)))
    fam = make_family(pillars, frame, check=False)
    return Generated(fam, {"S": "S", "pillars": list(fam.ids), "seed": seed}, scene=Scene(frame, s, fam.members))


def _walk(rng, start, steps, allowed, toward=None, bias=0.0):
    """Cells visited by a random walk that stays inside `allowed`."""
    cur = Cell(*start)
    visited = [cur]
    for _ in range(steps):
        moves = [Cell(cur.x + dx, cur.y + dy) for dx, dy in STEPS]
        moves = [c for c in moves if allowed(c)]
        if not moves:
            break
        if toward is not None and rng.random() < bias:
            tx, ty = toward
            moves.sort(key=lambda c: abs(c.x - tx) + abs(c.y - ty))
            cur = moves[0]
        else:
            cur = moves[int(rng.integers(len(moves)))]
        visited.append(cur)
    return visited


def gen_random(seed, n, frame: Optional[Frame] = None, steps=12, attach_bias=0.3,
               max_attempts: Optional[int] = None) -> Generated:
    """
    n grounded sets grown by random walks from disjoint base runs. Each set
    is regrown until the family so far stays simple.
    """
    if n <= 0 or steps < 0:
        raise ValidationError("n must be positive and steps non-negative")
    rng = np.random.default_rng(seed)
    attempts = max_attempts or config.GEN_ATTEMPTS
    runs, x = [], 1
    for _ in range(n):
        w = int(rng.integers(1, 3))
        runs.append(list(range(x, x + w)))
        x += w + int(rng.integers(1, 3))
    frame = frame or Frame(x + 1, 8)
    if runs[-1][-1] >= frame.width:
        raise FrameTooSmall(frame, (runs[-1][-1], 0))

    def allowed(c):
        return 0 <= c.x < frame.width and 1 <= c.y < frame.height

    sets, rejected = [], 0
    for i, run in enumerate(runs):
        for attempt in range(attempts):
            start = (run[int(rng.integers(len(run)))], 1)
            toward = None
            if sets:
                other = sets[int(rng.integers(len(sets)))].region.sorted()
                toward = other[int(rng.integers(len(other)))]
            cells = set(_walk(rng, start, steps, allowed, toward, attach_bias))
            cells.update((bx, 0) for bx in run)
            candidate = GroundedSet(f"G{i}", CellSet(cells))
            if check_simple([s.region for s in sets] + [candidate.region]).passed:
                sets.append(candidate)
                break
            rejected += 1
        else:
            raise GenerationBudgetExceeded(attempts)
    fam = make_family(sets, frame)
    logger.info("gen_random seed=%s n=%d rejected=%d", seed, n, rejected)
    return Generated(fam, {"seed": seed, "n": n, "steps": steps, "attach_bias": attach_bias}, rejected)


def gen_dist2_scene(seed, m, n_d, steps=10, max_clique=2, height=SCENE_HEIGHT,
                    max_attempts: Optional[int] = None) -> Generated:
    """
    gen_pillars scene plus n_d random D-members grown inside the arc, each
    meeting a pillar below S. R and D together stay simple with clique
    number at most max_clique.
    """
    rng = np.random.default_rng(seed)
    attempts = max_attempts or config.GEN_ATTEMPTS
    xs, width, s = _pillar_layout(m, height)
    frame = Frame(width, height + 1)
    pillars = [GroundedSet(f"R{i + 1}", CellSet(_column(x, 0, height))) for i, x in enumerate(xs)]
    pillar_cells = CellSet(c for p in pillars for c in p.region if c.y < height)
    free_base = [x for x in range(1, width - 1) if x not in xs]
    if len(free_base) < n_d:
        raise GenerationBudgetExceeded(0)
    picked = sorted(rng.choice(free_base, size=n_d, replace=False).tolist())

    def allowed(c):
        return 1 <= c.x < width - 1 and 1 <= c.y < height

    members, rejected = [], 0
    for i, bx in enumerate(picked):
        for attempt in range(attempts):
            target = xs[int(rng.integers(len(xs)))]
            cells = set(_walk(rng, (bx, 1), steps, allowed, (target, int(rng.integers(1, height))), 0.4))
            cells.add(Cell(bx, 0))
            candidate = GroundedSet(f"D{i + 1}", CellSet(cells))
            if candidate.region.isdisjoint(pillar_cells):
                rejected += 1
                continue
            regions = [p.region for p in pillars] + [d.region for d in members] + [candidate.region]
            if not check_simple(regions).passed:
                rejected += 1
                continue
            ids = [p.id for p in pillars] + [d.id for d in members] + [candidate.id]
            size, _ = omega_exact(build_graph(dict(zip(ids, regions))))
            if size > max_clique:
                rejected += 1
                continue
            members.append(candidate)
            break
        else:
            raise GenerationBudgetExceeded(attempts)
    fam = make_family(pillars + members, frame)
    scene = Scene(frame, s, tuple(pillars), tuple(members))
    witness = {"S": "S", "pillars": [p.id for p in pillars], "D": [d.id for d in members], "seed": seed}
    return Generated(fam, witness, rejected, scene)


def gen_pierced(seed, n, width=None, height=5, steps=6,
                max_attempts: Optional[int] = None) -> PiercedFamily:
    """Random pierced family; upper and lower halves of all members stay simple."""
    rng = np.random.default_rng(seed)
    attempts = max_attempts or config.GEN_ATTEMPTS
    width = width or 3 * n + 4
    frame = Frame(width, height)

    def up_ok(c):
        return 0 <= c.x < width and 1 <= c.y < height

    def down_ok(c):
        return 0 <= c.x < width and -height < c.y <= -1

    members = []
    for i in range(n):
        for attempt in range(attempts):
            lo = int(rng.integers(0, width - 3))
            hi = lo + int(rng.integers(0, 3))
            run = [(x, 0) for x in range(lo, hi + 1)]
            up = _walk(rng, (int(rng.integers(lo, hi + 1)), 1), steps, up_ok)
            down = _walk(rng, (int(rng.integers(lo, hi + 1)), -1), steps, down_ok)
            cells = CellSet(run + up + down)
            trial = members + [(f"P{i}", cells)]
            if check_simple([upper_half(c) for _, c in trial]).passed and \
                    check_simple([lower_half_mirrored(c) for _, c in trial]).passed:
                members.append((f"P{i}", cells))
                break
        else:
            raise GenerationBudgetExceeded(attempts)
    members.sort(key=lambda m: (base_interval(m[1])[0], m[0]))
    return PiercedFamily(tuple(members), frame)


# serialization

def _set_doc(set_id, cells, role=None):
    doc = {"id": set_id, "cells": cells.to_list()}
    if role:
        doc["role"] = role
    return doc


def to_json(obj: Union[GroundedFamily, PiercedFamily, Scene]) -> dict:
    if isinstance(obj, Scene):
        sets = [_set_doc("S", obj.s, "S")]
        sets += [_set_doc(p.id, p.region, "pillar") for p in obj.pillars]
        sets += [_set_doc(d.id, d.region, "D") for d in obj.d]
        return {"frame": obj.frame.to_json(), "pierced": False, "sets": sets}
    if isinstance(obj, PiercedFamily):
        sets = [_set_doc(i, c) for i, c in obj.members]
        return {"frame": obj.frame.to_json(), "pierced": True, "sets": sets}
    return {"frame": obj.frame.to_json(), "pierced": False,
            "sets": [_set_doc(m.id, m.region) for m in obj.members]}


def dumps(obj) -> str:
    return json.dumps(to_json(obj), indent=2) + "\n"


def save(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")


def _parse_cells(path, n, raw):
    if not isinstance(raw, list):
        raise ParseError(path, f"sets[{n}].cells", "expected a list of [x, y] pairs")
    cells = []
    for c in raw:
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(v, int) for v in c)):
            raise ParseError(path, f"sets[{n}].cells", f"bad cell {c!r}")
        cells.append((c[0], c[1]))
    return CellSet(cells)


def from_json(doc, path="<memory>"):
    try:
        frame = Frame(int(doc["frame"]["width"]), int(doc["frame"]["height"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, "frame", f"missing or malformed ({exc})") from exc
    raw_sets = doc.get("sets")
    if not isinstance(raw_sets, list):
        raise ParseError(path, "sets", "expected a list")
    parsed = []
    for n, raw in enumerate(raw_sets):
        if not isinstance(raw, dict) or "id" not in raw:
            raise ParseError(path, f"sets[{n}]", "expected an object with an id")
        parsed.append((str(raw["id"]), _parse_cells(path, n, raw.get("cells")), raw.get("role")))

    if doc.get("pierced"):
        P = PiercedFamily(tuple(sorted(((i, c) for i, c, _ in parsed),
                                       key=lambda m: (base_interval(m[1])[0] if m[1].row(0) else 0, m[0]))),
                          frame)
        validate_pierced(P)
        return P
    if any(role for _, _, role in parsed):
        s = CellSet()
        pillars, d = [], []
        for set_id, cells, role in parsed:
            if role == "S":
                s = s | cells
            elif role == "pillar":
                pillars.append(GroundedSet(set_id, cells))
            elif role == "D":
                d.append(GroundedSet(set_id, cells))
            else:
                raise ParseError(path, f"{set_id}.role", f"unknown role {role!r}")
        frame.check(s)
        fam = make_family(pillars + d, frame)
        pillar_ids = {p.id for p in pillars}
        return Scene(frame, s,
                     tuple(m for m in fam.members if m.id in pillar_ids),
                     tuple(m for m in fam.members if m.id not in pillar_ids))
    return make_family([GroundedSet(i, c) for i, c, _ in parsed], frame)


def load(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"line {exc.lineno}", exc.msg) from exc
    if not isinstance(doc, dict):
        raise ParseError(path, "<root>", "expected an object")
    return from_json(doc, path)
