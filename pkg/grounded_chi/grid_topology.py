"""
Exact discrete topology of the closed upper half-plane.

Cells are (x, y) with y >= 0; row 0 is the baseline. Regions and their
complements are both taken with 4-adjacency. A frame is the window
[0, width) x [0, height); the ring of cells just outside it (columns -1 and
width, row height) stands for infinity, so ext(r) is the complement
component reaching that ring.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, List, NamedTuple, Optional, Sequence

import networkx as nx
import numpy as np
from scipy import ndimage

from .errors import (
    BaseNotSurrounded,
    FrameTooSmall,
    NotConnected,
    SimplicityHypothesisViolated,
    ValidationError,
)

if TYPE_CHECKING:
    from .family_model import GroundedSet

logger = logging.getLogger(__name__)

STRUCTURE_4 = np.array([[0, 1, 0],
                        [1, 1, 1],
                        [0, 1, 0]], dtype=int)

# fixed neighbor order keeps every BFS deterministic
STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class Cell(NamedTuple):
    x: int
    y: int


def row_major(cell):
    return (cell[1], cell[0])


def neighbors4(cell):
    x, y = cell
    return [Cell(x + dx, y + dy) for dx, dy in STEPS]


@dataclass(frozen=True)
class BBox:
    min_x: int
    max_x: int
    min_y: int
    max_y: int

    @property
    def width(self):
        return self.max_x - self.min_x + 1

    @property
    def height(self):
        return self.max_y - self.min_y + 1


class CellSet:
    """Immutable finite set of cells with its bounding box."""

    __slots__ = ("cells", "bbox")

    def __init__(self, cells: Iterable = ()):
        if isinstance(cells, CellSet):
            frozen = cells.cells
        else:
            frozen = frozenset(Cell(int(c[0]), int(c[1])) for c in cells)
        self.cells = frozen
        if frozen:
            xs = [c.x for c in frozen]
            ys = [c.y for c in frozen]
            self.bbox = BBox(min(xs), max(xs), min(ys), max(ys))
        else:
            self.bbox = None

    @classmethod
    def _wrap(cls, frozen):
        obj = cls.__new__(cls)
        obj.cells = frozen
        if frozen:
            xs = [c.x for c in frozen]
            ys = [c.y for c in frozen]
            obj.bbox = BBox(min(xs), max(xs), min(ys), max(ys))
        else:
            obj.bbox = None
        return obj

    @staticmethod
    def _cells_of(other):
        if isinstance(other, CellSet):
            return other.cells
        return CellSet(other).cells

    def __contains__(self, cell):
        return tuple(cell) in self.cells

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)

    def __bool__(self):
        return bool(self.cells)

    def __eq__(self, other):
        if isinstance(other, CellSet):
            return self.cells == other.cells
        if isinstance(other, (set, frozenset)):
            return self.cells == other
        return NotImplemented

    def __hash__(self):
        return hash(self.cells)

    def __or__(self, other):
        return CellSet._wrap(self.cells | self._cells_of(other))

    def __and__(self, other):
        return CellSet._wrap(self.cells & self._cells_of(other))

    def __sub__(self, other):
        return CellSet._wrap(self.cells - self._cells_of(other))

    def __le__(self, other):
        return self.cells <= self._cells_of(other)

    def __repr__(self):
        shown = ", ".join(f"({c.x},{c.y})" for c in self.sorted()[:8])
        more = "" if len(self) <= 8 else f", ... {len(self)} cells"
        return f"CellSet({{{shown}{more}}})"

    def isdisjoint(self, other):
        return self.cells.isdisjoint(self._cells_of(other))

    def intersects(self, other):
        return not self.isdisjoint(other)

    def sorted(self) -> List[Cell]:
        return sorted(self.cells, key=row_major)

    def least(self) -> Cell:
        return min(self.cells, key=row_major)

    def row(self, y):
        return CellSet._wrap(frozenset(c for c in self.cells if c.y == y))

    def translate(self, dx, dy=0):
        return CellSet._wrap(frozenset(Cell(c.x + dx, c.y + dy) for c in self.cells))

    def mirror_x(self, width):
        return CellSet._wrap(frozenset(Cell(width - 1 - c.x, c.y) for c in self.cells))

    def to_list(self):
        return [[c.x, c.y] for c in self.sorted()]


EMPTY = CellSet()


@dataclass(frozen=True)
class Frame:
    width: int
    height: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(f"frame must be positive, got {self.width}x{self.height}")

    def contains(self, cell):
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def check(self, r: CellSet):
        box = r.bbox
        if box is None:
            return
        if box.min_x >= 0 and box.min_y >= 0 and box.max_x < self.width and box.max_y < self.height:
            return
        for cell in r.sorted():
            if not self.contains(cell):
                raise FrameTooSmall(self, cell)

    def fits(self, r: CellSet):
        try:
            self.check(r)
        except FrameTooSmall:
            return False
        return True

    def is_boundary(self, cell):
        x, y = cell
        return x == 0 or x == self.width - 1 or y == self.height - 1

    def cells(self) -> CellSet:
        return CellSet((x, y) for y in range(self.height) for x in range(self.width))

    def widened(self, extra):
        return Frame(self.width + extra, self.height)

    def to_json(self):
        return {"width": self.width, "height": self.height}


def frame_for(r: CellSet, extra_top=1) -> Frame:
    """Smallest frame holding r (which must start at x >= 0, y >= 0)."""
    if r.bbox is None:
        return Frame(1, 1)
    return Frame(r.bbox.max_x + 1, r.bbox.max_y + extra_top)


def connected_components(r: CellSet) -> List[CellSet]:
    if not r:
        return []
    box = r.bbox
    mask = np.zeros((box.height, box.width), dtype=bool)
    for c in r.cells:
        mask[c.y - box.min_y, c.x - box.min_x] = True
    labels, count = ndimage.label(mask, structure=STRUCTURE_4)
    parts = [[] for _ in range(count)]
    ys, xs = np.nonzero(labels)
    for y, x in zip(ys.tolist(), xs.tolist()):
        parts[labels[y, x] - 1].append((x + box.min_x, y + box.min_y))
    comps = [CellSet(p) for p in parts]
    comps.sort(key=lambda c: row_major(c.least()))
    return comps


def is_connected(r: CellSet):
    return len(connected_components(r)) <= 1


def flood(region: CellSet, seeds: Iterable) -> CellSet:
    """Cells of `region` reachable from the seeds that lie in it."""
    seen = set()
    queue = deque()
    for s in seeds:
        s = Cell(*s)
        if s in region.cells and s not in seen:
            seen.add(s)
            queue.append(s)
    while queue:
        cur = queue.popleft()
        for nb in neighbors4(cur):
            if nb in region.cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return CellSet._wrap(frozenset(seen))


def boundary_neighbors(r: CellSet, floor: Optional[int] = 0) -> CellSet:
    """Cells outside r that are 4-adjacent to it (rows below `floor` dropped)."""
    out = set()
    for c in r.cells:
        for nb in neighbors4(c):
            if nb not in r.cells and (floor is None or nb.y >= floor):
                out.add(nb)
    return CellSet._wrap(frozenset(out))


def shortest_path(region: CellSet, a, b) -> Optional[List[Cell]]:
    a, b = Cell(*a), Cell(*b)
    if a not in region.cells or b not in region.cells:
        return None
    parent = {a: None}
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        if cur == b:
            break
        for nb in neighbors4(cur):
            if nb in region.cells and nb not in parent:
                parent[nb] = cur
                queue.append(nb)
    if b not in parent:
        return None
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


class ComplementMap:
    """
    One labeling of the 4-connected components of (frame cells minus r),
    computed on the window padded with the outer ring.
    """

    def __init__(self, r: CellSet, frame: Frame):
        frame.check(r)
        self.frame = frame
        free = np.ones((frame.height + 1, frame.width + 2), dtype=bool)
        for c in r.cells:
            free[c.y, c.x + 1] = False
        self.labels, self.count = ndimage.label(free, structure=STRUCTURE_4)
        # (-1, 0) is a ring cell, always free
        self.ext_label = int(self.labels[0, 0])

    def label_of(self, cell):
        """0 for cells of r."""
        x, y = cell
        if not self.frame.contains(cell):
            raise FrameTooSmall(self.frame, cell)
        return int(self.labels[y, x + 1])

    def component(self, label) -> CellSet:
        if label == 0:
            return EMPTY
        window = self.labels[: self.frame.height, 1: self.frame.width + 1]
        ys, xs = np.nonzero(window == label)
        return CellSet(zip(xs.tolist(), ys.tolist()))

    def component_at(self, cell) -> CellSet:
        return self.component(self.label_of(cell))

    @property
    def ext(self) -> CellSet:
        return self.component(self.ext_label)

    def in_ext(self, cell):
        return self.label_of(cell) == self.ext_label

    def pockets(self) -> List[CellSet]:
        """Enclosed components touching the baseline, left to right."""
        row0 = self.labels[0, 1: self.frame.width + 1].tolist()
        order = []
        for lab in row0:
            if lab and lab != self.ext_label and lab not in order:
                order.append(lab)
        return [self.component(lab) for lab in order]


def ext(r: CellSet, f: Frame) -> CellSet:
    return ComplementMap(r, f).ext


def surrounded_by(x: CellSet, s: CellSet, f: Frame):
    f.check(x)
    if x.intersects(s):
        return False
    cmap = ComplementMap(s, f)
    return not any(cmap.in_ext(c) for c in x.cells)


def cut(r: "GroundedSet", s: CellSet, f: Frame) -> CellSet:
    """Base-side component of r minus s; the base must be surrounded by s."""
    if not surrounded_by(r.base, s, f):
        raise BaseNotSurrounded(r.id)
    return flood(r.region - s, r.base.cells)


def simple_arc(x: CellSet, a, b, ys: Sequence[CellSet] = ()) -> List[Cell]:
    """
    A 4-path from a to b inside x meeting every Y_i in one contiguous run.

    Start from a shortest path, then for each Y_i replace the stretch between
    the first and the last path cell lying in Y_i by a path inside x & Y_i.
    The replaced stretch never carries cells of an earlier Y_j, so earlier
    runs stay contiguous.
    """
    a, b = Cell(*a), Cell(*b)
    if a not in x or b not in x:
        raise NotConnected("arc endpoints must lie in the region")
    if not is_connected(x):
        raise NotConnected("region is not 4-connected")
    pieces = [x & y for y in ys]
    for i, piece in enumerate(pieces):
        comps = connected_components(piece)
        if len(comps) > 1:
            raise SimplicityHypothesisViolated(i, comps)
    for i, j in combinations(range(len(pieces)), 2):
        common = pieces[i] & pieces[j]
        if common:
            raise SimplicityHypothesisViolated(j, [common], reason=f"overlaps constraint set {i} inside the region")

    path = shortest_path(x, a, b)
    for piece in pieces:
        hits = [n for n, c in enumerate(path) if c in piece.cells]
        if len(hits) < 2:
            continue
        first, last = hits[0], hits[-1]
        detour = shortest_path(piece, path[first], path[last])
        path = path[:first] + detour + path[last + 1:]
    return path


def touching_pairs(sets: Sequence[CellSet]):
    """Index pairs (i < j) of sets sharing a cell."""
    owners = {}
    for i, s in enumerate(sets):
        for c in s.cells:
            owners.setdefault(c, []).append(i)
    pairs = set()
    for idx in owners.values():
        if len(idx) > 1:
            pairs.update(combinations(idx, 2))
    return pairs


@dataclass(frozen=True)
class SimplicityReport:
    passed: bool
    witness: tuple = ()
    components: tuple = ()
    checked: int = 0


def check_simple(sets: Sequence[CellSet]) -> SimplicityReport:
    """
    Every subfamily with a common cell must have a 4-connected intersection.
    Only subsets of maximal cliques of the touching graph can share a cell,
    so those are the only ones enumerated (singletons included).
    """
    sets = list(sets)
    g = nx.Graph()
    g.add_nodes_from(range(len(sets)))
    g.add_edges_from(touching_pairs(sets))
    candidates = set()
    for clique in nx.find_cliques(g):
        members = sorted(clique)
        for size in range(1, len(members) + 1):
            candidates.update(combinations(members, size))

    checked = 0
    for sub in sorted(candidates, key=lambda t: (len(t), t)):
        common = sets[sub[0]]
        for i in sub[1:]:
            common = common & sets[i]
        checked += 1
        comps = connected_components(common)
        if len(comps) > 1:
            logger.debug("subfamily %s has %d intersection components", sub, len(comps))
            return SimplicityReport(False, sub, tuple(comps), checked)
    return SimplicityReport(True, (), (), checked)
