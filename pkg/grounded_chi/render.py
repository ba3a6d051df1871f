"""
SVG pictures of families, scenes and dist2 traces.

Row 0 is drawn at the bottom, directly on the baseline rule. Every set is
one <g> of translucent unit squares plus its id label, so the element
inventory of a picture follows from its input.
"""
import json
import logging
import xml.etree.ElementTree as ET
from pathlib import Path

from .errors import ParseError
from .family_model import PiercedFamily, Scene, load

logger = logging.getLogger(__name__)

VERSION = "0.1.0"
CELL = 20
MARGIN = 20
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def svgroot(w, h):
    return ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                      version="1.1",
                      width="{}px".format(w),
                      height="{}px".format(h),
                      viewBox="0 0 {} {}".format(w, h))


class Canvas:
    def __init__(self, width, height, low=0):
        self.width, self.height, self.low = width, height, low
        w = width * CELL + 2 * MARGIN
        h = (height - low) * CELL + 2 * MARGIN
        self.root = svgroot(w, h)
        self.root.append(ET.Comment(f" grounded_chi {VERSION} "))
        defs = ET.SubElement(self.root, "defs")
        pattern = ET.SubElement(defs, "pattern", id="hatch", width="6", height="6",
                                patternUnits="userSpaceOnUse", patternTransform="rotate(45)")
        ET.SubElement(pattern, "line", x1="0", y1="0", x2="0", y2="6", stroke="#444", **{"stroke-width": "1.5"})

    def xy(self, x, y):
        """Top-left pixel of cell (x, y)."""
        return MARGIN + x * CELL, MARGIN + (self.height - 1 - y) * CELL

    def baseline(self):
        _, top = self.xy(0, 0)
        y = top + CELL
        ET.SubElement(self.root, "line", x1=str(MARGIN), y1=str(y),
                      x2=str(MARGIN + self.width * CELL), y2=str(y),
                      stroke="black", **{"stroke-width": "2", "class": "baseline"})

    def cells(self, parent, cells, **style):
        for x, y in sorted(cells, key=lambda c: (c[1], c[0])):
            px, py = self.xy(x, y)
            ET.SubElement(parent, "rect", x=str(px), y=str(py), width=str(CELL), height=str(CELL), **style)

    def shape(self, set_id, cells, color, role=None, opacity="0.45"):
        g = ET.SubElement(self.root, "g", id=f"set-{set_id}", **{"class": role or "set"})
        style = {"fill": color, "fill-opacity": opacity, "stroke": color}
        if role == "S":
            style.update({"fill-opacity": "0.15", "stroke-dasharray": "4 2"})
        elif role == "pillar":
            style.update({"fill": "#555", "stroke": "#333"})
        self.cells(g, cells, **style)
        lx, ly = min(cells, key=lambda c: (-c[1], c[0]))
        px, py = self.xy(lx, ly)
        text = ET.SubElement(g, "text", x=str(px + 3), y=str(py + CELL - 5),
                             **{"font-size": "11", "font-family": "monospace"})
        text.text = set_id
        return g

    def overlay(self, name, cells):
        g = ET.SubElement(self.root, "g", **{"class": f"overlay {name}"})
        self.cells(g, cells, fill="url(#hatch)", stroke="none")
        return g

    def tostring(self):
        ET.indent(self.root)
        return ET.tostring(self.root, encoding="unicode") + "\n"


def _color(n):
    return PALETTE[n % len(PALETTE)]


def render_family(F) -> str:
    low = 0
    if isinstance(F, PiercedFamily):
        low = -F.frame.height + 1
        members = [(i, [tuple(c) for c in cells]) for i, cells in F.members]
    else:
        members = [(m.id, [tuple(c) for c in m.region]) for m in F.members]
    canvas = Canvas(F.frame.width, F.frame.height, low)
    canvas.baseline()
    for n, (set_id, cells) in enumerate(members):
        canvas.shape(set_id, cells, _color(n))
    return canvas.tostring()


def render_scene(scene: Scene) -> str:
    canvas = Canvas(scene.frame.width, scene.frame.height)
    canvas.baseline()
    canvas.shape("S", [tuple(c) for c in scene.s], "#000000", role="S")
    for p in scene.pillars:
        canvas.shape(p.id, [tuple(c) for c in p.region], "#555555", role="pillar")
    for n, d in enumerate(scene.d):
        canvas.shape(d.id, [tuple(c) for c in d.region], _color(n), role="D")
    return canvas.tostring()


def render_trace(doc: dict) -> str:
    frame = doc["frame"]
    canvas = Canvas(frame["width"], frame["height"])
    canvas.baseline()
    canvas.shape("S", [tuple(c) for c in doc["S"]], "#000000", role="S")
    for set_id, cells in sorted(doc["pillars"].items()):
        canvas.shape(set_id, [tuple(c) for c in cells], "#555555", role="pillar")
    colors = doc.get("colors", {})
    for set_id, cells in sorted(doc["members"].items()):
        tup = colors.get(set_id)
        index = sum(tup) if tup else 0
        canvas.shape(set_id, [tuple(c) for c in cells], _color(index), role="D")
    for n, region in enumerate(doc.get("I", [])):
        if region:
            canvas.overlay(f"I-region I{n + 1}", [tuple(c) for c in region])
    for set_id, cells in sorted(doc.get("clipped", {}).items()):
        if cells:
            canvas.overlay(f"clip clip-{set_id}", [tuple(c) for c in cells])
    return canvas.tostring()


def render_file(path, out) -> Path:
    """Family, scene or dist2 trace file in, SVG out."""
    path, out = Path(path), Path(out)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"line {exc.lineno}", exc.msg) from exc
    if isinstance(doc, dict) and doc.get("trace") == "dist2":
        try:
            svg = render_trace(doc)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, "trace", f"malformed ({exc})") from exc
    else:
        obj = load(path)
        svg = render_scene(obj) if isinstance(obj, Scene) else render_family(obj)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    logger.info("wrote %s", out)
    return out
