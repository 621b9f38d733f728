# services/render.py
# -----------------------------------------------------------------------------
# Purpose:
#   Deterministic SVG 1.1 figures of Durfee dissections:
#     - one partition: Young diagram cells, its Durfee rectangle and the
#       enveloping rectangles that fix the class index i
#     - a family: the rectangles (k+n) x ((l+1)k+m) and their envelopes for
#       k = 0..kmax, side by side
#   All coordinates are integers so identical inputs give identical bytes.
# -----------------------------------------------------------------------------

from __future__ import annotations

import sys
from pathlib import Path
from typing import Iterable

from engine.partitions import DurfeeClass, Partition, durfee_classify

CELL = 20
MARGIN = 20
LINE = 18  # legend line height

DURFEE_STROKE = "#c0392b"
ENVELOPE_STROKE = "#1f4e9c"
DASHES = ("6,3", "2,2", "8,3,2,3", "4,4", "10,2", "1,3")


def _attr_name(key: str) -> str:
    return key.rstrip("_").replace("_", "-")


class Element:
    """A tag with attributes and children; renders itself as SVG text."""

    def __init__(self, tag: str, *children: Element, text: str | None = None, **attr: int | str) -> None:
        self.tag = tag
        self.children = list(children)
        self.text = text
        self.attr = attr

    def add(self, *children: Element) -> Element:
        self.children.extend(children)
        return self

    def svg(self, indent: int = 0) -> str:
        pad = "  " * indent
        props = "".join(f' {_attr_name(k)}="{v}"' for k, v in self.attr.items())
        if self.text is not None:
            return f"{pad}<{self.tag}{props}>{self.text}</{self.tag}>"
        if not self.children:
            return f"{pad}<{self.tag}{props} />"
        inner = "\n".join(c.svg(indent + 1) for c in self.children)
        return f"{pad}<{self.tag}{props}>\n{inner}\n{pad}</{self.tag}>"


def _document(width: int, height: int, body: Iterable[Element]) -> str:
    root = Element(
        "svg",
        *body,
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=width,
        height=height,
        viewBox=f"0 0 {width} {height}",
        font_family="monospace",
        font_size=12,
    )
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + root.svg() + "\n"


def _outline(x: int, y: int, rows: int, cols: int, cell: int, stroke: str, width: int, dash: str | None = None) -> Element:
    attr: dict[str, int | str] = {
        "x": x,
        "y": y,
        "width": cols * cell,
        "height": rows * cell,
        "fill": "none",
        "stroke": stroke,
        "stroke_width": width,
    }
    if dash is not None:
        attr["stroke_dasharray"] = dash
    return Element("rect", **attr)


def _linear(coef: int, const: int) -> str:
    """coef*k + const as text: 'k', '3k+2', '2', ..."""
    head = "" if coef == 0 else ("k" if coef == 1 else f"{coef}k")
    if not head:
        return str(const)
    return head if const == 0 else f"{head}+{const}"


def _paren(expr: str) -> str:
    return f"({expr})" if "+" in expr else expr


def family_caption(l: int, n: int, m: int) -> str:
    """'Durfee rectangles k×(3k+2)' for (l, n, m) = (2, 0, 2)."""
    return f"Durfee rectangles {_paren(_linear(1, n))}×{_paren(_linear(l + 1, m))}"


def _legend(x: int, y: int, entries: list[tuple[str, str, str | None]]) -> list[Element]:
    out = []
    for row, (label, stroke, dash) in enumerate(entries):
        base = y + row * LINE
        attr: dict[str, int | str] = {"x1": x, "y1": base - 4, "x2": x + 30, "y2": base - 4, "stroke": stroke, "stroke_width": 2}
        if dash is not None:
            attr["stroke_dasharray"] = dash
        out.append(Element("line", **attr))
        out.append(Element("text", text=label, x=x + 38, y=base))
    return out


def render_partition_svg(p: Partition, l: int, n: int, m: int, cell: int = CELL, margin: int = MARGIN) -> str:
    """Young diagram of p (English notation) with its Durfee dissection for (l, n, m)."""
    cls: DurfeeClass = durfee_classify(p, l, n, m)
    rect = cls.durfee_rect()
    envelopes = cls.enveloping_rects()
    shapes = [r for r in [rect, *envelopes] if r is not None]
    cols = max([p.part(1) if len(p) else 0] + [c for _, c in shapes])
    rows = max([len(p)] + [r for r, _ in shapes])

    body: list[Element] = [
        Element("line", x1=margin, y1=margin, x2=margin + max(cols, 1) * cell, y2=margin, stroke="#000000", stroke_width=1),
        Element("line", x1=margin, y1=margin, x2=margin, y2=margin + max(rows, 1) * cell, stroke="#000000", stroke_width=1),
    ]
    cells = Element("g", fill="#eeeeee", stroke="#888888", stroke_width=1)
    for r, length in enumerate(p.parts):
        for c in range(length):
            cells.add(Element("rect", x=margin + c * cell, y=margin + r * cell, width=cell, height=cell))
    if cells.children:
        body.append(cells)

    entries: list[tuple[str, str, str | None]] = []
    if rect is not None and rect[0] > 0 and rect[1] > 0:
        body.append(_outline(margin, margin, rect[0], rect[1], cell, DURFEE_STROKE, 3))
        entries.append((f"Durfee rectangle {rect[0]}×{rect[1]}", DURFEE_STROKE, None))
    if len(p):
        for j, (r, c) in enumerate(envelopes):
            dash = DASHES[j % len(DASHES)]
            body.append(_outline(margin, margin, r, c, cell, ENVELOPE_STROKE, 2, dash))
            entries.append((f"enveloping {r}×{c}", ENVELOPE_STROKE, dash))

    top = margin + max(rows, 1) * cell + margin
    body.extend(_legend(margin, top + LINE, entries))
    caption_y = top + LINE * (len(entries) + 1) + LINE // 2
    body.append(Element("text", text=f"{p}: {cls} (l={l}, n={n}, m={m})", x=margin, y=caption_y))
    body.append(Element("text", text=family_caption(l, n, m), x=margin, y=caption_y + LINE))

    width = margin * 2 + max(cols * cell, 320)
    height = caption_y + LINE + margin
    return _document(width, height, body)


def render_family_svg(l: int, n: int, m: int, kmax: int, cell: int = CELL, margin: int = MARGIN) -> str:
    """Durfee rectangle and its l enveloping rectangles for each k <= kmax."""
    if l < 0 or n < 0 or m < 0:
        raise ValueError(f"l, n, m must be >= 0, got l={l}, n={n}, m={m}")
    if kmax < 0:
        raise ValueError(f"kmax must be >= 0, got {kmax}")
    body: list[Element] = []
    x = margin
    tallest = 0
    for k in range(kmax + 1):
        rows, cols = k + n, (l + 1) * k + m
        panel = Element("g")
        if rows > 0 and cols > 0:
            panel.add(_outline(x, margin + LINE, rows, cols, cell, DURFEE_STROKE, 3))
        for j in range(1, l + 1):
            dash = DASHES[(j - 1) % len(DASHES)]
            panel.add(_outline(x, margin + LINE, rows + 1, cols + j, cell, ENVELOPE_STROKE, 2, dash))
        panel.add(Element("text", text=f"k={k}", x=x, y=margin + LINE // 2))
        body.append(panel)
        x += (cols + l) * cell + margin
        tallest = max(tallest, rows + 1)

    top = margin + LINE + tallest * cell + margin
    entries: list[tuple[str, str, str | None]] = [
        (f"{_paren(_linear(1, n))}×{_paren(_linear(l + 1, m))}", DURFEE_STROKE, None)
    ]
    for j in range(1, l + 1):
        rows_text = _paren(_linear(1, n + 1))
        entries.append((f"{rows_text}×{_paren(_linear(l + 1, m + j))}", ENVELOPE_STROKE, DASHES[(j - 1) % len(DASHES)]))
    body.extend(_legend(margin, top + LINE, entries))
    caption_y = top + LINE * (len(entries) + 1) + LINE // 2
    body.append(Element("text", text=family_caption(l, n, m), x=margin, y=caption_y))

    width = max(x, margin * 2 + 320)
    height = caption_y + margin
    return _document(width, height, body)


def write_svg(svg: str, path: Path | str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    print(f"[render] wrote {out}", file=sys.stderr)
    return out
