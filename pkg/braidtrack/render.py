"""
Braid diagrams (ASCII, SVG, TikZ) and loop-geometry plots.

Strands run left to right; position 1 is the top row. A letter
``s_i^{+1}`` carries the strand at position i over the one at i+1;
``s_i^{-1}`` carries it under. Output is deterministic so it can be
compared byte for byte.
"""

from typing import List, Sequence, Tuple

import svgwrite

from .braid import BraidWord
from .branchlocus import BranchSet
from .looper import Loop

STEP = 30
MARGIN = 15
FORMATS = ("ascii", "svg", "tikz")


# =========================================================
# ASCII
# =========================================================

def _ascii_block(n: int, index: int, sign: int) -> List[str]:
    rows = []
    for k in range(3 * (n - 1) + 1):
        strand_row = k % 3 == 0
        pos = k // 3 + 1
        top = 3 * (index - 1)
        if strand_row and pos == index:
            rows.append("\\ /")
        elif strand_row and pos == index + 1:
            rows.append("/ \\")
        elif not strand_row and top < k < top + 3:
            rows.append(" \\ " if sign > 0 else " / ")
        else:
            rows.append("---" if strand_row else "   ")
    return rows


def render_ascii(w: BraidWord) -> str:
    """
    One three-column block per letter, three text rows per strand gap.
    Only the over-strand is drawn through the middle of a crossing.
    """
    height = 3 * (w.n - 1) + 1 if w.n > 1 else 1
    lines = [("--" if k % 3 == 0 else "  ") for k in range(height)]
    for index, sign in w.letters:
        block = _ascii_block(w.n, index, sign)
        lines = [line + cell + ("-" if k % 3 == 0 else " ")
                 for k, (line, cell) in enumerate(zip(lines, block))]
    return "\n".join(line.rstrip() for line in lines) + "\n"


# =========================================================
# SVG
# =========================================================

def _y(pos: int) -> int:
    return MARGIN + STEP * (pos - 1)


def render_svg(w: BraidWord) -> str:
    """Strands left to right, the under-strand of each crossing broken by a white gap."""
    width = STEP * (len(w) + 1)
    height = STEP * max(w.n - 1, 0) + 2 * MARGIN
    drawing = svgwrite.Drawing(size=(width, height), debug=False)
    drawing.update({"viewBox": f"0 0 {width} {height}"})

    def stroke(a: Tuple[int, int], b: Tuple[int, int], under_gap: bool = False):
        if under_gap:
            bg = drawing.add(drawing.line(start=a, end=b))
            bg.stroke("white", width=7, linecap="butt")
        line = drawing.add(drawing.line(start=a, end=b))
        line.stroke("black", width=2, linecap="round")

    x = 0
    for k in range(1, w.n + 1):
        stroke((x, _y(k)), (x + MARGIN, _y(k)))
    x = MARGIN
    for index, sign in w.letters:
        x2 = x + STEP
        for k in range(1, w.n + 1):
            if k not in (index, index + 1):
                stroke((x, _y(k)), (x2, _y(k)))
        down = ((x, _y(index)), (x2, _y(index + 1)))
        up = ((x, _y(index + 1)), (x2, _y(index)))
        under, over = (up, down) if sign > 0 else (down, up)
        stroke(*under)
        stroke(*over, under_gap=True)
        x = x2
    for k in range(1, w.n + 1):
        stroke((x, _y(k)), (x + MARGIN, _y(k)))
    return drawing.tostring() + "\n"


# =========================================================
# TIKZ
# =========================================================

def tikz_tokens(w: BraidWord) -> str:
    """Letters as braid-package tokens, e.g. a_{2} a_{1}^{-1}."""
    return " ".join(f"a_{{{i}}}" if e > 0 else f"a_{{{i}}}^{{-1}}" for i, e in w.letters)


def tikz_picture(w: BraidWord) -> str:
    """A full tikzpicture around the braid-package token stream."""
    return (
        "\\begin{tikzpicture}\n"
        f"\\braid[number of strands={w.n}] {tikz_tokens(w)};\n"
        "\\end{tikzpicture}\n"
    )


def render(w: BraidWord, fmt: str = "ascii") -> str:
    """Draw w as ascii, svg or tikz tokens."""
    if fmt == "ascii":
        return render_ascii(w)
    if fmt == "svg":
        return render_svg(w)
    if fmt == "tikz":
        return tikz_tokens(w) + "\n"
    raise ValueError(f"unknown render format {fmt!r}; expected one of {FORMATS}")


# =========================================================
# LOOP GEOMETRY
# =========================================================

def render_loops_svg(branch: BranchSet, loops: Sequence[Loop], size: int = 480) -> str:
    """
    Branch points (red dots), base point (blue square) and every loop as a
    polyline, in the t-plane with Im t pointing up.
    """
    pts = list(branch.points)
    for loop in loops:
        pts.extend(loop.vertices)
    if not pts:
        pts = [0j]
    xmin = min(p.real for p in pts)
    xmax = max(p.real for p in pts)
    ymin = min(p.imag for p in pts)
    ymax = max(p.imag for p in pts)
    span = max(xmax - xmin, ymax - ymin) or 1.0
    pad = 0.08 * span
    scale = (size - 2 * MARGIN) / (span + 2 * pad)

    def to_px(p: complex) -> Tuple[float, float]:
        return (round(MARGIN + (p.real - xmin + pad) * scale, 3),
                round(size - MARGIN - (p.imag - ymin + pad) * scale, 3))

    drawing = svgwrite.Drawing(size=(size, size), debug=False)
    for loop in loops:
        line = drawing.add(drawing.polyline([to_px(v) for v in loop.vertices]))
        line.fill("none").stroke("gray", width=1)
    for p in branch.points:
        drawing.add(drawing.circle(center=to_px(p), r=3, fill="red"))
    if loops:
        bx, by = to_px(loops[0].base)
        drawing.add(drawing.rect(insert=(bx - 3, by - 3), size=(6, 6), fill="blue"))
    return drawing.tostring() + "\n"
