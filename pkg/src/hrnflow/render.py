"""Static rendering of error persistence diagrams (ASCII and SVG)."""
from __future__ import annotations

import math

from hrnflow.persistence import INF, ErrorDiagram


def _extent(d: ErrorDiagram) -> tuple[int, int]:
    vals = [b for b, _, _ in d.points] + [dd for _, dd, _ in d.points if dd != INF]
    if not vals:
        return 0, 5
    lo, hi = min(vals), max(vals)
    return min(lo, 0), max(hi, lo + 1)


def _mark(mult: int) -> str:
    return str(mult) if mult < 10 else "*"


def render_ascii(d: ErrorDiagram) -> str:
    """Birth runs left to right, death bottom to top; the top row is death = inf.

    Points are drawn as their multiplicity, ``.`` marks the diagonal.
    """
    lo, hi = _extent(d)
    cols = list(range(lo, hi + 1))
    width = max(len(str(lo)), len(str(hi)), 3)
    cell = 2
    grid: dict[tuple[float, int], str] = {}
    for b, dd, m in d.points:
        grid[(dd, b)] = _mark(m)

    lines = []
    row = "inf".rjust(width) + " |" + "".join(grid.get((INF, c), "-").rjust(cell) for c in cols)
    lines.append(row)
    for death in range(hi, lo - 1, -1):
        cells = []
        for c in cols:
            ch = grid.get((death, c))
            if ch is None:
                ch = "." if c == death else " "
            cells.append(ch.rjust(cell))
        lines.append(str(death).rjust(width) + " |" + "".join(cells).rstrip())
    lines.append(" " * width + " +" + "-" * (cell * len(cols)))
    lines.append(" " * width + "  " + "".join(str(c)[-cell:].rjust(cell) for c in cols))
    lines.append(" " * width + "  birth (x) / death (y)")
    return "\n".join(lines) + "\n"


def render_svg(d: ErrorDiagram, size: int = 400) -> str:
    lo, hi = _extent(d)
    pad = 40
    inf_gap = 30
    span = hi - lo or 1
    plot = size - 2 * pad - inf_gap

    def sx(v: float) -> float:
        return pad + (v - lo) / span * plot

    def sy(v: float) -> float:
        if v == INF:
            return pad
        return pad + inf_gap + (hi - v) / span * plot

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line class="axis" x1="{sx(lo):.1f}" y1="{sy(lo):.1f}" x2="{sx(hi):.1f}" y2="{sy(lo):.1f}" stroke="black"/>',
        f'<line class="axis" x1="{sx(lo):.1f}" y1="{sy(lo):.1f}" x2="{sx(lo):.1f}" y2="{sy(INF):.1f}" stroke="black"/>',
        f'<line class="diagonal" x1="{sx(lo):.1f}" y1="{sy(lo):.1f}" x2="{sx(hi):.1f}" y2="{sy(hi):.1f}" '
        'stroke="gray" stroke-dasharray="4 3"/>',
        f'<line class="infinity" x1="{sx(lo):.1f}" y1="{sy(INF):.1f}" x2="{sx(hi):.1f}" y2="{sy(INF):.1f}" '
        'stroke="gray" stroke-dasharray="1 3"/>',
        f'<text x="{pad - 30}" y="{sy(INF) + 4:.1f}" font-size="11">inf</text>',
        f'<text x="{size / 2:.0f}" y="{size - 8}" font-size="12" text-anchor="middle">birth</text>',
        f'<text x="12" y="{size / 2:.0f}" font-size="12" transform="rotate(-90 12 {size / 2:.0f})" '
        'text-anchor="middle">death</text>',
    ]
    for t in range(lo, hi + 1):
        out.append(f'<text x="{sx(t):.1f}" y="{sy(lo) + 14:.1f}" font-size="10" text-anchor="middle">{t}</text>')
        out.append(f'<text x="{sx(lo) - 6:.1f}" y="{sy(t) + 3:.1f}" font-size="10" text-anchor="end">{t}</text>')
    for b, dd, m in d.points:
        r = 3 + 2 * math.sqrt(m)
        cls = "point-inf" if dd == INF else "point"
        out.append(
            f'<circle class="{cls}" cx="{sx(b):.1f}" cy="{sy(dd):.1f}" r="{r:.1f}" '
            f'fill="{"firebrick" if dd == INF else "steelblue"}" fill-opacity="0.8">'
            f"<title>({b}, {'inf' if dd == INF else dd}) x{m}</title></circle>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
