"""SVG pictures of two-dimensional scenes in the compactified square.

A finite point ``(i, j)`` sits at ``(1 - 2^-i, 1 - 2^-j)``; +inf goes to the
far edges, so the top-right corner is ``(+inf, +inf)``.  Cells are shaded by
sampling the grid ``[0, B]^2`` (plus +inf) and filling, for each sampled
point, the tile up to the next grid line.
"""
from .core import INF
from .precell import contains

PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
           "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac")
SIZE = 420
MARGIN = 40
LEGEND = 170


def position(v):
    """Coordinate in the unit interval: ``1 - 2^-v``, and 1 for +inf."""
    return 1.0 if v is INF else 1.0 - 2.0 ** (-v)


def _px(x, y):
    return MARGIN + x * SIZE, MARGIN + (1.0 - y) * SIZE


def _fmt(v):
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(named_cells, B=16, title=None):
    """SVG text drawing ``[(name, precell), ...]`` with one colour per entry."""
    for _, cell in named_cells:
        if cell.m != 2:
            raise ValueError("only two-dimensional scenes can be rendered")
    width = SIZE + 2 * MARGIN + LEGEND
    height = SIZE + 2 * MARGIN
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 14}" font-family="sans-serif" '
                   f'font-size="13">{_escape(title)}</text>')
    values = list(range(B + 1))
    for k, (name, cell) in enumerate(named_cells):
        colour = PALETTE[k % len(PALETTE)]
        out.append(f'<g fill="{colour}" stroke="{colour}" data-name="{_escape(name)}">')
        for i in values + [INF]:
            for j in values + [INF]:
                if contains(cell, (i, j)):
                    out.append(_mark(i, j, B))
        out.append("</g>")
    out.extend(_frame())
    for k, (name, cell) in enumerate(named_cells):
        colour = PALETTE[k % len(PALETTE)]
        y = MARGIN + 16 * k
        x = MARGIN + SIZE + 24
        out.append(f'<rect x="{x}" y="{y}" width="10" height="10" fill="{colour}"/>')
        out.append(f'<text x="{x + 16}" y="{y + 9}" font-family="sans-serif" '
                   f'font-size="11">{_escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _mark(i, j, B):
    if i is INF and j is INF:
        x, y = _px(1.0, 1.0)
        return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4"/>'
    if i is INF or j is INF:
        # a point on a far edge: short segment along the edge
        if i is INF:
            _, y0 = _px(1.0, position(j))
            _, y1 = _px(1.0, position(j + 1) if j < B else 1.0)
            x, _ = _px(1.0, 0.0)
            return (f'<line x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" y2="{_fmt(y1)}" '
                    f'stroke-width="5"/>')
        x0, _ = _px(position(i), 1.0)
        x1, _ = _px(position(i + 1) if i < B else 1.0, 1.0)
        _, y = _px(0.0, 1.0)
        return (f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x1)}" y2="{_fmt(y)}" '
                f'stroke-width="5"/>')
    x0, y0 = _px(position(i), position(j))
    x1, y1 = _px(position(i + 1) if i < B else 1.0, position(j + 1) if j < B else 1.0)
    return (f'<rect x="{_fmt(x0)}" y="{_fmt(y1)}" width="{_fmt(x1 - x0)}" '
            f'height="{_fmt(y0 - y1)}" fill-opacity="0.55" stroke="none"/>')


def _frame():
    out = ['<g fill="none" stroke="#333" stroke-width="0.6">']
    x0, y0 = _px(0.0, 0.0)
    out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0 - SIZE)}" width="{SIZE}" height="{SIZE}"/>')
    for v in range(1, 6):
        x, _ = _px(position(v), 0.0)
        _, y = _px(0.0, position(v))
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" y2="{_fmt(y0 + 4)}"/>')
        out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x0 - 4)}" y2="{_fmt(y)}"/>')
    out.append("</g>")
    out.append(f'<text x="{_fmt(x0 + SIZE - 4)}" y="{_fmt(y0 + 16)}" font-family="sans-serif" '
               f'font-size="11">+inf</text>')
    out.append(f'<text x="{_fmt(x0 - 30)}" y="{_fmt(y0 - SIZE + 4)}" font-family="sans-serif" '
               f'font-size="11">+inf</text>')
    out.append(f'<text x="{_fmt(x0 - 4)}" y="{_fmt(y0 + 16)}" font-family="sans-serif" '
               f'font-size="11">0</text>')
    return out


def _escape(text):
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


__all__ = ["position", "render_svg"]
