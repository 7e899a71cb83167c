"""Static SVG 1.1 icons of landmark configurations.

Output depends only on the input coordinates: numbers are written with a
fixed number of decimals and nothing time- or environment-dependent is
embedded.
"""
from xml.sax.saxutils import escape

import numpy as np

PANEL = 240
MARGIN = 28
COLORS = ("#1f4e79", "#9c2a2a", "#2f6b2f", "#6a3d9a")


def _fmt(x):
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def _panel(xy, title, offset, color):
    xy = np.asarray(xy, dtype=float)
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12)
    scale = (PANEL - 2 * MARGIN) / span
    mid = (lo + hi) / 2
    # SVG's y axis points down
    px = offset + PANEL / 2 + (xy[:, 0] - mid[0]) * scale
    py = PANEL / 2 + 10 - (xy[:, 1] - mid[1]) * scale
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
    out = [
        '<g class="icon">',
        f'<text x="{_fmt(offset + PANEL / 2)}" y="16" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(title)}</text>',
        f'<polygon points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>',
    ]
    for i, (x, y) in enumerate(zip(px, py), 1):
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>')
        out.append(
            f'<text x="{_fmt(x + 5)}" y="{_fmt(y - 5)}" font-family="sans-serif" '
            f'font-size="11">{i}</text>'
        )
    out.append("</g>")
    return out


def icons_svg(panels):
    """One panel per ``(title, k x 2 coordinates)`` pair, laid out in a row."""
    panels = list(panels)
    width = PANEL * len(panels)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{PANEL + 20}" viewBox="0 0 {width} {PANEL + 20}">',
        f'<rect width="{width}" height="{PANEL + 20}" fill="white"/>',
    ]
    for i, (title, xy) in enumerate(panels):
        lines.extend(_panel(xy, title, i * PANEL, COLORS[i % len(COLORS)]))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path, panels):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(icons_svg(panels))
