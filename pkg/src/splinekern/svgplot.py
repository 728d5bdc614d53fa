"""Minimal SVG line plots (no plotting library required)."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def line_plot(x, series: dict, title: str = "", width: int = 640, height: int = 400) -> str:
    """SVG document with one polyline per entry of ``series`` (label -> y)."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    ymin = min(float(np.nanmin(y)) for y in ys)
    ymax = max(float(np.nanmax(y)) for y in ys)
    if ymax == ymin:
        ymax = ymin + 1.0
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad
    left, right, top, bottom = 50, 150, 30, 40
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - x[0]) / (x[-1] - x[0]) * pw

    def sy(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{left}" y="{top - 10}" font-size="14">{escape(title)}</text>')
    if ymin < 0 < ymax:
        out.append(f'<line x1="{left}" x2="{left + pw}" y1="{sy(0):.2f}" y2="{sy(0):.2f}" '
                   'stroke="#bbb"/>')
    for v, anchor, yy in ((x[0], "start", top + ph + 15), (x[-1], "end", top + ph + 15)):
        out.append(f'<text x="{sx(v):.2f}" y="{yy}" font-size="11" text-anchor="{anchor}">{v:g}</text>')
    for v in (ymin + pad, ymax - pad):
        out.append(f'<text x="{left - 5}" y="{sy(v):.2f}" font-size="11" text-anchor="end">{v:.3g}</text>')
    for k, (label, y) in enumerate(zip(series, ys)):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if np.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 15 + 16 * k
        out.append(f'<line x1="{left + pw + 10}" x2="{left + pw + 30}" y1="{ly}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
