"""Dependency-free SVG line charts for run artifacts."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
WIDTH, HEIGHT = 640, 360
MARGIN = dict(left=70, right=20, top=36, bottom=48)
MAX_POINTS = 2000


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    return np.arange(np.ceil(lo / step) * step, hi + 0.5 * step, step)


def line_chart(path, x, series: dict, title: str = "", xlabel: str = "", ylabel: str = "") -> Path:
    """Write ``series`` (label -> y array) against ``x`` as an SVG file."""
    x = np.asarray(x, dtype=float)
    stride = max(1, len(x) // MAX_POINTS)
    ys = {k: np.asarray(v, dtype=float)[::stride] for k, v in series.items()}
    x = x[::stride]
    ymin = min(float(v.min()) for v in ys.values())
    ymax = max(float(v.max()) for v in ys.values())
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad
    xmin, xmax = float(x[0]), float(x[-1]) if x[-1] > x[0] else float(x[0]) + 1.0

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - xmin) / (xmax - xmin) * pw

    def sy(v):
        return MARGIN["top"] + (ymax - v) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for tv in _ticks(xmin, xmax):
        px = sx(tv)
        out.append(f'<line x1="{px:.1f}" y1="{MARGIN["top"] + ph}" x2="{px:.1f}" y2="{MARGIN["top"] + ph + 4}" stroke="#333"/>')
        out.append(f'<text x="{px:.1f}" y="{MARGIN["top"] + ph + 16}" text-anchor="middle">{tv:g}</text>')
    for tv in _ticks(ymin, ymax):
        py = sy(tv)
        out.append(f'<line x1="{MARGIN["left"]}" y1="{py:.1f}" x2="{MARGIN["left"] + pw}" y2="{py:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{py + 4:.1f}" text-anchor="end">{tv:.4g}</text>')
    for i, (label, y) in enumerate(ys.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN["top"] + 14 + 14 * i
        lx = MARGIN["left"] + pw - 110
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}">{escape(label)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
