"""Minimal deterministic SVG line plots (convenience output only)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

_W, _H, _M = 640, 400, 56
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_plot(path, series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
              log: bool = False) -> None:
    """``series`` maps a label to ``(xs, ys)``; ``log`` uses log-log axes."""
    tf = (lambda v: math.log10(v)) if log else (lambda v: v)
    pts = {}
    for name, (xs, ys) in series.items():
        pts[name] = [(tf(float(x)), tf(float(y))) for x, y in zip(xs, ys)
                     if not log or (x > 0 and y > 0)]
    allx = [p[0] for v in pts.values() for p in v] or [0.0, 1.0]
    ally = [p[1] for v in pts.values() for p in v] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return _M + (x - x0) / (x1 - x0) * (_W - 2 * _M)

    def sy(y):
        return _H - _M - (y - y0) / (y1 - y0) * (_H - 2 * _M)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{_M}" y1="{_H - _M}" x2="{_W - _M}" y2="{_H - _M}" stroke="black"/>',
        f'<line x1="{_M}" y1="{_M}" x2="{_M}" y2="{_H - _M}" stroke="black"/>',
    ]
    lab = (lambda v: f"{10 ** v:.3g}") if log else (lambda v: f"{v:.3g}")
    for v in _ticks(x0, x1):
        out.append(f'<text x="{_fmt(sx(v))}" y="{_H - _M + 16}" text-anchor="middle" font-size="11">{lab(v)}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<text x="{_M - 6}" y="{_fmt(sy(v) + 4)}" text-anchor="end" font-size="11">{lab(v)}</text>')
    out.append(f'<text x="{_W / 2}" y="{_H - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{_H / 2}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {_H / 2})">{escape(ylabel)}</text>')
    for j, (name, p) in enumerate(pts.items()):
        color = _COLORS[j % len(_COLORS)]
        if p:
            d = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in p)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{d}"/>')
        out.append(f'<text x="{_W - _M}" y="{_M + 14 * j}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
