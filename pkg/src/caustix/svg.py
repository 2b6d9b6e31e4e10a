"""Deterministic SVG 1.1 output for caustics and bifurcation rasters.

Caustic plots use a fixed 800x800 canvas showing ``[-2.2, 2.2]^2``, wide
enough for the compressed infinity circle at radius 2.  Coordinates are
printed with three decimals, so identical data always gives identical
bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

SIZE = 800
EXTENT = 2.2


@dataclass(frozen=True)
class Style:
    caustic_color: str = "#c0392b"
    caustic_width: float = 2.5
    circle_color: str = "#333333"
    circle_width: float = 0.8
    axis_color: str = "#bbbbbb"
    infinity_color: str = "#7f8c8d"
    source_color: str = "#1f4e9c"
    source_radius: float = 4.0
    dot_radius: float = 0.7
    dot_color: str = "#000000"
    # gap (in plot units) above which consecutive samples are not joined
    break_distance: float = 0.75


def _f(v: float) -> str:
    s = "%.3f" % v
    return "0.000" if s == "-0.000" else s


def _to_px(x: float, y: float) -> tuple:
    s = SIZE / (2.0 * EXTENT)
    return (x + EXTENT) * s, (EXTENT - y) * s


def _document(body: list, title: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
    ]
    return "\n".join(head + body + ["</svg>", ""])


def _polylines(points: np.ndarray, style: Style) -> list:
    """Split a sampled curve into runs of finite, nearby points."""
    runs, current, prev = [], [], None
    for x, y in points:
        if not (math.isfinite(x) and math.isfinite(y)):
            prev = None
            if len(current) > 1:
                runs.append(current)
            current = []
            continue
        if prev is not None and math.hypot(x - prev[0], y - prev[1]) > style.break_distance:
            if len(current) > 1:
                runs.append(current)
            current = []
        current.append((x, y))
        prev = (x, y)
    if len(current) > 1:
        runs.append(current)
    return runs


def _circle(radius: float, color: str, width: float, dash: Optional[str] = None) -> str:
    cx, cy = _to_px(0.0, 0.0)
    rp = radius * SIZE / (2.0 * EXTENT)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(rp)}" fill="none" '
            f'stroke="{color}" stroke-width="{_f(width)}"{extra}/>')


def emit_svg(curves: Sequence = (), source: Optional[tuple] = None, compressed: bool = False,
             title: str = "caustic", style: Style = Style()) -> str:
    """SVG of caustic curves over the unit circle.

    ``curves`` is a sequence of ``(k, 2)`` arrays in plot coordinates (apply
    the compression upstream).  Non-finite points and jumps longer than
    ``style.break_distance`` split a curve into separate polylines.
    """
    body = []
    a0, mid = _to_px(-EXTENT, 0.0), _to_px(0.0, 0.0)
    body.append(f'<line x1="0.000" y1="{_f(mid[1])}" x2="{_f(SIZE)}" y2="{_f(mid[1])}" '
                f'stroke="{style.axis_color}" stroke-width="0.5"/>')
    body.append(f'<line x1="{_f(mid[0])}" y1="0.000" x2="{_f(mid[0])}" y2="{_f(SIZE)}" '
                f'stroke="{style.axis_color}" stroke-width="0.5"/>')
    body.append(_circle(1.0, style.circle_color, style.circle_width))
    if compressed:
        body.append(_circle(2.0, style.infinity_color, style.circle_width, dash="6 4"))
    for curve in curves:
        pts = np.asarray(curve, dtype=float).reshape(-1, 2)
        for run in _polylines(pts, style):
            d = " ".join(("M" if i == 0 else "L") + "%s,%s" % tuple(_f(c) for c in _to_px(x, y))
                         for i, (x, y) in enumerate(run))
            body.append(f'<path d="{d}" fill="none" stroke="{style.caustic_color}" '
                        f'stroke-width="{_f(style.caustic_width)}" stroke-linejoin="round"/>')
    if source is not None:
        sx, sy = _to_px(*source)
        body.append(f'<circle cx="{_f(sx)}" cy="{_f(sy)}" r="{_f(style.source_radius)}" '
                    f'fill="{style.source_color}"/>')
    return _document(body, title)


def emit_scatter_svg(xs, ys, x_range: tuple, y_range: tuple = (-math.pi, math.pi),
                     title: str = "bifurcation diagram", style: Style = Style()) -> str:
    """Scatter panel (e.g. asymptotic orbits against r) on the same canvas."""
    margin = 40.0
    x0, x1 = x_range
    y0, y1 = y_range
    span_x = (x1 - x0) or 1.0
    span_y = (y1 - y0) or 1.0

    def px(x, y):
        return (margin + (x - x0) / span_x * (SIZE - 2 * margin),
                SIZE - margin - (y - y0) / span_y * (SIZE - 2 * margin))

    body = []
    (ax0, ay0), (ax1, ay1) = px(x0, y0), px(x1, y1)
    body.append(f'<rect x="{_f(ax0)}" y="{_f(ay1)}" width="{_f(ax1 - ax0)}" '
                f'height="{_f(ay0 - ay1)}" fill="none" stroke="{style.axis_color}" stroke-width="1.000"/>')
    for label, (tx, ty), anchor in ((f"{x0:g}", px(x0, y0), "start"), (f"{x1:g}", px(x1, y0), "end")):
        body.append(f'<text x="{_f(tx)}" y="{_f(ty + 16)}" font-size="12" text-anchor="{anchor}">'
                    f"{escape(label)}</text>")
    for x, y in zip(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)):
        if math.isfinite(x) and math.isfinite(y):
            cx, cy = px(x, y)
            body.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(style.dot_radius)}" '
                        f'fill="{style.dot_color}"/>')
    return _document(body, title)
