"""Deterministic SVG rendering of Newton polygons.

Layout: abscissa = coefficient index, ordinate = valuation (increasing
upward), the point cloud as dots, the lower hull as a red polyline with the
slope of each edge labelled at its midpoint.
"""

from __future__ import annotations

from fractions import Fraction

from .newton import NewtonPolygon

_MARGIN = 40.0
_SPAN = 400.0


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_polygon(poly: NewtonPolygon, title: str = "") -> str:
    xs = [n for n, _ in poly.points]
    ys = [float(v) for _, v in poly.points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys + [0.0]), max(ys + [0.0])
    x_span = max(x_hi - x_lo, 1)
    y_span = max(y_hi - y_lo, 1.0)

    def tx(n) -> float:
        return _MARGIN + (float(n) - x_lo) * _SPAN / x_span

    def ty(v) -> float:
        # SVG y grows downward; valuations are drawn growing upward
        return _MARGIN + (y_hi - float(v)) * _SPAN / y_span

    width = height = 2 * _MARGIN + _SPAN
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(width)}" '
        f'height="{int(height)}" viewBox="0 0 {int(width)} {int(height)}">',
        f'  <!-- {title} -->' if title else "  <!-- newton polygon -->",
        f'  <line x1="{_fmt(_MARGIN)}" y1="{_fmt(ty(0))}" x2="{_fmt(width - _MARGIN / 2)}"'
        f' y2="{_fmt(ty(0))}" stroke="black" stroke-width="1"/>',
        f'  <line x1="{_fmt(tx(x_lo))}" y1="{_fmt(_MARGIN / 2)}" x2="{_fmt(tx(x_lo))}"'
        f' y2="{_fmt(height - _MARGIN / 2)}" stroke="black" stroke-width="1"/>',
        f'  <text x="{_fmt(width - _MARGIN / 2)}" y="{_fmt(ty(0) - 6)}"'
        f' font-size="12">coefficient index</text>',
        f'  <text x="{_fmt(tx(x_lo) + 6)}" y="{_fmt(_MARGIN / 2 + 6)}"'
        f' font-size="12">valuation</text>',
    ]
    hull_pts = " ".join(f"{_fmt(tx(n))},{_fmt(ty(v))}" for n, v in poly.vertices)
    lines.append(f'  <polyline points="{hull_pts}" fill="none" stroke="red"'
                 ' stroke-width="2"/>')
    for n, v in poly.points:
        lines.append(f'  <circle cx="{_fmt(tx(n))}" cy="{_fmt(ty(v))}" r="3"'
                     f' fill="black"><title>({n}, {v})</title></circle>')
    for (n1, v1), (n2, v2), s in zip(poly.vertices, poly.vertices[1:], poly.slopes):
        mx, my = tx(Fraction(n1 + n2, 2)), ty(Fraction(v1 + v2, 2))
        lines.append(f'  <text x="{_fmt(mx + 5)}" y="{_fmt(my - 5)}" font-size="11"'
                     f' fill="blue">slope {s}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
