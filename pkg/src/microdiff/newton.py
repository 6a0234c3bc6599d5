"""Newton polygons of positive operators.

The polygon of ``P = sum c_alpha D^alpha`` is the lower convex hull of the
points ``(n, min v(c_alpha) over |alpha| = n)``.  Its slopes are exactly the
rational weights ``mu`` at which the weighted max ``mu*n - v`` is achieved at
two different lengths, which is what drives every finiteness argument: an
operator invertible at levels ``(k, r)`` has no slope in ``[r, k]``.

For a truncated operator the hull of the stored points is exact up to a
certified ceiling: discarded points live on or above the tail line, so any
hull edge whose extension stays below that line for every discarded abscissa
is an edge of the true polygon, and every edge created by discarded points
has slope at least the minimal slope from a stored vertex to the tail line.
Queries at or above the ceiling raise instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diffop import MicroOp, length
from .errors import InsufficientTruncation, ZeroOperator

Point = tuple[int, Fraction]


def _lower_hull(points: list[Point]) -> list[Point]:
    """Monotone-chain lower hull; input sorted by abscissa, one per abscissa."""
    hull: list[Point] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop while the middle point is on or above the chord
            if (x2 - x1) * (p[1] - y1) <= (y2 - y1) * (p[0] - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull data of an operator's (length, valuation) cloud."""

    points: tuple[Point, ...]
    vertices: tuple[Point, ...]
    slopes: tuple[Fraction, ...]
    truncated: bool
    certified_below: Fraction | None  # None: every slope query is exact

    def certified_slopes(self) -> tuple[Fraction, ...]:
        if self.certified_below is None:
            return self.slopes
        return tuple(s for s in self.slopes if s < self.certified_below)


def polygon(P: MicroOp) -> NewtonPolygon:
    if not P.positive:
        raise ValueError("Newton polygons are defined for positive operators")
    if not P.terms:
        raise ZeroOperator("zero operator has no Newton polygon")
    minima: dict[int, Fraction] = {}
    for a, c in P.terms.items():
        n = length(a)
        v = Fraction(c.spectral_valuation())
        if n not in minima or v < minima[n]:
            minima[n] = v
    points = sorted(minima.items())
    vertices = _lower_hull(points)
    slopes = tuple(Fraction(v2 - v1, n2 - n1)
                   for (n1, v1), (n2, v2) in zip(vertices, vertices[1:]))
    ceiling = None
    if P.tail is not None:
        t = P.tail
        anchor = Fraction(t.bound_at(t.start + 1))
        from_vertices = [Fraction(anchor - v, t.start + 1 - n)
                         for n, v in vertices if n <= t.start]
        ceiling = min([t.t1] + from_vertices)
    return NewtonPolygon(tuple(points), tuple(vertices), slopes,
                         truncated=P.tail is not None, certified_below=ceiling)


def is_slope(P: MicroOp, mu: Fraction | int) -> bool:
    """Exact slope membership, certified against the tail."""
    mu = Fraction(mu)
    poly = polygon(P)
    if poly.certified_below is not None and mu >= poly.certified_below:
        raise InsufficientTruncation(
            f"slope queries above {poly.certified_below} need a larger truncation")
    return mu in poly.slopes


def slope_in_interval(P: MicroOp, r: Fraction | int, k: Fraction | int) -> bool:
    """True iff some slope of the polygon lies in [r, k]."""
    r, k = Fraction(r), Fraction(k)
    poly = polygon(P)
    if any(r <= s <= k for s in poly.certified_slopes()):
        return True
    if poly.certified_below is not None and k >= poly.certified_below:
        raise InsufficientTruncation(
            f"cannot rule out slopes in [{r}, {k}] beyond the certified "
            f"ceiling {poly.certified_below}")
    return False
