"""Inefficiency calculus for broken geodesic paths.

A broken path is stored as its development in the upper half-plane: the
ordered vertex list of a piecewise geodesic.  Inefficiency of an open
path is its length minus the distance between the developed endpoints;
for closed curves the length of the freely homotopic geodesic must be
supplied by the caller (it is the translation length of the holonomy).

The angle convention is the bending (exterior) angle: theta = 0 means
the path continues straight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .plane import BASE, Geodesic, UnitTangent, _wrap, dist, direction, point_at

ANGLE_DOMAIN_TOL = 1e-12


def angle_inefficiency(theta: float) -> float:
    """2 log sec(theta/2) for theta in [0, pi); raises at or beyond pi."""
    if theta < 0 or theta >= math.pi - ANGLE_DOMAIN_TOL:
        raise ValueError(f"angle inefficiency undefined at theta={theta}")
    return -2.0 * math.log(math.cos(theta / 2.0))


def third_side(a: float, b: float, theta: float) -> float:
    """Length of the third side of a triangle with sides a, b meeting at
    exterior angle theta (theta = 0 gives a + b, theta = pi gives |a-b|)."""
    if a <= 0 or b <= 0:
        raise ValueError("side lengths must be positive")
    if not 0 <= theta <= math.pi:
        raise ValueError("exterior angle must lie in [0, pi]")
    c = math.cosh(a) * math.cosh(b) + math.cos(theta) * math.sinh(a) * math.sinh(b)
    return math.acosh(max(c, 1.0))


@dataclass
class BrokenPath:
    """Development of a piecewise geodesic path; vertices in the plane."""

    vertices: list[complex]
    closed: bool = False

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise ValueError("a broken path needs at least one segment")
        for p, q in zip(self.vertices, self.vertices[1:]):
            if abs(p - q) < 1e-14:
                raise ValueError("zero-length segment in broken path")

    @staticmethod
    def develop(lengths, turns, start: complex = BASE, start_angle: float = math.pi / 2,
                closed: bool = False) -> "BrokenPath":
        """Develop from segment lengths and signed exterior turn angles;
        turns[i] is applied before segment i+1 (len(turns) = len(lengths)-1)."""
        if len(turns) != len(lengths) - 1:
            raise ValueError("need one turn angle between consecutive segments")
        pos, ang = start, start_angle
        verts = [pos]
        for i, l in enumerate(lengths):
            if l <= 0:
                raise ValueError("segment lengths must be positive")
            new = point_at(pos, ang, l)
            fwd = _wrap(direction(new, pos) + math.pi)
            verts.append(new)
            pos = new
            ang = fwd if i == len(lengths) - 1 else _wrap(fwd + turns[i])
        return BrokenPath(verts, closed=closed)

    @property
    def segment_lengths(self) -> list[float]:
        return [dist(p, q) for p, q in zip(self.vertices, self.vertices[1:])]

    @property
    def length(self) -> float:
        return sum(self.segment_lengths)

    def turn_angles(self) -> list[float]:
        """Unsigned exterior angles at the interior vertices."""
        out = []
        for a, b, c in zip(self.vertices, self.vertices[1:], self.vertices[2:]):
            fwd = _wrap(direction(b, a) + math.pi)
            out.append(abs(_wrap(direction(b, c) - fwd)))
        return out

    def chord(self) -> Geodesic:
        p, q = self.vertices[0], self.vertices[-1]
        return _line_through(p, q)

    def concat(self, other: "BrokenPath") -> "BrokenPath":
        if abs(self.vertices[-1] - other.vertices[0]) > 1e-9:
            raise ValueError("paths do not share an endpoint")
        return BrokenPath(self.vertices + other.vertices[1:])


def _line_through(p: complex, q: complex) -> Geodesic:
    from .group import _geodesic_through

    return _geodesic_through(p, q)


def arc_inefficiency(path: BrokenPath) -> float:
    """Length minus the distance between the developed endpoints."""
    if path.closed:
        raise ValueError("arc inefficiency is for open paths")
    return path.length - dist(path.vertices[0], path.vertices[-1])


def closed_inefficiency(path: BrokenPath, translation_length: float,
                        tol: float = 1e-7) -> float:
    """Length of a closed broken curve minus the length of the freely
    homotopic closed geodesic (supplied by the caller)."""
    if not path.closed:
        raise ValueError("closed inefficiency needs a closed path")
    val = path.length - translation_length
    if val < -tol:
        raise ValueError(
            f"inconsistent pair: broken length {path.length:.9f} below "
            f"translation length {translation_length:.9f}"
        )
    return max(val, 0.0)


def max_deviation(path: BrokenPath) -> float:
    """Sup distance from the path to its straightening (the geodesic arc
    between the developed endpoints).  Distance to a geodesic is convex
    along each segment, so the sup is attained at a vertex."""
    chord = path.chord()
    t0 = chord.param_of_foot(path.vertices[0])
    t1 = chord.param_of_foot(path.vertices[-1])
    lo, hi = min(t0, t1), max(t0, t1)
    return max(chord.distance_to_segment(v, lo, hi) for v in path.vertices)


def closed_max_deviation(path: BrokenPath, axis: Geodesic) -> float:
    """Sup distance from one period of a closed broken curve to the axis
    of its holonomy."""
    return max(axis.distance_to(v) for v in path.vertices)


def word_path(group, word: str) -> BrokenPath:
    """Development of the based broken geodesic through the arcs of the
    letters' prefix orbit: vertices *, w1*, w1w2*, ..., w*."""
    verts = [group.base]
    m = None
    cur = group.identity().iso
    from .plane import Isometry

    for ch in word:
        cur = cur @ group.matrix_of(ch)
        verts.append(cur.apply(group.base))
    return BrokenPath(verts)


def arcs_path(group, elements) -> BrokenPath:
    """Development of the concatenation of based arcs of group elements."""
    verts = [group.base]
    cur = group.identity().iso
    for el in elements:
        cur = cur @ el.iso
        verts.append(cur.apply(group.base))
    return BrokenPath(verts)


def word_arc_inefficiency(group, elements) -> float:
    """I(. A1 . A2 . ... . An .): sum of arc lengths minus the straightened
    arc length of the product."""
    total = sum(el.arc_length for el in elements)
    prod = group.identity()
    for el in elements:
        prod = prod * el
    return total - prod.arc_length


def word_closed_inefficiency(group, elements) -> float:
    """I([. A1 . ... . An .]): sum of arc lengths minus the length of the
    closed geodesic of the (cyclic) product."""
    total = sum(el.arc_length for el in elements)
    prod = group.identity()
    for el in elements:
        prod = prod * el
    return total - prod.translation_length()
