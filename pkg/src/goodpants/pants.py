"""Immersed pairs of pants: construction, normalization, feet, boundary.

A pants is carried by an ordered generating pair (u, v) of its (free,
rank two) fundamental group; the boundary-oriented cuff triple is
(u, v, (uv)^-1), whose based matrices give the three adjacent cuff-axis
lifts.  Equality of pants is equality of generating pairs up to the six
orientation-preserving remarkings and simultaneous conjugation; the
canonical key realizes that quotient exactly at the word level.

Feet live on the marked circle of each cuff: the two seam feet of a
marked cuff sit half a cuff length apart and on the same side, so they
define one point of the half-turn quotient circle, stored as a position
in [0, hl) together with the side sign (+1 = left of the oriented cuff).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import words
from .formal import FormalSum
from .group import (
    AXIS_SLACK,
    BFS_SLACK,
    CIRCUMRADIUS,
    ClosedGeodesic,
    GroupElement,
    ResourceBudgetError,
    SurfaceGroup,
    _orbit_points,
)
from .plane import BASE, Geodesic, Isometry, UnitTangent, _wrap, common_perpendicular, direction, dist

LOG4 = math.log(4.0)


class InvalidPantsError(ValueError):
    pass


def _centralizer_min(base_word: str, other: str) -> str:
    """Minimal conjugate of `other` under the centralizer of the canonical
    cyclic word `base_word` (powers of its primitive root)."""
    root = _primitive_root(base_word)
    if not root:
        return other
    best = other
    for sign in (1, -1):
        w = other
        r = root if sign > 0 else words.inv_word(root)
        for _ in range(len(other) // max(len(root), 1) + 2):
            w = words.free_reduce(words.inv_word(r) + w + r)
            if (len(w), w) < (len(best), best):
                best = w
    return best


def _primitive_root(cyclic_word: str) -> str:
    n = len(cyclic_word)
    for p in range(1, n + 1):
        if n % p == 0 and cyclic_word == cyclic_word[:p] * (n // p):
            return cyclic_word[:p]
    return cyclic_word


class Pants:
    """Immersed pair of pants given by a normalized generating pair."""

    def __init__(self, group: SurfaceGroup, u_word: str, v_word: str, check: bool = True):
        self.group = group
        self.u = words.free_reduce(u_word)
        self.v = words.free_reduce(v_word)
        if check:
            for w in self.cuff_words():
                if words.is_identity(w):
                    raise InvalidPantsError("degenerate pants: trivial cuff")
                m = group.matrix_of(w)
                if abs(m.trace) <= 2.0:
                    raise InvalidPantsError("pants cuff is not hyperbolic")

    def cuff_words(self) -> tuple[str, str, str]:
        return (
            self.u,
            self.v,
            words.free_reduce(words.inv_word(self.u + self.v)),
        )

    @cached_property
    def cuff_keys(self) -> tuple[str, str, str]:
        return tuple(words.class_key(w) for w in self.cuff_words())

    @cached_property
    def half_lengths(self) -> tuple[float, float, float]:
        out = []
        for w in self.cuff_words():
            out.append(self.group.matrix_of(w).translation_length() / 2.0)
        return tuple(out)

    @cached_property
    def key(self) -> str:
        """Canonical key under remarking moves and conjugation."""
        best = None
        for x, y in self._marking_orbit():
            kx, p = words.class_key_with_conjugator(x)
            y2 = words.free_reduce(words.inv_word(p) + y + p)
            y2 = _centralizer_min(kx, y2)
            cand = kx + "|" + y2
            if best is None or cand < best:
                best = cand
        return best

    def _marking_orbit(self) -> list[tuple[str, str]]:
        seen = set()
        out = []
        stack = [(self.u, self.v)]
        while stack:
            x, y = stack.pop()
            x, y = words.free_reduce(x), words.free_reduce(y)
            if (x, y) in seen:
                continue
            seen.add((x, y))
            out.append((x, y))
            z = words.free_reduce(words.inv_word(x + y))
            stack.append((y, z))  # cyclic cuff rotation
            stack.append((y, words.free_reduce(words.inv_word(y) + x + y)))  # swap first two
            if len(seen) > 24:
                break
        return out

    def reversed(self) -> "Pants":
        """The same immersed surface with reversed orientation."""
        return Pants(self.group, words.inv_word(self.v), words.inv_word(self.u), check=False)

    # -- geometry -------------------------------------------------------------

    @cached_property
    def _cuff_axes(self) -> tuple[Geodesic, Geodesic, Geodesic]:
        return tuple(self.group.matrix_of(w).axis() for w in self.cuff_words())

    @cached_property
    def feet(self) -> tuple["Foot", "Foot", "Foot"]:
        """Foot of the pants on each boundary-oriented cuff."""
        axes = self._cuff_axes
        wsx = self.cuff_words()
        out = []
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            try:
                t_j, _, _ = common_perpendicular(axes[i], axes[j])
                t_k, _, _ = common_perpendicular(axes[i], axes[k])
            except ValueError as e:
                raise InvalidPantsError(f"cuff axes cross: {e}") from None
            key, conj = words.class_key_with_conjugator(wsx[i])
            geod = ClosedGeodesic(self.group, key)
            um = self.group.matrix_of(conj).inv()
            pj = um.apply(axes[i].point(t_j))
            pk = um.apply(axes[i].point(t_k))
            cj = geod.axis.param_of_foot(pj) % geod.length
            ck = geod.axis.param_of_foot(pk) % geod.length
            hl = geod.hl
            gap = (cj - ck) % geod.length
            # canonical-coordinate transfer conditions like exp(word length),
            # so the halfness check is structural, not high precision
            tol = 6e-3 * (1.0 + hl)
            if min(abs(gap - hl), abs(gap - hl - geod.length), abs(gap - hl + geod.length)) > tol:
                raise InvalidPantsError(f"seam feet are not half a length apart: gap={gap}, hl={hl}")
            side_j = axes[i].side_of(axes[j].point(common_perpendicular(axes[i], axes[j])[1]))
            side_k = axes[i].side_of(axes[k].point(common_perpendicular(axes[i], axes[k])[1]))
            if side_j != side_k or side_j == 0:
                raise InvalidPantsError("seam feet on different sides")
            out.append(Foot(cuff_key=key, side=int(side_j), position=cj % hl, hl=hl))
        return tuple(out)

    def foot(self, cuff_key: str) -> "Foot":
        for i, k in enumerate(self.cuff_keys):
            if k == cuff_key:
                return self.feet[i]
        raise KeyError(f"{cuff_key!r} is not a cuff of this pants")

    def boundary(self) -> FormalSum:
        """Orientation-folded cuff sum: reversed pants cancel exactly."""
        out = FormalSum()
        for w in self.cuff_words():
            k, s = words.signed_class_key(w)
            out = out + FormalSum.single(k, s)
        return out

    def record(self) -> str:
        hls = self.half_lengths
        feet = self.feet
        cols = [self.key]
        for i in range(3):
            cols.append(self.cuff_keys[i])
        for i in range(3):
            cols.append(f"{hls[i]:.9f}")
        for f in feet:
            cols.append(f"{f.position:.9f}")
            cols.append(str(f.side))
        return " ".join(cols)

    def __repr__(self):
        return f"Pants({self.u}, {self.v})"

    def __eq__(self, other):
        return isinstance(other, Pants) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True)
class Foot:
    cuff_key: str
    side: int  # +1 left of the oriented cuff, -1 right
    position: float  # in [0, hl)
    hl: float


@dataclass(frozen=True)
class Arc:
    """Geodesic arc between lifts: from p to mat(word) * q0."""

    group: SurfaceGroup
    word: str
    p: complex = BASE
    q0: complex = BASE

    @property
    def end(self) -> complex:
        return self.group.matrix_of(self.word).apply(self.q0)

    @property
    def length(self) -> float:
        return dist(self.p, self.end)

    def initial_angle(self) -> float:
        return direction(self.p, self.end)

    def terminal_tangent_at_q0(self) -> float:
        """Arrival direction at the endpoint, pulled back to the q0 lift."""
        m = self.group.matrix_of(self.word).inv()
        arrive = UnitTangent(self.end, direction(self.end, self.p) + math.pi)
        return m.apply_tangent(arrive).angle


def _cyclic_order(a0: float, a1: float, a2: float) -> int:
    """+1 if the angle triple is counterclockwise, -1 if clockwise."""
    d1 = (a1 - a0) % (2 * math.pi)
    d2 = (a2 - a0) % (2 * math.pi)
    if abs(d1) < 1e-12 or abs(d2) < 1e-12 or abs(d1 - d2) < 1e-12:
        raise InvalidPantsError("tangent directions collide; no cyclic order")
    return 1 if d1 < d2 else -1


def pants_from_theta_graph(a0: Arc, a1: Arc, a2: Arc) -> Pants:
    """Pants generated by three arcs sharing both endpoints, required to
    have opposite cyclic tangent orders at the two endpoints."""
    arcs = (a0, a1, a2)
    for x in arcs[1:]:
        if abs(x.p - a0.p) > 1e-9 or abs(x.q0 - a0.q0) > 1e-9:
            raise InvalidPantsError("theta-graph arcs must share endpoints")
    start = _cyclic_order(*(a.initial_angle() for a in arcs))
    end = _cyclic_order(*(a.terminal_tangent_at_q0() for a in arcs))
    if start == end:
        raise InvalidPantsError("same cyclic order at both endpoints")
    g = a0.group
    u = words.free_reduce(a0.word + words.inv_word(a1.word))
    v = words.free_reduce(a1.word + words.inv_word(a2.word))
    return Pants(g, u, v)


def third_connection_sides(geod: ClosedGeodesic, x: float, y: float,
                           h_word: str) -> tuple[int, int]:
    """Sides of the arc germs at the two endpoints of the connection from
    axis(x) to h*axis(y).

    The arc generates a pants exactly when the two germs lie on the same
    side (equivalently, the initial and terminal tangent vectors of the
    arc point to different sides of the geodesic); equal tangent-vector
    sides give a handle, not a pants.
    """
    g = geod.group
    axis = geod.axis
    h = g.matrix_of(h_word)
    p = axis.point(x)
    q = h.apply(axis.point(y))
    if dist(p, q) < 1e-9:
        raise InvalidPantsError("third connection endpoints coincide")
    side_p = _tangent_side(axis, x, direction(p, q))
    h_axis = axis.translate(h)
    ty = h_axis.param_of_foot(q)
    side_q = _tangent_side(h_axis, ty, direction(q, p))
    return side_p, side_q


def _tangent_side(axis: Geodesic, t: float, ang: float) -> int:
    base_ang = axis.tangent(t).angle
    s = math.sin(_wrap(ang - base_ang))
    if abs(s) < 1e-9:
        return 0
    return 1 if s > 0 else -1


def normalize_connection(geod: ClosedGeodesic, h_word: str):
    """Replace h by g^-m h g^k so that the perpendicular foot parameters
    satisfy x in [0, l) and y in [x, x + l); only then is the based
    boundary triple (g, h, (gh)^-1) the adjacent-lift triple whose axes
    carry the seam feet."""
    from .plane import common_perpendicular

    g = geod.group
    axis = geod.axis
    ell = geod.length
    h = g.matrix_of(h_word)
    haxis = axis.translate(h)
    try:
        t1, t2, _ = common_perpendicular(axis, haxis)
    except ValueError as e:
        raise InvalidPantsError(f"no common perpendicular: {e}") from None
    y = axis.param_of_foot(h.inv().apply(haxis.point(t2)))
    gw = geod.word
    m = math.floor(t1 / ell)
    if m:
        pw = words.inv_word(gw) * m if m > 0 else gw * (-m)
        h_word = words.free_reduce(pw + h_word)
        t1 -= m * ell
    k = math.floor((y - t1) / ell)
    if k:
        pw = gw * k if k > 0 else words.inv_word(gw) * (-k)
        h_word = words.free_reduce(h_word + pw)
        y -= k * ell
    return h_word, t1, y


def pants_from_third_connection(geod: ClosedGeodesic, x: float, y: float,
                                h_word: str) -> Pants:
    """Pants generated by a closed geodesic and a third connection, given
    as the deck element h of the arc from axis(x) to h*axis(y)."""
    sp, sq = third_connection_sides(geod, x, y, h_word)
    if sp == 0 or sq == 0 or sp != sq:
        raise InvalidPantsError(
            f"third connection reflected to the same side: endpoint germs "
            f"on sides ({sp}, {sq}) generate a handle, not a pants"
        )
    # based loops at the first foot: the full cuff is (loop through the
    # connection and back along [y, l]) followed by ([x, y] then the
    # reversed connection), so the boundary triple is (g, h, (gh)^-1),
    # provided the representative is normalized to the unwrapped window
    h_word, _x, _y = normalize_connection(geod, h_word)
    p = Pants(geod.group, geod.word, h_word)
    if geod.key not in p.cuff_keys:
        raise InvalidPantsError("construction lost the base cuff")
    return p


def enumerate_pants(geod: ClosedGeodesic, eps: float, R: float, M: float = 1.0,
                    budget: int = 14_000_000) -> list[Pants]:
    """All pants with oriented cuff `geod` whose other two cuffs have
    half-length within eps/M of R.

    Third connections are orthogeodesics from the cuff axis to a deck
    translate of itself; the right-angled hexagon identity
    cosh(hl) = cosh(s/2) cosh(rho/2) pins their length window exactly,
    so one neighborhood enumeration of the axis segment is exhaustive.
    """
    group = geod.group
    g = geod.iso
    axis = geod.axis
    ell = geod.length
    hg = geod.hl
    em = eps / M
    lo = 2 * (R - em) - hg + math.log(2.0) - 0.2
    hi = 2 * (R + em) - hg + LOG4 + 0.2
    orbit = group.segment_orbit(axis, 0.0, ell, hi + CIRCUMRADIUS, budget=budget)
    chain = group.tile_chain_along(axis, 0.0, ell + 0.3)
    tr_lo, tr_hi = 2 * math.cosh(R - em), 2 * math.cosh(R + em)
    gm = g.m
    from .group import _pack_keys

    seen_keys: set = set()
    found: dict[str, Pants] = {}
    for w in chain:
        wm = group.matrix_of(words.inv_word(w)).m
        cand = orbit.mats @ wm[None, :, :]
        tr_h = np.abs(cand[:, 0, 0] + cand[:, 1, 1])
        hg_m = cand @ gm[None, :, :]
        tr_hg = np.abs(hg_m[:, 0, 0] + hg_m[:, 1, 1])
        sel = (tr_h >= tr_lo - 1e-9) & (tr_h <= tr_hi + 1e-9) \
            & (tr_hg >= tr_lo - 1e-9) & (tr_hg <= tr_hi + 1e-9)
        idx = np.nonzero(sel)[0]
        if not len(idx):
            continue
        keys = _pack_keys(cand[idx])
        for j, i in enumerate(idx):
            kj = complex(keys[j])
            if kj in seen_keys:
                continue
            seen_keys.add(kj)
            i = int(i)
            h_word = words.free_reduce(orbit.word(i) + words.inv_word(w))
            if words.is_identity(h_word):
                continue
            try:
                t1, t2, rho = common_perpendicular(
                    axis, axis.translate(Isometry(cand[i], normalize=False))
                )
            except ValueError:
                continue
            if not (lo - 1e-9 <= rho <= hi + 1e-9):
                continue
            try:
                p = pants_from_third_connection(geod, t1, 0.0, h_word)
            except (InvalidPantsError, ValueError):
                continue
            hls = p.half_lengths
            others = [hls[k] for k in range(3) if p.cuff_keys[k] != geod.key]
            if len(others) < 2:
                others = sorted(hls)[:2]
            if all(abs(h - R) <= em + 1e-9 for h in others):
                found.setdefault(p.key, p)
    return [found[k] for k in sorted(found)]


def boundary(s: FormalSum) -> FormalSum:
    """Linear extension of the boundary of pants, orientation-folded.

    Keys of the input sum are Pants objects."""
    out = FormalSum()
    for p, c in s:
        out = out + p.boundary() * c
    return out
