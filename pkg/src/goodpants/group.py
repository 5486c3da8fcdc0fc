"""The regular-octagon genus-2 Fuchsian group and its enumeration engine.

The surface is the hyperbolic genus-2 surface obtained from the regular
octagon with vertex angle pi/4 centered at the base point i, with the
canonical side pairing.  The eight side-pairing maps generate the deck
group; the standard generators g1..g4 satisfying [g1,g2][g3,g4] = 1 are
fixed words in them (see words.STD_GENS).

All heavy enumeration is one breadth-first search over the orbit of the
base point, vectorized with numpy, with a keep-radius slack that covers
tile-chain connectivity; exhaustiveness of the slack is validated by the
brute-force oracles in the test suite.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from . import words
from .plane import (
    BASE,
    Geodesic,
    Isometry,
    UnitTangent,
    _wrap,
    angle,
    direction,
    dist,
)

# circumradius and apothem of the octagon; cosh r_c = cot^2(pi/8)
CIRCUMRADIUS = math.acosh(1.0 / math.tan(math.pi / 8) ** 2)
APOTHEM = math.acosh(1.0 / math.tan(math.pi / 8))
SYSTOLE = 2.0 * APOTHEM
# extra keep-radius so that tile chains stay inside the searched region
BFS_SLACK = CIRCUMRADIUS + 0.45
# displacement margin of the best conjugate of a hyperbolic element whose
# axis meets the base octagon: d <= l + 2 log cosh(circumradius)
AXIS_SLACK = 2.0 * math.log(math.cosh(CIRCUMRADIUS))

_GEOM_LABELS = "abABcdCD"  # side labels in boundary order


class ResourceBudgetError(RuntimeError):
    """Raised when an enumeration would exceed the configured node budget."""

    def __init__(self, attempted: str, projected: float, budget: int):
        super().__init__(
            f"enumeration budget exceeded for {attempted}: "
            f"projected ~{projected:.3g} nodes > budget {budget}"
        )
        self.attempted = attempted


def _iso_taking(p: complex, q: complex, p2: complex, q2: complex) -> Isometry:
    """Unique orientation-preserving isometry with p -> p2, q -> q2."""
    m1 = Isometry.to_frame(p, direction(p, q))
    m2 = Isometry.to_frame(p2, direction(p2, q2))
    return m2.inv() @ m1


class SurfaceGroup:
    """Deck group of the regular-octagon genus-2 surface, base point i."""

    def __init__(self):
        self.base = BASE
        vert_dirs = [(2 * k + 1) * math.pi / 8 for k in range(8)]
        self.vertices = [
            Isometry.frame(BASE, a).apply(BASE * math.exp(CIRCUMRADIUS))
            for a in vert_dirs
        ]
        mats: dict[str, Isometry] = {}
        for i, lab in enumerate(_GEOM_LABELS):
            if lab.islower():
                j = _GEOM_LABELS.index(lab.swapcase())
                g = _iso_taking(
                    self.vertices[j],
                    self.vertices[(j + 1) % 8],
                    self.vertices[(i + 1) % 8],
                    self.vertices[i],
                )
                mats[lab] = g
        for lab in "abcd":
            mats[lab.upper()] = mats[lab].inv()
        self._gen = mats
        # matrices indexed by words.ALPHABET, inverse of k is (k+4) % 8
        self.gen_mats = np.stack([mats[ch].m for ch in words.ALPHABET])
        self._check_construction()
        self._side_data = self._build_sides()
        self.std_gens = [self.element(words.word_of_std(i)) for i in range(4)]
        self.cache = None  # set by attach_cache

    # -- construction checks ------------------------------------------------

    def _check_construction(self):
        rel = self.matrix_of(words.RELATOR)
        err = np.abs(rel.m - np.eye(2)).max()
        if err > 1e-9:
            raise AssertionError(f"octagon relation fails: {err:.3g}")
        c1 = self.matrix_of("abAB").m @ self.matrix_of(
            words.STD_GENS[2]
            + words.STD_GENS[3]
            + words.inv_word(words.STD_GENS[2])
            + words.inv_word(words.STD_GENS[3])
        ).m
        if np.abs(c1 - np.eye(2) * np.sign(c1[0, 0])).max() > 1e-9:
            raise AssertionError("standard commutator relation fails")
        for ch in "abcd":
            if abs(self._gen[ch].trace) <= 2.0:
                raise AssertionError("side pairing not hyperbolic")

    def fundamental_domain_area(self) -> float:
        """Area of the octagon via Gauss-Bonnet: 6 pi minus the angle sum."""
        total = 0.0
        for k in range(8):
            v = self.vertices[k]
            a1 = direction(v, self.vertices[(k + 1) % 8])
            a2 = direction(v, self.vertices[(k - 1) % 8])
            total += abs(_wrap(a1 - a2))
        return 6.0 * math.pi - total

    def _build_sides(self):
        sides = []
        for k in range(8):
            v0, v1 = self.vertices[k], self.vertices[(k + 1) % 8]
            geo = _geodesic_through(v0, v1)
            sides.append((geo, geo.side_of(self.base), _GEOM_LABELS[k]))
        return sides

    # -- basic algebra -------------------------------------------------------

    def matrix_of(self, word: str) -> Isometry:
        # renormalize the determinant only while the entries are small
        # enough for it to be numerically meaningful; beyond that the
        # product of unit factors is trusted
        m = np.eye(2)
        for k, ch in enumerate(word):
            m = m @ self._gen[ch].m
            if k % 6 == 5 and np.abs(m).max() < 1e6:
                det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
                m = m / math.sqrt(abs(det))
        return Isometry.of_unit(m)

    def element(self, word: str) -> "GroupElement":
        return GroupElement(self, words.free_reduce(word))

    def identity(self) -> "GroupElement":
        return GroupElement(self, "")

    @cached_property
    def group_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.round(self.gen_mats, 9).tobytes())
        return h.hexdigest()[:12]

    def attach_cache(self, cache) -> "SurfaceGroup":
        self.cache = cache
        return self

    # -- point location ------------------------------------------------------

    def locate_tile(self, z: complex, max_steps: int = 400) -> str:
        """Word w with z in w * F, by walking across violated sides."""
        word = []
        cur = z
        for _ in range(max_steps):
            worst = None
            worst_excess = 1e-9
            for geo, inner, lab in self._side_data:
                w = geo.norm.apply(cur)
                signed = -w.real if inner > 0 else w.real
                # distance proxy beyond the side
                excess = -signed / abs(w)
                if excess > worst_excess:
                    worst_excess = excess
                    worst = lab
            if worst is None:
                return "".join(word)
            word.append(worst)
            cur = self._gen[worst].inv().apply(cur)
        raise RuntimeError("tile location did not terminate")

    def tile_chain_along(self, geo: Geodesic, t0: float, t1: float, step: float = 0.35) -> list[str]:
        """Tile words visited by the axis segment geo[t0, t1]."""
        out: list[str] = []
        seen: set[str] = set()
        t = t0
        while t <= t1 + 1e-9:
            w = words.free_reduce(self.locate_tile(geo.point(min(t, t1))))
            if w not in seen:
                seen.add(w)
                out.append(w)
            t += step
        return out

    # -- vectorized BFS engine ------------------------------------------------

    def orbit_bfs(
        self,
        keep: Callable[[np.ndarray], np.ndarray],
        budget: int = 12_000_000,
        what: str = "orbit",
        projected: float = 0.0,
        chunk: int = 1_000_000,
    ) -> "OrbitSet":
        """All group elements g, BFS over right multiplication, with
        keep(matrices) selecting which orbit points stay in play."""
        if projected > budget:
            raise ResourceBudgetError(what, projected, budget)
        gm = self.gen_mats
        mats = np.eye(2)[None, :, :]
        parent = np.full(1, -1, np.int64)
        letter = np.full(1, -1, np.int8)
        visited = _pack_keys(mats)
        visited.sort()
        lo, hi = 0, 1  # frontier index range
        total = 1
        while hi > lo:
            layer_m, layer_p, layer_l, layer_k = [], [], [], []
            for start in range(lo, hi, chunk):
                stop = min(start + chunk, hi)
                fm = mats[start:stop]
                cand = np.einsum("fij,gjk->fgik", fm, gm).reshape(-1, 2, 2)
                pl = np.repeat(letter[start:stop], 8)
                ll = np.tile(np.arange(8, dtype=np.int8), stop - start)
                mask = pl != ((ll + 4) % 8).astype(np.int8)
                cand = cand[mask]
                cp = (np.repeat(np.arange(start, stop), 8)[mask]).astype(np.int64)
                cl = ll[mask]
                sel = keep(cand)
                cand, cp, cl = cand[sel], cp[sel], cl[sel]
                if not len(cand):
                    continue
                k = _pack_keys(cand)
                _, first = np.unique(k, return_index=True)
                first.sort()
                cand, cp, cl, k = cand[first], cp[first], cl[first], k[first]
                pos = np.clip(np.searchsorted(visited, k), 0, len(visited) - 1)
                new = visited[pos] != k
                if new.any():
                    layer_m.append(cand[new])
                    layer_p.append(cp[new])
                    layer_l.append(cl[new])
                    layer_k.append(k[new])
            if not layer_m:
                break
            cand = np.concatenate(layer_m)
            cp = np.concatenate(layer_p)
            cl = np.concatenate(layer_l)
            k = np.concatenate(layer_k)
            if len(layer_m) > 1:
                _, first = np.unique(k, return_index=True)
                first.sort()
                cand, cp, cl, k = cand[first], cp[first], cl[first], k[first]
            total += len(cand)
            if total > budget:
                raise ResourceBudgetError(what, float(total), budget)
            mats = np.concatenate([mats, cand])
            parent = np.concatenate([parent, cp])
            letter = np.concatenate([letter, cl])
            visited = np.sort(np.concatenate([visited, k]))
            lo, hi = hi, total
        return OrbitSet(self, mats, parent, letter)

    def ball_orbit(self, radius: float, budget: int = 30_000_000) -> "OrbitSet":
        """Orbit points within `radius` + slack of the base point (cached)."""
        thr = radius + BFS_SLACK
        tag = f"ball_{thr:.4f}"
        if self.cache is not None:
            hit = self.cache.load_arrays("orbit", self.group_hash, tag)
            if hit is not None:
                return OrbitSet(self, hit["mats"], hit["parent"], hit["letter"])
        ball = self.orbit_bfs(
            lambda m: _disp_to_base(m) <= thr,
            budget=budget,
            what=f"ball(radius={radius:.3f})",
            projected=math.exp(thr) / 4.0,
        )
        if self.cache is not None:
            self.cache.store_arrays(
                "orbit", self.group_hash, tag,
                mats=ball.mats, parent=ball.parent, letter=ball.letter,
            )
        return ball

    def segment_orbit(self, geo: Geodesic, t0: float, t1: float, rho: float,
                      budget: int = 30_000_000) -> "OrbitSet":
        """Orbit points within rho + slack of the axis segment geo[t0,t1]."""
        thr = rho + BFS_SLACK
        nm = geo.norm.m
        off = geo._offset
        area = (2 * (t1 - t0) + 2 * math.pi) * math.exp(thr) / 2.0

        def keep(mats):
            return _dist_to_segment(mats, nm, off, t0, t1) <= thr

        return self.orbit_bfs(keep, budget=budget,
                              what=f"segment(rho={rho:.2f}, len={t1 - t0:.2f})",
                              projected=area / (4 * math.pi))

    # -- public enumeration ops ----------------------------------------------

    def enumerate_ball(self, L: float, budget: int = 30_000_000) -> "OrbitSet":
        """Every group element with d(base, g base) <= L, exactly."""
        ball = self.ball_orbit(L, budget=budget)
        return ball.filtered(ball.displacements() <= L + 1e-12)

    def connection_candidates(self, p: complex, q: complex, lmax: float,
                              budget: int = 12_000_000) -> "OrbitSet":
        """Deck elements g with d(p, g q) <= lmax, exactly."""
        wq = self.locate_tile(q)
        q0 = self.matrix_of(wq).inv().apply(q)  # q pulled into the base tile
        ball = self.orbit_bfs(
            lambda m: _dist_to_point(m, p) <= lmax + BFS_SLACK,
            budget=budget,
            what=f"connections(lmax={lmax:.2f})",
            projected=math.exp(lmax + BFS_SLACK) / 4.0,
        )
        d = _orbit_point_dist(ball.mats, q0, p)
        keep = np.nonzero(d <= lmax + 1e-12)[0]
        inv_wq = words.inv_word(wq)
        ws = [words.free_reduce(ball.word(int(i)) + inv_wq) for i in keep]
        m = self.matrix_of(inv_wq).m
        return OrbitSet(self, ball.mats[keep] @ m[None, :, :], None, None, base_words=ws)

    def connections(self, u: UnitTangent, v: UnitTangent, eps: float, L: float,
                    budget: int = 30_000_000) -> list["Connection"]:
        """All geodesic arcs from u to v (over deck translates) with length
        within eps of L and both endpoint angle errors below eps."""
        cand = self.connection_candidates(u.base, v.base, L + eps, budget=budget)
        out = []
        for i in range(len(cand)):
            g = Isometry(cand.mats[i], normalize=False)
            q2 = g.apply(v.base)
            if abs(q2 - u.base) < 1e-12:
                continue
            length = dist(u.base, q2)
            if abs(length - L) >= eps:
                continue
            a0 = abs(_wrap(direction(u.base, q2) - u.angle))
            vv = g.apply_tangent(v)
            a1 = abs(_wrap(direction(q2, u.base) + math.pi - vv.angle))
            if a0 < eps and a1 < eps:
                out.append(Connection(cand.word(i), g, length, a0, a1))
        out.sort(key=lambda c: (c.length, c.word))
        return out

    # -- closed geodesics ------------------------------------------------------

    def closed_geodesics(self, eps: float, R: float,
                         budget: int = 30_000_000) -> dict[str, "ClosedGeodesic"]:
        """All oriented conjugacy classes with length in [2R-2eps, 2R+2eps]."""
        if not (0 < eps <= 1):
            raise ValueError("eps must lie in (0, 1]")
        if R < 4:
            raise ValueError("R must be at least 4")
        lmin, lmax = 2 * R - 2 * eps, 2 * R + 2 * eps
        key_rows = None
        tag = f"geod_{eps:.4f}_{R:.4f}"
        if self.cache is not None:
            key_rows = self.cache.load_text("geodesics", self.group_hash, tag)
        if key_rows is None:
            ball = self.ball_orbit(lmax + AXIS_SLACK, budget=budget)
            tr = np.abs(ball.traces())
            with np.errstate(invalid="ignore"):
                lengths = 2.0 * np.arccosh(np.maximum(tr / 2.0, 1.0))
            sel = (tr > 2.0) & (lengths >= lmin - 1e-9) & (lengths <= lmax + 1e-9)
            keys = set()
            for i in np.nonzero(sel)[0]:
                w = ball.word(int(i))
                k = words.class_key(w)
                if k:
                    keys.add(k)
                    keys.add(words.class_key(words.inv_word(k)))
            key_rows = sorted(keys)
            if self.cache is not None:
                self.cache.store_text("geodesics", self.group_hash, tag, key_rows)
        out = {}
        for k in key_rows:
            cg = ClosedGeodesic(self, k)
            if lmin - 1e-9 <= cg.length <= lmax + 1e-9:
                out[k] = cg
        return out

    def find_band_classes(self, lmin: float, lmax: float, max_letters: int = 7,
                          limit: int = 64) -> list["ClosedGeodesic"]:
        """Cheap search for some classes in a length band: canonical keys of
        short words.  Not exhaustive; used for seeds and witness sampling."""
        found: set[str] = set()
        gm = [self._gen[ch].m for ch in words.ALPHABET]

        def rec(word: str, m: np.ndarray):
            if word:
                t = abs(m[0, 0] + m[1, 1])
                if t > 2.0:
                    l = 2.0 * math.acosh(t / 2.0)
                    if lmin <= l <= lmax:
                        found.add(words.class_key(word))
                d = _disp_to_base(m[None, :, :])[0]
                if d > lmax + AXIS_SLACK or len(word) >= max_letters:
                    return
            for k, ch in enumerate(words.ALPHABET):
                if word and word[-1] == ch.swapcase():
                    continue
                rec(word + ch, m @ gm[k])

        rec("", np.eye(2))
        out = [ClosedGeodesic(self, k) for k in sorted(found) if k]
        out = [c for c in out if lmin - 1e-9 <= c.length <= lmax + 1e-9]
        return out[:limit]


# -- elements, connections, geodesics -----------------------------------------


class GroupElement:
    """A deck group element carried as a reduced word with cached matrix."""

    __slots__ = ("group", "word", "__dict__")

    def __init__(self, group: SurfaceGroup, word: str):
        self.group = group
        self.word = words.free_reduce(word)

    @cached_property
    def iso(self) -> Isometry:
        return self.group.matrix_of(self.word)

    @cached_property
    def arc_length(self) -> float:
        """Length of the based geodesic arc from * to g*."""
        return self.iso.displacement(self.group.base)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.group, self.word + other.word)

    def inv(self) -> "GroupElement":
        return GroupElement(self.group, words.inv_word(self.word))

    def is_identity(self) -> bool:
        return words.is_identity(self.word)

    def translation_length(self) -> float:
        try:
            return self.iso.translation_length()
        except ValueError:
            raise ValueError(
                f"element {self.word!r} is not hyperbolic; no closed geodesic"
            ) from None

    def abelianized(self):
        return words.abelianize(self.word)

    def initial_tangent(self) -> UnitTangent:
        """Initial direction of the arc from * to g*."""
        return UnitTangent(self.group.base, direction(self.group.base, self.iso.apply(self.group.base)))

    def terminal_tangent(self) -> UnitTangent:
        """Terminal direction (at g*) of the arc from * to g*; pulled to * it
        is the tangent of the arc of g at its endpoint."""
        p = self.group.base
        q = self.iso.apply(p)
        return UnitTangent(q, direction(q, p) + math.pi)

    def __repr__(self):
        return f"<{self.word or '1'}>"

    def __eq__(self, other):
        return isinstance(other, GroupElement) and words.is_identity(
            self.word + words.inv_word(other.word)
        )

    def __hash__(self):
        return hash(words.class_key(self.word))  # weak; fine for small dicts


@dataclass(frozen=True)
class Connection:
    """A geodesic arc realizing a connection, as a deck element."""

    word: str
    iso: Isometry
    length: float
    angle_error_start: float
    angle_error_end: float


class ClosedGeodesic:
    """Oriented closed geodesic: canonical class word, axis, marked circle.

    The parametrizing circle has circumference equal to the length; its
    origin is the axis point of the canonical lift closest to the base
    point (ties cannot occur for a generic base point; the smaller
    parameter would win).
    """

    def __init__(self, group: SurfaceGroup, canonical_word: str):
        if not canonical_word:
            raise ValueError("identity has no closed geodesic")
        self.group = group
        self.word = canonical_word

    @cached_property
    def iso(self) -> Isometry:
        return self.group.matrix_of(self.word)

    @cached_property
    def length(self) -> float:
        return self.iso.translation_length()

    @property
    def hl(self) -> float:
        return self.length / 2.0

    @cached_property
    def axis(self) -> Geodesic:
        return self.iso.axis()

    @cached_property
    def key(self) -> str:
        return self.word

    def reversed(self) -> "ClosedGeodesic":
        return ClosedGeodesic(self.group, words.class_key(words.inv_word(self.word)))

    @cached_property
    def reverse_offset(self) -> float:
        """Offset c with: circle coordinate x on this geodesic corresponds
        to coordinate (c - x) mod length on the reversed geodesic."""
        rev_key, conj = words.class_key_with_conjugator(words.inv_word(self.word))
        rev = ClosedGeodesic(self.group, rev_key)
        u = self.group.matrix_of(conj)
        p0 = u.apply(self.axis.point(0.0))
        return rev.axis.param_of_foot(p0) % rev.length

    def circle_coordinate(self, axis_param: float) -> float:
        return axis_param % self.length

    def good_for(self, eps: float, R: float) -> bool:
        return abs(self.hl - R) <= eps + 1e-12

    def __repr__(self):
        return f"Geod[{self.word}]"


# -- vectorized helpers --------------------------------------------------------

_MIX1 = np.uint64(0x9E3779B97F4A7C15)
_MIX2 = np.uint64(0xC2B2AE3D27D4EB4F)
_KEY_SCALE = 1e6


def _normalize_signs(mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(-1, 4)
    idx = np.abs(flat).argmax(axis=1)
    s = np.sign(flat[np.arange(len(flat)), idx])
    return mats * s[:, None, None]


def _pack_keys(mats: np.ndarray) -> np.ndarray:
    q = np.round(_normalize_signs(mats.copy()).reshape(-1, 4) * _KEY_SCALE)
    q = q.astype(np.int64).view(np.uint64)
    h1 = np.zeros(len(q), np.uint64)
    h2 = np.zeros(len(q), np.uint64)
    for j in range(4):
        h1 = (h1 ^ q[:, j]) * _MIX1
        h2 = (h2 * _MIX2) ^ (q[:, j] + np.uint64(0x1234567 + j))
        h1 ^= h1 >> np.uint64(29)
        h2 ^= h2 >> np.uint64(31)
    out = np.empty(len(q), dtype=np.complex128)
    out.real = h1.view(np.int64)
    out.imag = h2.view(np.int64)
    return out


def _orbit_points(mats: np.ndarray) -> np.ndarray:
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    den = c * c + d * d
    return (b * d + a * c) / den + 1j / den


def _disp_to_base(mats: np.ndarray) -> np.ndarray:
    z = _orbit_points(mats)
    return _dist_cx(z, complex(BASE))


def _dist_cx(z: np.ndarray, w: complex) -> np.ndarray:
    cosh = 1.0 + np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    return np.arccosh(np.maximum(cosh, 1.0))


def _dist_to_point(mats: np.ndarray, p: complex) -> np.ndarray:
    return _dist_cx(_orbit_points(mats), p)


def _orbit_point_dist(mats: np.ndarray, q: complex, p: complex) -> np.ndarray:
    """d(p, g q) for each matrix g."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    den = (c * q + d)
    z = (a * q + b) / den
    return _dist_cx(z, p)


def _dist_to_segment(mats: np.ndarray, norm_m: np.ndarray, off: float,
                     t0: float, t1: float) -> np.ndarray:
    z = _orbit_points(mats)
    a, b, c, d = norm_m.ravel()
    w = (a * z + b) / (c * z + d)
    t = np.log(np.abs(w)) - off
    dperp = np.arcsinh(np.abs(w.real) / w.imag)
    dt = np.maximum(np.maximum(t0 - t, t - t1), 0.0)
    return np.arccosh(np.cosh(dperp) * np.cosh(dt))


class OrbitSet:
    """Result of an orbit BFS: matrices plus parent/letter word encoding."""

    def __init__(self, group: SurfaceGroup, mats, parent, letter, base_words=None):
        self.group = group
        self.mats = mats
        self.parent = parent
        self.letter = letter
        self._base_words = base_words  # explicit words when derived

    def __len__(self):
        return len(self.mats)

    def displacements(self) -> np.ndarray:
        return _disp_to_base(self.mats)

    def traces(self) -> np.ndarray:
        return self.mats[:, 0, 0] + self.mats[:, 1, 1]

    def word(self, i: int) -> str:
        if self._base_words is not None:
            return self._base_words[i]
        out = []
        while i > 0 and self.parent[i] >= 0:
            out.append(words.ALPHABET[self.letter[i]])
            i = int(self.parent[i])
        return "".join(reversed(out))

    def all_words(self) -> list[str]:
        return [self.word(i) for i in range(len(self))]

    def filtered(self, mask: np.ndarray) -> "OrbitSet":
        idx = np.nonzero(mask)[0]
        ws = [self.word(int(i)) for i in idx]
        return OrbitSet(self.group, self.mats[idx], None, None, base_words=ws)

    def right_translated(self, suffix_word: str) -> "OrbitSet":
        """Orbit set of g * w for a fixed group word w."""
        m = self.group.matrix_of(suffix_word).m
        ws = [words.free_reduce(self.word(i) + suffix_word) for i in range(len(self))]
        return OrbitSet(self.group, self.mats @ m[None, :, :], None, None, base_words=ws)

    def elements(self) -> Iterable[GroupElement]:
        for i in range(len(self)):
            yield self.group.element(self.word(i))


@lru_cache(maxsize=4)
def standard_group() -> SurfaceGroup:
    return SurfaceGroup()


def _geodesic_through(p: complex, q: complex) -> Geodesic:
    """Complete geodesic through two points, oriented from p to q."""
    if abs(p.real - q.real) < 1e-13:
        return Geodesic(p.real, math.inf) if q.imag > p.imag else Geodesic(p.real + 0.0, -math.inf)
    c = (abs(q) ** 2 - abs(p) ** 2) / (2.0 * (q.real - p.real))
    r = abs(p - c)
    if p.real < q.real:
        return Geodesic(c - r, c + r)
    return Geodesic(c + r, c - r)


def translation_length(el: GroupElement) -> float:
    """Length of the closed geodesic of a hyperbolic element."""
    return el.translation_length()
