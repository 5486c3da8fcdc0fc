"""Upper half-plane primitives: points, tangent vectors, isometries, geodesics.

Points are complex numbers with positive imaginary part.  Orientation
preserving isometries are real 2x2 matrices of determinant 1 acting by
Mobius transformations; matrices are kept sign-normalized so that each
element of PSL(2,R) has a unique representative.
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np

MAT_TOL = 1e-9
BASE = 1j  # octagon center and base point of every development


def dist(p: complex, q: complex) -> float:
    """Hyperbolic distance between two upper half-plane points."""
    if p.imag <= 0 or q.imag <= 0:
        raise ValueError("point outside the upper half-plane")
    d2 = abs(p - q) ** 2 / (2.0 * p.imag * q.imag)
    return math.acosh(max(1.0 + d2, 1.0))


def direction(p: complex, q: complex) -> float:
    """Angle of the initial tangent at p of the geodesic from p to q."""
    if abs(p.real - q.real) < 1e-13 * (1.0 + abs(p) + abs(q)):
        return math.pi / 2 if q.imag > p.imag else -math.pi / 2
    c = (abs(q) ** 2 - abs(p) ** 2) / (2.0 * (q.real - p.real))
    t = 1j * (p - c)
    if (q.real - p.real) * t.real < 0:
        t = -t
    return cmath.phase(t)


def point_at(p: complex, theta: float, t: float) -> complex:
    """Point at hyperbolic distance t from p in tangent direction theta."""
    return Isometry.frame(p, theta).apply(BASE * math.exp(t))


class UnitTangent(NamedTuple):
    """Unit tangent vector: base point plus chart angle of the direction."""

    base: complex
    angle: float

    def rotated(self, phi: float) -> "UnitTangent":
        return UnitTangent(self.base, _wrap(self.angle + phi))

    def reversed(self) -> "UnitTangent":
        return self.rotated(math.pi)


def _wrap(a: float) -> float:
    return math.atan2(math.sin(a), math.cos(a))


def angle(u: UnitTangent, v: UnitTangent) -> float:
    """Unoriented angle in [0, pi] between tangent vectors at a common base."""
    if dist(u.base, v.base) > 1e-7:
        raise ValueError("angle requires tangent vectors at the same point")
    d = abs(_wrap(u.angle - v.angle))
    return d


def transport(u: UnitTangent, q: complex) -> UnitTangent:
    """Parallel transport of u to q along the connecting geodesic."""
    if abs(u.base - q) < 1e-15:
        return u
    phi_p = direction(u.base, q)
    phi_q = direction(q, u.base) + math.pi
    return UnitTangent(q, _wrap(phi_q + u.angle - phi_p))


def dis(u: UnitTangent, v: UnitTangent) -> float:
    """max of the angle after transport and the base-point distance."""
    d = dist(u.base, v.base)
    w = transport(u, v.base)
    return max(abs(_wrap(w.angle - v.angle)), d)


class Isometry:
    """Sign-normalized SL(2,R) matrix acting on the upper half-plane."""

    __slots__ = ("m",)

    def __init__(self, m, normalize: bool = True):
        a = np.asarray(m, dtype=float).reshape(2, 2)
        if normalize:
            det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            if det <= 0:
                raise ValueError("not an orientation-preserving isometry")
            a = a / math.sqrt(det)
            a = a * _sign_of(a)
        self.m = a

    @staticmethod
    def of_unit(m) -> "Isometry":
        """Wrap a product of determinant-one factors; only the projective
        sign is normalized (the determinant of a long product is not
        numerically recoverable and is one by construction)."""
        a = np.asarray(m, dtype=float).reshape(2, 2)
        return Isometry(a * _sign_of(a), normalize=False)

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(np.eye(2), normalize=False)

    @staticmethod
    def rotation(phi: float) -> "Isometry":
        """Rotation of tangent vectors at BASE by +phi."""
        c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
        return Isometry(np.array([[c, s], [-s, c]]))

    @staticmethod
    def translation(t: float) -> "Isometry":
        """Translation by t along the upward geodesic through BASE."""
        e = math.exp(t / 2.0)
        return Isometry(np.array([[e, 0.0], [0.0, 1.0 / e]]), normalize=False)

    @staticmethod
    def frame(p: complex, theta: float) -> "Isometry":
        """Isometry taking (BASE, up) to (p, direction theta)."""
        rt = math.sqrt(p.imag)
        n = Isometry(np.array([[rt, p.real / rt], [0.0, 1.0 / rt]]), normalize=False)
        return n @ Isometry.rotation(theta - math.pi / 2.0)

    @staticmethod
    def to_frame(p: complex, theta: float) -> "Isometry":
        return Isometry.frame(p, theta).inv()

    def apply(self, z: complex) -> complex:
        a, b, c, d = self.m.ravel()
        return (a * z + b) / (c * z + d)

    def apply_tangent(self, u: UnitTangent) -> UnitTangent:
        a, b, c, d = self.m.ravel()
        z = u.base
        w = (a * z + b) / (c * z + d)
        dang = -2.0 * cmath.phase(c * z + d)
        return UnitTangent(w, _wrap(u.angle + dang))

    def inv(self) -> "Isometry":
        a, b, c, d = self.m.ravel()
        return Isometry(np.array([[d, -b], [-c, a]]), normalize=False)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.m @ other.m)

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def displacement(self, z: complex = BASE) -> float:
        return dist(z, self.apply(z))

    def is_identity(self, tol: float = MAT_TOL) -> bool:
        return bool(np.abs(self.m - np.eye(2)).max() < tol)

    def is_hyperbolic(self, tol: float = MAT_TOL) -> bool:
        return abs(self.trace) > 2.0 + tol

    def translation_length(self) -> float:
        """Axis translation length; raises for non-hyperbolic elements."""
        t = abs(self.trace)
        if t <= 2.0 + MAT_TOL:
            raise ValueError(f"element is not hyperbolic (|trace| = {t:.12f})")
        return 2.0 * math.acosh(t / 2.0)

    def axis(self) -> "Geodesic":
        """Oriented invariant geodesic of a hyperbolic element."""
        a, b, c, d = self.m.ravel()
        tr = a + d
        if abs(tr) <= 2.0 + MAT_TOL:
            raise ValueError("axis of a non-hyperbolic element")
        disc = math.sqrt(tr * tr - 4.0)
        if tr < 0:
            disc = -disc
        if abs(c) < 1e-14:
            # fixed points: infinity and b/(d-a)
            att = math.inf if abs(a) > abs(d) else b / (d - a)
            rep = b / (d - a) if abs(a) > abs(d) else math.inf
            return Geodesic(rep, att)
        x_plus = (a - d + disc) / (2.0 * c)
        x_minus = (a - d - disc) / (2.0 * c)
        # x_plus is attracting (eigenvalue of modulus > 1)
        return Geodesic(x_minus, x_plus)

    def __repr__(self) -> str:
        return f"Isometry({self.m.tolist()})"


def _sign_of(a: np.ndarray) -> float:
    flat = a.ravel()
    k = int(np.abs(flat).argmax())
    return 1.0 if flat[k] > 0 else -1.0


class Geodesic:
    """Oriented complete geodesic, from boundary point `src` to `dst`.

    Carries a unit-speed parametrization; parameter 0 is the point closest
    to BASE.  `norm` maps the geodesic onto the upward imaginary axis with
    parameter t at height e^t (after the stored offset).
    """

    __slots__ = ("src", "dst", "norm", "_offset")

    def __init__(self, src: float, dst: float):
        self.src = src
        self.dst = dst
        if math.isinf(src):
            n = np.array([[0.0, 1.0], [-1.0, dst]])
        elif math.isinf(dst):
            n = np.array([[1.0, -src], [0.0, 1.0]])
        elif src > dst:
            n = np.array([[1.0, -src], [1.0, -dst]])
        else:
            n = np.array([[1.0, -src], [-1.0, dst]])
        det = n[0, 0] * n[1, 1] - n[0, 1] * n[1, 0]
        assert det > 0
        self.norm = Isometry(n / math.sqrt(det), normalize=False)
        self._offset = 0.0
        self._offset = self.param_of_foot(BASE)

    def param_of_foot(self, z: complex) -> float:
        """Parameter of the orthogonal projection of z onto the geodesic."""
        w = self.norm.apply(z)
        return math.log(abs(w)) - self._offset

    def point(self, t: float) -> complex:
        return self.norm.inv().apply(1j * math.exp(t + self._offset))

    def tangent(self, t: float) -> UnitTangent:
        u = UnitTangent(1j * math.exp(t + self._offset), math.pi / 2)
        return self.norm.inv().apply_tangent(u)

    def distance_to(self, z: complex) -> float:
        w = self.norm.apply(z)
        s = abs(w.real) / w.imag
        return math.asinh(s)

    def side_of(self, z: complex) -> int:
        """+1 if z lies to the left of the oriented geodesic, -1 right, 0 on."""
        w = self.norm.apply(z)
        if abs(w.real) < 1e-12 * abs(w):
            return 0
        # normalized geodesic runs upward along the imaginary axis; left = Re < 0
        return -1 if w.real > 0 else 1

    def distance_to_segment(self, z: complex, t0: float, t1: float) -> float:
        d_perp = self.distance_to(z)
        t = self.param_of_foot(z)
        if t0 <= t <= t1:
            return d_perp
        dt = (t0 - t) if t < t0 else (t - t1)
        return math.acosh(math.cosh(d_perp) * math.cosh(dt))

    def translate(self, g: Isometry) -> "Geodesic":
        return Geodesic(_apply_boundary(g, self.src), _apply_boundary(g, self.dst))

    def reversed(self) -> "Geodesic":
        return Geodesic(self.dst, self.src)


def _apply_boundary(g: Isometry, x: float) -> float:
    a, b, c, d = g.m.ravel()
    if math.isinf(x):
        return a / c if abs(c) > 1e-15 else math.inf
    den = c * x + d
    if abs(den) < 1e-14 * (1.0 + abs(x)):
        return math.inf
    return (a * x + b) / den


def common_perpendicular(g1: Geodesic, g2: Geodesic):
    """Feet parameters and length of the common perpendicular of two
    disjoint geodesics: returns (t1, t2, length) with tᵢ on gᵢ."""
    # normalize g1 to the imaginary axis; g2 becomes a half-circle (p, q)
    n = g1.norm
    p = _apply_boundary(n, g2.src)
    q = _apply_boundary(n, g2.dst)
    if math.isinf(p) or math.isinf(q) or p * q <= 0:
        raise ValueError("geodesics intersect or share an endpoint")
    c = (p + q) / 2.0
    r = abs(p - q) / 2.0
    # foot on the imaginary axis: |w| = sqrt(c^2 - r^2)
    h2 = c * c - r * r
    if h2 <= 0:
        raise ValueError("geodesics intersect")
    h = math.sqrt(h2)
    t1 = math.log(h) - g1._offset
    length = math.asinh(h / r)
    t2 = g2.param_of_foot(g1.point(t1))
    return t1, t2, length
