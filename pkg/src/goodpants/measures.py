"""Circle measures on unit normal bundles, the feet operator, and
delta-equivalence.

Feet of pants marked with an oriented geodesic live on the half-turn
quotient circle of circumference hl; the opposite orientation's feet are
carried to the same circle through the marking-reversal offset, so each
oriented class gets a pair (same-side, opposite-side) of measures.
Masses are exact rationals end to end; positions are floats compared at
1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .formal import FormalSum
from .group import ClosedGeodesic

POS_TOL = 1e-12


@dataclass
class CircleMeasure:
    """Atoms plus an optional uniform component on a circle."""

    circumference: float
    atoms: list[tuple[float, Fraction]] = field(default_factory=list)
    density: Fraction = Fraction(0)

    def __post_init__(self):
        c = self.circumference
        if c <= 0:
            raise ValueError("circumference must be positive")
        cleaned = []
        for p, m in self.atoms:
            if m < 0:
                raise ValueError("negative atom in a positive measure")
            if m:
                cleaned.append((p % c, Fraction(m)))
        self.atoms = sorted(cleaned)
        self.density = Fraction(self.density)
        if self.density < 0:
            raise ValueError("negative uniform density")

    @staticmethod
    def lebesgue(circumference: float, density=1) -> "CircleMeasure":
        return CircleMeasure(circumference, [], Fraction(density))

    def total(self):
        s = sum((m for _, m in self.atoms), Fraction(0))
        if self.density:
            return float(s) + float(self.density) * self.circumference
        return s

    def is_atomic(self) -> bool:
        return self.density == 0

    def arc_mass(self, start: float, length: float) -> float | Fraction:
        """Mass of the closed arc [start, start+length] (wrapping)."""
        c = self.circumference
        if length >= c - POS_TOL:
            return self.total()
        start %= c
        s = Fraction(0)
        for p, m in self.atoms:
            d = (p - start) % c
            if d <= length + POS_TOL or d >= c - POS_TOL:
                s += m
        if self.density:
            return float(s) + float(self.density) * max(0.0, min(length, c))
        return s

    def rotated(self, t: float) -> "CircleMeasure":
        return CircleMeasure(self.circumference,
                             [((p + t) % self.circumference, m) for p, m in self.atoms],
                             self.density)

    def reflected(self, axis_pos: float = 0.0) -> "CircleMeasure":
        return CircleMeasure(self.circumference,
                             [((2 * axis_pos - p) % self.circumference, m) for p, m in self.atoms],
                             self.density)

    def scaled(self, k) -> "CircleMeasure":
        k = Fraction(k)
        return CircleMeasure(self.circumference,
                             [(p, m * k) for p, m in self.atoms],
                             self.density * k)

    def plus(self, other: "CircleMeasure") -> "CircleMeasure":
        if abs(other.circumference - self.circumference) > 1e-9:
            raise ValueError("circle sizes differ")
        return CircleMeasure(self.circumference, self.atoms + other.atoms,
                             self.density + other.density)


def _masses_equal(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= 1e-12 * (1.0 + abs(float(a)) + abs(float(b)))


def delta_equivalent(alpha: CircleMeasure, beta: CircleMeasure, delta: float) -> bool:
    """mu(A) <= nu(N_delta(A)) for every interval A, at equal total mass.

    Checked on the finite grid of candidate intervals with endpoints at
    atom positions and at positions +- delta, which is exact for
    atomic-plus-uniform measures.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if not _masses_equal(alpha.total(), beta.total()):
        raise ValueError(
            f"delta-equivalence needs equal total masses "
            f"({float(alpha.total()):.12g} vs {float(beta.total()):.12g})"
        )
    c = alpha.circumference
    grid = sorted({p % c for p, _ in alpha.atoms}
                  | {(p + delta) % c for p, _ in beta.atoms}
                  | {(p - delta) % c for p, _ in beta.atoms}
                  | {0.0})
    nudges = (-1e-9, 0.0, 1e-9)
    pts = sorted({(g + n) % c for g in grid for n in nudges})
    slack = 1e-12 * (1.0 + float(alpha.total()))
    for i, u in enumerate(pts):
        for v in pts:
            length = (v - u) % c
            a = float(alpha.arc_mass(u, length))
            b = float(beta.arc_mass(u - delta, min(length + 2 * delta, c)))
            if a > b + slack:
                return False
    return float(alpha.total()) <= float(beta.total()) + slack


def min_delta(alpha: CircleMeasure, beta: CircleMeasure,
              resolution: float = 1e-4) -> float:
    """Smallest grid delta making the two measures delta-equivalent both
    ways, by bisection at the stated resolution."""
    def ok(d: float) -> bool:
        return delta_equivalent(alpha, beta, d) and delta_equivalent(beta, alpha, d)

    lo, hi = 0.0, alpha.circumference / 2.0 + resolution
    if ok(lo):
        return 0.0
    if not ok(hi):
        return math.inf
    while hi - lo > resolution:
        mid = (lo + hi) / 2.0
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def transport_check(alpha: CircleMeasure, K, delta: float,
                    beta: CircleMeasure, R: float) -> bool:
    """alpha + beta is (|beta|/2K + delta)-equivalent to
    (K + |beta|/2R) * lambda, given alpha delta-equivalent to K lambda."""
    if 2 * R <= 1:
        raise ValueError("needs 2R > 1")
    if abs(alpha.circumference - 2 * R) > 1e-9:
        raise ValueError("R must be half the circumference of alpha's circle")
    K = Fraction(K)
    lam = CircleMeasure.lebesgue(alpha.circumference, K)
    if not delta_equivalent(alpha, lam, delta):
        raise ValueError("hypothesis fails: alpha is not delta-equivalent to K*lambda")
    b = beta.total()
    bf = b if isinstance(b, Fraction) else Fraction(float(b))
    delta2 = float(bf) / (2.0 * float(K)) + delta
    target_density = K + bf / Fraction(float(alpha.circumference))
    combined = alpha.plus(beta)
    target = CircleMeasure.lebesgue(alpha.circumference, target_density)
    return delta_equivalent(combined, target, delta2)


def symmetry_delta(alpha: CircleMeasure, resolution: float = 1e-4) -> float:
    """Minimal grid delta with alpha delta-equivalent to all its isometric
    images; rotations through atom gaps, the half turn, and reflections
    through atoms generate the worst cases on atomic measures."""
    c = alpha.circumference
    if not alpha.atoms:
        return 0.0
    pos = [p for p, _ in alpha.atoms]
    rot = {c / 2.0} | {(q - p) % c for p in pos for q in pos}
    refl = {2 * p for p in pos} | {p + q for p in pos for q in pos}
    worst = 0.0
    for t in sorted(rot):
        worst = max(worst, min_delta(alpha, alpha.rotated(t), resolution))
    for a in sorted(refl):
        worst = max(worst, min_delta(alpha, alpha.reflected(a / 2.0), resolution))
    return worst


@dataclass
class FeetRecord:
    """Feet measures of the pants marked with one oriented geodesic,
    split into the two components of the unit normal bundle.

    `plus` collects feet of markings whose pants body lies left of the
    oriented geodesic (foot side +1), `minus` the right side; the signed
    imbalance of the record is the quantity the pairing needs to vanish.
    """

    geodesic: ClosedGeodesic
    plus: CircleMeasure
    minus: CircleMeasure

    def imbalance(self) -> Fraction:
        return self.plus.total() - self.minus.total()

    def abs_mass(self) -> Fraction:
        return self.plus.total() + self.minus.total()


def dhat(mu: FormalSum, geodesics: dict[str, ClosedGeodesic]) -> dict[str, FeetRecord]:
    """Feet measure of a pants sum, one record per oriented cuff class.

    Each marked pants contributes an atom of its own coefficient at its
    foot, on the side component its body occupies; total mass is exactly
    three times the mass of mu.  `geodesics` caches class objects and is
    extended in place.
    """
    atoms: dict[str, dict[int, list]] = {}
    for p, coeff in mu:
        for i in range(3):
            k = p.cuff_keys[i]
            f = p.feet[i]
            if k not in geodesics:
                geodesics[k] = ClosedGeodesic(p.group, k)
            atoms.setdefault(k, {1: [], -1: []})[f.side].append((f.position, coeff))
    out = {}
    for k in sorted(atoms):
        g = geodesics[k]
        out[k] = FeetRecord(
            geodesic=g,
            plus=CircleMeasure(g.hl, atoms[k][1]),
            minus=CircleMeasure(g.hl, atoms[k][-1]),
        )
    return out


def imbalance_sum(records: dict[str, FeetRecord]) -> FormalSum:
    """Per-class signed side imbalance as an orientation-folded curve sum.

    For a reversal-closed pants sum the records of the two orientations
    carry opposite imbalances, so the folded sum is consistent; when the
    input is not reversal-closed both records contribute and the average
    is taken."""
    from . import words

    acc: dict[str, list] = {}
    for k, rec in records.items():
        folded, sign = words.signed_class_key(k)
        acc.setdefault(folded, []).append(sign * rec.imbalance())
    out: dict[str, Fraction] = {}
    for folded, vals in acc.items():
        v = sum(vals, Fraction(0)) / len(vals) if len(vals) > 1 else vals[0]
        if v:
            out[folded] = v
    return FormalSum(out)
