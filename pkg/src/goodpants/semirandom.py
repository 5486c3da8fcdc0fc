"""Randomization calculus: absolute pushforwards, domination constants,
standard measures, and the counting bounds behind them.

Masses are exact linear combinations of exponentials, sum of r_i e^{s_i}
with rational r_i and rational s_i (geometric lengths enter through
their exact binary-float values).  Comparisons refine an interval until
the sign is determined; a vanishing symbolic difference is equality, so
no verdict ever rests on rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .formal import FormalSum


class ExpSum:
    """Finite sum of r * e^s with exact rational r, s."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        d: dict[Fraction, Fraction] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for s, r in items:
            s, r = Fraction(s), Fraction(r)
            if r:
                d[s] = d.get(s, Fraction(0)) + r
                if not d[s]:
                    del d[s]
        self.terms = d

    @staticmethod
    def exp(s, r=1) -> "ExpSum":
        return ExpSum([(Fraction(s), Fraction(r))])

    @staticmethod
    def const(r) -> "ExpSum":
        return ExpSum([(Fraction(0), Fraction(r))])

    def __add__(self, other: "ExpSum") -> "ExpSum":
        d = dict(self.terms)
        for s, r in other.terms.items():
            nr = d.get(s, Fraction(0)) + r
            if nr:
                d[s] = nr
            else:
                d.pop(s, None)
        out = ExpSum()
        out.terms = d
        return out

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + other * -1

    def __mul__(self, scalar) -> "ExpSum":
        s = Fraction(scalar)
        return ExpSum([(e, r * s) for e, r in self.terms.items()])

    __rmul__ = __mul__

    def scale_exp(self, ds) -> "ExpSum":
        ds = Fraction(ds)
        return ExpSum([(e + ds, r) for e, r in self.terms.items()])

    def is_zero(self) -> bool:
        return not self.terms

    def sign(self) -> int:
        """Exact sign; distinct rational exponents are linearly
        independent over the rationals, so zero means symbolically zero."""
        if not self.terms:
            return 0
        import mpmath

        for prec in (80, 160, 320, 640):
            with mpmath.workprec(prec):
                total = mpmath.mpf(0)
                mag = mpmath.mpf(0)
                for s, r in self.terms.items():
                    t = mpmath.mpf(r.numerator) / r.denominator * mpmath.exp(
                        mpmath.mpf(s.numerator) / s.denominator)
                    total += t
                    mag += abs(t)
                if abs(total) > mag * mpmath.mpf(2) ** (-prec // 2):
                    return 1 if total > 0 else -1
        raise ArithmeticError("sign refinement did not converge; "
                              "exponents too close")

    def __le__(self, other: "ExpSum") -> bool:
        return (self - other).sign() <= 0

    def __eq__(self, other) -> bool:
        return isinstance(other, ExpSum) and (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __float__(self) -> float:
        return float(sum(float(r) * math.exp(float(s))
                         for s, r in self.terms.items()))

    def __repr__(self):
        parts = [f"{r}*e^({s})" for s, r in sorted(self.terms.items())]
        return " + ".join(parts) if parts else "0"


def _mass(x) -> ExpSum:
    return x if isinstance(x, ExpSum) else ExpSum.const(x)


class FiniteMap:
    """Finitely supported map x -> formal sum over codomain keys."""

    def __init__(self, assignments: dict[object, FormalSum], partial: bool = False):
        self.assignments = dict(assignments)
        self.partial = partial

    def domain(self):
        return set(self.assignments)

    def compose(self, other: "FiniteMap") -> "FiniteMap":
        """self after other: x -> sum over intermediate keys."""
        out = {}
        for x, fs in other.assignments.items():
            acc = FormalSum()
            for y, c in fs:
                if y not in self.assignments:
                    continue
                acc = acc + self.assignments[y] * c
            out[x] = acc
        return FiniteMap(out, partial=self.partial or other.partial)

    @staticmethod
    def identity(keys) -> "FiniteMap":
        return FiniteMap({k: FormalSum.single(k) for k in keys})

    def scaled(self, lam) -> "FiniteMap":
        return FiniteMap({x: fs * Fraction(lam)
                          for x, fs in self.assignments.items()})

    def plus(self, other: "FiniteMap") -> "FiniteMap":
        keys = self.domain() | other.domain()
        return FiniteMap({
            k: self.assignments.get(k, FormalSum())
            + other.assignments.get(k, FormalSum())
            for k in keys
        })


def abs_pushforward(f: FiniteMap, mu: dict) -> dict:
    """|f|_* mu: sum of |coefficients| times the source masses; sources
    outside the domain of a partial map are ignored."""
    out: dict[object, ExpSum] = {}
    for x, m in mu.items():
        fs = f.assignments.get(x)
        if fs is None:
            if not f.partial:
                raise KeyError(f"map undefined at {x!r}")
            continue
        mm = _mass(m)
        for y, c in fs:
            add = mm * abs(c)
            out[y] = out.get(y, ExpSum()) + add
    return {y: v for y, v in out.items() if not v.is_zero()}


def measure_le(mu: dict, nu: dict, K=1) -> bool:
    """Pointwise mu <= K nu over the union of supports, exactly."""
    K = Fraction(K)
    for y in set(mu) | set(nu):
        lhs = _mass(mu.get(y, 0))
        rhs = _mass(nu.get(y, 0)) * K
        if not lhs <= rhs:
            return False
    return True


def is_semirandom(f: FiniteMap, mu: dict, nu: dict, K) -> bool:
    return measure_le(abs_pushforward(f, mu), nu, K)


def minimal_k(f: FiniteMap, mu: dict, nu: dict) -> float:
    """Smallest K with |f|_* mu <= K nu, as a float report; infinite when
    the pushforward charges a point nu misses."""
    push = abs_pushforward(f, mu)
    worst = 0.0
    for y, m in push.items():
        denom = float(_mass(nu.get(y, 0)))
        num = float(m)
        if denom <= 0:
            if num > 0:
                return math.inf
            continue
        worst = max(worst, num / denom)
    return worst


# -- standard measures -------------------------------------------------------------


@dataclass(frozen=True)
class MeasureClassSpec:
    family: str                      # sigma_gamma | sigma_pants | sigma_a | L1
    R: Fraction = Fraction(0)
    a: Fraction = Fraction(0)

    def __post_init__(self):
        if self.family not in ("sigma_gamma", "sigma_pants", "sigma_a", "L1"):
            raise ValueError(f"unknown measure family {self.family!r}")


def standard_measure(spec: MeasureClassSpec, key, length: float | None = None) -> ExpSum:
    """Mass of one point under a standard measure.

    sigma_gamma weights every good curve R e^{-2R}; sigma_pants weights
    every good pants e^{-3R}; sigma_a charges e^{-l} to arcs whose length
    l lies in [a, a+1]."""
    R = Fraction(spec.R)
    if spec.family == "sigma_gamma":
        return ExpSum.exp(-2 * R, R)
    if spec.family == "sigma_pants":
        return ExpSum.exp(-3 * R, 1)
    if spec.family == "sigma_a":
        if length is None:
            raise ValueError("sigma_a needs the arc length")
        lf = Fraction(length)
        if spec.a <= lf <= spec.a + 1:
            return ExpSum.exp(-lf, 1)
        return ExpSum()
    raise ValueError(spec.family)


def sigma_a_measure(group, a: float, budget: int = 6_000_000) -> dict[str, ExpSum]:
    """The measure sigma_a on the ball of the group, keys are words."""
    ball = group.enumerate_ball(a + 1.0, budget=budget)
    out = {}
    disp = ball.displacements()
    for i in range(len(ball)):
        l = float(disp[i])
        if a <= l <= a + 1.0:
            w = ball.word(i)
            if w:
                out[w] = ExpSum.exp(-Fraction(l), 1)
    return out


def dominated_by_class(push: dict, window_masses) -> float:
    """Minimal total weight of a convex combination of unit-window
    measures dominating the pushforward; decouples per window because
    the windows are disjoint."""
    per_window: dict[int, float] = {}
    for key, (length, mass) in window_masses.items():
        k = int(math.floor(length))
        ratio = float(_mass(mass)) / math.exp(-length)
        per_window[k] = max(per_window.get(k, 0.0), ratio)
    return sum(per_window.values())


def factorization_count(group, zword: str, a: float, b: float,
                        budget: int = 6_000_000) -> int:
    """Number of ways Z = XY with arc lengths of X in [a, a+1] and of Y
    in [b, b+1]; exact by exhausting the X ball."""
    from . import words as W

    zel = group.element(zword)
    ball = group.enumerate_ball(a + 1.0, budget=budget)
    disp = ball.displacements()
    count = 0
    for i in range(len(ball)):
        lx = float(disp[i])
        if not (a <= lx <= a + 1.0):
            continue
        xw = ball.word(i)
        yw = W.free_reduce(W.inv_word(xw) + zword)
        ly = group.element(yw).arc_length
        if b <= ly <= b + 1.0:
            count += 1
    return count


def product_map_fit(group, a: float, b: float, budget: int = 6_000_000) -> float:
    """Fitted domination constant of the product map on sigma_a x sigma_b
    against the window class of the group."""
    from . import words as W

    mu_a = sigma_a_measure(group, a, budget)
    mu_b = sigma_a_measure(group, b, budget) if b != a else mu_a
    push: dict[str, ExpSum] = {}
    for x, mx in mu_a.items():
        for y, my in mu_b.items():
            z = W.free_reduce(x + y)
            if not z:
                continue
            mass = ExpSum.exp(next(iter(mx.terms)) + next(iter(my.terms)), 1)
            push[z] = push.get(z, ExpSum()) + mass
    window_masses = {}
    for z, m in push.items():
        window_masses[z] = (group.element(z).arc_length, m)
    return dominated_by_class(push, window_masses)


def boundary_map_fit(pants_list, R: float) -> float:
    """Fitted constant for the cuff map from the pants measure to the
    curve measure on an enumerated pants collection: the worst per-curve
    cuff multiplicity times e^{-R}/R."""
    counts: dict[str, int] = {}
    for p in pants_list:
        for k in p.cuff_keys:
            counts[k] = counts.get(k, 0) + 1
    worst = max(counts.values(), default=0)
    return worst * math.exp(-float(R)) / float(R)


def proj_concentration(group, a: float, budget: int = 6_000_000):
    """Largest unit-window mass of the basepoint projection of sigma_a
    onto the marked circles, per class; returns (max window mass, the
    class it occurs on)."""
    from . import words as W
    from .group import ClosedGeodesic

    mu = sigma_a_measure(group, a, budget)
    atoms: dict[str, list[tuple[float, float]]] = {}
    for w, m in mu.items():
        try:
            key, conj = W.class_key_with_conjugator(w)
        except Exception:
            continue
        if not key:
            continue
        el = group.matrix_of(w)
        try:
            ax = el.axis()
        except ValueError:
            continue
        geod = ClosedGeodesic(group, key)
        foot = ax.point(ax.param_of_foot(group.base))
        t = geod.axis.param_of_foot(
            group.matrix_of(conj).inv().apply(foot)) % geod.length
        atoms.setdefault(key, []).append((t, float(m)))
    best = (0.0, "")
    for key, pts in atoms.items():
        circ = ClosedGeodesic(group, key).length
        for t0, _ in pts:
            window = sum(m for t, m in pts if (t - t0) % circ <= 1.0)
            if window > best[0]:
                best = (window, key)
    return best


def verify_standard_maps(group, R: float, a_values=(4.0, 5.0),
                         pants_list=(), budget: int = 6_000_000) -> dict:
    """Fitted domination constants for the standard maps at desk scale."""
    report = {}
    fits = []
    for a in a_values:
        fits.append(product_map_fit(group, a, a, budget))
    report["product_map"] = dict(zip(a_values, fits))
    if pants_list:
        report["boundary_map"] = boundary_map_fit(pants_list, R)
    return report
