"""Finitely supported formal sums with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Generic, Hashable, Iterable, Iterator, Mapping, TypeVar

K = TypeVar("K", bound=Hashable)


class FormalSum(Generic[K]):
    """Immutable-by-convention map from canonical keys to nonzero Fractions."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[K, Fraction] | Iterable[tuple[K, Fraction]] = ()):
        d: dict[K, Fraction] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for k, v in items:
            v = Fraction(v)
            if v:
                d[k] = d.get(k, Fraction(0)) + v
                if not d[k]:
                    del d[k]
        self.coeffs = d

    @staticmethod
    def single(key: K, coeff=1) -> "FormalSum[K]":
        return FormalSum([(key, Fraction(coeff))])

    @staticmethod
    def zero() -> "FormalSum[K]":
        return FormalSum()

    def __getitem__(self, key: K) -> Fraction:
        return self.coeffs.get(key, Fraction(0))

    def __iter__(self) -> Iterator[tuple[K, Fraction]]:
        return iter(sorted(self.coeffs.items(), key=lambda kv: repr(kv[0])))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "FormalSum[K]") -> "FormalSum[K]":
        d = dict(self.coeffs)
        for k, v in other.coeffs.items():
            nv = d.get(k, Fraction(0)) + v
            if nv:
                d[k] = nv
            else:
                d.pop(k, None)
        return _wrap(d)

    def __sub__(self, other: "FormalSum[K]") -> "FormalSum[K]":
        return self + (-other)

    def __neg__(self) -> "FormalSum[K]":
        return _wrap({k: -v for k, v in self.coeffs.items()})

    def __mul__(self, scalar) -> "FormalSum[K]":
        s = Fraction(scalar)
        if not s:
            return FormalSum()
        return _wrap({k: v * s for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalSum) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def total(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def abs_total(self) -> Fraction:
        return sum((abs(v) for v in self.coeffs.values()), Fraction(0))

    def support(self) -> list[K]:
        return sorted(self.coeffs, key=repr)

    def map_keys(self, f) -> "FormalSum":
        out: dict = {}
        for k, v in self.coeffs.items():
            k2 = f(k)
            nv = out.get(k2, Fraction(0)) + v
            if nv:
                out[k2] = nv
            else:
                out.pop(k2, None)
        return _wrap(out)

    def bind(self, f: "callable") -> "FormalSum":
        """Linear extension: sum of coeff * f(key), f returning FormalSums."""
        out: FormalSum = FormalSum()
        for k, v in sorted(self.coeffs.items(), key=lambda kv: repr(kv[0])):
            out = out + f(k) * v
        return out

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.coeffs.values())

    def min_coeff(self) -> Fraction:
        return min(self.coeffs.values(), default=Fraction(0))

    def __repr__(self):
        parts = [f"{v}*{k}" for k, v in list(self)[:6]]
        more = "" if len(self) <= 6 else f" ... ({len(self)} terms)"
        return "FormalSum(" + " + ".join(parts) + more + ")"


def _wrap(d: dict) -> FormalSum:
    s = FormalSum()
    s.coeffs = d
    return s


def average(keys: Iterable) -> FormalSum:
    """Uniform average of a finite collection, as an exact formal sum."""
    keys = list(keys)
    if not keys:
        raise ValueError("average of empty collection")
    w = Fraction(1, len(keys))
    return FormalSum((k, w) for k in keys)
