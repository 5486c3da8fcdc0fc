"""Cover assembly: seed measure, corrections, integerization, Hall
pairing with twists near +1, and the reduced coordinate report.

The pants universe is reversal-closed by construction, which makes the
per-curve integer balance (equal numbers of marked instances on the two
orientations of every cuff class) exact; that is the hard invariant the
pairing needs.  The signed side imbalance of the feet measure is
computed exactly as well; when it is nonzero the correction stages run
and their residue is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from . import words
from .formal import FormalSum, average
from .group import ClosedGeodesic, ResourceBudgetError, SurfaceGroup
from .measures import CircleMeasure, FeetRecord, dhat, imbalance_sum, min_delta
from .pants import Pants, enumerate_pants


@dataclass
class UniverseConfig:
    eps: float = 1.0
    R: float = 8.0
    seed_limit: int = 2          # unoriented seed classes
    fiber_cap: int = 400         # marked pants kept per seed fiber
    fiber_band: float = 1.0      # half-length window eps/M for fiber cuffs
    budget: int = 14_000_000
    side_trim: bool = True


class PantsUniverse:
    """Reversal-closed collection of good pants over seed cuff classes."""

    def __init__(self, group: SurfaceGroup, config: UniverseConfig):
        self.group = group
        self.config = config
        self.pants: dict[str, Pants] = {}
        self.geodesics: dict[str, ClosedGeodesic] = {}
        self.seed_keys: list[str] = []
        self.trim_report: list[tuple[str, int, int]] = []

    def build(self) -> "PantsUniverse":
        cfg = self.config
        g = self.group
        lo, hi = 2 * (cfg.R - cfg.eps / 2), 2 * (cfg.R + cfg.eps / 2)
        seeds = []
        for cand in g.find_band_classes(lo, hi, max_letters=6, limit=24):
            k = cand.key
            rk = words.class_key(words.inv_word(cand.word))
            if k in (s.key for s in seeds) or rk in (s.key for s in seeds):
                continue
            seeds.append(cand)
            if len(seeds) >= cfg.seed_limit:
                break
        if not seeds:
            raise ResourceBudgetError("universe seeds", 0, 0)
        for geod in seeds:
            self._add_fiber(geod)
        return self

    def _add_fiber(self, geod: ClosedGeodesic):
        cfg = self.config
        m = cfg.eps / cfg.fiber_band
        fiber = enumerate_pants(geod, cfg.eps, cfg.R, m, budget=cfg.budget)
        plus, minus = [], []
        self.skipped = getattr(self, "skipped", 0)
        for p in fiber:
            try:
                side = p.foot(geod.key).side
                p.reversed().feet
            except Exception:
                # marginal configurations whose seam feet are not stably
                # computable are left out of the universe
                self.skipped += 1
                continue
            (plus if side == 1 else minus).append(p)
        if cfg.side_trim:
            n = min(len(plus), len(minus), cfg.fiber_cap // 2)
            self.trim_report.append((geod.key, len(plus), len(minus)))
            plus = sorted(plus, key=lambda p: p.key)[:n]
            minus = sorted(minus, key=lambda p: p.key)[:n]
        kept = plus + minus
        self.seed_keys.append(geod.key)
        self.geodesics[geod.key] = geod
        for p in kept:
            self.pants.setdefault(p.key, p)
            rp = p.reversed()
            self.pants.setdefault(rp.key, rp)

    def seed_measure(self) -> FormalSum:
        """Uniform unit weight on every enumerated pants."""
        if not self.pants:
            raise ValueError("empty pants universe")
        return FormalSum((p, Fraction(1)) for p in self.pants.values())


def q_m_correct(group: SurfaceGroup, imbalance: FormalSum, eps: float,
                R: float, M: float, budget: int = 14_000_000,
                geodesics: dict | None = None) -> FormalSum:
    """Positive pants sum moving the signed side imbalance toward zero.

    For a class with surplus on one side, the average of the fiber pants
    lying on the deficient side (and the mirrored average on the reversed
    class) is added with the surplus weight; cuffs of the added pants lie
    within eps/M of R.  Empty fibers raise a resource-scale error."""
    out = FormalSum()
    geodesics = geodesics if geodesics is not None else {}
    for key, coeff in imbalance:
        geod = geodesics.get(key) or ClosedGeodesic(group, key)
        fiber = enumerate_pants(geod, eps, R, M, budget=budget)
        need_side = -1 if coeff > 0 else 1
        pool = [p for p in fiber if p.foot(geod.key).side == need_side]
        if not pool:
            raise ResourceBudgetError(
                f"correction fiber for {key} (side {need_side}, M={M})",
                0, budget)
        avg = average(sorted(pool, key=lambda p: p.key)) * abs(coeff)
        mirror = average([p.reversed() for p in sorted(pool, key=lambda p: p.key)]) * abs(coeff)
        out = out + avg + mirror
    return out


@dataclass
class BalanceReport:
    mu: FormalSum
    mu1: FormalSum
    mu2: FormalSum
    records: dict[str, FeetRecord]
    initial_imbalance: FormalSum
    residual_imbalance: FormalSum
    positive: bool
    h_residue: FormalSum = field(default_factory=FormalSum)
    notes: list[str] = field(default_factory=list)


def balance(group: SurfaceGroup, mu0: FormalSum, eps: float, R: float,
            M: float = 600.0, ctx=None, budget: int = 14_000_000) -> BalanceReport:
    """mu = mu0 + mu1 + mu2 with the signed side imbalance corrected.

    mu1 is the fiber-average correction; mu2 applies the basis correction
    to what remains.  At desk scale a stage that cannot construct reports
    its residue instead of fabricating pants."""
    geods: dict[str, ClosedGeodesic] = {}
    rec0 = dhat(mu0, geods)
    imb0 = imbalance_sum(rec0)
    mu1 = FormalSum()
    mu2 = FormalSum()
    notes = []
    h_residue = FormalSum()
    if imb0:
        try:
            mu1 = q_m_correct(group, imb0, eps, R, M, budget=budget,
                              geodesics=geods)
        except ResourceBudgetError as e:
            notes.append(f"first correction infeasible: {e}")
    mu = mu0 + mu1
    rec1 = dhat(mu, geods)
    imb1 = imbalance_sum(rec1)
    if imb1 and ctx is not None:
        from .homology import ScaleError, phi

        built = FormalSum()
        for key, coeff in imb1:
            try:
                geod = geods.get(key) or ClosedGeodesic(group, key)
                res = phi(ctx, geod, construct=True)
                if res.witness.constructed():
                    built = built + res.witness.pants_sum * (-coeff)
                else:
                    h_residue = h_residue + FormalSum.single(key, coeff)
                    notes.append(
                        f"basis correction for {key} degraded: "
                        f"{res.witness.failures[0][1]}")
            except ScaleError as e:
                h_residue = h_residue + FormalSum.single(key, coeff)
                notes.append(f"basis correction for {key} failed: {e.reason}")
        mu2 = built
        mu = mu + mu2
    elif imb1:
        h_residue = imb1
    final_rec = dhat(mu, geods)
    final_imb = imbalance_sum(final_rec)
    return BalanceReport(
        mu=mu, mu1=mu1, mu2=mu2, records=final_rec,
        initial_imbalance=imb0, residual_imbalance=final_imb,
        positive=mu.is_positive(), h_residue=h_residue, notes=notes)


# -- integerization and instances ------------------------------------------------


@dataclass(frozen=True)
class MarkedInstance:
    pants_key: str
    copy: int
    slot: int          # cuff index 0..2
    cuff_key: str
    side: int
    position: float
    hl: float

    @property
    def instance_id(self) -> tuple[str, int]:
        return (self.pants_key, self.copy)


def integerize(mu: FormalSum, denominator_cap: int = 10**6):
    """Scale a positive rational pants sum to integer weights by the
    least common denominator; returns (instances, scale)."""
    if not mu.is_positive():
        raise ValueError("integerize needs a positive measure")
    lcm = 1
    for _, c in mu:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        if lcm > denominator_cap:
            raise ValueError(f"denominator blow-up beyond {denominator_cap}")
    instances = []
    for p, c in mu:
        mult = int(c * lcm)
        feet = p.feet
        for copy in range(mult):
            for slot in range(3):
                f = feet[slot]
                instances.append(MarkedInstance(
                    pants_key=p.key, copy=copy, slot=slot,
                    cuff_key=p.cuff_keys[slot], side=f.side,
                    position=f.position, hl=f.hl))
    return instances, lcm


# -- circular bottleneck matching -------------------------------------------------


def circular_bottleneck_offset(a: list[float], b: list[float], hl: float,
                               target: float = 1.0):
    """Pair sorted circular positions a[i] <-> b[pi(i)] minimizing the
    maximum circular distance of (b - a) from the target twist; the
    optimum over order-preserving pairings is attained at a cyclic
    shift.  Returns (pairing, max_deviation)."""
    n = len(a)
    if n != len(b):
        raise ValueError("fibers of unequal size cannot be paired")
    if n == 0:
        return [], 0.0
    ia = sorted(range(n), key=lambda i: a[i])
    ib = sorted(range(n), key=lambda i: b[i])
    best = None
    for k in range(n):
        worst = 0.0
        for t in range(n):
            s = (b[ib[(t + k) % n]] - a[ia[t]]) % hl
            dev = _circ_dist(s, target, hl)
            worst = max(worst, dev)
        if best is None or worst < best[0]:
            best = (worst, k)
    worst, k = best
    pairing = [(ia[t], ib[(t + k) % n]) for t in range(n)]
    return pairing, worst


def brute_force_bottleneck(a: list[float], b: list[float], hl: float,
                           target: float = 1.0) -> float:
    """Exact bottleneck over all pairings; for oracle use on small fibers."""
    n = len(a)
    best = math.inf
    for perm in permutations(range(n)):
        worst = max(_circ_dist((b[perm[i]] - a[i]) % hl, target, hl)
                    for i in range(n))
        best = min(best, worst)
    return best


def _circ_dist(x: float, y: float, c: float) -> float:
    d = abs(x - y) % c
    return min(d, c - d)


# -- gluing and cover --------------------------------------------------------------


@dataclass
class Gluing:
    a: MarkedInstance
    b: MarkedInstance
    twist: float


@dataclass
class CoverDescription:
    instances: list[tuple[str, int]]
    gluings: list[Gluing]
    components: int
    genus_list: list[int]
    curve_rows: list[tuple[str, float, float]]  # cuff key, hl, twist

    @property
    def euler(self) -> int:
        return -len(self.instances)

    def max_twist_deviation(self) -> float:
        return max((abs(g.twist - 1.0) for g in self.gluings), default=0.0)


def hall_match(group: SurfaceGroup, instances: list[MarkedInstance],
               geodesics: dict[str, ClosedGeodesic] | None = None):
    """Perfect pairing of marked instances across the two orientations of
    every cuff class, twists driven to +1 by circular bottleneck matching.

    Instances on each oriented class pair with instances on the reversed
    class; matching side types are preferred and mixing is reported."""
    geodesics = geodesics if geodesics is not None else {}
    pools: dict[str, list[MarkedInstance]] = {}
    for inst in instances:
        pools.setdefault(inst.cuff_key, []).append(inst)
    gluings: list[Gluing] = []
    mixed = 0
    seen = set()
    for key in sorted(pools):
        if key in seen:
            continue
        geod = geodesics.get(key)
        if geod is None:
            geod = geodesics.setdefault(key, ClosedGeodesic(group, key))
        rkey = words.class_key(words.inv_word(key))
        seen.add(key)
        seen.add(rkey)
        mine = pools[key]
        if rkey == key:
            gluings.extend(_self_reverse_pairing(geod, mine))
            continue
        theirs = pools.get(rkey, [])
        if len(mine) != len(theirs):
            raise ValueError(
                f"instance imbalance on {key}: {len(mine)} vs {len(theirs)}")
        offset = geod.reverse_offset % geod.hl
        for side in (1, -1):
            ms = [i for i in mine if i.side == side]
            ts = [i for i in theirs if i.side == side]
            n = min(len(ms), len(ts))
            mixed += len(ms) - n + len(ts) - n
            gluings.extend(_pair_sets(ms[:n], ts[:n], geod, offset))
            mine = [i for i in mine if i not in ms[:n]]
            theirs = [i for i in theirs if i not in ts[:n]]
        gluings.extend(_pair_sets(mine, theirs, geod, offset))
    return gluings, mixed


def _pair_sets(ms, ts, geod, offset):
    if not ms:
        return []
    a = [i.position for i in ms]
    b = [(offset - i.position) % geod.hl for i in ts]
    pairing, _ = circular_bottleneck_offset(a, b, geod.hl)
    out = []
    for i, j in pairing:
        s = (b[j] - a[i]) % geod.hl
        out.append(Gluing(ms[i], ts[j], s))
    return out


def _self_reverse_pairing(geod, pool):
    if len(pool) % 2:
        raise ValueError(f"odd self-reversed fiber on {geod.key}")
    pool = sorted(pool, key=lambda i: (i.position, i.pants_key, i.copy, i.slot))
    n = len(pool) // 2
    offset = geod.reverse_offset % geod.hl
    out = []
    for t in range(n):
        a, b = pool[t], pool[t + n]
        s = ((offset - b.position) % geod.hl - a.position) % geod.hl
        out.append(Gluing(a, b, s))
    return out


def assemble(instances: list[MarkedInstance], gluings: list[Gluing]) -> CoverDescription:
    """Close up the paired pants into a surface and verify it."""
    ids = sorted({i.instance_id for i in instances})
    slot_used: dict[tuple, int] = {}
    for g in gluings:
        for side_inst in (g.a, g.b):
            slot = (side_inst.instance_id, side_inst.slot)
            slot_used[slot] = slot_used.get(slot, 0) + 1
    expected = {(i, s) for i in ids for s in range(3)}
    if set(slot_used) != expected or any(v != 1 for v in slot_used.values()):
        dangling = sorted(expected - set(slot_used))[:4]
        raise ValueError(f"gluing graph is not 1-regular on cuff slots "
                         f"(e.g. {dangling})")
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gluings:
        ra, rb = find(g.a.instance_id), find(g.b.instance_id)
        if ra != rb:
            parent[ra] = rb
    comps: dict = {}
    for i in ids:
        comps.setdefault(find(i), []).append(i)
    genus_list = []
    for members in comps.values():
        chi = -len(members)
        genus_list.append(1 - chi // 2 if chi % 2 == 0 else -1)
    curve_rows = [(g.a.cuff_key, g.a.hl, g.twist) for g in gluings]
    curve_rows.sort()
    return CoverDescription(
        instances=ids, gluings=gluings, components=len(comps),
        genus_list=sorted(genus_list), curve_rows=curve_rows)


def model_surface(R: float) -> CoverDescription:
    """The genus-2 reference surface: two pants with all half-lengths R
    glued along matching cuffs with every twist exactly +1."""
    if R <= 1:
        raise ValueError("R must exceed 1")
    insts = []
    for copy, key in enumerate(("model+", "model-")):
        for slot in range(3):
            insts.append(MarkedInstance(
                pants_key=key, copy=0, slot=slot, cuff_key=f"cuff{slot}",
                side=1 if copy == 0 else -1, position=0.0, hl=float(R)))
    gluings = [Gluing(insts[s], insts[3 + s], 1.0) for s in range(3)]
    return assemble(insts, gluings)


def feet_report(records: dict[str, FeetRecord], resolution: float = 1e-3):
    """Per-class equidistribution report: side masses and the minimal
    grid delta to the mass-matched uniform measure."""
    rows = []
    for key in sorted(records):
        rec = records[key]
        for name, m in (("+", rec.plus), ("-", rec.minus)):
            tot = m.total()
            if not tot:
                continue
            lam = CircleMeasure.lebesgue(
                m.circumference,
                Fraction(tot if isinstance(tot, Fraction) else Fraction(float(tot)))
                / Fraction(float(m.circumference)))
            d = min_delta(m, lam, resolution)
            rows.append((key, name, float(tot), d))
    return rows
