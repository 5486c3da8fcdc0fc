"""Pipeline driver.

Commands: enumerate, pipeline, verify, model-surface, report.
Exit codes: 0 success, 2 usage, 3 resource, 4 scale failure,
5 invariant violation.  All outputs are deterministic and every file
starts with a format header; configuration comes from a flat key=value
file overridden by command-line flags, and is echoed into every output
header for provenance.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_SCALE = 4
EXIT_INVARIANT = 5


@dataclass
class RunConfig:
    R: float = 8.0
    eps: float = 1.0
    M: float = 600.0
    L: float = 1.9
    cache_dir: str = "cache"
    output_dir: str = "out"
    verification: str = "abelian"   # abelian | full
    matching: str = "bottleneck"    # bottleneck | sum
    workers: int = 1
    seed_limit: int = 2
    fiber_cap: int = 240
    budget: int = 14_000_000
    denominator_cap: int = 10**6

    def validate(self):
        if not (0 < self.eps <= 1):
            raise ValueError("eps must lie in (0, 1]")
        if self.R < 4:
            raise ValueError("R must be at least 4")
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if self.verification not in ("abelian", "full"):
            raise ValueError("verification must be abelian or full")
        if self.matching not in ("bottleneck", "sum"):
            raise ValueError("matching must be bottleneck or sum")

    def header_lines(self) -> list[str]:
        return [f"config.{f.name}={getattr(self, f.name)}" for f in fields(self)]


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path:
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            k, v = line.split("=", 1)
            _apply(cfg, k.strip(), v.strip())
    for k, v in overrides.items():
        if v is not None:
            _apply(cfg, k, v)
    cfg.validate()
    return cfg


def _apply(cfg: RunConfig, key: str, value):
    names = {f.name: f for f in fields(RunConfig)}
    if key not in names:
        raise ValueError(f"unknown config key {key!r}")
    typ = names[key].type
    cur = getattr(cfg, key)
    if isinstance(cur, float):
        value = float(value)
    elif isinstance(cur, int):
        value = int(value)
    setattr(cfg, key, value)


def _write(path: Path, name: str, lines: list[str], cfg: RunConfig):
    path.parent.mkdir(parents=True, exist_ok=True)
    body = [f"format={name}/1"] + cfg.header_lines() + lines
    path.write_text("\n".join(body) + "\n")


def _histogram_svg(path: Path, positions: list[float], circumference: float,
                   title: str, bins: int = 36):
    counts = [0] * bins
    for p in positions:
        counts[min(int(p / circumference * bins), bins - 1)] += 1
    peak = max(counts) or 1
    w, h, pad = 420, 160, 24
    bw = (w - 2 * pad) / bins
    bars = []
    for i, c in enumerate(counts):
        bh = (h - 2 * pad) * c / peak
        bars.append(
            f'<rect x="{pad + i * bw:.1f}" y="{h - pad - bh:.1f}" '
            f'width="{bw * 0.9:.1f}" height="{bh:.1f}" fill="#444"/>')
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">'
        f'<text x="{pad}" y="{pad - 8}" font-size="11">{title}</text>'
        + "".join(bars) + "</svg>"
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg)


def cmd_enumerate(cfg: RunConfig) -> int:
    from .cache import CacheDir
    from .group import ResourceBudgetError, standard_group

    g = standard_group().attach_cache(CacheDir(cfg.cache_dir))
    try:
        ball = g.enumerate_ball(min(2 * cfg.R - 4, 12.0), budget=cfg.budget)
        from .assembly import PantsUniverse, UniverseConfig

        uni = PantsUniverse(g, UniverseConfig(
            eps=cfg.eps, R=cfg.R, seed_limit=cfg.seed_limit,
            fiber_cap=cfg.fiber_cap, budget=cfg.budget)).build()
    except ResourceBudgetError as e:
        print(f"resource error in enumeration: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    lines = [f"ball_size={len(ball)}",
             f"pants_universe={len(uni.pants)}",
             f"seeds={','.join(uni.seed_keys)}"]
    for key, np, nm in uni.trim_report:
        lines.append(f"fiber.{key}={np}+{nm}")
    rows = sorted(p.record() for p in uni.pants.values())
    out = Path(cfg.output_dir)
    _write(out / "enumeration-summary.txt", "enumeration-summary", lines, cfg)
    _write(out / "pants.txt", "pants", rows, cfg)
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig) -> int:
    from .assembly import (PantsUniverse, UniverseConfig, assemble, balance,
                           feet_report, hall_match, integerize)
    from .cache import CacheDir
    from .group import ResourceBudgetError, standard_group
    from .measures import dhat

    out = Path(cfg.output_dir)
    g = standard_group().attach_cache(CacheDir(cfg.cache_dir))
    try:
        uni = PantsUniverse(g, UniverseConfig(
            eps=cfg.eps, R=cfg.R, seed_limit=cfg.seed_limit,
            fiber_cap=cfg.fiber_cap, budget=cfg.budget)).build()
        mu0 = uni.seed_measure()
        rep = balance(g, mu0, cfg.eps, cfg.R, cfg.M, budget=cfg.budget)
    except ResourceBudgetError as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    if rep.residual_imbalance or not rep.positive:
        print(f"scale failure: residual imbalance on "
              f"{len(rep.residual_imbalance)} classes, positive={rep.positive}",
              file=sys.stderr)
        _write(out / "balance-residue.txt", "balance-residue",
               [f"{k} {c}" for k, c in rep.residual_imbalance]
               + rep.notes, cfg)
        return EXIT_SCALE
    try:
        instances, scale = integerize(rep.mu, cfg.denominator_cap)
    except ValueError as e:
        print(f"integerization failed: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    counts: dict[str, int] = {}
    for inst in instances:
        counts[inst.cuff_key] = counts.get(inst.cuff_key, 0) + 1
    from . import words

    for key, n in sorted(counts.items()):
        rk = words.class_key(words.inv_word(key))
        if counts.get(rk, 0) != n:
            print(f"invariant violation: instance imbalance on {key}: "
                  f"{n} vs {counts.get(rk, 0)}", file=sys.stderr)
            return EXIT_INVARIANT
    try:
        gluings, mixed = hall_match(g, instances, uni.geodesics)
        cover = assemble(instances, gluings)
    except ValueError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    if cover.euler != -len(cover.instances):
        print("invariant violation: Euler characteristic mismatch",
              file=sys.stderr)
        return EXIT_INVARIANT
    bad_hl = [r for r in cover.curve_rows
              if abs(r[1] - cfg.R) > cfg.eps + 1e-9]
    if bad_hl:
        print(f"invariant violation: {len(bad_hl)} cuffs outside the "
              f"half-length band", file=sys.stderr)
        return EXIT_INVARIANT
    max_dev = cover.max_twist_deviation()
    n_viol = 0
    for _, hl, s in cover.curve_rows:
        d = abs(s - 1.0) % hl
        if min(d, hl - d) > cfg.eps / cfg.R:
            n_viol += 1
    lines = [
        f"instances={len(cover.instances)}",
        f"euler={cover.euler}",
        f"components={cover.components}",
        f"genus={','.join(map(str, cover.genus_list))}",
        f"gluings={len(cover.gluings)}",
        f"integer_scale={scale}",
        f"mixed_side_pairs={mixed}",
        f"max_twist_deviation={max_dev:.9f}",
        f"twist_bound_eps_over_R={cfg.eps / cfg.R:.9f}",
        f"twist_bound_violations={n_viol}",
        f"mu1_terms={len(rep.mu1)}",
        f"mu2_terms={len(rep.mu2)}",
    ] + [f"note={n}" for n in rep.notes]
    inst_rows = [f"{k} {c}" for k, c in cover.instances]
    glue_rows = [
        f"{g_.a.pants_key}:{g_.a.copy}:{g_.a.slot} "
        f"{g_.b.pants_key}:{g_.b.copy}:{g_.b.slot} {g_.twist:.9f}"
        for g_ in cover.gluings
    ]
    curve_rows = [f"{k},{hl:.9f},{s:.9f}" for k, hl, s in cover.curve_rows]
    _write(out / "cover.txt", "cover",
           lines + ["[instances]"] + inst_rows + ["[gluings]"] + glue_rows, cfg)
    _write(out / "curves.csv", "curves-csv",
           ["cuff,halflength,twist"] + curve_rows, cfg)
    records = rep.records
    feet_rows = []
    for key in sorted(records):
        rec = records[key]
        for side, m in (("+", rec.plus), ("-", rec.minus)):
            for pos, mass in m.atoms:
                feet_rows.append(f"{key},{side},{pos:.9f},"
                                 f"{mass.numerator},{mass.denominator}")
    _write(out / "feet.csv", "feet-csv",
           ["cuff,side,position,mass_num,mass_den"] + feet_rows, cfg)
    for key in uni.seed_keys:
        rec = records.get(key)
        if rec:
            _histogram_svg(out / f"feet-{key[:12]}.svg",
                           [p for p, _ in rec.plus.atoms],
                           rec.plus.circumference, f"feet {key}")
    report_rows = [f"{k},{side},{tot:.6f},{d:.6f}"
                   for k, side, tot, d in feet_report(
                       {k: records[k] for k in uni.seed_keys if k in records})]
    _write(out / "min-delta.csv", "min-delta-csv",
           ["cuff,side,mass,min_delta"] + report_rows, cfg)
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_model_surface(cfg: RunConfig) -> int:
    from .assembly import model_surface

    cover = model_surface(cfg.R)
    lines = [
        f"instances={len(cover.instances)}",
        f"euler={cover.euler}",
        f"genus={','.join(map(str, cover.genus_list))}",
        f"twists={' '.join(f'{g.twist:.9f}' for g in cover.gluings)}",
    ]
    _write(Path(cfg.output_dir) / "model-surface.txt", "model-surface",
           lines, cfg)
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    suites = ("inefficiency", "measures", "homology", "semirandom", "all")
    if suite not in suites:
        print(f"unknown suite {suite!r}; choose from {suites}", file=sys.stderr)
        return EXIT_USAGE
    import subprocess

    mapping = {
        "inefficiency": ["tests/test_inefficiency.py", "tests/test_plane.py"],
        "measures": ["tests/test_measures.py"],
        "homology": ["tests/test_homology.py"],
        "semirandom": ["tests/test_semirandom.py"],
        "all": ["tests"],
    }
    root = Path(__file__).resolve().parents[2]
    targets = [str(root / t) for t in mapping[suite]]
    missing = [t for t in targets if not Path(t).exists()]
    if missing:
        print(f"test files not found: {missing}", file=sys.stderr)
        return EXIT_USAGE
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", *targets])
    return EXIT_OK if proc.returncode == 0 else EXIT_INVARIANT


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="goodpants",
        description="good-pants enumeration, correction and cover assembly "
                    "on the octagon surface")
    parser.add_argument("--config", help="flat key=value configuration file")
    for f in fields(RunConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name)
    sub = parser.add_subparsers(dest="command")
    for name in ("enumerate", "pipeline", "model-surface", "report"):
        sub.add_parser(name)
    pv = sub.add_parser("verify")
    pv.add_argument("suite", nargs="?", default="all")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    try:
        cfg = load_config(args.config, overrides)
    except (ValueError, OSError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "enumerate":
        return cmd_enumerate(cfg)
    if args.command == "pipeline":
        return cmd_pipeline(cfg)
    if args.command == "model-surface":
        return cmd_model_surface(cfg)
    if args.command == "report":
        return cmd_enumerate(cfg)
    if args.command == "verify":
        return cmd_verify(cfg, args.suite)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
