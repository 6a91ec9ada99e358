"""Command-line front end.

Subcommands: ``tables``, ``analyze``, ``counterexample``, ``plot`` and
``validate``. Options may also come from a JSON config file (``--config``);
explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import GeometryError, load_domain
from .harmonic import MeasureEstimate, WosConfig
from .hardy import (TAGS, CounterexampleConfig, EstimateError, bergman_membership,
                    hardy_number_estimate, verify_counterexample)
from .hyperbolic import MetricBracket
from .modulus import build_canonical_tables, load_tables, save_tables
from .profile import (LevelSetProfile, ProfileConfig, ProfileRow, load_profile_rows, profile,
                      save_profile, validate_profile)

EXIT_MEMBER, EXIT_NONMEMBER, EXIT_UNDECIDED = 0, 1, 2
EXIT_BAD_SPEC = 64
EXIT_FAILURE = 3

DEFAULTS = dict(p=1.0, alpha=-1.0, r0=2.0, q=10 ** 0.25, nr=16, samples=100_000, seed=0,
                grid_h=1 / 256, out=".", c=2.0, levels=3, eps1=1e-2, eps2=1e-3)


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: str | None
    profile: str | None
    p: float
    alpha: float
    r0: float
    q: float
    nr: int
    samples: int
    seed: int
    grid_h: float
    out: Path
    c: float
    levels: int
    eps1: float
    eps2: float

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError("--r0 must be positive")
        if not self.q > 1:
            raise ValueError("--q must exceed 1")
        if self.nr < 2:
            raise ValueError("--nr must be at least 2")
        if self.samples < 2:
            raise ValueError("--samples must be at least 2")
        if not 0 < self.grid_h < 1:
            raise ValueError("--grid-h must lie in (0, 1)")
        if not self.c > 0:
            raise ValueError("--c must be positive")
        if self.levels < 1:
            raise ValueError("--levels must be at least 1")

    @property
    def wos(self) -> WosConfig:
        return WosConfig(n_samples=self.samples, rng_seed=self.seed)

    def profile_config(self) -> ProfileConfig:
        return ProfileConfig(r0=self.r0, q=self.q, n_radii=self.nr, wos=self.wos,
                             eps_pair=(self.eps1, self.eps2))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values")
    common.add_argument("--spec", help="domain spec JSON")
    common.add_argument("--profile", help="profile CSV (plot, validate)")
    common.add_argument("--p", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--r0", type=float)
    common.add_argument("--q", type=float)
    common.add_argument("--nr", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--grid-h", dest="grid_h", type=float)
    common.add_argument("--out", help="output directory")
    common.add_argument("--c", type=float, help="comb level growth exponent")
    common.add_argument("--levels", type=int, help="comb levels")
    common.add_argument("--eps1", type=float)
    common.add_argument("--eps2", type=float)
    ap = argparse.ArgumentParser(prog="hardy-extremal", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("tables", parents=[common], help="build single-arc distance tables")
    sub.add_parser("analyze", parents=[common], help="profile a domain and decide membership")
    sub.add_parser("counterexample", parents=[common], help="run the comb counter-example")
    sub.add_parser("plot", parents=[common], help="SVG of a saved profile")
    sub.add_parser("validate", parents=[common], help="check profile invariants")
    return ap


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        try:
            merged.update({k.replace("-", "_"): v for k, v in
                           json.loads(Path(args.config).read_text()).items()})
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file: {exc}")
    for k, v in vars(args).items():
        if v is not None and k != "config":
            merged[k] = v
    try:
        return RunConfig(command=args.command, spec=merged.get("spec"),
                         profile=merged.get("profile"), p=float(merged["p"]),
                         alpha=float(merged["alpha"]), r0=float(merged["r0"]),
                         q=float(merged["q"]), nr=int(merged["nr"]),
                         samples=int(merged["samples"]), seed=int(merged["seed"]),
                         grid_h=float(merged["grid_h"]), out=Path(merged["out"]),
                         c=float(merged["c"]), levels=int(merged["levels"]),
                         eps1=float(merged["eps1"]), eps2=float(merged["eps2"]))
    except ValueError as exc:
        parser.error(str(exc))


# ----------------------------------------------------------------------------
# commands


def _tables_path(cfg: RunConfig) -> Path:
    return cfg.out / "tables.csv"


def _tables(cfg: RunConfig, quiet: bool = False):
    path = _tables_path(cfg)
    if path.exists():
        try:
            t = load_tables(path)
            if math.isclose(t.grid_h, cfg.grid_h) and t.eps_pair == (cfg.eps1, cfg.eps2):
                if not quiet:
                    print(f"tables up to date: {path}")
                return t
        except (ValueError, OSError):
            pass  # corrupted or stale cache: rebuild
    t = build_canonical_tables(grid_h=cfg.grid_h, eps_pair=(cfg.eps1, cfg.eps2))
    cfg.out.mkdir(parents=True, exist_ok=True)
    digest = save_tables(t, path, seed=cfg.seed)
    bad = t.sandwich_violations()
    if not quiet:
        print(f"wrote {path} ({len(t.theta)} rows, checksum {digest[:12]})")
        if bad:
            print(f"warning: sandwich bounds fail at nodes {bad}")
    return t


def cmd_tables(cfg: RunConfig) -> int:
    _tables(cfg)
    return 0


def _load_spec(cfg: RunConfig):
    if not cfg.spec:
        raise GeometryError("--spec is required")
    return load_domain(cfg.spec)


def cmd_analyze(cfg: RunConfig) -> int:
    D = _load_spec(cfg)
    tables = _tables(cfg, quiet=True)
    prof = profile(D, cfg.profile_config(), tables=tables)
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_profile(prof, cfg.out / "profile.csv", seed=cfg.seed)
    lines = [f"# seed={cfg.seed} spec={cfg.spec}", f"domain: {D.kind}"]
    estimates = {}
    for tag in TAGS:
        try:
            estimates[tag] = hardy_number_estimate(prof, tag)
        except EstimateError as exc:
            lines.append(f"{tag}: {exc}")
    if "omega_star" not in estimates:
        print("\n".join(lines), file=sys.stderr)
        return EXIT_FAILURE
    for tag, h in estimates.items():
        extra = f" interval=[{h.interval[0]:.4g}, {h.interval[1]:.4g}]" if h.interval else ""
        lines.append(f"h_est[{tag}] = {h.h_est:.4g} +/- {h.half_width:.2g}{extra}")
    dec = bergman_membership(estimates["omega_star"], cfg.p, cfg.alpha)
    lines.append(f"p={cfg.p:g} alpha={cfg.alpha:g} ratio={dec.ratio:.4g} "
                 f"margin={dec.margin:.3g} -> {dec.verdict}")
    viol = validate_profile(prof)
    lines.append(f"invariant violations: {len(viol)}")
    lines += [f"  {v}" for v in viol]
    with open(cfg.out / "decisions.csv", "w", newline="") as fh:
        fh.write(f"# schema=1 seed={cfg.seed}\n")
        w = csv.writer(fh)
        w.writerow(["p", "alpha", "ratio", "h_est", "margin", "verdict"])
        w.writerow([repr(dec.p), repr(dec.alpha), repr(dec.ratio), repr(dec.h_est),
                    repr(dec.margin), dec.verdict])
    text = "\n".join(lines)
    (cfg.out / "summary.txt").write_text(text + "\n")
    print(text)
    return {"member": EXIT_MEMBER, "non-member": EXIT_NONMEMBER}.get(dec.verdict, EXIT_UNDECIDED)


def cmd_counterexample(cfg: RunConfig) -> int:
    cc = CounterexampleConfig(n_radii=cfg.nr, wos=cfg.wos, eps_pair=(cfg.eps1, cfg.eps2))
    rep = verify_counterexample(cfg.c, cfg.levels, cfg.p, cfg.alpha, cc)
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_profile(rep.profile, cfg.out / "counterexample_profile.csv", seed=cfg.seed)
    text = f"# seed={cfg.seed}\n" + rep.summary()
    (cfg.out / "counterexample.txt").write_text(text + "\n")
    print(text)
    return 0 if (rep.delta_ok and rep.h_ok and rep.diverges) else 1


def profile_from_csv(path, domain=None) -> LevelSetProfile:
    """Rebuild a profile from its CSV (crosscut far-side counts are not stored)."""
    rows = []
    for d in load_profile_rows(path):
        absent = "absent" in d["flags"].split(";")
        k = None if math.isnan(d["k"]) else MetricBracket(d["k"])
        rows.append(ProfileRow(
            d["r"], MeasureEstimate(d["omega_star_mean"], d["omega_star_se"], 0),
            MeasureEstimate(d["omega_full_mean"], d["omega_full_se"], 0),
            d["lambda_star"], d["delta_star"], d["delta_full"], k, int(d["n_crosscuts"]),
            int(d["pruned"]), 0, [f for f in d["flags"].split(";") if f], absent))
    r = np.array([x.r for x in rows])
    return LevelSetProfile(domain, r, rows, ProfileConfig())


def cmd_plot(cfg: RunConfig) -> int:
    if not cfg.profile:
        raise GeometryError("--profile is required")
    rows = load_profile_rows(cfg.profile)
    if not rows:
        print("error: profile is empty", file=sys.stderr)
        return EXIT_FAILURE
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / (Path(cfg.profile).stem + ".svg")
    path.write_text(profile_svg(rows, seed=cfg.seed))
    print(f"wrote {path}")
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    if cfg.profile:
        prof = profile_from_csv(cfg.profile)
    else:
        prof = profile(_load_spec(cfg), cfg.profile_config(), tables=_tables(cfg, quiet=True))
    viol = validate_profile(prof)
    for v in viol:
        print(v)
    print(f"{len(viol)} violation(s)")
    return 0 if not viol else 1


# ----------------------------------------------------------------------------
# SVG


SERIES = [("omega_star", "log 1/ω*", "#1f77b4"), ("delta_star", "π δ*", "#d62728"),
          ("lambda_star", "π λ*", "#2ca02c"), ("omega_full", "log 1/ω_full", "#9467bd")]


def _series(rows, name):
    out = []
    for d in rows:
        if name == "omega_star":
            v = d["omega_star_mean"]
            y = -math.log(v) if v > 0 else math.inf
        elif name == "omega_full":
            v = d["omega_full_mean"]
            y = -math.log(v) if v > 0 else math.inf
        else:
            y = math.pi * d[name]
        out.append((math.log(d["r"]), y))
    return out


def profile_svg(rows, width: int = 640, height: int = 420, seed: int | None = None) -> str:
    """Ordinates against log r as polylines, with the least-squares slope of each."""
    pad = 50
    series = {name: _series(rows, name) for name, _, _ in SERIES}
    finite = [(x, y) for s in series.values() for x, y in s if math.isfinite(y)]
    if not finite:
        raise ValueError("profile has no finite ordinates")
    xs = [x for x, _ in finite]
    ys = [y for _, y in finite]
    x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
    y0, y1 = min(0.0, min(ys)), max(ys) * 1.05 + 1e-9

    def px(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def py(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f"<!-- seed={seed} -->",
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
             'stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
             f'<text x="{width / 2}" y="{height - 12}" font-size="12">log r</text>']
    for i, (name, label, color) in enumerate(SERIES):
        pts = series[name]
        good = [(x, y) for x, y in pts if math.isfinite(y)]
        if good:
            poly = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in good)
            parts.append(f'<polyline points="{poly}" fill="none" stroke="{color}"/>')
        if len(good) < len(pts):
            # level sets empty from here on: mark +inf at the top edge
            xi = next(x for x, y in pts if not math.isfinite(y))
            parts.append(f'<text x="{px(xi):.1f}" y="{pad - 4}" fill="{color}" '
                         'font-size="12">+∞</text>')
        slope = np.polyfit([x for x, _ in good], [y for _, y in good], 1)[0] \
            if len(good) >= 2 else math.nan
        parts.append(f'<text x="{pad + 8}" y="{pad + 16 * (i + 1)}" fill="{color}" '
                     f'font-size="12">{label}: slope {slope:.3g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


COMMANDS = {"tables": cmd_tables, "analyze": cmd_analyze, "counterexample": cmd_counterexample,
            "plot": cmd_plot, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = resolve(args, parser)
    try:
        return COMMANDS[cfg.command](cfg)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
