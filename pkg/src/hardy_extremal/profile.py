"""Per-radius level-set profiles and their structural checks.

For each radius of a geometric grid the profile records the harmonic measure
of the extremal crosscut and of the whole level set, the single-arc distances
read off the canonical tables, the quasihyperbolic bracket and, on request,
the reduced extremal distance of the full level set.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import (Domain, GeometryError, ResolutionError, crosscut_decomposition,
                       transition_radii)
from .harmonic import (ZERO, MeasureEstimate, WosConfig, _chain, component_measures,
                       level_stage, resample, seed_for)
from .hyperbolic import MetricBracket, UnreachableError, distance_field
from .modulus import CanonicalTables, default_tables, reduced_extremal_distance_full

PROFILE_SCHEMA = 1
PROFILE_COLUMNS = ["r", "omega_star_mean", "omega_star_se", "omega_full_mean", "omega_full_se",
                   "lambda_star", "delta_star", "delta_full", "k", "d_low", "d_high",
                   "n_crosscuts", "pruned", "flags"]


@dataclass(frozen=True)
class ProfileConfig:
    r0: float = 2.0
    q: float = 10 ** 0.25
    n_radii: int = 16
    wos: WosConfig = WosConfig()
    prune: bool = True
    prune_K: float = 2.0
    decomp_rel_h: float = 1 / 64     # flood-fill cell size relative to r
    qh_grid_h: float = 2 * math.pi / 256
    with_delta_full: bool = False
    delta_grid_h: float = 2 * math.pi / 256
    eps_pair: tuple = (1e-2, 1e-3)

    def radii(self, D: Domain | None = None) -> np.ndarray:
        r = self.r0 * self.q ** np.arange(self.n_radii)
        return nudge_radii(r, transition_radii(D)) if D is not None else r


def nudge_radii(r: np.ndarray, transitions) -> np.ndarray:
    """Move radii lying within 1% of a transition radius 2% outward."""
    r = np.array(r, dtype=float)
    for t in transitions:
        close = np.abs(r / t - 1.0) < 0.01
        r[close] = t * 1.02
    return r


@dataclass
class ProfileRow:
    r: float
    omega_star: MeasureEstimate
    omega_full: MeasureEstimate
    lambda_star: float
    delta_star: float
    delta_full: float
    k_bracket: MetricBracket | None
    n_crosscuts: int
    pruned_count: int
    bounded_far_sides: int = 0
    flags: list[str] = field(default_factory=list)
    absent: bool = False


@dataclass
class LevelSetProfile:
    domain: Domain
    r_grid: np.ndarray
    rows: list[ProfileRow]
    config: ProfileConfig

    def present(self) -> list[ProfileRow]:
        return [row for row in self.rows if not row.absent]

    def column(self, name: str) -> np.ndarray:
        rows = self.present()
        get = {
            "r": lambda x: x.r,
            "omega_star": lambda x: x.omega_star.mean,
            "omega_star_se": lambda x: x.omega_star.std_err,
            "omega_full": lambda x: x.omega_full.mean,
            "omega_full_se": lambda x: x.omega_full.std_err,
            "lambda_star": lambda x: x.lambda_star,
            "delta_star": lambda x: x.delta_star,
            "delta_full": lambda x: x.delta_full,
            "k": lambda x: x.k_bracket.k if x.k_bracket else math.nan,
            "n_crosscuts": lambda x: x.n_crosscuts,
        }[name]
        return np.array([get(x) for x in rows], dtype=float)


def _table_values(omega: float, tables: CanonicalTables) -> tuple[float, float]:
    if omega <= 0:
        return math.inf, math.inf
    om = min(omega, 1.0)
    return float(tables.lambda_star(om)), float(tables.delta_star(om))


def profile(D: Domain, cfg: ProfileConfig = ProfileConfig(), r_grid=None,
            tables: CanonicalTables | None = None) -> LevelSetProfile:
    """Level-set profile of ``D`` along ``r_grid`` (default: the config's geometric grid).

    Walker populations are carried from one radius to the next: the measure
    of reaching radius ``r_j`` is the product of stage survival fractions,
    and crosscut measures at ``r_j`` start from the hitting distribution on
    the previous circle.
    """
    tables = tables or default_tables()
    radii = np.asarray(cfg.radii(D) if r_grid is None else r_grid, dtype=float)
    w0 = D.base_point
    if not radii[0] > abs(w0):
        raise ValueError("first radius must exceed |base point|")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radius grid must be increasing")
    wos = cfg.wos
    n = wos.n_samples
    try:
        qfield = distance_field(D, w0, float(radii[-1]), cfg.qh_grid_h)
    except (UnreachableError, ValueError):
        qfield = None

    rows: list[ProfileRow] = []
    start = np.full(n, complex(w0))
    reached = MeasureEstimate(1.0, 0.0, n, 0)
    ended = starved = False
    for j, r in enumerate(radii):
        if ended:
            rows.append(_empty_row(r, "empty level set"))
            continue
        if starved:
            rows.append(ProfileRow(float(r), ZERO, ZERO, math.nan, math.nan, math.nan, None, 0,
                                   0, flags=["absent: no walker reached the previous radius"],
                                   absent=True))
            continue
        try:
            dec = crosscut_decomposition(D, float(r), cfg.decomp_rel_h * float(r))
        except (GeometryError, ResolutionError) as exc:
            rows.append(ProfileRow(r, ZERO, ZERO, math.nan, math.nan, math.nan, None, 0, 0,
                                   flags=[f"absent: {exc}"], absent=True))
            continue
        if not dec.crosscuts:
            rows.append(_empty_row(r, "empty level set"))
            ended = True
            continue
        rng = np.random.default_rng(seed_for(wos.rng_seed, 0x5EED, j))
        stage, survivors = level_stage(D, start, float(r), wos, rng)
        full = _chain(reached, stage)
        cm = component_measures(D, dec, wos, prune=cfg.prune, K=cfg.prune_K, start=start,
                                start_measure=reached, radius_index=j, full=full)
        flags = list(cm.diagnostics)
        lam, dlt = _table_values(cm.star_measure.mean, tables)
        k = None
        if qfield is not None:
            try:
                k = MetricBracket(qfield.to_level(float(r)))
            except UnreachableError as exc:
                flags.append(str(exc))
        dfull = math.nan
        if cfg.with_delta_full:
            try:
                dfull = float(reduced_extremal_distance_full(D, float(r), cfg.eps_pair,
                                                             cfg.delta_grid_h))
            except Exception as exc:  # solver failure marks the value, not the radius
                flags.append(f"delta_full failed: {exc}")
        bounded = sum(1 for c in dec.crosscuts if not c.far_side_unbounded)
        rows.append(ProfileRow(float(r), cm.star_measure, full, lam, dlt, dfull, k,
                               len(dec.crosscuts), len(cm.pruned), bounded, flags))
        reached = full
        if survivors.size == 0:
            starved = True
            continue
        start = resample(survivors, n, np.random.default_rng(seed_for(wos.rng_seed, 0xC0DE, j)))
    return LevelSetProfile(D, radii, rows, cfg)


def _empty_row(r: float, note: str) -> ProfileRow:
    return ProfileRow(float(r), ZERO, ZERO, math.inf, math.inf, math.inf, None, 0, 0,
                      flags=[note])


# ----------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    check: str
    radius: float
    margin: float

    def __str__(self) -> str:
        return f"{self.check} at r={self.radius:.6g} (margin {self.margin:.3g})"


def validate_profile(p: LevelSetProfile, sigma: float = 3.0,
                     table_tol: float = 1e-3) -> list[Violation]:
    """Check every structural invariant of a profile; returns the violations found."""
    out: list[Violation] = []
    rows = p.present()
    for row in rows:
        s, f = row.omega_star, row.omega_full
        slack = sigma * math.hypot(s.std_err, f.std_err)
        if s.mean > f.mean + slack:
            out.append(Violation("extremal crosscut exceeds full level set", row.r,
                                 s.mean - f.mean - slack))
        om = s.mean
        if om > 0 and math.isfinite(row.lambda_star):
            el = math.exp(-math.pi * row.lambda_star)
            ed = math.exp(-math.pi * row.delta_star)
            om1 = min(om, 1.0)
            checks = [
                ("slit-distance lower sandwich", math.pi / 8 * om1 - el * (1 + table_tol)),
                ("slit-distance upper sandwich", el - om1 * (1 + table_tol)),
                ("reduced-distance lower sandwich", om1 - ed * (1 + table_tol)),
                ("reduced-distance upper sandwich", ed - math.pi / 2 * om1 * (1 + table_tol)),
            ]
            out += [Violation(name, row.r, m) for name, m in checks if m > 0]
        unbounded = p.domain is None or not p.domain.bounded
        if row.bounded_far_sides > 1 and unbounded:
            out.append(Violation("more than one crosscut with bounded far side", row.r,
                                 row.bounded_far_sides - 1))
        if row.k_bracket is not None and f.mean < 1:
            # Beurling-Nevanlinna chain with the upper end of the bracket
            floor = 2 / math.pi * math.exp(-row.k_bracket.d_high)
            if f.mean + sigma * f.std_err < floor:
                out.append(Violation("full measure below hyperbolic floor", row.r,
                                     floor - f.mean - sigma * f.std_err))
    for a, b in zip(rows, rows[1:]):
        sa, sb = a.omega_star, b.omega_star
        slack = sigma * math.hypot(sa.std_err, sb.std_err)
        if sb.mean > sa.mean + slack:
            out.append(Violation("extremal measure increases", b.r, sb.mean - sa.mean - slack))
        if sb.mean < sa.mean:
            if b.lambda_star < a.lambda_star or b.delta_star < a.delta_star:
                out.append(Violation("table-mapped distances out of order", b.r,
                                     max(a.lambda_star - b.lambda_star,
                                         a.delta_star - b.delta_star)))
    return out


# ----------------------------------------------------------------------------
# persistence


def _fmt(x) -> str:
    return repr(float(x))


def save_profile(p: LevelSetProfile, path, seed: int | None = None) -> None:
    seed = p.config.wos.rng_seed if seed is None else seed
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema={PROFILE_SCHEMA} seed={seed} domain={p.domain.kind}\n")
        w = csv.writer(fh)
        w.writerow(PROFILE_COLUMNS)
        for row in p.rows:
            k = row.k_bracket
            w.writerow([_fmt(row.r), _fmt(row.omega_star.mean), _fmt(row.omega_star.std_err),
                        _fmt(row.omega_full.mean), _fmt(row.omega_full.std_err),
                        _fmt(row.lambda_star), _fmt(row.delta_star), _fmt(row.delta_full),
                        _fmt(k.k if k else math.nan), _fmt(k.d_low if k else math.nan),
                        _fmt(k.d_high if k else math.nan), row.n_crosscuts, row.pruned_count,
                        ";".join(row.flags + (["absent"] if row.absent else []))])


def load_profile_rows(path) -> list[dict]:
    """Rows of a saved profile as dictionaries of floats (flags kept as text)."""
    with open(path) as fh:
        head = fh.readline()
        meta = dict(kv.split("=", 1) for kv in head.lstrip("# ").split())
        if int(meta.get("schema", -1)) != PROFILE_SCHEMA:
            raise ValueError(f"unsupported profile schema {meta.get('schema')}")
        rd = csv.DictReader(fh)
        if rd.fieldnames != PROFILE_COLUMNS:
            raise ValueError("unexpected profile columns")
        return [{k: (v if k == "flags" else float(v)) for k, v in row.items()} for row in rd]


def with_samples(cfg: ProfileConfig, n: int, seed: int | None = None) -> ProfileConfig:
    wos = replace(cfg.wos, n_samples=n, rng_seed=cfg.wos.rng_seed if seed is None else seed)
    return replace(cfg, wos=wos)
