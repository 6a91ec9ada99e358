"""Hardy-number estimates, weighted Bergman membership and the comb counter-example.

Every estimator is a tail slope against ``log r``: least-squares slopes over
sliding windows of consecutive radii, with the minimum over the tail windows
standing in for the liminf.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Domain, circle_intersection, comb_domain, comb_level_radius
from .harmonic import WosConfig
from .modulus import reduced_extremal_distance_full
from .profile import LevelSetProfile, ProfileConfig, profile

__all__ = ["HardyEstimate", "MembershipDecision", "hardy_number_estimate",
           "bergman_membership", "question_integral_classifier", "verify_counterexample",
           "starlike_hardy_oracle", "comb_domain", "CounterexampleConfig", "TAGS"]

TAGS = ("omega_star", "delta_star", "lambda_star", "omega_full", "d_bracket")


class EstimateError(ValueError):
    pass


@dataclass
class HardyEstimate:
    tag: str
    h_est: float
    window_slopes: list[float]
    window_errors: list[float]
    tail_window: tuple[float, float]
    half_width: float
    interval: tuple[float, float] | None = None
    low_confidence: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def std_err(self) -> float:
        return self.half_width / 2.0


@dataclass(frozen=True)
class MembershipDecision:
    p: float
    alpha: float
    verdict: str
    margin: float
    ratio: float
    h_est: float


def _ordinate(profile_: LevelSetProfile, tag: str):
    rows = profile_.present()
    r = np.array([x.r for x in rows])
    if tag in ("omega_star", "omega_full"):
        m = np.array([(x.omega_star if tag == "omega_star" else x.omega_full).mean for x in rows])
        se = np.array([(x.omega_star if tag == "omega_star" else x.omega_full).std_err
                       for x in rows])
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(m > 0, -np.log(np.where(m > 0, m, 1.0)), np.inf)
            sy = np.where(m > 0, se / np.where(m > 0, m, 1.0), np.inf)
        return r, y, sy
    if tag in ("delta_star", "lambda_star"):
        vals = np.array([x.delta_star if tag == "delta_star" else x.lambda_star for x in rows])
        m = np.array([x.omega_star.mean for x in rows])
        se = np.array([x.omega_star.std_err for x in rows])
        # the table values move by about -(1/pi) per unit of log omega
        with np.errstate(divide="ignore", invalid="ignore"):
            sy = np.where(m > 0, se / np.where(m > 0, m, 1.0), np.inf)
        return r, math.pi * vals, sy
    if tag == "d_bracket":
        y = np.array([x.k_bracket.k if x.k_bracket else (math.inf if x.n_crosscuts == 0
                                                          else math.nan) for x in rows])
        return r, y, np.zeros_like(y)
    if tag == "delta_full":
        y = np.array([x.delta_full for x in rows])
        return r, math.pi * y, np.zeros_like(y)
    raise EstimateError(f"unknown estimator tag {tag!r}")


def _window_slopes(x, y, sy, width):
    slopes, errs, spans = [], [], []
    for i in range(len(x) - width + 1):
        xs, ys, ss = x[i:i + width], y[i:i + width], sy[i:i + width]
        xc = xs - xs.mean()
        sxx = float(np.sum(xc**2))
        b = float(np.sum(xc * (ys - ys.mean())) / sxx)
        resid = ys - ys.mean() - b * xc
        se_fit = math.sqrt(float(np.sum(resid**2)) / max(width - 2, 1) / sxx)
        se_prop = math.sqrt(float(np.sum((xc / sxx) ** 2 * ss**2)))
        slopes.append(b)
        errs.append(max(se_fit, se_prop))
        spans.append((float(math.exp(xs[0])), float(math.exp(xs[-1]))))
    return slopes, errs, spans


def hardy_number_estimate(profile_: LevelSetProfile, tag: str = "omega_star", window: int = 6,
                          cap: float = 50.0, min_radii: int = 8) -> HardyEstimate:
    """Tail estimate of the Hardy number from one ordinate of a profile.

    ``tag`` selects the ordinate: ``log 1/omega*``, ``pi*delta*``,
    ``pi*lambda*``, ``log 1/omega_full`` or the quasihyperbolic distance
    (``d_bracket``, reported with the interval ``[slope/2, 2*slope]``).
    """
    if tag not in TAGS:
        raise EstimateError(f"unknown estimator tag {tag!r}")
    r, y, sy = _ordinate(profile_, tag)
    empty = [x.n_crosscuts == 0 for x in profile_.present()]
    if any(empty):
        first = empty.index(True)
        if all(empty[first:]):
            return HardyEstimate(tag, math.inf, [], [], (float(r[first]), float(r[-1])), 0.0,
                                 (math.inf, math.inf), notes=["level sets empty beyond "
                                                              f"r={r[first]:.6g}"])
    ok = np.isfinite(y) & np.isfinite(sy)
    if ok.sum() < min_radii:
        raise EstimateError(f"need at least {min_radii} valid radii, have {int(ok.sum())}")
    x = np.log(r[ok])
    y, sy = y[ok], sy[ok]
    slopes, errs, spans = _window_slopes(x, y, sy, window)
    med = float(np.median(np.exp(x)))
    tail = [i for i, s in enumerate(spans) if s[0] >= med] or [len(spans) - 1]
    i_min = min(tail, key=lambda i: slopes[i])
    h = slopes[i_min]
    notes = [f"window={window}", f"tail starts at r>={med:.6g}"]
    low_conf = False
    # ordinates should be non-decreasing in r
    drops = np.diff(y) < -3 * np.hypot(sy[1:], sy[:-1]) - 1e-12
    if drops.any():
        low_conf = True
        notes.append("ordinate decreases beyond 3 sigma")
    if all(slopes[i] > cap for i in tail):
        h = math.inf
        notes.append(f"all tail slopes exceed cap {cap:g}")
    interval = (h / 2, 2 * h) if tag == "d_bracket" else None
    return HardyEstimate(tag, h, slopes, errs, spans[i_min], 2 * errs[i_min], interval,
                         low_conf, notes)


def bergman_membership(h: HardyEstimate, p: float, alpha: float,
                       margin: float | None = None) -> MembershipDecision:
    """Decide ``f`` in the weighted Bergman space ``A^p_alpha`` by comparing
    ``p/(alpha+2)`` with the Hardy-number estimate (``alpha = -1`` is ``H^p``)."""
    if not p > 0:
        raise ValueError("p must be positive")
    if not alpha >= -1:
        raise ValueError("alpha must be >= -1")
    if margin is None:
        margin = max(0.1, 2 * h.std_err)
    ratio = p / (alpha + 2)
    if math.isinf(h.h_est) or ratio < h.h_est - margin:
        verdict = "member"
    elif ratio > h.h_est + margin:
        verdict = "non-member"
    else:
        verdict = "undecided"
    return MembershipDecision(p, alpha, verdict, margin, ratio, h.h_est)


def question_integral_classifier(profile_: LevelSetProfile, p: float, alpha: float,
                                 tol: float = 0.05, window: int = 6,
                                 margin: float = 0.1) -> str:
    """Tail behaviour of the integral of ``r^(p-1) exp(-pi (alpha+2) delta_full(r))``.

    Returns ``diverges``, ``converges`` or ``undecided``.
    """
    rows = profile_.present()
    empty = [x.n_crosscuts == 0 for x in rows]
    if any(empty) and all(empty[empty.index(True):]):
        return "converges"  # integrand vanishes beyond the last level set
    r = np.array([x.r for x in rows])
    d = np.array([x.delta_full for x in rows])
    ok = np.isfinite(d)
    if ok.sum() < 8:
        raise EstimateError("delta_full needed on at least 8 radii")
    r, d = r[ok], d[ok]
    if np.all(d <= np.log(r) / (2 * math.pi) + tol) and p >= alpha / 2 + 1:
        return "diverges"
    slopes, errs, spans = _window_slopes(np.log(r), math.pi * d, np.zeros_like(d),
                                         min(window, len(r)))
    med = float(np.median(r))
    tail = [i for i, s in enumerate(spans) if s[0] >= med] or [len(spans) - 1]
    lo = min(slopes[i] - 2 * errs[i] for i in tail)
    hi = max(slopes[i] + 2 * errs[i] for i in tail)
    ratio = p / (alpha + 2)
    if ratio >= hi + margin:
        return "diverges"
    if ratio < lo - margin:
        return "converges"
    return "undecided"


def starlike_hardy_oracle(D: Domain, r: float | None = None) -> float:
    """``pi`` over the widest arc of ``D ∩ {|z| = r}`` for domains starlike about 0."""
    if not D.star_shaped:
        raise ValueError("domain is not starlike about the origin")
    if r is None:
        if D.kind == "comb":
            r = 2.0 * comb_level_radius(D.params["c"], D.params["levels"])
        elif D.kind == "slit-plane":
            r = 1e3 * max(1.0, max(abs(p.origin) for p in D.pieces))
        elif D.kind == "disk":
            r = 2.0 * (abs(D.params["center"]) + D.params["radius"])
        else:
            r = 1e3
    arcs = circle_intersection(D, r)
    if not arcs:
        return math.inf
    return math.pi / max(a.width for a in arcs)


# ----------------------------------------------------------------------------
# counter-example


@dataclass(frozen=True)
class CounterexampleConfig:
    r_min: float = 10.0
    r_max: float | None = None        # default: the last level radius
    n_radii: int = 16
    n_delta: int = 8
    threshold: float = 5.0
    tol: float = 0.05
    wos: WosConfig = WosConfig()
    delta_grid_h: float = 2 * math.pi / 256
    eps_pair: tuple = (1e-2, 1e-3)


@dataclass
class CounterexampleReport:
    c: float
    levels: int
    p: float
    alpha: float
    delta_checks: list[tuple[float, float, float, bool]]
    h_estimate: HardyEstimate
    threshold: float
    verdict: str
    profile: LevelSetProfile

    @property
    def delta_ok(self) -> bool:
        return all(ok for *_, ok in self.delta_checks)

    @property
    def h_ok(self) -> bool:
        return self.h_estimate.h_est > self.threshold

    @property
    def diverges(self) -> bool:
        return self.verdict == "diverges"

    def summary(self) -> str:
        lines = [f"comb c={self.c:g} levels={self.levels} p={self.p:g} alpha={self.alpha:g}"]
        for r, d, b, ok in self.delta_checks:
            lines.append(f"  r={r:.6g} delta_full={d:.6f} bound={b:.6f} {'ok' if ok else 'FAIL'}")
        lines.append(f"  h_est(omega*)={self.h_estimate.h_est:.4g} threshold={self.threshold:g} "
                     f"{'ok' if self.h_ok else 'FAIL'}")
        lines.append(f"  integral: {self.verdict}")
        return "\n".join(lines)


def verify_counterexample(c: float = 2.0, levels: int = 3, p: float = 1.0, alpha: float = -1.0,
                          cfg: CounterexampleConfig = CounterexampleConfig(),
                          domain: Domain | None = None) -> CounterexampleReport:
    """Run the counter-example checks on a comb domain (or on ``domain`` for sanity runs)."""
    D = domain if domain is not None else comb_domain(c, levels)
    r_max = cfg.r_max if cfg.r_max is not None else comb_level_radius(c, levels)
    q = (r_max / cfg.r_min) ** (1.0 / (cfg.n_radii - 1))
    pc = ProfileConfig(r0=cfg.r_min, q=q, n_radii=cfg.n_radii, wos=cfg.wos)
    prof = profile(D, pc)
    rows = prof.present()
    step = max(1, len(rows) // cfg.n_delta)
    picks = rows[::step][: cfg.n_delta]
    checks = []
    for row in picks:
        d = float(reduced_extremal_distance_full(D, row.r, cfg.eps_pair, cfg.delta_grid_h))
        row.delta_full = d
        bound = math.log(row.r) / (2 * math.pi) + cfg.tol
        checks.append((row.r, d, bound, d <= bound))
    h = hardy_number_estimate(prof, "omega_star")
    verdict = question_integral_classifier(prof, p, alpha, cfg.tol)
    return CounterexampleReport(c, levels, p, alpha, checks, h, cfg.threshold, verdict, prof)
