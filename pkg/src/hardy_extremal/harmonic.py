"""Walk-on-spheres estimation of harmonic measure.

Walkers jump to a uniform point on the largest circle centred at the current
position that stays inside the domain (and off any extra absorbing arcs) and
are absorbed inside a thin shell around the absorbing set. The shell width is
relative: ``eps_shell * max(|z|, dist(w0, boundary))``.

Level-set measures along an increasing radius grid are estimated with fixed
splitting at the grid radii: by the strong Markov property the measure of a
far crosscut factors through the exit distribution on every smaller circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import Arc, Crosscut, CrosscutDecomposition, Domain

BOUNDARY = 0
LEVEL = -1
CENSORED = -2


@dataclass(frozen=True)
class WosConfig:
    eps_shell: float = 1e-4
    max_steps: int = 100_000
    n_samples: int = 100_000
    rng_seed: int = 0

    def __post_init__(self):
        if self.eps_shell <= 0:
            raise ValueError("eps_shell must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


@dataclass(frozen=True)
class MeasureEstimate:
    mean: float
    std_err: float
    n_samples: int
    n_censored: int = 0

    @property
    def censored_fraction(self) -> float:
        return self.n_censored / self.n_samples if self.n_samples else 0.0

    @property
    def valid(self) -> bool:
        return self.censored_fraction <= 1e-3

    @classmethod
    def from_successes(cls, successes: int, n: int, censored: int = 0) -> "MeasureEstimate":
        p = successes / n
        # sample std dev of Bernoulli outcomes, ddof=1
        sd = math.sqrt(p * (1 - p) * n / (n - 1)) if n > 1 else 0.0
        return cls(p, sd / math.sqrt(n), n, censored)


ZERO = MeasureEstimate(0.0, 0.0, 0, 0)


@dataclass
class ComponentMeasures:
    radius: float
    per_crosscut: dict[int, MeasureEstimate]
    star_index: int
    star_measure: MeasureEstimate
    full_measure: MeasureEstimate
    pruned: list[int] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def seed_for(seed: int, crosscut_id: int = 0, radius_index: int = 0) -> int:
    """Sub-seed scheme: ``seed XOR crosscut id``, with the radius index in high bits."""
    return (int(seed) ^ int(crosscut_id) ^ (int(radius_index) << 32)) & (2**64 - 1)


def walk(D: Domain, start, rng: np.random.Generator, cfg: WosConfig,
         extra: Sequence[Arc] = (), level: float | None = None):
    """Run walkers from ``start`` until absorption.

    Absorbing set is the boundary of ``D``, the ``extra`` arcs and, when
    ``level`` is given, the circle ``|z| = level`` (walkers must start inside
    it). Returns ``(labels, positions)`` where label 0 is the domain boundary,
    ``k >= 1`` is ``extra[k-1]``, ``LEVEL`` the level circle and ``CENSORED``
    a walk that hit ``max_steps``.
    """
    z = np.array(start, dtype=complex).ravel().copy()
    n = z.size
    labels = np.full(n, CENSORED, dtype=np.int64)
    scale0 = float(D.distance_to_boundary(D.base_point))
    active = np.arange(n)
    za = z.copy()
    for _ in range(cfg.max_steps):
        if active.size == 0:
            break
        dist = D.distance_to_boundary(za)
        lab = np.zeros(active.size, dtype=np.int64)
        for k, arc in enumerate(extra, start=1):
            dk = arc.distance(za)
            closer = dk < dist
            dist = np.where(closer, dk, dist)
            lab[closer] = k
        if level is not None:
            dl = level - np.abs(za)
            closer = dl < dist
            dist = np.where(closer, dl, dist)
            lab[closer] = LEVEL
        eps = cfg.eps_shell * np.maximum(np.abs(za), scale0)
        done = dist < eps
        if done.any():
            idx = active[done]
            labels[idx] = lab[done]
            zd = za[done]
            if level is not None:
                lv = lab[done] == LEVEL
                zd[lv] = zd[lv] / np.abs(zd[lv]) * level
            z[idx] = zd
            keep = ~done
            active, za, dist = active[keep], za[keep], dist[keep]
        if active.size == 0:
            break
        za = za + dist * np.exp(1j * rng.uniform(0.0, 2 * math.pi, active.size))
    if active.size:
        z[active] = za
    return labels, z


def harmonic_measure(D: Domain, z, target: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     cfg: WosConfig, extra: Sequence[Arc] = ()) -> MeasureEstimate:
    """Harmonic measure at ``z`` of the part of the absorbing set selected by ``target``.

    ``target(labels, positions)`` returns a boolean mask over absorbed walkers;
    ``labels`` follow :func:`walk`. Censored walks count as failures.
    """
    z = complex(z)
    if not D.distance_to_boundary(z) > 0 or not D.contains(z):
        raise ValueError("start point must be interior")
    rng = np.random.default_rng(cfg.rng_seed)
    labels, pos = walk(D, np.full(cfg.n_samples, z), rng, cfg, extra)
    cens = int(np.sum(labels == CENSORED))
    ok = (labels != CENSORED) & np.asarray(target(labels, pos), dtype=bool)
    return MeasureEstimate.from_successes(int(ok.sum()), cfg.n_samples, cens)


def on_boundary_arc(center: complex, start: float, width: float):
    """Target predicate: absorbed on the domain boundary inside an angular window."""

    def pred(labels, pos):
        rel = np.mod(np.angle(pos - center) - start, 2 * math.pi)
        return (labels == BOUNDARY) & (rel < width)

    return pred


def on_extra(k: int = 1):
    """Target predicate: absorbed on the ``k``-th extra arc."""
    return lambda labels, pos: labels == k


def harbeu_bound(cc: Crosscut, w0: complex, K: float = 2.0) -> float:
    """Upper bound ``K (l / (r - |w0|))**(1/2)`` for the measure of a short crosscut."""
    gap = cc.radius - abs(w0)
    if cc.length >= gap:
        return math.inf
    return K * math.sqrt(cc.length / gap)


def _prune_order(dec: CrosscutDecomposition, w0: complex, prefer: float | None):
    ref = np.angle(w0) if prefer is None else prefer
    def key(c):
        return (-c.width, abs(np.angle(np.exp(1j * (c.interval.mid - ref)))))
    return sorted(dec.crosscuts, key=key)


def component_measures(D: Domain, dec: CrosscutDecomposition, cfg: WosConfig,
                       prune: bool = True, K: float = 2.0, start=None,
                       start_measure: MeasureEstimate | None = None,
                       radius_index: int = 0, prefer_angle: float | None = None,
                       full: MeasureEstimate | None = None) -> ComponentMeasures:
    """Per-crosscut measures ``omega_{B_k}(w0, C_k)`` and the extremal crosscut.

    With ``start`` (walker positions on a smaller circle) and ``start_measure``
    (measure of reaching that circle) the estimate is the product of the two;
    this is how splitting along a radius grid reuses earlier levels.
    """
    r = dec.radius
    w0 = D.base_point
    diags: list[str] = []
    if not dec.crosscuts:
        return ComponentMeasures(r, {}, -1, ZERO, ZERO, [], ["empty level set"])
    if len(dec.crosscuts) == 1 and dec.crosscuts[0].closed:
        one = MeasureEstimate(1.0, 0.0, cfg.n_samples, 0)
        if start_measure is not None:
            one = start_measure
        return ComponentMeasures(r, {0: one}, 0, one, one, [], ["closed level circle"])
    n = cfg.n_samples
    if start is None:
        start = np.full(n, complex(w0))
        base = MeasureEstimate(1.0, 0.0, n, 0)
    else:
        base = start_measure
    if full is None:
        rng = np.random.default_rng(seed_for(cfg.rng_seed, 0x5EED, radius_index))
        lab, _ = walk(D, start, rng, cfg, level=r)
        full = _chain(base, MeasureEstimate.from_successes(int(np.sum(lab == LEVEL)), n,
                                                           int(np.sum(lab == CENSORED))))
    per: dict[int, MeasureEstimate] = {}
    pruned: list[int] = []
    best: MeasureEstimate | None = None
    best_id = -1
    single = len(dec.crosscuts) == 1 and len(dec.all_arcs) == 1
    for cc in _prune_order(dec, w0, prefer_angle):
        if single:
            est = full
        else:
            if prune and best is not None and best.mean > 0:
                if harbeu_bound(cc, w0, K) < best.mean - 3 * best.std_err:
                    pruned.append(cc.id)
                    continue
            rng = np.random.default_rng(seed_for(cfg.rng_seed, cc.id, radius_index))
            lab, _ = walk(D, start, rng, cfg, extra=(cc.arc(),))
            est = _chain(base, MeasureEstimate.from_successes(int(np.sum(lab == 1)), n,
                                                              int(np.sum(lab == CENSORED))))
        per[cc.id] = est
        if best is None or est.mean > best.mean:
            best, best_id = est, cc.id
    if best is None:
        diags.append("all crosscuts pruned")
        best, best_id = ZERO, -1
    if not full.valid or any(not e.valid for e in per.values()):
        diags.append("censored fraction above 1e-3")
    dec.pruned_count = len(pruned)
    return ComponentMeasures(r, per, best_id, best, full, pruned, diags)


def _chain(a: MeasureEstimate, b: MeasureEstimate) -> MeasureEstimate:
    """Product of independent stage estimates with first-order error propagation."""
    m = a.mean * b.mean
    if m == 0:
        se = math.hypot(a.std_err * b.mean, b.std_err * a.mean)
        return MeasureEstimate(m, se, b.n_samples, a.n_censored + b.n_censored)
    rel = math.hypot(a.std_err / a.mean if a.mean else 0.0, b.std_err / b.mean)
    return MeasureEstimate(m, m * rel, b.n_samples, a.n_censored + b.n_censored)


def level_stage(D: Domain, start, r: float, cfg: WosConfig, rng: np.random.Generator):
    """Walk from ``start`` until hitting ``|z| = r`` or the boundary.

    Returns the stage estimate and the hitting positions of the survivors.
    """
    lab, pos = walk(D, start, rng, cfg, level=r)
    hit = lab == LEVEL
    est = MeasureEstimate.from_successes(int(hit.sum()), len(lab), int(np.sum(lab == CENSORED)))
    return est, pos[hit]


def resample(points: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    if points.size == 0:
        return points
    return points[rng.integers(0, points.size, n)]
