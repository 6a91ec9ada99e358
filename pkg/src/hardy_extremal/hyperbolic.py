"""Quasihyperbolic distance on a log-polar grid and the hyperbolic bracket.

The quasihyperbolic metric has density ``1/dist(z, boundary)``. Distances are
shortest paths over an 8-neighbour grid in the chart ``z = z0 + exp(s + i*phi)``
centred at the start point, so the grid resolves both the neighbourhood of
the start and very large radii at the same relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .geometry import Domain

TWO_PI = 2.0 * math.pi


class UnreachableError(RuntimeError):
    pass


@dataclass(frozen=True)
class MetricBracket:
    """Quasihyperbolic value ``k`` with the comparison bracket ``[k/2, 2k]``."""

    k: float

    @property
    def d_low(self) -> float:
        return self.k / 2.0

    @property
    def d_high(self) -> float:
        return 2.0 * self.k

    def contains(self, d: float) -> bool:
        return self.d_low <= d <= self.d_high


def disk_hyperbolic_distance(s: float) -> float:
    """Hyperbolic distance from 0 to ``s`` in the unit disk, density ``1/(1-|z|^2)``."""
    if not 0.0 <= s < 1.0:
        raise ValueError("s must lie in [0, 1)")
    return 0.5 * math.log((1.0 + s) / (1.0 - s))


@dataclass
class DistanceField:
    """Dijkstra distances from a start point over a log-polar grid."""

    z0: complex
    nodes: np.ndarray      # complex positions, flattened (n_s * n_phi)
    inside: np.ndarray     # bool per node
    dist: np.ndarray       # quasihyperbolic distance per node (inf outside)
    density: np.ndarray
    shape: tuple
    edges: tuple = ()
    start_dist: float = 0.0    # boundary distance at the start point

    def to_point(self, w: complex) -> float:
        """Distance to an interior point: best node within two cells plus a straight hop."""
        w = complex(w)
        near = np.abs(self.nodes - w)
        rad = abs(w - self.z0)
        if rad <= abs(self.nodes[0] - self.z0):
            # inside the innermost ring: straight hop from the start point
            dw = float(1.0 / self.density[int(np.argmin(near))])
            return rad * 2.0 / (self.start_dist + dw)
        h = TWO_PI / self.shape[1]
        cand = np.flatnonzero(self.inside & (near <= 3 * h * rad + 1e-12))
        if cand.size == 0:
            raise UnreachableError("target point is not covered by the grid")
        # boundary distance at the target, from the nearest node
        dw = 1.0 / self.density[int(np.argmin(np.where(self.inside, near, np.inf)))]
        hop = near[cand] * 2.0 / (1.0 / self.density[cand] + dw)
        return float(np.min(self.dist[cand] + hop))

    def to_level(self, r: float) -> float:
        """Distance to ``D ∩ {|w| = r}``, interpolated on grid edges crossing the circle."""
        i, j, w = self.edges
        a_in = np.abs(self.nodes[i]) < r
        b_in = np.abs(self.nodes[j]) < r
        cross = a_in ^ b_in
        if not cross.any():
            raise UnreachableError(f"no grid edge crosses |w| = {r:g}")
        i, j, w = i[cross], j[cross], w[cross]
        inner = np.where(a_in[cross], i, j)
        outer = np.where(a_in[cross], j, i)
        ri, ro = np.abs(self.nodes[inner]), np.abs(self.nodes[outer])
        t = (r - ri) / (ro - ri)
        best = np.minimum(self.dist[inner] + t * w, self.dist[outer] + (1 - t) * w)
        best = best[np.isfinite(best)]
        if best.size == 0:
            raise UnreachableError(f"level set |w| = {r:g} unreachable on this grid")
        return float(best.min())


def distance_field(D: Domain, z0: complex | None = None, r_max: float = 10.0,
                   grid_h: float = TWO_PI / 256, inner_fraction: float = 1e-2) -> DistanceField:
    """Quasihyperbolic distances from ``z0`` to every grid node with ``|w - z0| <= r_max + |z0|``.

    ``grid_h`` is the angular spacing of the chart (relative resolution);
    the innermost ring sits at ``inner_fraction * dist(z0, boundary)``.
    """
    z0 = D.base_point if z0 is None else complex(z0)
    d0 = float(D.distance_to_boundary(z0))
    if not (d0 > 0 and bool(D.contains(z0))):
        raise ValueError("start point must be interior")
    n = 8 * max(4, int(math.ceil(TWO_PI / grid_h / 8)))
    if D.kind == "comb":
        q = 2 ** (D.params["levels"] + 2)
        n = q * max(1, int(math.ceil(n / q)))
    h = TWO_PI / n
    s_lo = math.log(inner_fraction * d0)
    s_hi = math.log(r_max + abs(z0)) + 2 * h
    ss = np.arange(s_lo, s_hi + h, h)
    offset = 0.5 if D.kind in ("comb", "slit-plane") else 0.0
    ph = (np.arange(n) + offset) * h
    Z = z0 + np.exp(ss[:, None] + 1j * ph[None, :])
    flat = Z.ravel()
    inside = np.asarray(D.contains(flat), dtype=bool)
    dens = np.zeros(flat.size)
    dens[inside] = 1.0 / np.asarray(D.distance_to_boundary(flat[inside]))
    idx = np.arange(flat.size).reshape(Z.shape)
    pairs = [
        (idx[:-1], idx[1:]),                                   # radial
        (idx, np.roll(idx, -1, axis=1)),                       # angular
        (idx[:-1], np.roll(idx, -1, axis=1)[1:]),              # diagonals
        (idx[:-1], np.roll(idx, 1, axis=1)[1:]),
    ]
    I = np.concatenate([a.ravel() for a, _ in pairs])
    J = np.concatenate([b.ravel() for _, b in pairs])
    ok = inside[I] & inside[J]
    I, J = I[ok], J[ok]
    za, zb = flat[I], flat[J]
    crossing = np.zeros(I.size, dtype=bool)
    for piece in D.pieces:
        crossing |= piece.crosses(za, zb)
    I, J = I[~crossing], J[~crossing]
    # harmonic mean of the endpoint densities
    W = np.abs(flat[I] - flat[J]) * 2.0 / (1.0 / dens[I] + 1.0 / dens[J])
    # the start point joins the innermost ring radially
    src = flat.size
    ring = idx[0][inside[idx[0]]]
    Wr = np.abs(flat[ring] - z0) * 2.0 / (d0 + 1.0 / dens[ring])
    rows = np.concatenate([I, np.full(ring.size, src)])
    cols = np.concatenate([J, ring])
    vals = np.concatenate([W, Wr])
    G = sp.coo_matrix((vals, (rows, cols)), shape=(src + 1, src + 1)).tocsr()
    dist = dijkstra(G, directed=False, indices=src)[:-1]
    return DistanceField(z0, flat, inside, dist, dens, Z.shape, (I, J, W), d0)


def quasihyperbolic_distance(D: Domain, z: complex | None = None, target=None,
                             grid_h: float = TWO_PI / 256) -> MetricBracket:
    """Quasihyperbolic distance from ``z`` to a point (complex target) or to the
    level set ``D ∩ {|w| = r}`` (real target ``r``), with the comparison bracket."""
    z = D.base_point if z is None else complex(z)
    if isinstance(target, (complex, np.complexfloating)):
        field = distance_field(D, z, abs(target - z) + abs(target), grid_h)
        return MetricBracket(field.to_point(target))
    r = float(target)
    if r <= abs(z):
        raise ValueError("level radius must exceed |z|")
    field = distance_field(D, z, r, grid_h)
    return MetricBracket(field.to_level(r))
