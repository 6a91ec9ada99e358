"""Supported planar domains, circle sections and crosscut decomposition.

Points are complex numbers throughout. All distance and containment helpers
accept numpy arrays of complex points and are vectorized.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

TWO_PI = 2.0 * math.pi
SNAP_REL = 1e-9


class GeometryError(ValueError):
    pass


class ResolutionError(GeometryError):
    """Grid too coarse to resolve the boundary structure."""

    def __init__(self, message: str, required_h: float):
        super().__init__(f"{message} (required grid_h <= {required_h:.3g})")
        self.required_h = required_h


def as_complex(z) -> complex | np.ndarray:
    if isinstance(z, (tuple, list)) and len(z) == 2 and not isinstance(z[0], (list, tuple)):
        return complex(z[0], z[1])
    return z


def wrap_angle(t):
    """Map angles into [0, 2pi)."""
    return np.mod(t, TWO_PI)


# ----------------------------------------------------------------------------
# boundary pieces


@dataclass(frozen=True)
class Segment:
    p: complex
    q: complex

    def __post_init__(self):
        if self.p == self.q:
            raise GeometryError("segment endpoints must be distinct")

    def distance(self, z):
        d = self.q - self.p
        t = np.clip(((z - self.p) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
        return np.abs(z - (self.p + t * d))

    def circle_angles(self, r: float) -> list[float]:
        return _line_circle(self.p, self.q - self.p, r, 0.0, 1.0)

    def crosses(self, a, b):
        return _segments_cross(a, b, self.p, self.q)


@dataclass(frozen=True)
class Ray:
    origin: complex
    direction: complex

    def __post_init__(self):
        if not math.isclose(abs(self.direction), 1.0, rel_tol=1e-12):
            object.__setattr__(self, "direction", self.direction / abs(self.direction))

    def distance(self, z):
        t = np.maximum(((z - self.origin) * np.conj(self.direction)).real, 0.0)
        return np.abs(z - (self.origin + t * self.direction))

    def circle_angles(self, r: float) -> list[float]:
        return _line_circle(self.origin, self.direction, r, 0.0, math.inf)

    def crosses(self, a, b):
        # a ray is a segment long enough to pass any query segment
        far = np.maximum(np.abs(a), np.abs(b)).max(initial=0.0) + abs(self.origin) + 1.0
        return _segments_cross(a, b, self.origin, self.origin + 4.0 * far * self.direction)


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius*exp(it)`` for ``t`` in ``[start, start+width]``."""

    center: complex
    radius: float
    start: float
    width: float

    def __post_init__(self):
        if not (0.0 < self.width <= TWO_PI + 1e-12):
            raise GeometryError("arc width must lie in (0, 2pi]")

    def contains_angle(self, t):
        return wrap_angle(t - self.start) <= self.width

    def endpoints(self) -> tuple[complex, complex]:
        c, R = self.center, self.radius
        return c + R * np.exp(1j * self.start), c + R * np.exp(1j * (self.start + self.width))

    def distance(self, z):
        w = z - self.center
        rad = np.abs(np.abs(w) - self.radius)
        if self.width >= TWO_PI:
            return rad
        e0, e1 = self.endpoints()
        ends = np.minimum(np.abs(z - e0), np.abs(z - e1))
        inside = self.contains_angle(np.angle(w))
        return np.where(inside, rad, ends)

    def circle_angles(self, r: float) -> list[float]:
        return _circle_circle(self, r)

    def crosses(self, a, b):
        # dense polyline is adequate for flood-fill blocking
        n = max(8, int(64 * self.width / TWO_PI) + 8)
        t = self.start + np.linspace(0.0, self.width, n + 1)
        pts = self.center + self.radius * np.exp(1j * t)
        hit = np.zeros(np.shape(a), dtype=bool)
        for p, q in zip(pts[:-1], pts[1:]):
            hit |= _segments_cross(a, b, p, q)
        return hit


def Circle(center: complex, radius: float) -> Arc:
    return Arc(center, radius, 0.0, TWO_PI)


def _line_circle(p, d, r, tmin, tmax) -> list[float]:
    # |p + t d| = r
    a = abs(d) ** 2
    b = 2.0 * (p * np.conj(d)).real
    c = abs(p) ** 2 - r * r
    disc = b * b - 4 * a * c
    if disc < -(SNAP_REL * r) ** 2 * a:
        return []
    disc = max(disc, 0.0)
    out = []
    for t in {(-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a)}:
        tol = SNAP_REL * r / math.sqrt(a)
        if tmin - tol <= t <= tmax + tol:
            t = min(max(t, tmin), tmax)
            out.append(float(wrap_angle(np.angle(p + t * d))))
    return out


def _circle_circle(arc: Arc, r: float) -> list[float]:
    c, R = arc.center, arc.radius
    dcen = abs(c)
    if dcen < 1e-15:
        return []  # concentric: either disjoint or coincident (not supported)
    # points z with |z| = r and |z - c| = R
    x = (r * r - R * R + dcen * dcen) / (2 * dcen)
    h2 = r * r - x * x
    if h2 < -(SNAP_REL * r) ** 2:
        return []
    h = math.sqrt(max(h2, 0.0))
    u = c / dcen
    out = []
    for s in {h, -h}:
        z = u * complex(x, s)
        if arc.contains_angle(np.angle(z - c)) or arc.width >= TWO_PI:
            out.append(float(wrap_angle(np.angle(z))))
    return out


def _segments_cross(a, b, p, q):
    """Closed segment intersection test between arrays [a,b] and a single [p,q]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    d1 = cross(q - p, a - p)
    d2 = cross(q - p, b - p)
    d3 = cross(b - a, p - a)
    d4 = cross(b - a, q - a)
    return (d1 * d2 <= 0) & (d3 * d4 <= 0) & ~((d1 == 0) & (d2 == 0) & (d3 == 0))


# ----------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Domain:
    """A simply connected planar domain described by its boundary pieces.

    ``kind`` is one of wedge, slit-plane, polygon, disk, comb. Only the
    constructors below produce valid instances.
    """

    kind: str
    pieces: tuple
    base_point: complex
    bounded: bool
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.distance_to_boundary(self.base_point) > 0 or not self.contains(self.base_point):
            raise GeometryError("base point must lie strictly inside the domain")

    def distance_to_boundary(self, z):
        z = as_complex(z)
        d = self.pieces[0].distance(z)
        for p in self.pieces[1:]:
            d = np.minimum(d, p.distance(z))
        return d

    def contains(self, z):
        z = as_complex(z)
        k = self.kind
        if k == "wedge":
            half = self.params["opening"] / 2.0
            rel = np.angle(z * np.exp(-1j * self.params["bisector"]))
            ok = (np.abs(rel) < half) & (z != 0)
            if half >= math.pi:
                ok = ok & (np.abs(rel) < math.pi)
            return ok
        if k == "disk":
            return np.abs(z - self.params["center"]) < self.params["radius"]
        if k == "polygon":
            return _point_in_polygon(z, self.params["vertices"]) & (self.distance_to_boundary(z) > 0)
        # slit plane / comb: complement of rays
        return self.distance_to_boundary(z) > 0

    def ray_count(self) -> int:
        return sum(isinstance(p, Ray) for p in self.pieces)

    @property
    def star_shaped(self) -> bool:
        return self.kind in ("wedge", "slit-plane", "comb", "disk") and self._star_about_origin()

    def _star_about_origin(self) -> bool:
        if self.kind == "disk":
            return abs(self.params["center"]) < self.params["radius"]
        if self.kind == "wedge":
            return True
        # radial rays pointing outward
        for p in self.pieces:
            if abs(p.origin) == 0 or abs(p.direction - p.origin / abs(p.origin)) > 1e-9:
                return False
        return True

    def translated_distance(self, z):
        return self.distance_to_boundary(z)


def _point_in_polygon(z, verts) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    inside = np.zeros(z.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        cond = (a.imag > y) != (b.imag > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
        inside ^= cond & (x < xint)
    return inside


def wedge(opening: float, base_point=None, bisector: float = 0.0) -> Domain:
    """Infinite sector with vertex 0 and the given opening angle."""
    if not 0 < opening < TWO_PI:
        raise GeometryError("wedge opening must lie in (0, 2pi)")
    if base_point is None:
        base_point = 0.5 * np.exp(1j * bisector)
    half = opening / 2.0
    pieces = (Ray(0j, np.exp(1j * (bisector - half))), Ray(0j, np.exp(1j * (bisector + half))))
    return Domain("wedge", pieces, complex(as_complex(base_point)), False,
                  {"opening": opening, "bisector": bisector})


def slit_plane(rays: Sequence[tuple[complex, complex]], base_point=0j) -> Domain:
    """Plane minus disjoint closed rays ``origin + t*direction, t >= 0``."""
    pieces = tuple(Ray(complex(o), complex(d)) for o, d in rays)
    if not pieces:
        raise GeometryError("slit plane needs at least one ray")
    return Domain("slit-plane", pieces, complex(as_complex(base_point)), False,
                  {"rays": [(p.origin, p.direction) for p in pieces]})


def disk(center=0j, radius: float = 1.0, base_point=None) -> Domain:
    center = complex(as_complex(center))
    if base_point is None:
        base_point = center
    return Domain("disk", (Circle(center, radius),), complex(as_complex(base_point)), True,
                  {"center": center, "radius": float(radius)})


def polygon(vertices, base_point) -> Domain:
    verts = [complex(as_complex(v)) for v in vertices]
    if len(verts) < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    pieces = tuple(Segment(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts)))
    return Domain("polygon", pieces, complex(as_complex(base_point)), True, {"vertices": verts})


def comb_level_radius(c: float, level: int) -> float:
    return math.exp(c * level)


def comb_domain(c: float = 2.0, levels: int = 3, R_max: float | None = None,
                base_point=0j) -> Domain:
    """Plane minus four rays from the unit circle plus ``2**(l+1)`` rays from
    radius ``exp(c*l)`` at every level ``1 <= l <= levels``.

    ``R_max`` bounds the radii where the domain is analyzed; it does not
    truncate the rays.
    """
    if c <= 0:
        raise GeometryError("growth exponent c must be positive")
    if levels < 1:
        raise GeometryError("comb needs levels >= 1")
    rays = [(np.exp(1j * k * math.pi / 2), np.exp(1j * k * math.pi / 2)) for k in range(4)]
    for l in range(1, levels + 1):
        a = comb_level_radius(c, l)
        for k in range(2 ** (l + 1)):
            t = math.pi / 2 ** l * (0.5 + k)
            rays.append((a * np.exp(1j * t), np.exp(1j * t)))
    angles = sorted(wrap_angle(np.angle(d)) for _, d in rays)
    assert np.all(np.diff(angles) > 1e-12), "overlapping comb rays"
    if R_max is None:
        R_max = 16.0 * comb_level_radius(c, levels + 1)
    dom = slit_plane(rays, base_point)
    return Domain("comb", dom.pieces, dom.base_point, False,
                  {"c": c, "levels": levels, "R_max": float(R_max), "rays": dom.params["rays"]})


def transition_radii(D: Domain) -> list[float]:
    """Radii where the circle section changes combinatorially (ray starts)."""
    if D.kind in ("comb", "slit-plane"):
        radii = sorted(abs(p.origin) for p in D.pieces if abs(p.origin) > 0)
        return [t for k, t in enumerate(radii) if k == 0 or t > radii[k - 1] * (1 + 1e-9)]
    if D.kind == "disk":
        return [abs(D.params["center"]) + D.params["radius"]]
    if D.kind == "polygon":
        return sorted({abs(v) for v in D.params["vertices"]})
    return []


# ----------------------------------------------------------------------------
# spec files


def domain_from_spec(spec: dict) -> Domain:
    """Build a domain from its JSON description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise GeometryError("domain spec must be an object with a 'kind' field")
    kind = spec["kind"]
    bp = spec.get("base_point")
    bp = None if bp is None else complex(*bp)
    try:
        if kind == "wedge":
            return wedge(float(spec["opening"]), bp, float(spec.get("bisector", 0.0)))
        if kind == "slit-plane":
            rays = [(complex(*r["origin"]), complex(*r["direction"])) for r in spec["rays"]]
            return slit_plane(rays, 0j if bp is None else bp)
        if kind == "disk":
            return disk(complex(*spec.get("center", [0, 0])), float(spec["radius"]), bp)
        if kind == "polygon":
            return polygon([complex(*v) for v in spec["vertices"]], bp)
        if kind == "comb":
            return comb_domain(float(spec.get("c", 4 * math.pi)), int(spec["levels"]),
                               spec.get("R_max"), 0j if bp is None else bp)
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"malformed {kind} spec: {exc!r}") from exc
    raise GeometryError(f"unknown domain kind {kind!r}")


def load_domain(path: str | Path) -> Domain:
    try:
        spec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GeometryError(f"invalid JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise GeometryError(f"cannot read {path}: {exc}") from exc
    return domain_from_spec(spec)


# ----------------------------------------------------------------------------
# circle sections


@dataclass(frozen=True)
class AngleInterval:
    """Open angular interval ``(start, start + width)``, start in [0, 2pi)."""

    start: float
    width: float
    closed: bool = False  # the full circle lies in D

    @property
    def end(self) -> float:
        return self.start + self.width

    @property
    def mid(self) -> float:
        return float(wrap_angle(self.start + self.width / 2))

    def contains(self, t) -> np.ndarray:
        if self.closed:
            return np.ones(np.shape(t), dtype=bool)
        rel = wrap_angle(np.asarray(t) - self.start)
        return (rel > 0) & (rel < self.width)

    def as_arc(self, r: float) -> Arc:
        return Arc(0j, r, self.start, self.width)


def circle_intersection(D: Domain, r: float) -> list[AngleInterval]:
    """Maximal open arcs of ``{|z| = r}`` lying in ``D``."""
    if r <= 0:
        raise GeometryError("radius must be positive")
    cuts = sorted({round(t, 15) for p in D.pieces for t in p.circle_angles(r)})
    # snap cuts closer than the tangency tolerance
    merged: list[float] = []
    for t in cuts:
        if merged and t - merged[-1] < SNAP_REL:
            continue
        merged.append(t)
    if len(merged) > 1 and merged[0] + TWO_PI - merged[-1] < SNAP_REL:
        merged.pop()
    if not merged:
        inside = bool(D.contains(complex(r, 0.0)))
        return [AngleInterval(0.0, TWO_PI, closed=True)] if inside else []
    out = []
    n = len(merged)
    for i in range(n):
        a = merged[i]
        b = merged[i + 1] if i + 1 < n else merged[0] + TWO_PI
        w = b - a
        if w <= SNAP_REL:
            continue
        if bool(D.contains(r * np.exp(1j * (a + w / 2)))):
            out.append(AngleInterval(float(a), float(w)))
    return out


# ----------------------------------------------------------------------------
# crosscut decomposition


@dataclass(frozen=True)
class Crosscut:
    radius: float
    interval: AngleInterval
    id: int
    bounds_D0: bool = True
    far_side_unbounded: bool = True

    @property
    def width(self) -> float:
        return self.interval.width

    @property
    def length(self) -> float:
        return self.radius * self.interval.width

    @property
    def midpoint(self) -> complex:
        return self.radius * np.exp(1j * self.interval.mid)

    @property
    def closed(self) -> bool:
        return self.interval.closed

    def arc(self) -> Arc:
        return self.interval.as_arc(self.radius)


@dataclass
class CrosscutDecomposition:
    radius: float
    crosscuts: list[Crosscut]
    pruned_count: int = 0
    grid_resolution: float = 0.0
    all_arcs: list[AngleInterval] = field(default_factory=list)

    def __len__(self):
        return len(self.crosscuts)


class _PolarLabels:
    """Connected components of ``D`` minus blockers on a log-polar node grid.

    Nodes sit at ``exp(s + i*phi)`` with angular spacing ``h``; radial
    spacing matches, so the relative resolution is uniform from ``rho_min``
    out to ``r_out``. A hub node stands for the small disk ``|z| < rho_min``
    when that disk lies inside ``D``.
    """

    def __init__(self, D: Domain, r_out: float, h: float, blockers, rho_min: float):
        n = 8 * max(4, int(math.ceil(TWO_PI / h / 8)))
        if D.kind == "comb":
            q = 2 ** (D.params["levels"] + 2)
            n = q * max(1, int(math.ceil(n / q)))
        self.h = TWO_PI / n
        self.n = n
        self.offset = 0.5 if D.kind in ("comb", "slit-plane") else 0.0
        self.s0 = math.log(rho_min)
        ss = np.arange(self.s0, math.log(r_out) + self.h, self.h)
        ph = (np.arange(n) + self.offset) * self.h
        Z = np.exp(ss[:, None] + 1j * ph[None, :])
        self.Z = Z
        ok = np.asarray(D.contains(Z), dtype=bool)
        idx = np.arange(Z.size).reshape(Z.shape)
        pairs = [(idx[:-1], idx[1:]), (idx, np.roll(idx, -1, axis=1))]
        rows, cols = [], []
        flat, okf = Z.ravel(), ok.ravel()
        self.blockers = blockers
        for A, B in pairs:
            ia, ib = A.ravel(), B.ravel()
            keep = okf[ia] & okf[ib]
            ia, ib = ia[keep], ib[keep]
            blocked = self._blocked(flat[ia], flat[ib])
            rows.append(ia[~blocked])
            cols.append(ib[~blocked])
        hub = Z.size
        self.has_hub = bool(D.contains(0j)) and float(D.distance_to_boundary(0j)) > rho_min
        if self.has_hub:
            ring = idx[0][ok[0]]
            clear = ~self._blocked(np.zeros(ring.size, dtype=complex), flat[ring])
            rows.append(np.full(int(clear.sum()), hub))
            cols.append(ring[clear])
        r_ = np.concatenate(rows)
        c_ = np.concatenate(cols)
        g = coo_matrix((np.ones(r_.size), (r_, c_)), shape=(hub + 1, hub + 1))
        _, lab = connected_components(g, directed=False)
        labels = lab[:-1].reshape(Z.shape)
        labels[~ok] = -1
        self.labels = labels
        self.hub_label = int(lab[-1]) if self.has_hub else -1
        self.rho_min = rho_min

    def _blocked(self, a, b):
        blocked = np.zeros(a.shape, dtype=bool)
        for piece in self.blockers:
            # cheap proximity filter before the exact crossing test
            near = piece.distance(0.5 * (a + b)) <= np.abs(b - a)
            if near.any():
                blocked[near] |= piece.crosses(a[near], b[near])
        return blocked

    def outer_labels(self) -> set[int]:
        out = set(np.unique(self.labels[-1]).tolist())
        out.discard(-1)
        return out

    def label(self, z: complex) -> int:
        """Label of a node joined to ``z`` by an unblocked straight segment (or -1)."""
        z = complex(z)
        if abs(z) < self.rho_min:
            if self.has_hub and not self._blocked(np.array([0j]), np.array([z]))[0]:
                return self.hub_label
            return -1
        i0 = int(round((math.log(abs(z)) - self.s0) / self.h))
        j0 = int(round(np.angle(z) % TWO_PI / self.h - self.offset))
        best = []
        for di in (0, -1, 1):
            for dj in (0, -1, 1):
                i, j = i0 + di, (j0 + dj) % self.n
                if not 0 <= i < self.labels.shape[0] or self.labels[i, j] < 0:
                    continue
                c = self.Z[i, j]
                best.append((abs(c - z), i, j))
        for _, i, j in sorted(best):
            if not self._blocked(np.array([z]), np.array([self.Z[i, j]]))[0]:
                return int(self.labels[i, j])
        return -1


def _side_label(D, grid: _PolarLabels, z_arc, outward: bool) -> int:
    """Label of the component just inside (or outside) the circle at ``z_arc``."""
    u = z_arc / abs(z_arc)
    step_abs = grid.h * abs(z_arc)
    for step in (0.5, 1.0, 1.5, 2.0):
        p = z_arc + (1 if outward else -1) * step * step_abs * u
        if not D.contains(p):
            continue
        lab = grid.label(p)
        if lab >= 0:
            return lab
    return -1


def crosscut_decomposition(D: Domain, r: float, grid_h: float,
                           far_window: float = 16.0, far_cells: int = 384) -> CrosscutDecomposition:
    """Arcs of ``{|z| = r} ∩ D`` on the boundary of the component ``D_0`` of
    ``D`` minus the circle that contains the base point.

    Components are found by grid flood-fill of resolution ``grid_h`` on the
    window ``|z| <= r``; far sides are classified on a coarser window of
    radius ``far_window * r``.
    """
    w0 = D.base_point
    if not abs(w0) < r:
        raise GeometryError("base point must satisfy |w0| < r")
    arcs = circle_intersection(D, r)
    if not arcs:
        return CrosscutDecomposition(r, [], 0, grid_h, [])
    if len(arcs) == 1 and arcs[0].closed:
        cc = Crosscut(r, arcs[0], 0, True, False)
        return CrosscutDecomposition(r, [cc], 0, grid_h, arcs)
    circle = Circle(0j, r)
    blockers = list(D.pieces) + [circle]
    rho_min = min(1e-3 * r, 0.5 * abs(w0)) if abs(w0) > 0 else 1e-3 * r
    if bool(D.contains(0j)):
        # the hub must stay inside D, or the core joining the sectors is lost
        rho_min = min(rho_min, 0.5 * float(D.distance_to_boundary(0j)))
    grid = _PolarLabels(D, far_window * r, grid_h / r, blockers, rho_min)
    probe = _probe_point(D, r, grid)
    if probe is None:
        raise ResolutionError("base point not resolved", 0.5 * D.distance_to_boundary(w0))
    l0 = grid.label(probe)
    on_d0 = []
    for a in arcs:
        m = int(max(3, math.ceil(a.width / grid.h)))
        ts = a.start + a.width * (np.arange(m) + 0.5) / m
        hit = False
        for t in ts:
            z = r * np.exp(1j * t)
            if D.distance_to_boundary(z) < 0.5 * grid.h * r:
                continue
            if _side_label(D, grid, z, False) == l0:
                hit = True
                break
        on_d0.append(hit)
    if not any(on_d0):
        raise ResolutionError("no arc adjacent to the base-point component",
                              min(a.width for a in arcs) * r / 4)
    edge = grid.outer_labels()
    # component graph: inner/outer labels joined by each arc
    sides = []
    for a in arcs:
        z = r * np.exp(1j * a.mid)
        sides.append((_side_label(D, grid, z, False), _side_label(D, grid, z, True)))
    crosscuts = []
    cid = 0
    for k, (a, ok) in enumerate(zip(arcs, on_d0)):
        if not ok:
            continue
        inner, outer = sides[k]
        adj: dict[int, set[int]] = {}
        for j, (u, v) in enumerate(sides):
            if j == k or u < 0 or v < 0:
                continue
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        seen = {outer}
        stack = [outer]
        while stack:
            x = stack.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        unbounded = outer >= 0 and bool(seen & edge)
        crosscuts.append(Crosscut(r, a, cid, True, unbounded))
        cid += 1
    return CrosscutDecomposition(r, crosscuts, 0, grid_h, arcs)


def _probe_point(D: Domain, r: float, grid: _PolarLabels):
    """A point of the base-point component with a reliable grid label.

    Either the base point itself, or a point joined to it by a straight segment
    that crosses no blocker.
    """
    w0 = D.base_point
    if grid.label(w0) >= 0:
        return w0
    ts = np.geomspace(max(grid.rho_min, 1e-9 * r), r, 24)
    dirs = np.exp(1j * np.linspace(0, 2 * math.pi, 64, endpoint=False))
    if abs(w0) > 0:
        # favour pointing away from the origin, where the level circle lies
        dirs = dirs[np.argsort(-(dirs * np.conj(w0)).real)]
    for t in ts:
        cand = w0 + t * dirs
        ok = (np.abs(cand) < r * (1 - 2 * grid.h)) & np.asarray(D.contains(cand), dtype=bool)
        for p in cand[ok]:
            if grid._blocked(np.array([w0]), np.array([p]))[0]:
                continue
            if grid.label(p) >= 0:
                return complex(p)
    return None
