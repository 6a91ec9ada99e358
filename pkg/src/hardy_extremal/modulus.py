"""Extremal distance by discrete Dirichlet energy.

A problem is a weighted graph on the nodes of a tensor grid (cartesian or
log-polar). Edge conductances are dual width over edge length, which makes the
discrete energy of a nodal function equal to the Dirichlet energy of its
piecewise-linear interpolant on the right-triangle split of every cell. The
discrete minimum therefore bounds the continuous energy from above whenever
the discrete Dirichlet sets cover the continuous ones, and the returned
extremal distance is a lower bound. Conjugate problems give the matching
upper bound.

Laplace's equation and the Dirichlet energy are conformally invariant, so a
log-polar chart ``z = z0 + exp(s + i*phi)`` is solved as a flat rectangle.
"""
from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pyamg
import scipy.sparse as sp
from scipy.interpolate import PchipInterpolator
from scipy.sparse.csgraph import connected_components

from .geometry import Domain, Ray, circle_intersection

TWO_PI = 2.0 * math.pi


class SolverError(RuntimeError):
    pass


@dataclass
class ModulusProblem:
    """Graph form of a mixed Dirichlet/Neumann condenser problem.

    ``edges`` holds ``(i, j, conductance)`` rows between nodes; ``ties`` holds
    ``(i, value, conductance)`` rows linking a node to a Dirichlet value at a
    fractional distance. ``e_nodes`` carry potential 0 and ``f_nodes``
    potential 1; every other node is Neumann (free).
    """

    n_nodes: int
    edges: np.ndarray
    e_nodes: np.ndarray
    f_nodes: np.ndarray
    grid_h: float
    chart: str = "cartesian"
    ties: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    active: np.ndarray | None = None
    shape: tuple | None = None

    def validate(self):
        e = set(np.asarray(self.e_nodes).tolist())
        f = set(np.asarray(self.f_nodes).tolist())
        has_e = bool(e) or bool(np.any(self.ties[:, 1] == 0.0)) if len(self.ties) else bool(e)
        has_f = bool(f) or bool(np.any(self.ties[:, 1] == 1.0)) if len(self.ties) else bool(f)
        if not has_e or not has_f:
            raise SolverError("E and F must be nonempty")
        if e & f:
            raise SolverError("E and F must be disjoint")


@dataclass
class Solution:
    energy: float
    potential: np.ndarray
    residual: float

    @property
    def extremal_distance(self) -> float:
        return math.inf if self.energy == 0 else 1.0 / self.energy


def solve(p: ModulusProblem, tol: float = 1e-10, maxiter: int = 2000) -> Solution:
    """Minimize the discrete energy; residual is relative to the right-hand side."""
    p.validate()
    n = p.n_nodes
    i, j, c = p.edges[:, 0].astype(int), p.edges[:, 1].astype(int), p.edges[:, 2]
    fixed = np.full(n, np.nan)
    fixed[np.asarray(p.e_nodes, dtype=int)] = 0.0
    fixed[np.asarray(p.f_nodes, dtype=int)] = 1.0
    free = np.isnan(fixed)
    # free nodes with no path to any Dirichlet value make the system singular
    touched = np.zeros(n, dtype=bool)
    if len(p.ties):
        touched[p.ties[:, 0].astype(int)] = True
    L = sp.coo_matrix((np.concatenate([-c, -c, c, c]),
                       (np.concatenate([i, j, i, j]), np.concatenate([j, i, i, j]))),
                      shape=(n, n)).tocsr()
    diag_t = np.zeros(n)
    rhs_t = np.zeros(n)
    if len(p.ties):
        ti = p.ties[:, 0].astype(int)
        np.add.at(diag_t, ti, p.ties[:, 2])
        np.add.at(rhs_t, ti, p.ties[:, 2] * p.ties[:, 1])
    ncomp, lab = connected_components(L, directed=False)
    anchored = np.zeros(ncomp, dtype=bool)
    anchored[np.unique(lab[~free | touched])] = True
    floating = free & ~anchored[lab]
    if floating.any():
        # isolated pockets carry no energy; give them a constant value
        fixed[floating] = 0.0
        free = free & ~floating
    u = np.where(np.isnan(fixed), 0.0, fixed)
    A = L[free][:, free] + sp.diags(diag_t[free])
    b = -(L[free][:, ~free] @ u[~free]) + rhs_t[free]
    if A.shape[0]:
        ml = pyamg.smoothed_aggregation_solver(A.tocsr(), symmetry="symmetric")
        res: list[float] = []
        x = ml.solve(b, tol=tol * 1e-2, accel="cg", maxiter=maxiter, residuals=res)
        rel = np.linalg.norm(b - A @ x) / max(np.linalg.norm(b), 1e-300)
        if not rel < tol:
            raise SolverError(f"linear solve did not converge (relative residual {rel:.2e})")
        u[free] = x
    else:
        rel = 0.0
    energy = float(np.sum(c * (u[i] - u[j]) ** 2))
    if len(p.ties):
        ti = p.ties[:, 0].astype(int)
        energy += float(np.sum(p.ties[:, 2] * (u[ti] - p.ties[:, 1]) ** 2))
    return Solution(energy, u, float(rel))


def extremal_distance(p: ModulusProblem) -> float:
    """Extremal distance between the E and F node sets (reciprocal energy)."""
    return solve(p).extremal_distance


# ----------------------------------------------------------------------------
# tensor grids


def dual_widths(x: np.ndarray, periodic: bool, period: float = TWO_PI) -> np.ndarray:
    d = np.diff(x)
    w = np.zeros(x.size)
    if periodic:
        gap = x[0] + period - x[-1]
        w[:-1] += d / 2
        w[1:] += d / 2
        w[0] += gap / 2
        w[-1] += gap / 2
    else:
        w[:-1] += d / 2
        w[1:] += d / 2
    return w


def tensor_edges(xs: np.ndarray, ys: np.ndarray, periodic_y: bool = False,
                 period: float = TWO_PI) -> np.ndarray:
    """Edges of the grid ``xs x ys`` (node index ``i*len(ys) + j``)."""
    nx, ny = xs.size, ys.size
    idx = np.arange(nx * ny).reshape(nx, ny)
    wy = dual_widths(ys, periodic_y, period)
    wx = dual_widths(xs, False)
    dx = np.diff(xs)
    ex = np.column_stack([idx[:-1].ravel(), idx[1:].ravel(),
                          (wy[None, :] / dx[:, None]).ravel()])
    dy = np.diff(ys)
    ey = np.column_stack([idx[:, :-1].ravel(), idx[:, 1:].ravel(),
                          (wx[:, None] / dy[None, :]).ravel()])
    parts = [ex, ey]
    if periodic_y:
        gap = ys[0] + period - ys[-1]
        parts.append(np.column_stack([idx[:, -1], idx[:, 0], wx / gap]))
    return np.vstack(parts)


def graded_axis(lo: float, hi: float, h: float, ratio: float = 1.08,
                hmax: float = 0.5, fine_band: float = 0.0) -> np.ndarray:
    """Nodes from ``hi`` down to ``lo``: spacing ``h`` within ``fine_band`` of
    ``hi``, then growing geometrically up to ``hmax``."""
    pts = [hi]
    x, step = hi, h
    while x - step > lo + 1e-12:
        x -= step
        pts.append(x)
        if hi - x >= fine_band:
            step = min(step * ratio, hmax)
    if pts[-1] - lo < 0.3 * step and len(pts) > 2:
        pts.pop()
    pts.append(lo)
    return np.array(pts[::-1])


def rectangle_problem(a: float, b: float, h: float) -> ModulusProblem:
    """Rectangle ``[0,a] x [0,b]`` with E, F the sides ``x = 0`` and ``x = a``."""
    xs = np.linspace(0, a, int(round(a / h)) + 1)
    ys = np.linspace(0, b, int(round(b / h)) + 1)
    idx = np.arange(xs.size * ys.size).reshape(xs.size, ys.size)
    return ModulusProblem(idx.size, tensor_edges(xs, ys), idx[0], idx[-1], h, "cartesian",
                          shape=idx.shape)


def scaled(p: ModulusProblem, s: float) -> ModulusProblem:
    """The same problem on geometry scaled by ``s`` (conductances are scale free)."""
    return ModulusProblem(p.n_nodes, p.edges.copy(), p.e_nodes, p.f_nodes, p.grid_h * s,
                          p.chart, p.ties.copy(), p.active, p.shape)


def phi_axis(n: int, offset: float = 0.0) -> np.ndarray:
    return (np.arange(n) + offset) * (TWO_PI / n)


def annulus_problem(eps: float, r: float, h: float,
                    slits: list[tuple[float, float]] = ()) -> ModulusProblem:
    """Annulus ``eps < |z| < r`` in the log-polar chart with E, F the circles.

    ``slits`` are radial ``(angle, start_radius)`` cuts acting as Neumann
    walls; the angular grid is offset so that the slit angles fall midway
    between nodes.
    """
    n = 4 * max(8, int(math.ceil(TWO_PI / h / 4)))
    ss = np.linspace(math.log(eps), math.log(r), int(math.ceil(math.log(r / eps) / h)) + 1)
    ph = phi_axis(n, 0.5)
    edges = tensor_edges(ss, ph, periodic_y=True)
    if slits:
        edges = _cut_radial(edges, ss, ph, slits)
    idx = np.arange(ss.size * n).reshape(ss.size, n)
    return ModulusProblem(idx.size, edges, idx[0], idx[-1], h, "log-polar", shape=idx.shape)


def _cut_radial(edges, ss, ph, slits):
    n = ph.size
    ii = edges[:, 0].astype(int)
    jj = edges[:, 1].astype(int)
    si, pi_ = ii // n, ii % n
    pj = jj % n
    ang = (ph[pi_] + ((pj - pi_) % n) * (TWO_PI / n) / 2) % TWO_PI  # edge midpoint angle
    is_phi = (ii // n) == (jj // n)
    keep = np.ones(len(edges), dtype=bool)
    dphi = TWO_PI / n
    for a, rho in slits:
        rel = np.abs(np.angle(np.exp(1j * (ang - a))))
        keep &= ~(is_phi & (rel < dphi / 4) & (ss[si] >= math.log(rho) - 1e-12))
    return edges[keep]


# ----------------------------------------------------------------------------
# canonical single-arc tables


def _theta_axis(n_phi: int) -> np.ndarray:
    return np.linspace(0.0, math.pi, n_phi + 1)


def _half_disk_grid(theta_nodes: int, grid_h: float, s_min: float):
    """Half log-polar disk ``s in [s_min, 0], phi in [0, pi]``."""
    m = max(1, int(math.ceil(math.pi / grid_h / theta_nodes)))
    n_phi = theta_nodes * m
    ph = _theta_axis(n_phi)
    h = math.pi / n_phi
    ss = graded_axis(s_min, 0.0, h, ratio=1.06, hmax=0.25, fine_band=8 * h)
    return ss, ph, m


def arc_lambda_problem(theta_index: int, theta_nodes: int, grid_h: float,
                       s_min: float = -20.0) -> ModulusProblem:
    """Problem for ``lambda_tilde_D([-1, 0], arc)`` on the half domain.

    Potential 0 on the slit ``phi = pi`` and on the truncation row
    ``s = s_min`` (which only enlarges the slit side), 1 on the arc. The
    energy is half of the full-disk energy.
    """
    ss, ph, m = _half_disk_grid(theta_nodes, grid_h, s_min)
    idx = np.arange(ss.size * ph.size).reshape(ss.size, ph.size)
    k = theta_index * m
    e_nodes = np.unique(np.concatenate([idx[:, -1], idx[0]]))
    return ModulusProblem(idx.size, tensor_edges(ss, ph), e_nodes, idx[-1, : k + 1], grid_h,
                          "log-polar", shape=idx.shape)


def arc_delta_conjugate_problem(theta_index: int, theta_nodes: int, grid_h: float,
                                eps: float) -> tuple[ModulusProblem, float]:
    """Conjugate problem for ``lambda_tilde(∂B_eps, arc)`` on the half domain.

    The half domain is a quadrilateral with sides: inner circle, symmetry line
    ``phi = 0``, arc, and the slit side ``phi = pi`` together with the rest of
    the unit circle. The conjugate condenser joins the two sides that are
    Neumann in the original problem. Returns the problem and ``log(1/eps)``.
    """
    L = math.log(1.0 / eps)
    ss, ph, m = _half_disk_grid(theta_nodes, grid_h, -L)
    idx = np.arange(ss.size * ph.size).reshape(ss.size, ph.size)
    k = theta_index * m
    f_nodes = np.unique(np.concatenate([idx[:, -1], idx[-1, k:]]))
    return ModulusProblem(idx.size, tensor_edges(ss, ph), idx[:, 0], f_nodes, grid_h,
                          "log-polar", shape=idx.shape), L


def lambda_star(omega, tables: CanonicalTables | None = None):
    """Distance from the centre of the disk to a single arc of harmonic measure ``omega``
    in the slit normalization (monotone interpolation of the tables)."""
    return (tables or default_tables()).lambda_star(omega)


def delta_star(omega, tables: CanonicalTables | None = None):
    """Reduced extremal distance from the centre to a single arc of measure ``omega``."""
    return (tables or default_tables()).delta_star(omega)


@lru_cache(maxsize=4)
def default_tables(grid_h: float = 1 / 256) -> CanonicalTables:
    return build_canonical_tables(grid_h=grid_h)


TABLE_SCHEMA = 1
TABLE_COLUMNS = ["theta", "lambda", "delta", "grid_h", "eps1", "eps2"]


def _table_rows(t: CanonicalTables) -> list[str]:
    e1 = t.eps_pair[0]
    e2 = t.eps_pair[1] if len(t.eps_pair) > 1 else float("nan")
    return [",".join(repr(float(v)) for v in (th, la, de, t.grid_h, e1, e2))
            for th, la, de in zip(t.theta, t.lam, t.delta)]


def table_checksum(t: CanonicalTables) -> str:
    return hashlib.sha256("\n".join(_table_rows(t)).encode()).hexdigest()


def save_tables(t: CanonicalTables, path, seed: int | None = None) -> str:
    """Write the tables as CSV; returns the checksum recorded in the header."""
    rows = _table_rows(t)
    digest = table_checksum(t)
    head = f"# schema={TABLE_SCHEMA} checksum={digest}"
    if seed is not None:
        head += f" seed={seed}"
    with open(path, "w") as fh:
        fh.write(head + "\n" + ",".join(TABLE_COLUMNS) + "\n" + "\n".join(rows) + "\n")
    return digest


def load_tables(path) -> CanonicalTables:
    """Read tables written by :func:`save_tables`, checking schema and checksum."""
    with open(path) as fh:
        head = fh.readline().strip()
        cols = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    meta = dict(kv.split("=", 1) for kv in head.lstrip("# ").split())
    if int(meta.get("schema", -1)) != TABLE_SCHEMA:
        raise ValueError(f"unsupported table schema {meta.get('schema')}")
    if cols != TABLE_COLUMNS:
        raise ValueError("unexpected table columns")
    eps = (data[0, 4],) if math.isnan(data[0, 5]) else (data[0, 4], data[0, 5])
    t = CanonicalTables(data[:, 0], data[:, 1], data[:, 2], float(data[0, 3]), eps)
    if table_checksum(t) != meta.get("checksum"):
        raise ValueError("table checksum mismatch")
    return t


def arc_lambda(theta_index: int, theta_nodes: int, grid_h: float) -> float:
    """Lower bound for ``lambda_tilde_D([-1,0], {e^{it}: |t| <= theta})``."""
    if theta_index >= theta_nodes:
        return 0.0  # segment and arc meet at -1
    half = solve(arc_lambda_problem(theta_index, theta_nodes, grid_h)).energy
    return 1.0 / (2.0 * half)


def arc_delta_at(theta_index: int, theta_nodes: int, grid_h: float, eps: float) -> float:
    """Upper bound for ``lambda(∂B_eps, arc) - lambda(∂B_eps, ∂D)`` at fixed eps."""
    if theta_index >= theta_nodes:
        return 0.0  # arc is the whole circle: both terms coincide
    p, L = arc_delta_conjugate_problem(theta_index, theta_nodes, grid_h, eps)
    return solve(p).energy / 2.0 - L / TWO_PI


def richardson_eps(d1: float, d2: float, eps1: float, eps2: float, order: int = 2) -> float:
    """Extrapolate ``d(eps) = d0 + c*eps**order`` to ``eps -> 0`` from two samples."""
    w = eps2**order / (eps1**order - eps2**order)
    return d2 + (d2 - d1) * w


def _thomas(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray):
    """Tridiagonal solve along axis 0, vectorized over the trailing axis."""
    n = diag.shape[0]
    cp = np.zeros_like(diag)
    dp = np.zeros_like(diag)
    cp[0] = upper[0] / diag[0] if n > 1 else 0.0
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        den = diag[i] - lower[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = upper[i] / den
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / den
    x = np.zeros_like(dp)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


class TopRowForm:
    """Energy of a log-polar half-disk grid as a quadratic form in the top row.

    The angular end columns may be held at 0 and the bottom row is either
    held at 0 or left free. The grid energy separates into a one-dimensional
    angular Laplacian and one-dimensional radial problems; in a generalized
    eigenbasis of the angular part each radial problem is a tridiagonal
    solve, so ``u^T Q u`` is exactly the minimal grid energy for given
    top-row values ``u``.
    """

    def __init__(self, ss: np.ndarray, ph: np.ndarray, zero_first: bool = False,
                 zero_last: bool = False, bottom_dirichlet: bool = True):
        wphi = dual_widths(ph, False)
        dph = np.diff(ph)
        n = ph.size
        K = np.zeros((n, n))
        for j, c in enumerate(1.0 / dph):
            K[j, j] += c
            K[j + 1, j + 1] += c
            K[j, j + 1] -= c
            K[j + 1, j] -= c
        keep = np.arange(1 if zero_first else 0, n - 1 if zero_last else n)
        Kr = K[np.ix_(keep, keep)]
        wr = wphi[keep]
        sq = np.sqrt(wr)
        mu, Y = np.linalg.eigh(Kr / sq[:, None] / sq[None, :])
        mu = np.maximum(mu, 0.0)
        V = Y / sq[:, None]  # W-orthonormal eigenvectors of K v = mu W v
        c = self._radial(ss, mu, bottom_dirichlet)
        WV = wr[:, None] * V
        self.n = n
        self.keep = keep
        self.Q = (WV * c[None, :]) @ WV.T

    @staticmethod
    def _radial(ss: np.ndarray, mu: np.ndarray, bottom_dirichlet: bool) -> np.ndarray:
        """Minimal radial energy per mode with value 1 at the top."""
        g = 1.0 / np.diff(ss)
        ws = dual_widths(ss, False)
        m = ss.size
        lo = 1 if bottom_dirichlet else 0
        # unknowns a_lo .. a_{m-2}
        gl = np.concatenate([[0.0], g])  # conductance below node i
        gu = np.concatenate([g, [0.0]])  # conductance above node i
        rows = np.arange(lo, m - 1)
        diag = (gl[rows] + gu[rows])[:, None] + ws[rows, None] * mu[None, :]
        off = -g[lo: m - 2]
        rhs = np.zeros((rows.size, mu.size))
        rhs[-1] = g[-1]
        off2 = np.repeat(off[:, None], mu.size, axis=1)
        a = np.zeros((m, mu.size))
        a[-1] = 1.0
        a[lo: m - 1] = _thomas(off2, diag, off2, rhs)
        e = np.sum(g[:, None] * np.diff(a, axis=0) ** 2, axis=0)
        return e + mu * np.sum(ws[:, None] * a**2, axis=0)

    def min_energy(self, fixed: np.ndarray, values=1.0) -> float:
        """Minimum energy with top nodes ``fixed`` held at ``values``, others free."""
        fixed = np.asarray(fixed, dtype=bool)
        vals = np.broadcast_to(np.asarray(values, dtype=float), (self.n,))
        fx = fixed[self.keep]
        v = vals[self.keep]
        Q = self.Q
        u = np.where(fx, v, 0.0)
        free = ~fx
        if free.any():
            u[free] = np.linalg.solve(Q[np.ix_(free, free)], -Q[np.ix_(free, fx)] @ v[fx])
        return float(u @ Q @ u)


@dataclass
class CanonicalTables:
    """Single-arc distances on a theta grid; ``omega = theta / pi``."""

    theta: np.ndarray
    lam: np.ndarray
    delta: np.ndarray
    grid_h: float
    eps_pair: tuple[float, ...]
    delta_by_eps: np.ndarray | None = None

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        self.delta = np.asarray(self.delta, dtype=float)
        if np.any(self.theta <= 0) or np.any(self.theta > math.pi + 1e-12):
            raise ValueError("theta grid must lie in (0, pi]")
        if np.any(np.diff(self.theta) <= 0):
            raise ValueError("theta grid must be increasing")
        logt = np.log(self.theta)
        self._lam_i = PchipInterpolator(logt, self.lam, extrapolate=False)
        self._del_i = PchipInterpolator(logt, self.delta, extrapolate=False)

    def sandwich_violations(self, tol: float = 0.0) -> list[int]:
        """Indices of nodes breaking the single-arc sandwich bounds."""
        w = self.theta / math.pi
        el = np.exp(-math.pi * self.lam)
        ed = np.exp(-math.pi * self.delta)
        bad = (el > w * (1 + tol)) | (w > 8 / math.pi * el * (1 + tol))
        bad |= (w > ed * (1 + tol)) | (ed > math.pi / 2 * w * (1 + tol))
        return [int(i) for i in np.flatnonzero(bad)]

    def _lookup(self, interp, values, omega):
        om = np.asarray(omega, dtype=float)
        if np.any(~(om > 0)) or np.any(om > 1 + 1e-12):
            raise ValueError("omega must lie in (0, 1]")
        th = math.pi * np.minimum(om, 1.0)
        out = np.asarray(interp(np.log(np.maximum(th, self.theta[0]))), dtype=float)
        # below the first node the single-arc distances grow like -(1/pi) log omega
        low = th < self.theta[0]
        out = np.where(low, values[0] - np.log(th / self.theta[0]) / math.pi, out)
        return out if out.ndim else float(out)

    def lambda_star(self, omega):
        return self._lookup(self._lam_i, self.lam, omega)

    def delta_star(self, omega):
        return self._lookup(self._del_i, self.delta, omega)


def build_canonical_tables(theta_nodes: int = 64, grid_h: float = 1 / 256,
                           eps_pair: tuple[float, float] = (1e-2, 1e-3),
                           lambda_s_min: float = -20.0) -> CanonicalTables:
    """Tables of the single-arc extremal distances at ``theta = pi j / theta_nodes``.

    Discrete energies dominate continuous ones, so the slit distances are
    lower bounds and the reduced distances (solved through the conjugate
    quadrilateral) upper bounds, up to the eps extrapolation.
    """
    js = np.arange(1, theta_nodes + 1)
    theta = math.pi * js / theta_nodes
    ss, ph, m = _half_disk_grid(theta_nodes, grid_h, lambda_s_min)
    slit = TopRowForm(ss, ph, zero_last=True)
    lam = np.zeros(js.size)
    for n, j in enumerate(js):
        if j < theta_nodes:
            fixed = np.zeros(ph.size, dtype=bool)
            fixed[: j * m + 1] = True
            lam[n] = 0.5 / slit.min_energy(fixed)
    by_eps = np.zeros((len(eps_pair), js.size))
    for e, eps in enumerate(eps_pair):
        L = math.log(1.0 / eps)
        ss_e, ph_e, _ = _half_disk_grid(theta_nodes, grid_h, -L)
        # conjugate: 0 on phi = 0, 1 on phi = pi and on the top past theta.
        # Subtracting the exactly harmonic phi/pi leaves zero end columns and
        # adds L/pi to the energy.
        conj = TopRowForm(ss_e, ph_e, zero_first=True, zero_last=True, bottom_dirichlet=False)
        resid = 1.0 - ph_e / math.pi
        for n, j in enumerate(js):
            if j < theta_nodes:
                fixed = np.zeros(ph_e.size, dtype=bool)
                fixed[j * m:] = True
                energy = L / math.pi + conj.min_energy(fixed, resid)
                # the half-domain distance is the conjugate energy; halve for the disk
                by_eps[e, n] = energy / 2.0 - L / TWO_PI
    if len(eps_pair) == 2:
        delta = richardson_eps(by_eps[0], by_eps[1], *eps_pair)
    else:
        delta = by_eps[-1].copy()
    delta[js == theta_nodes] = 0.0
    return CanonicalTables(theta, lam, delta, grid_h, tuple(eps_pair), by_eps)


# ----------------------------------------------------------------------------
# reduced extremal distance of a full level set


def level_set_problems(D: Domain, r: float, eps: float, grid_h: float):
    """Two problems on ``D_r = D ∩ {|z| < r}`` minus ``B(w0, eps)``.

    Returns ``(p_arcs, p_all)``: potential 1 on the level-set arcs only
    (other boundary Neumann), and on all of ``∂D_r``.
    """
    w0 = D.base_point
    n = 4 * max(8, int(math.ceil(TWO_PI / grid_h / 4)))
    if D.kind == "comb":
        q = 2 ** (D.params["levels"] + 2)
        n = q * max(1, int(math.ceil(n / q)))
    h = TWO_PI / n
    s_hi = math.log(r + abs(w0))
    ss = np.arange(math.log(eps), s_hi + h, h)
    offset = 0.5 if D.kind in ("comb", "slit-plane") else 0.0
    ph = phi_axis(n, offset)
    Z = w0 + np.exp(ss[:, None] + 1j * ph[None, :])
    inside = np.asarray(D.contains(Z)) & (np.abs(Z) < r)
    inside[0] = True  # inner circle nodes
    if not np.all(np.asarray(D.distance_to_boundary(w0 + eps * np.exp(1j * ph))) > 0):
        raise SolverError("base point too close to the boundary for this eps")
    edges = tensor_edges(ss, ph, periodic_y=True)
    ii, jj = edges[:, 0].astype(int), edges[:, 1].astype(int)
    flat_in = inside.ravel()
    both = flat_in[ii] & flat_in[jj]
    Zf = Z.ravel()
    # edges jumping across a slit: both ends inside, chord crosses the boundary
    cand = np.flatnonzero(both)
    blocked = np.zeros(cand.size, dtype=bool)
    za, zb = Zf[ii[cand]], Zf[jj[cand]]
    for piece in D.pieces:
        blocked |= piece.crosses(za, zb)
    cut = cand[blocked]
    tcut = _chord_hit(D, Zf[ii[cut]], Zf[jj[cut]])
    both[cut] = False
    inner = edges[both]
    cc_cut = edges[cut, 2]
    slit_ties = np.vstack([
        np.column_stack([ii[cut], np.ones(cut.size), cc_cut / np.maximum(tcut, 1e-3)]),
        np.column_stack([jj[cut], np.ones(cut.size), cc_cut / np.maximum(1 - tcut, 1e-3)]),
    ])
    cross = flat_in[ii] ^ flat_in[jj]
    ci = np.where(flat_in[ii[cross]], ii[cross], jj[cross])
    co = np.where(flat_in[ii[cross]], jj[cross], ii[cross])
    cc = edges[cross, 2]
    # fractional crossing in the chart: straight segments in (s, phi)
    za, zb = Zf[ci], Zf[co]
    sa, pa = np.log(np.abs(za - w0)), np.angle(za - w0)
    sb, pb = np.log(np.abs(zb - w0)), np.angle(zb - w0)
    dp = np.angle(np.exp(1j * (pb - pa)))
    t = _chart_exit(D, w0, sa, pa, sb - sa, dp, r)
    zx = w0 + np.exp(sa + t * (sb - sa) + 1j * (pa + t * dp))
    via_circle = np.abs(zx) >= r * (1 - 1e-6)
    tie_c = cc / np.maximum(t, 1e-3)
    idx = np.arange(Z.size).reshape(Z.shape)
    e_nodes = idx[0]
    ties_arcs = np.column_stack([ci[via_circle], np.ones(via_circle.sum()), tie_c[via_circle]])
    ties_all = np.vstack([np.column_stack([ci, np.ones(ci.size), tie_c]), slit_ties])
    base = dict(n_nodes=Z.size, edges=inner, e_nodes=e_nodes, f_nodes=np.zeros(0, dtype=int),
                grid_h=h, chart="log-polar", active=inside, shape=Z.shape)
    return ModulusProblem(ties=ties_arcs, **base), ModulusProblem(ties=ties_all, **base)


def _chord_hit(D: Domain, a, b, n_iter: int = 40):
    """Fraction along the chord ``a -> b`` where it first meets a boundary piece."""
    lo = np.zeros(a.shape)
    hi = np.ones(a.shape)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        m = a + mid * (b - a)
        hit = np.zeros(a.shape, dtype=bool)
        for piece in D.pieces:
            hit |= piece.crosses(a, m)
        hi = np.where(hit, mid, hi)
        lo = np.where(hit, lo, mid)
    return 0.5 * (lo + hi)


def _chart_exit(D, w0, sa, pa, ds, dp, r, n_iter=40):
    lo = np.zeros(sa.shape)
    hi = np.ones(sa.shape)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        z = w0 + np.exp(sa + mid * ds + 1j * (pa + mid * dp))
        ok = np.asarray(D.contains(z)) & (np.abs(z) < r)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return 0.5 * (lo + hi)


def reduced_extremal_distance_full(D: Domain, r: float, eps_pair=(1e-2, 1e-3),
                                   grid_h: float = 2 * math.pi / 256,
                                   return_parts: bool = False):
    """Reduced extremal distance from the base point to the whole level set at ``r``.

    Both extremal distances are solved on ``D_r`` minus a small disk around
    the base point, for each ``eps`` in ``eps_pair``; the differences are
    extrapolated to ``eps -> 0``.
    """
    arcs = circle_intersection(D, r)
    if not arcs:
        return math.inf
    if len(arcs) == 1 and arcs[0].closed:
        return 0.0  # D_r is a disk bounded by the level circle: both terms coincide
    vals = []
    for eps in eps_pair:
        p1, p2 = level_set_problems(D, r, eps, grid_h)
        vals.append(solve(p1).extremal_distance - solve(p2).extremal_distance)
    if len(vals) == 1:
        out = vals[0]
    else:
        out = richardson_eps(vals[0], vals[1], eps_pair[0], eps_pair[1])
        if abs(vals[0] - vals[1]) > 0.05 * max(abs(vals[1]), 1e-12):
            warnings.warn(f"delta estimates at the two eps differ by more than 5% at r={r:g}")
    return (out, vals) if return_parts else out
