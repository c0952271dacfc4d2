"""Dirichlet problem for -Delta u = K e^{2u} on a disk, solved by Newton's method.

The disk is discretised on a polar grid whose radial nodes are shifted by
half a cell, r_i = (i + 1/2) dr, so the origin is never a node. Stencils that
reach across the origin use u(-r, t) = u(r, t + pi). Radial and angular
second derivatives are sixth-order finite differences.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ._fd import fd_weights
from .errors import NewtonDivergence

TAU_NEWTON = 1e-10
MAX_ITER = 50
HALF_WIDTH = 3


@dataclass(frozen=True)
class DiskGrid:
    radius: float = 10.0
    n_r: int = 128
    n_theta: int = 128

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.n_theta % 2 or self.n_theta < 8:
            raise ValueError("n_theta must be even and >= 8")
        if self.n_r < 2 * HALF_WIDTH + 1:
            raise ValueError(f"n_r must be >= {2 * HALF_WIDTH + 1}")

    @property
    def dr(self):
        return self.radius / (self.n_r + 0.5)

    @property
    def radii(self):
        return (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def theta(self):
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    def xy(self):
        R, T = np.meshgrid(self.radii, self.theta, indexing="ij")
        return R * np.cos(T), R * np.sin(T)

    def boundary_xy(self):
        return self.radius * np.cos(self.theta), self.radius * np.sin(self.theta)


@dataclass
class NewtonResult:
    u: np.ndarray
    grid: DiskGrid
    iterations: int
    residual: float
    history: list = field(default_factory=list)


def _radial_window(i, n_r):
    lo = i - HALF_WIDTH
    hi = i + HALF_WIDTH
    if hi > n_r:  # node n_r is the boundary circle
        lo, hi = n_r - 2 * HALF_WIDTH, n_r
    return np.arange(lo, hi + 1)


def laplacian_operator(grid):
    """Sparse L and boundary coupling B with (Delta u) = L u + B g at interior nodes."""
    n_r, M = grid.n_r, grid.n_theta
    dr, dt = grid.dr, 2 * np.pi / M
    r = grid.radii
    N = n_r * M
    rows, cols, vals = [], [], []
    brow, bcol, bval = [], [], []
    jj = np.arange(M)
    for i in range(n_r):
        idx = _radial_window(i, n_r)
        off = idx - i
        w = fd_weights(off, 2) / dr**2 + fd_weights(off, 1) / (dr * r[i])
        for k, wk in zip(idx, w):
            if k == n_r:
                brow.append(i * M + jj)
                bcol.append(jj)
                bval.append(np.full(M, wk))
                continue
            if k < 0:
                kk, shift = -k - 1, M // 2
            else:
                kk, shift = k, 0
            rows.append(i * M + jj)
            cols.append(kk * M + (jj + shift) % M)
            vals.append(np.full(M, wk))
        ang = np.arange(-HALF_WIDTH, HALF_WIDTH + 1)
        wt = fd_weights(ang, 2) / (dt**2 * r[i] ** 2)
        for a, wa in zip(ang, wt):
            rows.append(i * M + jj)
            cols.append(i * M + (jj + a) % M)
            vals.append(np.full(M, wa))
    L = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))
    B = sp.csr_matrix((np.concatenate(bval), (np.concatenate(brow), np.concatenate(bcol))), shape=(N, M))
    return L, B


def _as_field(value, grid):
    if callable(value):
        return np.asarray(value(*grid.xy()), dtype=float)
    arr = np.asarray(value, dtype=float)
    return np.broadcast_to(arr, (grid.n_r, grid.n_theta)).copy()


def _as_boundary(value, grid):
    if callable(value):
        return np.asarray(value(*grid.boundary_xy()), dtype=float)
    return np.broadcast_to(np.asarray(value, dtype=float), (grid.n_theta,)).copy()


def solve_curvature_equation(K, boundary, grid=None, tol=TAU_NEWTON, max_iter=MAX_ITER, u0=None):
    """Solve -Delta u = K e^{2u} in the disk with u = ``boundary`` on its rim.

    ``K`` is an array on the grid nodes or a callable K(x, y); ``boundary`` is
    an array over the rim angles or a callable g(x, y). The residual is the
    max-norm of the discrete equation multiplied through by (r/R)^2, the
    natural polar scaling that keeps near-origin rows O(1).

    Raises :class:`NewtonDivergence` when the residual does not drop below
    ``tol`` within ``max_iter`` iterations.
    """
    grid = DiskGrid() if grid is None else grid
    K = _as_field(K, grid).ravel()
    g = _as_boundary(boundary, grid)
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(g))):
        raise ValueError("K and boundary data must be finite")
    L, B = laplacian_operator(grid)
    rhs_b = B @ g
    scale = np.repeat((grid.radii / grid.radius) ** 2, grid.n_theta)
    S = sp.diags(scale)

    def residual(u):
        return scale * (L @ u + rhs_b + K * np.exp(2 * u))

    if u0 is None:
        u = splu((S @ L).tocsc()).solve(-(scale * rhs_b))  # harmonic extension
    else:
        u = _as_field(u0, grid).ravel()
    F = residual(u)
    res = float(np.max(np.abs(F)))
    history = [res]
    for it in range(1, max_iter + 1):
        if res <= tol:
            return NewtonResult(u.reshape(grid.n_r, grid.n_theta), grid, it - 1, res, history)
        J = (S @ (L + sp.diags(2 * K * np.exp(2 * u)))).tocsc()
        try:
            delta = splu(J).solve(-F)
        except RuntimeError as exc:
            raise NewtonDivergence(f"singular linearisation: {exc}", res, it) from exc
        step = 1.0
        while True:
            trial = u + step * delta
            F_trial = residual(trial)
            res_trial = float(np.max(np.abs(F_trial)))
            if np.isfinite(res_trial) and (res_trial < res or step < 1e-3 or res_trial <= tol):
                break
            step *= 0.5
        if not np.isfinite(res_trial):
            raise NewtonDivergence("Newton iterate became non-finite", res, it)
        u, F, res = trial, F_trial, res_trial
        history.append(res)
    if res <= tol:
        return NewtonResult(u.reshape(grid.n_r, grid.n_theta), grid, max_iter, res, history)
    raise NewtonDivergence(f"no convergence after {max_iter} iterations (residual {res:.3g})", res, max_iter)
