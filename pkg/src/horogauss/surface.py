"""Immersed hypersurfaces phi: M^n -> H^{n+1} given by parameter charts.

Sign convention: the shape operator S satisfies d(eta)(X) = -d(phi)(S X), so a
principal direction e_i with principal curvature kappa_i has
d(eta)(e_i) = -kappa_i e_i. The second fundamental form is therefore
II_ij = <d_i d_j phi, eta> (Minkowski product), and geodesic spheres oriented
by their inward normal have kappa_i = coth(r) > 0.

Charts and jets are vectorised: a parameter array of shape ``(..., n)``
yields a jet whose fields carry the same leading shape.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateJetError, SingularityError
from .minkowski import lower, minkowski_inner

TAU_JET = 1e-6
TAU_EIG = 1e-8
DEFAULT_H = 1e-4
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SurfaceChart:
    """A parametrised hypersurface in H^{n+1}.

    ``map`` sends parameters of shape ``(..., n)`` to hyperboloid points
    ``(..., n+2)``. When both ``d1`` and ``d2`` are given the chart is in
    analytic mode; ``d1`` returns ``(..., n, n+2)`` and ``d2`` returns
    ``(..., n, n, n+2)``. Otherwise jets use central differences with step
    ``h``.

    ``periodic`` marks parameter axes that wrap around; ``poles`` marks
    whether the two ends of axis 0 collapse to single points (spheres).
    ``orientation`` flips the normal.
    """

    map: Callable
    dim: int
    lower: tuple
    upper: tuple
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    h: float = DEFAULT_H
    orientation: int = 1
    periodic: tuple = ()
    poles: tuple = (False, False)
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * self.dim)
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def derivative_mode(self):
        return "analytic" if self.d1 is not None and self.d2 is not None else "finite-difference"

    @property
    def compact(self):
        return all(np.isfinite(self.lower)) and all(np.isfinite(self.upper))

    def finite_difference(self, h=DEFAULT_H):
        """The same chart with analytic derivatives dropped."""
        return replace(self, d1=None, d2=None, h=h)

    def reparametrize(self, A, b):
        """Chart q -> map(A q + b); derivatives transform by the chain rule."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        f = self.map

        def new_map(q):
            return f(np.asarray(q, dtype=float) @ A.T + b)

        d1 = d2 = None
        if self.derivative_mode == "analytic":
            g1, g2 = self.d1, self.d2

            def d1(q):
                return np.einsum("ai,...ak->...ik", A, g1(np.asarray(q, dtype=float) @ A.T + b))

            def d2(q):
                return np.einsum("ai,bj,...abk->...ijk", A, A, g2(np.asarray(q, dtype=float) @ A.T + b))

        inf = (np.inf,) * self.dim
        return replace(self, map=new_map, d1=d1, d2=d2, lower=tuple(-x for x in inf),
                       upper=inf, periodic=(False,) * self.dim, poles=(False, False))

    def wrap(self, p):
        """Reduce periodic coordinates into the chart domain."""
        p = np.array(p, dtype=float)
        for i, per in enumerate(self.periodic):
            if per:
                lo, hi = self.lower[i], self.upper[i]
                p[..., i] = lo + np.mod(p[..., i] - lo, hi - lo)
        return p


@dataclass(frozen=True)
class ImmersionJet:
    """Position, frame, normal and fundamental forms at parameter point(s)."""

    param: np.ndarray
    position: np.ndarray
    tangents: np.ndarray
    normal: np.ndarray
    first_form: np.ndarray
    second_form: np.ndarray
    hessian: np.ndarray

    @property
    def dim(self):
        return self.first_form.shape[-1]

    def residuals(self):
        """Largest violations of <eta,eta>=1, <eta,phi>=0, <eta,dphi>=0, <phi,dphi>=0."""
        eta, phi = self.normal, self.position
        return {
            "normal_unit": float(np.max(np.abs(minkowski_inner(eta, eta) - 1.0))),
            "normal_position": float(np.max(np.abs(minkowski_inner(eta, phi)))),
            "normal_tangent": float(np.max(np.abs(minkowski_inner(eta[..., None, :], self.tangents)))),
            "position_tangent": float(np.max(np.abs(minkowski_inner(phi[..., None, :], self.tangents)))),
        }


@dataclass(frozen=True)
class PrincipalData:
    """Principal curvatures (ascending) and first-form-orthonormal directions.

    ``directions[..., :, i]`` is the i-th principal direction expressed in
    parameter coordinates.
    """

    curvatures: np.ndarray
    directions: np.ndarray


@dataclass
class ConvexityReport:
    convex: bool
    nonneg_ricci: bool
    nonneg_sectional: bool
    horo_convex: bool
    weakly_horo_convex: bool
    # 0-based index (or index pair) of the first violation of each condition
    witnesses: dict

    def flags(self):
        return {
            "convex": self.convex,
            "nonneg_ricci": self.nonneg_ricci,
            "nonneg_sectional": self.nonneg_sectional,
            "horo_convex": self.horo_convex,
            "weakly_horo_convex": self.weakly_horo_convex,
        }


def _fd_derivatives(f, p, h):
    n = p.shape[-1]
    f0 = f(p)
    step = np.eye(n) * h
    d1 = np.empty(p.shape[:-1] + (n,) + f0.shape[-1:])
    d2 = np.empty(p.shape[:-1] + (n, n) + f0.shape[-1:])
    plus = [f(p + step[i]) for i in range(n)]
    minus = [f(p - step[i]) for i in range(n)]
    for i in range(n):
        d1[..., i, :] = (plus[i] - minus[i]) / (2 * h)
        d2[..., i, i, :] = (plus[i] - 2 * f0 + minus[i]) / h**2
        for j in range(i + 1, n):
            mixed = (f(p + step[i] + step[j]) - f(p + step[i] - step[j])
                     - f(p - step[i] + step[j]) + f(p - step[i] - step[j])) / (4 * h**2)
            d2[..., i, j, :] = mixed
            d2[..., j, i, :] = mixed
    return f0, d1, d2


def _jet_residual(phi, d1, d2):
    g = minkowski_inner(d1[..., :, None, :], d1[..., None, :, :])
    r1 = np.abs(minkowski_inner(phi[..., None, :], d1))
    r2 = np.abs(minkowski_inner(phi[..., None, None, :], d2) + g)
    scale = np.maximum(1.0, phi[..., 0] ** 2)
    return float(np.max(np.maximum(r1.max(axis=-1), r2.max(axis=(-1, -2))) / scale))


def _unit_normal(phi, d1):
    """Minkowski-orthogonal complement of span(phi, d_1 phi, ..., d_n phi)."""
    M = np.concatenate([phi[..., None, :], d1], axis=-2)  # (..., n+1, n+2)
    m = M.shape[-1]
    cof = np.empty(phi.shape)
    for k in range(m):
        minor = np.delete(M, k, axis=-1)
        cof[..., k] = (-1) ** (m - 1 + k) * np.linalg.det(minor)
    eta = lower(cof)
    nrm = minkowski_inner(eta, eta)
    if np.any(nrm <= 0):
        raise DegenerateJetError("normal vector is not spacelike; tangent frame degenerate")
    return eta / np.sqrt(nrm)[..., None]


def jet(chart, p, h=None):
    """Evaluate the immersion jet of ``chart`` at parameter point(s) ``p``."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != chart.dim:
        raise ValueError(f"parameter has {p.shape[-1]} coordinates, chart has {chart.dim}")
    if chart.derivative_mode == "analytic":
        phi, d1, d2 = chart.map(p), chart.d1(p), chart.d2(p)
    else:
        h = chart.h if h is None else h
        phi, d1, d2 = _fd_derivatives(chart.map, p, h)
        if _jet_residual(phi, d1, d2) > TAU_JET:
            # Richardson extrapolation of the central differences
            _, e1, e2 = _fd_derivatives(chart.map, p, 2 * h)
            d1 = (4 * d1 - e1) / 3
            d2 = (4 * d2 - e2) / 3
    g = minkowski_inner(d1[..., :, None, :], d1[..., None, :, :])
    cond = np.linalg.cond(g)
    if np.any(~np.isfinite(cond)) or np.any(cond > MAX_CONDITION):
        raise DegenerateJetError(f"first fundamental form condition number {np.max(cond):.3g}")
    eta = chart.orientation * _unit_normal(phi, d1)
    II = minkowski_inner(d2, eta[..., None, None, :])
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    return ImmersionJet(param=p, position=phi, tangents=d1, normal=eta,
                        first_form=g, second_form=II, hessian=d2)


def shape_operator(j):
    """S = g^{-1} II in parameter coordinates."""
    return np.linalg.solve(j.first_form, j.second_form)


def principal(j, tol=TAU_EIG):
    """Principal curvatures and directions from a jet (generalised eigenproblem)."""
    g = np.asarray(j.first_form, dtype=float)
    II = np.asarray(j.second_form, dtype=float)
    asym = np.max(np.abs(II - np.swapaxes(II, -1, -2)), initial=0.0)
    if asym > tol * max(1.0, np.max(np.abs(II), initial=0.0)):
        raise np.linalg.LinAlgError(f"second fundamental form not symmetric (residual {asym:.3g})")
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    B = Linv @ II @ np.swapaxes(Linv, -1, -2)
    B = 0.5 * (B + np.swapaxes(B, -1, -2))
    kappa, W = np.linalg.eigh(B)
    V = np.swapaxes(Linv, -1, -2) @ W
    # deterministic sign: largest-magnitude component of each direction positive
    idx = np.argmax(np.abs(V), axis=-2)[..., None, :]
    sign = np.sign(np.take_along_axis(V, idx, axis=-2))
    sign[sign == 0] = 1.0
    return PrincipalData(curvatures=kappa, directions=V * sign)


def classify_array(kappa, strict=False, tol=0.0):
    """Vectorised convexity flags for an array of curvatures ``(..., n)``.

    With ``strict`` the sectional condition is also imposed for i == j.
    ``tol`` relaxes the non-strict inequalities (Ricci, sectional,
    horospherical) so that equality cases computed in floating point, such
    as kappa_1 kappa_2 = 1 on an equidistant surface, are not decided by
    rounding. The strict inequalities kappa > 0 and kappa > -1 stay exact.
    """
    k = np.asarray(kappa, dtype=float)
    n = k.shape[-1]
    total = k.sum(axis=-1, keepdims=True)
    prod = k[..., :, None] * k[..., None, :]
    off = ~np.eye(n, dtype=bool) if not strict else np.ones((n, n), dtype=bool)
    return {
        "convex": np.all(k > 0, axis=-1),
        "nonneg_ricci": np.all(k * total >= n - 1 + k**2 - tol, axis=-1),
        "nonneg_sectional": np.all(np.where(off, prod >= 1 - tol, True), axis=(-1, -2)),
        "horo_convex": np.all(k >= 1 - tol, axis=-1),
        "weakly_horo_convex": np.all(k > -1, axis=-1),
    }


def classify(kappa, strict=False, tol=0.0):
    """Pointwise curvature conditions for one set of principal curvatures.

    Witnesses are 0-based: an index for the per-curvature conditions and an
    ordered pair for the sectional condition. ``tol`` is as in
    :func:`classify_array`.
    """
    k = np.asarray(kappa, dtype=float)
    if k.ndim != 1 or k.size < 2:
        raise ValueError("classify expects a 1-d list of at least two curvatures")
    n = k.size
    total = k.sum()

    def first(mask):
        bad = np.flatnonzero(~mask)
        return int(bad[0]) if bad.size else None

    pair = None
    for i in range(n):
        for j in range(n):
            if (i != j or strict) and k[i] * k[j] < 1 - tol:
                pair = (i, j) if i <= j else (j, i)
                break
        if pair:
            break
    witnesses = {
        "convex": first(k > 0),
        "nonneg_ricci": first(k * total >= n - 1 + k**2 - tol),
        "nonneg_sectional": pair,
        "horo_convex": first(k >= 1 - tol),
        "weakly_horo_convex": first(k > -1),
    }
    flags = {name: w is None for name, w in witnesses.items()}
    return ConvexityReport(witnesses={k_: v for k_, v in witnesses.items() if v is not None}, **flags)


def require_weakly_horo_convex(kappa):
    if np.any(np.asarray(kappa) <= -1):
        raise SingularityError("principal curvature <= -1: not weakly horospherically convex")
