"""Parallel hypersurfaces along the normal geodesics and their curvatures.

Flowing a hypersurface for time t moves each point a distance t along the
geodesic leaving it in the direction -eta (away from the convex side), so
phi_t = cosh(t) phi - sinh(t) eta. In terms of support data on the sphere
this reads

    phi_t = e^{rho+t}/2 (1 + e^{-2(rho+t)}(1 + |grad rho|^2)) (1, x)
            + e^{-(rho+t)} (0, -x + grad rho),

where x = G is the Gauss point and grad rho the round-sphere gradient of the
support function, an ambient vector tangent to the sphere at x.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import SingularityError
from .horospherical import light_cone, light_cone_derivatives
from .surface import jet

TAU_TANGENT = 1e-10


@dataclass(frozen=True)
class FlowState:
    t: float
    kappa_t: np.ndarray
    K_t: np.ndarray  # pairwise sectional curvatures kappa_i^t kappa_j^t - 1, NaN on the diagonal

    def consistency(self):
        """max |K_t(i, j) - (kappa_i^t kappa_j^t - 1)| off the diagonal."""
        k = self.kappa_t
        ref = k[..., :, None] * k[..., None, :] - 1
        return float(np.nanmax(np.abs(self.K_t - ref)))


def flow_point(rho, grad_rho, x, t):
    """Point at time t on the normal geodesic through the surface point with support data.

    Broadcasts over leading axes of ``x`` and ``grad_rho`` (shape ``(..., n+1)``).
    """
    x = np.asarray(x, dtype=float)
    grad_rho = np.asarray(grad_rho, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(np.linalg.norm(x, axis=-1) - 1) > 1e-10):
        raise ValueError("x must be a unit vector")
    if np.any(np.abs(np.einsum("...i,...i->...", x, grad_rho)) > TAU_TANGENT):
        raise ValueError("grad_rho must be tangent to the sphere at x")
    a = rho + t
    g2 = np.einsum("...i,...i->...", grad_rho, grad_rho)
    coef = 0.5 * np.exp(a) * (1 + np.exp(-2 * a) * (1 + g2))
    one = np.ones(x.shape[:-1] + (1,))
    out = coef[..., None] * np.concatenate([one, x], axis=-1)
    out[..., 1:] += np.exp(-a)[..., None] * (grad_rho - x)
    return out


def flow_curvature(kappa, t):
    """kappa^t = (kappa + tanh t) / (1 + kappa tanh t)."""
    k = np.asarray(kappa, dtype=float)
    th = np.tanh(t)
    den = 1 + k * th
    if np.any(np.abs(den) < 1e-14):
        raise SingularityError("focal point: 1 + kappa tanh t = 0")
    return (k + th) / den


def flow_sectional(K_ij, kappa_i, kappa_j, t):
    """K_ij^t = K_ij (1 - tanh^2 t) / ((1 + kappa_i tanh t)(1 + kappa_j tanh t))."""
    th = np.tanh(t)
    den = (1 + np.asarray(kappa_i, dtype=float) * th) * (1 + np.asarray(kappa_j, dtype=float) * th)
    if np.any(np.abs(den) < 1e-14):
        raise SingularityError("focal point in the sectional curvature evolution")
    return np.asarray(K_ij, dtype=float) * (1 - th * th) / den


def flow_state(kappa, t):
    k = np.asarray(kappa, dtype=float)
    kt = flow_curvature(k, t)
    K = k[..., :, None] * k[..., None, :] - 1
    Kt = flow_sectional(K, k[..., :, None], k[..., None, :], t)
    n = k.shape[-1]
    return FlowState(t=float(t), kappa_t=kt, K_t=np.where(np.eye(n, dtype=bool), np.nan, Kt))


def support_data(j):
    """(rho, grad rho, G) at the points of a jet.

    grad rho is sum_i c_i dG(d_i) with c solving <dG(d_i), dG(d_j)> c = d rho,
    i.e. the round-sphere gradient pushed into ambient coordinates.
    """
    hd = light_cone(j)
    _, drho, dG = light_cone_derivatives(j)
    M = np.einsum("...ik,...jk->...ij", dG, dG)
    c = np.linalg.solve(M, drho[..., None])[..., 0]
    grad = np.einsum("...i,...ik->...k", c, dG)
    return hd.rho, grad, hd.gauss_point


def flowed_chart(chart, t):
    """Chart of the time-t parallel surface, evaluated through :func:`flow_point`.

    The result has no analytic derivatives; its jets are finite differences.
    The normal orientation carries over unchanged.
    """

    def flowed(p):
        p = np.asarray(p, dtype=float)
        rho, grad, x = support_data(jet(chart, p))
        # remove the rounding-level normal component before the tangency check
        grad = grad - np.einsum("...i,...i->...", grad, x)[..., None] * x
        return flow_point(rho, grad, x, t)

    return replace(chart, map=flowed, d1=None, d2=None, name=f"{chart.name}@t={t:g}",
                   meta={**chart.meta, "flow_time": t})


def geodesic_flow_point(j, t):
    """cosh(t) phi - sinh(t) eta: the same parallel surface from the jet directly."""
    return np.cosh(t) * j.position - np.sinh(t) * j.normal
