"""Minkowski spacetime R^{1,n+1} and its hyperquadrics.

Spacetime vectors are plain numpy arrays whose last axis holds the
coordinates ``(x0, x1, ..., x_{n+1})``. Every function here broadcasts over
leading axes, so a batch of points is just an array of shape ``(..., n+2)``.
"""

from enum import Enum

import numpy as np

from .errors import DimensionError, QuadricError

TAU_QUAD = 1e-9


class HyperquadricTag(Enum):
    HYPERBOLIC = "hyperbolic"
    DE_SITTER = "de_sitter"
    NULL_CONE = "null_cone"
    NONE = "none"


def spacetime_vector(coords):
    """Validate and return ``coords`` as a float array (n >= 2, finite)."""
    x = np.asarray(coords, dtype=float)
    if x.ndim == 0 or x.shape[-1] < 4:
        raise DimensionError(f"spacetime vectors need n + 2 >= 4 coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("spacetime vector has non-finite entries")
    return x


def minkowski_inner(x, y):
    """-x0*y0 + sum_i x_i*y_i, broadcast over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise DimensionError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return np.einsum("...i,...i->...", x[..., 1:], y[..., 1:]) - x[..., 0] * y[..., 0]


def minkowski_norm_sq(x):
    return minkowski_inner(x, x)


def lower(x):
    """Apply the metric J = diag(-1, 1, ..., 1)."""
    x = np.array(x, dtype=float)
    x[..., 0] *= -1.0
    return x


def classify_quadric(x, tol=TAU_QUAD):
    """Which of H^{n+1}, S^{1,n}, N_+^{n+1} the single vector ``x`` lies on."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    x = np.asarray(x, dtype=float)
    q = float(minkowski_inner(x, x))
    if abs(q + 1.0) <= tol and x[0] > 0:
        return HyperquadricTag.HYPERBOLIC
    if abs(q - 1.0) <= tol:
        return HyperquadricTag.DE_SITTER
    if abs(q) <= tol and x[0] > 0:
        return HyperquadricTag.NULL_CONE
    return HyperquadricTag.NONE


def on_hyperboloid(x, tol=TAU_QUAD):
    """Vectorised membership test for H^{n+1}, relative to the size of x."""
    x = np.asarray(x, dtype=float)
    q = minkowski_inner(x, x)
    scale = np.maximum(1.0, x[..., 0] ** 2)
    return (np.abs(q + 1.0) <= tol * scale) & (x[..., 0] > 0)


def to_ball(x, tol=TAU_QUAD):
    """Hyperboloid point(s) -> Poincare ball, (x1..x_{n+1}) / (1 + x0)."""
    x = np.asarray(x, dtype=float)
    if not np.all(on_hyperboloid(x, tol)):
        raise QuadricError("to_ball expects points on the hyperboloid")
    return x[..., 1:] / (1.0 + x[..., :1])


def from_ball(p):
    """Inverse of :func:`to_ball`."""
    p = np.asarray(p, dtype=float)
    s = np.einsum("...i,...i->...", p, p)[..., None]
    if np.any(s >= 1.0):
        raise QuadricError("ball points must have norm < 1")
    return np.concatenate([(1.0 + s) / (1.0 - s), 2.0 * p / (1.0 - s)], axis=-1)


def hyperbolic_distance(x, y):
    return np.arccosh(np.maximum(1.0, -minkowski_inner(x, y)))
