"""Finite-difference helpers shared by the grid-based modules."""

from math import factorial

import numpy as np

from .errors import StencilError


def fd_weights(offsets, deriv):
    """Weights w with sum_k w_k f(x + offsets_k h) ~ h**deriv f^(deriv)(x).

    Solves the small Vandermonde system; fine for the <= 9 point stencils
    used here.
    """
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    if deriv >= n:
        raise StencilError(f"need more than {deriv} points for derivative {deriv}")
    A = np.vander(offsets, n, increasing=True).T
    b = np.zeros(n)
    b[deriv] = factorial(deriv)
    return np.linalg.solve(A, b)


def diff_matrix(n, h, deriv, order=6):
    """Dense (n, n) derivative matrix on a uniform grid.

    Centered stencils in the interior, shifted one-sided stencils near the
    ends, all with formal accuracy ``order``.
    """
    if order % 2:
        raise ValueError("order must be even")
    width = order + 1
    if n < width + 1:
        raise StencilError(f"grid of {n} points too small for a {width}-point stencil")
    half = width // 2
    D = np.zeros((n, n))
    for i in range(n):
        if half <= i < n - half:
            idx = np.arange(i - half, i + half + 1)
        else:
            # one extra point keeps the truncation order at the boundary
            w = width + 1
            start = 0 if i < half else n - w
            idx = np.arange(start, start + w)
        D[i, idx] = fd_weights(idx - i, deriv)
    return D / h**deriv


def apply_along(D, f, axis):
    """Apply the square matrix ``D`` along ``axis`` of ``f``."""
    f = np.moveaxis(f, axis, 0)
    out = np.tensordot(D, f, axes=(1, 0))
    return np.moveaxis(out, 0, axis)


def central_interior(f, h, deriv, axis, order=6):
    """Centered derivative along ``axis``; NaN where the stencil does not fit."""
    half = order // 2
    offsets = np.arange(-half, half + 1)
    w = fd_weights(offsets, deriv) / h**deriv
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 2 * half + 1:
        raise StencilError(f"axis of length {n} too short for {2 * half + 1}-point stencil")
    out = np.full_like(f, np.nan)
    acc = np.zeros_like(f[half:n - half])
    for k, wk in zip(offsets, w):
        acc += wk * f[half + k:n - half + k]
    out[half:n - half] = acc
    return np.moveaxis(out, 0, axis)


def periodic_derivative(f, period, deriv, axis=-1):
    """Spectral derivative of a periodic, uniformly sampled field."""
    f = np.asarray(f, dtype=float)
    n = f.shape[axis]
    k = np.fft.rfftfreq(n, d=period / (2 * np.pi * n))
    mult = (1j * k) ** deriv
    if n % 2 == 0 and deriv % 2 == 1:
        mult[-1] = 0.0  # Nyquist mode has no well-defined odd derivative
    shape = [1] * f.ndim
    shape[axis] = k.size
    F = np.fft.rfft(f, axis=axis) * mult.reshape(shape)
    return np.fft.irfft(F, n=n, axis=axis)
