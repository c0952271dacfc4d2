"""
Support functions and the curvature of the horospherical metric
================================================================

Run with ``python3 demos/horospherical_metric.py``.
"""

import numpy as np

from horogauss import catalog, io
from horogauss.horospherical import (
    horo_sectional,
    light_cone,
    local_support,
    p_field_trace,
    p_tensor_from_support,
    support_on_patch,
)
from horogauss.surface import jet

# psi = phi - eta is a null vector e^rho (1, G): rho is the support function
# and G the hyperbolic Gauss map.
chart = catalog.geodesic_sphere(1.0).chart
hd = light_cone(jet(chart, np.array([[0.7, 1.0], [2.0, 4.0]])))
print("sphere r=1: rho =", hd.rho, " G =", np.round(hd.gauss_point, 4).tolist())


def trace_check(sf):
    """Largest gap between tr P (from rho alone) and K of g_h (from kappa)."""
    tr = p_field_trace(p_tensor_from_support(sf.rho, sf.patch), sf.rho, sf.patch)
    K = horo_sectional(sf.kappa[..., 0], sf.kappa[..., 1])
    inner = sf.patch.interior()
    return np.max(np.abs(tr[inner] - K[inner])), np.median(K[inner])


# Invert G on a lon/lat patch of the sphere to sample rho there, then compare
# the two routes to the curvature of g_h = e^{2 rho} G*g.
for selector in ("horosphere", "equidistant:d=0.5", "sphere:r=1"):
    sf = support_on_patch(catalog.resolve(selector).chart)
    err, K = trace_check(sf)
    print(f"{selector:20s} K_h ~ {K:+.6f}   |tr P - K_h| <= {err:.1e}")

# The limacon cylinder's Gauss map is not injective, so rho is sampled on one
# sheet at a time: the outer wall and the inner loop (where K_h < 0).
limacon = catalog.limacon_cylinder().chart
for t0 in (0.0, 2.0):
    err, K = trace_check(local_support(limacon, [0.0, t0]))
    print(f"limacon sheet t~{t0:.0f}     K_h ~ {K:+.6f}   |tr P - K_h| <= {err:.1e}")

sf = support_on_patch(chart)
io.write_patch_csv(sf.patch, {"rho": sf.rho}, "sphere_support.csv")
print("\nwrote sphere_support.csv")
