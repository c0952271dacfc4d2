"""
Growth of planar conformal factors and the curvature equation
==============================================================

Run with ``python3 demos/conformal_growth.py``.
"""

import numpy as np

from horogauss import catalog
from horogauss import conformal_growth as cg
from horogauss.pde import DiskGrid, solve_curvature_equation

# Model metrics u = -m log sqrt(1 + |z|^2) have K >= 0 and total curvature
# 2 pi m. Three estimates of m: a log fit of the circle average, the flux
# -r u_bar'(r) at the outer radius, and the analytic limit.
for selector in ("model:m=0.25", "model:m=0.5", "model:m=1", "round", "flat"):
    rep = cg.growth_exponent(catalog.resolve(selector).metric)
    print(f"{selector:14s} m_fit={rep.m_fit:.5f}  m_flux={rep.m_flux:.5f}  m_deriv={rep.m_deriv:.5f}")

# Inversion z -> 1/z turns the growth into a log singularity at the origin
# with coefficient 2 - m.
f = cg.invert(catalog.resolve("model:m=0.5").metric)
print("\nsingular coefficient after inversion:", round(cg.singular_coefficient(f), 5))

# Newton on -Delta u = K e^{2u} with Dirichlet data from the model solution.
# The discrete problem has more than one solution on this disk: a start just
# below u_m finds it, the harmonic extension of the boundary data does not.
f = catalog.resolve("model:m=1").functions
grid = DiskGrid(10.0, 64, 64)
X, Y = grid.xy()
ue = f["u"](X, Y)
bump = 1 - (X**2 + Y**2) / grid.radius**2
for label, u0 in (("exact - 0.1 bump", ue - 0.1 * bump), ("harmonic", None)):
    sol = solve_curvature_equation(f["K"], f["u"], grid, u0=u0)
    print(f"start {label:17s} iterations={sol.iterations:2d}  max|u - u_m|={np.max(np.abs(sol.u - ue)):.2e}")
