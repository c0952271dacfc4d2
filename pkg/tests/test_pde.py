import numpy as np
import pytest

from horogauss import catalog
from horogauss.errors import NewtonDivergence
from horogauss.pde import DiskGrid, laplacian_operator, solve_curvature_equation


def _apply(grid, f):
    L, B = laplacian_operator(grid)
    X, Y = grid.xy()
    return (L @ f(X, Y).ravel() + B @ f(*grid.boundary_xy())).reshape(grid.n_r, grid.n_theta)


def _bump(grid):
    X, Y = grid.xy()
    return 1 - (X**2 + Y**2) / grid.radius**2


def test_grid_validation():
    with pytest.raises(ValueError):
        DiskGrid(radius=-1.0)
    with pytest.raises(ValueError):
        DiskGrid(n_theta=33)
    with pytest.raises(ValueError):
        DiskGrid(n_r=4)
    g = DiskGrid(2.0, 16, 16)
    assert g.radii[0] == pytest.approx(0.5 * g.dr) and g.radii[-1] + g.dr == pytest.approx(2.0)


def test_laplacian_exact_on_r_squared():
    g = DiskGrid(3.0, 24, 16)
    assert np.max(np.abs(_apply(g, lambda x, y: x * x + y * y) - 4.0)) <= 1e-10


def test_laplacian_sixth_order():
    def harmonic(x, y):
        return x**3 - 3 * x * y * y

    errs = [np.max(np.abs(_apply(DiskGrid(10.0, n, n), harmonic))) for n in (32, 64)]
    assert errs[0] / errs[1] > 40


def test_zero_data_gives_zero():
    sol = solve_curvature_equation(0.0, 0.0, DiskGrid(5.0, 16, 16))
    assert np.max(np.abs(sol.u)) == 0.0 and sol.iterations == 0


def test_harmonic_boundary_data():
    g = DiskGrid(2.0, 32, 32)
    X, Y = g.xy()
    sol = solve_curvature_equation(0.0, lambda x, y: x * y + 0.5 * x, g)
    assert np.max(np.abs(sol.u - (X * Y + 0.5 * X))) <= 1e-5


@pytest.mark.parametrize("name", ["model:m=0.5", "model:m=1", "round"])
def test_manufactured_solution_small_grid(name):
    f = catalog.resolve(name).functions
    g = DiskGrid(10.0, 64, 64)
    X, Y = g.xy()
    ue = f["u"](X, Y)
    sol = solve_curvature_equation(f["K"], f["u"], g, u0=ue - 0.1 * _bump(g))
    assert sol.residual <= 1e-10 and sol.iterations <= 12
    assert np.max(np.abs(sol.u - ue)) <= 1e-4
    assert sol.history[0] > sol.history[-1]


def test_manufactured_error_converges():
    f = catalog.resolve("model:m=0.5").functions
    errs = []
    for n in (32, 64):
        g = DiskGrid(10.0, n, n)
        ue = f["u"](*g.xy())
        errs.append(np.max(np.abs(solve_curvature_equation(f["K"], f["u"], g, u0=ue - 0.1 * _bump(g)).u - ue)))
    assert errs[0] / errs[1] > 16


def test_harmonic_start_finds_a_lower_solution():
    # the Dirichlet problem for -Delta u = K e^{2u} is not unique on this disk:
    # Newton from the harmonic extension converges to a second solution below u_m
    f = catalog.resolve("model:m=0.5").functions
    g = DiskGrid(10.0, 48, 48)
    ue = f["u"](*g.xy())
    low = solve_curvature_equation(f["K"], f["u"], g)
    assert low.residual <= 1e-10
    assert np.all(low.u <= ue + 1e-9)
    assert np.max(ue - low.u) > 0.5


def test_newton_divergence_reports_state():
    f = catalog.resolve("round").functions
    g = DiskGrid(10.0, 16, 16)
    with pytest.raises(NewtonDivergence) as info:
        solve_curvature_equation(f["K"], f["u"], g, max_iter=1, tol=1e-14)
    assert info.value.iterations == 1 and info.value.residual > 0


def test_rejects_nonfinite_data():
    with pytest.raises(ValueError):
        solve_curvature_equation(np.nan, 0.0, DiskGrid(1.0, 16, 16))
