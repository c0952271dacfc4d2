import numpy as np
import pytest
from hypothesis import given, strategies as st

from horogauss import catalog
from horogauss.errors import SingularityError
from horogauss.minkowski import minkowski_inner, on_hyperboloid
from horogauss.normal_flow import (
    flow_curvature,
    flow_point,
    flow_sectional,
    flow_state,
    flowed_chart,
    geodesic_flow_point,
    support_data,
)
from horogauss.surface import jet, principal

kappa_st = st.floats(-0.99, 20.0)
time_st = st.floats(0.0, 5.0)


def _random_support(seed):
    r = np.random.default_rng(seed)
    x = r.normal(size=3)
    x /= np.linalg.norm(x)
    g = r.normal(size=3)
    g -= (g @ x) * x
    return r.uniform(-2, 2), g, x


def test_flow_point_at_origin():
    out = flow_point(0.0, np.zeros(3), np.array([1.0, 0.0, 0.0]), 0.0)
    assert np.allclose(out, [1, 0, 0, 0], atol=1e-15)
    assert on_hyperboloid(out)


@given(st.integers(0, 10_000), st.floats(-2, 2))
def test_flow_is_unit_speed_geodesic(seed, t):
    rho, g, x = _random_support(seed)
    h = 1e-5
    p = flow_point(rho, g, x, t)
    assert on_hyperboloid(p, tol=1e-9)
    v = (flow_point(rho, g, x, t + h) - flow_point(rho, g, x, t - h)) / (2 * h)
    scale = max(1.0, p[0]) ** 2
    assert abs(minkowski_inner(v, v) - 1) <= 1e-8 * scale


def test_flow_point_rejects_bad_input():
    x = np.array([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        flow_point(0.0, np.array([0.0, 0.0, 0.1]), x, 1.0)
    with pytest.raises(ValueError):
        flow_point(0.0, np.zeros(3), 2 * x, 1.0)


@pytest.mark.parametrize("s, t", [(0.0, 0.5), (0.3, 1.0), (-0.4, 2.5)])
def test_horosphere_flows_to_horosphere(s, t):
    # the default horosphere(s) has rho = -s and G = -e_1 at w = 0
    j = jet(catalog.horosphere(s).chart, np.zeros(2))
    rho, grad, x = support_data(j)
    assert np.allclose(grad, 0, atol=1e-12) and np.isclose(rho, -s)
    moved = flow_point(rho, np.zeros(3), x, t)
    target = catalog.horosphere(s - t).chart.map(np.zeros(2))
    assert np.allclose(moved, target, atol=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7])
def test_flow_formula_matches_geodesic_offset(t):
    chart = catalog.equidistant(0.5).chart
    P = np.array([[0.2, 0.4], [-1.0, 3.0], [0.7, 5.9]])
    j = jet(chart, P)
    rho, grad, x = support_data(j)
    grad = grad - np.einsum("...i,...i->...", grad, x)[..., None] * x
    assert np.allclose(flow_point(rho, grad, x, t), geodesic_flow_point(j, t), atol=1e-10)


@pytest.mark.parametrize("kappa, t, expected", [
    (1.0, 0.7, 1.0),
    (1.0, -3.0, 1.0),
    (0.4, 0.0, 0.4),
    (2.0, np.arctanh(0.5), 1.25),
])
def test_flow_curvature_examples(kappa, t, expected):
    assert flow_curvature(kappa, t) == pytest.approx(expected, abs=1e-15)


def test_focal_points_raise():
    t = np.arctanh(0.5)
    with pytest.raises(SingularityError):
        flow_curvature(-2.0, t)
    with pytest.raises(SingularityError):
        flow_sectional(1.0, -2.0, 0.5, t)


def test_leaves_approach_horospheres():
    k = np.linspace(-0.99, 50, 500)
    assert np.max(np.abs(flow_curvature(k, 20.0) - 1)) <= 1e-8


@given(kappa_st, time_st, time_st)
def test_semigroup(k, s, t):
    assert flow_curvature(flow_curvature(k, s), t) == pytest.approx(flow_curvature(k, s + t), abs=1e-12)


@given(kappa_st, kappa_st, time_st)
def test_sectional_consistency(ki, kj, t):
    lhs = flow_sectional(ki * kj - 1, ki, kj, t)
    rhs = flow_curvature(ki, t) * flow_curvature(kj, t) - 1
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(kappa_st, kappa_st, st.floats(1e-3, 5.0))
def test_sectional_sign_preserved(ki, kj, t):
    K = ki * kj - 1
    Kt = flow_sectional(K, ki, kj, t)
    assert np.sign(Kt) == np.sign(K)
    if K >= 0:
        assert flow_curvature(ki, t) * flow_curvature(kj, t) >= 1 - 1e-12


def test_flat_stays_flat():
    t = np.linspace(0, 10, 11)
    assert np.all(flow_sectional(0.0, 0.3, 3.0, t) == 0.0)


def test_flow_state(rng):
    k = np.sort(rng.uniform(-0.9, 5, (200, 3)), axis=1)
    state = flow_state(k, 0.8)
    assert state.consistency() <= 1e-12
    assert np.all(np.isnan(state.K_t[:, [0, 1, 2], [0, 1, 2]]))


@pytest.mark.parametrize("t", [0.25, 1.0])
def test_flowed_equidistant_curvature(t):
    chart = catalog.equidistant(0.5).chart
    P = np.array([[0.0, 0.3], [0.8, 2.0], [-1.1, 4.5]])
    k0 = principal(jet(chart, P)).curvatures
    kt = principal(jet(flowed_chart(chart, t), P)).curvatures
    assert np.max(np.abs(kt - flow_curvature(k0, t))) <= 1e-5
    # parallel equidistant surfaces are again equidistant, at distance d + t
    assert np.allclose(kt, [np.tanh(0.5 + t), 1 / np.tanh(0.5 + t)], atol=1e-5)


def test_flowed_sphere_grows():
    chart = catalog.geodesic_sphere(1.0).chart
    fc = flowed_chart(chart, 0.5)
    P = np.array([[0.7, 1.0], [2.0, 4.0]])
    assert np.allclose(principal(jet(fc, P)).curvatures, 1 / np.tanh(1.5), atol=1e-5)
    assert np.allclose(fc.map(P)[:, 0], np.cosh(1.5), atol=1e-10)
    assert fc.derivative_mode == "finite-difference" and fc.meta["flow_time"] == 0.5
