import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from horogauss import catalog
from horogauss.errors import DegenerateJetError, SingularityError
from horogauss.minkowski import on_hyperboloid
from horogauss.surface import (
    ImmersionJet,
    SurfaceChart,
    classify,
    classify_array,
    jet,
    principal,
    require_weakly_horo_convex,
    shape_operator,
)

CHARTS = {
    "sphere": (catalog.geodesic_sphere(1.0), [[0.7, 1.1], [1.9, 4.0], [1.2, 0.1]]),
    "equidistant": (catalog.equidistant(0.5), [[0.0, 0.3], [1.2, 2.0], [-0.8, 5.5]]),
    "horosphere": (catalog.horosphere(0.0), [[0.0, 0.0], [1.5, -0.4], [-2.0, 3.0]]),
}


def _bare_jet(g, II):
    z = np.zeros(4)
    return ImmersionJet(param=np.zeros(2), position=z, tangents=np.zeros((2, 4)), normal=z,
                        first_form=np.asarray(g, float), second_form=np.asarray(II, float), hessian=None)


@pytest.mark.parametrize("name", CHARTS)
def test_catalog_kappa_from_jets(name):
    entry, pts = CHARTS[name]
    pd = principal(jet(entry.chart, np.array(pts)))
    assert np.allclose(pd.curvatures, np.sort(entry.expected["kappa"]), atol=1e-12)


def test_named_values():
    k = principal(jet(catalog.geodesic_sphere(1.0).chart, np.array([0.4, 0.2]))).curvatures
    assert np.allclose(k, 1.3130352854993312, atol=1e-12)
    k = principal(jet(catalog.equidistant(0.5).chart, np.array([0.4, 0.2]))).curvatures
    assert np.allclose(k, [0.46211715726000974, 2.163953413738653], atol=1e-12)


@pytest.mark.parametrize("name", CHARTS)
def test_jet_invariants(name):
    entry, pts = CHARTS[name]
    j = jet(entry.chart, np.array(pts))
    assert all(v <= 1e-10 for v in j.residuals().values())
    assert np.all(on_hyperboloid(j.position))
    assert np.all(np.linalg.eigvalsh(j.first_form) > 0)


@pytest.mark.parametrize("name", CHARTS)
def test_finite_difference_jets_agree(name):
    entry, pts = CHARTS[name]
    pts = np.array(pts)
    ka = principal(jet(entry.chart, pts)).curvatures
    kf = principal(jet(entry.chart.finite_difference(1e-4), pts)).curvatures
    assert np.max(np.abs(kf - ka) / np.abs(ka)) <= 1e-5


@pytest.mark.parametrize("name", CHARTS)
def test_principal_directions(name):
    entry, pts = CHARTS[name]
    j = jet(entry.chart, np.array(pts))
    pd = principal(j)
    V = pd.directions
    # orthonormal for g, eigenvectors of S, and d eta(e_i) = -kappa_i e_i
    assert np.allclose(np.swapaxes(V, -1, -2) @ j.first_form @ V, np.eye(2), atol=1e-10)
    SV = shape_operator(j) @ V
    assert np.allclose(SV, V * pd.curvatures[..., None, :], atol=1e-8)


def test_normal_derivative_sign():
    # d eta(e_i) = -kappa_i e_i, checked by differencing the normal of the sphere
    chart = catalog.geodesic_sphere(0.8).chart
    p, h = np.array([1.0, 2.0]), 1e-5
    j = jet(chart, p)
    pd = principal(j)
    for i in range(2):
        v = pd.directions[:, i]
        deta = (jet(chart, p + h * v).normal - jet(chart, p - h * v).normal) / (2 * h)
        e = v @ j.tangents
        assert np.allclose(deta, -pd.curvatures[i] * e, atol=1e-8)


@given(arrays(float, (2, 2), elements=st.floats(-2, 2)), arrays(float, 2, elements=st.floats(-1, 1)),
       st.integers(0, 2))
def test_reparametrization_invariance(M, b, which):
    A = np.eye(2) + 0.3 * M
    if abs(np.linalg.det(A)) < 0.2:
        return
    entry, pts = list(CHARTS.values())[which]
    chart = entry.chart
    q0 = np.array(pts[0])
    q = np.linalg.solve(A, q0 - b)
    k1 = principal(jet(chart, q0)).curvatures
    k2 = principal(jet(chart.reparametrize(A, b), q)).curvatures
    assert np.allclose(k1, k2, atol=1e-10)


def test_principal_trivial_cases():
    assert np.allclose(principal(_bare_jet(np.eye(3), np.eye(3))).curvatures, 1.0)
    pd = principal(_bare_jet(np.eye(2), np.diag([2.0, 0.5])))
    assert np.allclose(pd.curvatures, [0.5, 2.0])
    assert np.allclose(pd.directions, [[0, 1], [1, 0]])


def test_principal_rejects_asymmetric_form():
    with pytest.raises(np.linalg.LinAlgError):
        principal(_bare_jet(np.eye(2), [[1.0, 0.1], [0.0, 1.0]]))


def test_degenerate_frame_raises():
    horo = catalog.horosphere().chart.map
    # ignores its second parameter, so the tangent frame has rank one
    collapsed = SurfaceChart(lambda p: horo(np.stack([p[..., 0], 0 * p[..., 1]], axis=-1)), 2, (-1, -1), (1, 1))
    with pytest.raises(DegenerateJetError):
        jet(collapsed, np.array([0.1, 0.2]))


def test_classify_examples():
    r = classify([1, 1])
    assert all(r.flags().values()) and r.witnesses == {}

    r = classify([2, 0.6])
    assert r.convex and r.nonneg_ricci and r.nonneg_sectional and not r.horo_convex
    assert r.witnesses == {"horo_convex": 1}

    r = classify([3, 0.2])
    assert r.convex and not r.nonneg_ricci and not r.nonneg_sectional and not r.horo_convex
    # 0-based witnesses: 3 * 3.2 = 9.6 < 10 already fails the Ricci bound at index 0
    assert r.witnesses == {"nonneg_ricci": 0, "nonneg_sectional": (0, 1), "horo_convex": 1}


def test_classify_weak_horo_boundary():
    assert not classify([-1.0, 2.0]).weakly_horo_convex
    assert classify([-0.999, 2.0]).weakly_horo_convex
    with pytest.raises(SingularityError):
        require_weakly_horo_convex([-1.0, 0.0])


def test_strict_sectional_mode():
    # 0.95 * 1.2 >= 1 over distinct pairs, but 0.95^2 < 1 on the diagonal
    assert not classify([0.95, 1.2], strict=True).nonneg_sectional
    assert classify([0.95, 1.2], strict=False).nonneg_sectional


def test_tolerance_decides_equality_cases():
    k = [np.tanh(0.5), 1 / np.tanh(0.5) * (1 - 1e-15)]
    assert classify(k, tol=1e-12).nonneg_sectional
    assert classify(k, tol=1e-12).nonneg_ricci


def test_classify_array_matches_scalar(rng):
    K = rng.uniform(-1, 4, size=(500, 3))
    flags = classify_array(K)
    for i in range(len(K)):
        r = classify(K[i]).flags()
        assert all(bool(flags[name][i]) == r[name] for name in r)


def test_classify_needs_two_curvatures():
    with pytest.raises(ValueError):
        classify([1.0])


kappas = st.integers(2, 5).flatmap(lambda n: arrays(float, n, elements=st.floats(-0.999, 10)))


@given(kappas)
def test_hierarchy(k):
    f = classify(k).flags()
    if f["horo_convex"]:
        assert f["nonneg_sectional"]
    if f["convex"] and f["nonneg_sectional"]:
        assert f["nonneg_ricci"]
    if f["nonneg_ricci"]:
        assert np.all(k > 0) or np.all(k < 0)
