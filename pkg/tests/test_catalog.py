import numpy as np
import pytest

from horogauss import catalog
from horogauss.horospherical import horo_sectional, light_cone
from horogauss.minkowski import minkowski_inner, on_hyperboloid
from horogauss.surface import classify, classify_array, jet, principal

ANALYTIC = ["horosphere", "horosphere:s=-0.7,outward=1", "horosphere:n=3", "equidistant",
            "equidistant:d=1.2,wraps=3", "sphere", "sphere:r=0.4,n=3", "sphere:n=4"]


def _interior_points(chart, count=12, seed=0):
    r = np.random.default_rng(seed)
    lo = np.where(np.isfinite(chart.lower), chart.lower, -2.0)
    hi = np.where(np.isfinite(chart.upper), chart.upper, 2.0)
    span = hi - lo
    return r.uniform(lo + 0.05 * span, hi - 0.05 * span, (count, chart.dim))


@pytest.mark.parametrize("selector", ANALYTIC)
def test_analytic_derivatives_match_differences(selector):
    chart = catalog.resolve(selector).chart
    P = _interior_points(chart)
    h = 1e-5
    d1, d2 = chart.d1(P), chart.d2(P)
    for i in range(chart.dim):
        e = np.eye(chart.dim)[i] * h
        assert np.allclose(d1[:, i], (chart.map(P + e) - chart.map(P - e)) / (2 * h), atol=1e-8)
        assert np.allclose(d2[:, i], (chart.d1(P + e) - chart.d1(P - e)) / (2 * h), atol=1e-8)


@pytest.mark.parametrize("selector", ANALYTIC + ["limacon"])
def test_charts_lie_on_hyperboloid(selector):
    chart = catalog.resolve(selector).chart
    P = _interior_points(chart)
    assert np.all(on_hyperboloid(chart.map(P)))
    if chart.derivative_mode == "analytic":
        assert np.max(np.abs(minkowski_inner(chart.map(P)[:, None, :], chart.d1(P)))) <= 1e-6


@pytest.mark.parametrize("selector", ANALYTIC)
def test_expected_record_reproduced_by_pipeline(selector):
    entry = catalog.resolve(selector)
    P = _interior_points(entry.chart, seed=3)
    j = jet(entry.chart, P)
    k = principal(j).curvatures
    assert np.allclose(k, np.sort(entry.expected["kappa"]), atol=1e-10)
    hd = light_cone(j)
    assert np.all(np.isfinite(hd.rho))
    assert entry.expected["compact"] == entry.chart.compact


def test_horosphere_entry():
    e = catalog.horosphere()
    assert e.expected == {"kappa": [1.0, 1.0], "boundary_points": 1, "embedded": True, "compact": False}
    k = principal(jet(e.chart, np.zeros(2))).curvatures
    assert np.allclose(k, 1.0)
    assert all(classify(k).flags().values())
    out = catalog.horosphere(outward=True)
    G = light_cone(jet(out.chart, _interior_points(out.chart))).gauss_point
    assert np.allclose(G, G[0], atol=1e-12)


def test_equidistant_entry():
    e = catalog.equidistant(0.5)
    P = _interior_points(e.chart)
    k = principal(jet(e.chart, P)).curvatures
    assert np.allclose(k, [0.46211715726000974, 2.163953413738653], atol=1e-12)
    assert np.max(np.abs(k[:, 0] * k[:, 1] - 1)) <= 1e-8
    flags = classify_array(k, tol=1e-12)
    assert flags["convex"].all() and flags["nonneg_sectional"].all() and not flags["horo_convex"].any()
    assert np.allclose(horo_sectional(k[:, 0], k[:, 1]), 0.0, atol=1e-12)


def test_double_wrap_is_a_covering():
    e = catalog.equidistant(0.5, wraps=2)
    P = _interior_points(e.chart)
    assert np.allclose(e.chart.map(P), e.chart.map(P + [0, np.pi]), atol=1e-12)
    assert not e.expected["embedded"]


def test_sphere_entry():
    e = catalog.geodesic_sphere(1.0)
    k = principal(jet(e.chart, _interior_points(e.chart))).curvatures
    assert np.allclose(k, 1.3130352854993312, atol=1e-12)
    assert e.chart.compact and e.chart.poles == (True, True)


def test_limacon_entry():
    e = catalog.limacon_cylinder()
    assert e.chart.derivative_mode == "finite-difference"
    node = e.expected["node_angles"]
    a, b = e.chart.map(np.array([[0.4, node[0]], [0.4, node[1]]]))
    assert np.allclose(a, b, atol=1e-12)
    k = principal(jet(e.chart, np.array(e.expected["nonconvex_param"]))).curvatures
    assert k[0] < -0.2
    assert not classify(k).convex
    for bad in ({"a": 0.5, "b": 1.0}, {"shift": 0.0}):
        with pytest.raises(ValueError):
            catalog.limacon_cylinder(**bad)


def test_model_entries():
    e = catalog.model_metric(1.0)
    assert e.functions["K"](0.0, 0.0) == 2.0
    assert e.expected["complete"] and not catalog.model_metric(1.5).expected["complete"]
    r = np.array([0.0, 1.0, 10.0])
    assert np.allclose(e.functions["u_radial"](r), e.functions["u"](r, 0 * r))
    with pytest.raises(ValueError):
        catalog.model_metric(0.0)
    assert catalog.round_metric().expected["m"] == 2.0
    assert catalog.flat_metric().expected["flat"]


def test_parameter_validation():
    with pytest.raises(ValueError):
        catalog.equidistant(0.0)
    with pytest.raises(ValueError):
        catalog.equidistant(0.5, wraps=0)
    with pytest.raises(ValueError):
        catalog.geodesic_sphere(-1.0)


@pytest.mark.parametrize("text, name, params", [
    ("equidistant:d=0.5,wraps=2", "equidistant", {"d": 0.5, "wraps": 2}),
    ("geodesic_sphere:r=2", "sphere", {"r": 2.0}),
    ("horosphere", "horosphere", {"s": 0.0}),
    (" model : m = 0.25 ", "model", {"m": 0.25}),
    ("round", "round", {}),
])
def test_selectors(text, name, params):
    e = catalog.resolve(text)
    assert e.name == name and e.params == params
    assert catalog.resolve(e.selector).params == e.params


@pytest.mark.parametrize("text", ["torus", "sphere:radius=1", "sphere:r", "sphere:r=abc", "flat:m=1"])
def test_bad_selectors(text):
    with pytest.raises(catalog.SelectorError):
        catalog.resolve(text)


def test_listing_covers_registry():
    rows = catalog.listing()
    assert [r["name"] for r in rows] == list(catalog.REGISTRY)
    assert all(r["summary"] for r in rows)
    assert catalog.resolve("model").kind == "metric" and catalog.resolve("sphere").kind == "surface"
