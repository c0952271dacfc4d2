import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial.transform import Rotation

from horogauss.errors import DimensionError, QuadricError
from horogauss.minkowski import (
    HyperquadricTag,
    classify_quadric,
    from_ball,
    hyperbolic_distance,
    minkowski_inner,
    on_hyperboloid,
    spacetime_vector,
    to_ball,
)

finite = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize("x, expected", [
    ((1, 0, 0, 0), -1.0),
    ((0, 1, 0, 0), 1.0),
    ((1, 1, 0, 0), 0.0),
])
def test_inner_examples(x, expected):
    assert minkowski_inner(x, x) == expected


@pytest.mark.parametrize("x, tag", [
    ((1, 0, 0, 0), HyperquadricTag.HYPERBOLIC),
    ((0, 0, 0, 1), HyperquadricTag.DE_SITTER),
    ((2, 2, 0, 0), HyperquadricTag.NULL_CONE),
    ((-1, 0, 0, 0), HyperquadricTag.NONE),
    ((0.5, 0, 0, 0), HyperquadricTag.NONE),
])
def test_classify_examples(x, tag):
    assert classify_quadric(x) is tag


def test_classify_rejects_nonpositive_tolerance():
    with pytest.raises(ValueError):
        classify_quadric((1, 0, 0, 0), tol=0.0)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        minkowski_inner((1, 0, 0), (1, 0, 0, 0))
    with pytest.raises(DimensionError):
        spacetime_vector((1, 0, 0))
    with pytest.raises(ValueError):
        spacetime_vector((np.nan, 0, 0, 0))


@given(arrays(float, 5, elements=finite), arrays(float, 5, elements=finite), arrays(float, 5, elements=finite))
def test_inner_is_symmetric_bilinear(x, y, z):
    assert np.isclose(minkowski_inner(x, y), minkowski_inner(y, x))
    assert np.isclose(minkowski_inner(2 * x + z, y), 2 * minkowski_inner(x, y) + minkowski_inner(z, y), atol=1e-9)


def test_ball_examples():
    assert np.allclose(to_ball([1, 0, 0, 0]), 0)
    x = [np.cosh(1), np.sinh(1), 0, 0]
    assert np.allclose(to_ball(x), [np.tanh(0.5), 0, 0], atol=1e-15)
    assert np.allclose(from_ball(to_ball(x)), x, atol=1e-14)


def test_to_ball_rejects_off_hyperboloid():
    with pytest.raises(QuadricError):
        to_ball([1, 1, 0, 0])
    with pytest.raises(QuadricError):
        from_ball([0.6, 0.8, 0.0])


def test_ball_round_trip_bulk(rng):
    for n in (2, 4, 8):
        d = rng.normal(size=(10_000, n + 1))
        p = d / np.linalg.norm(d, axis=1, keepdims=True) * rng.uniform(0, 0.999, (10_000, 1)) ** (1 / (n + 1))
        x = from_ball(p)
        assert np.all(on_hyperboloid(x))
        assert np.max(np.abs(to_ball(x) - p)) <= 1e-12


def test_distance_matches_ball_radius():
    # distance from O to a ball point at Euclidean radius a is 2 artanh(a)
    a = np.linspace(0, 0.99, 20)
    p = np.stack([a, 0 * a, 0 * a], axis=1)
    assert np.allclose(hyperbolic_distance(from_ball(p), [1, 0, 0, 0]), 2 * np.arctanh(a), atol=1e-9)


@given(st.sampled_from([1.0, 0.0, -1.0, 0.3]), st.integers(0, 2**32 - 1))
def test_classification_invariant_under_spatial_rotation(q, seed):
    r = np.random.default_rng(seed)
    spatial = r.normal(size=3)
    spatial /= np.linalg.norm(spatial)
    x0 = 1.7
    # choose |spatial| so that <x, x> = q
    s = np.sqrt(x0**2 + q)
    x = np.concatenate([[x0], s * spatial])
    R = Rotation.random(random_state=seed).as_matrix()
    y = np.concatenate([[x0], R @ x[1:]])
    assert classify_quadric(x) is classify_quadric(y)
