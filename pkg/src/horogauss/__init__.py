"""Hypersurfaces in hyperbolic space through their hyperbolic Gauss map.

Submodules:

- ``minkowski``: Minkowski inner product, hyperquadrics, Poincare ball.
- ``surface``: charts, jets, principal curvatures, convexity classes.
- ``horospherical``: light cone map, support function, horospherical metric.
- ``normal_flow``: parallel surfaces and their exact curvature evolution.
- ``conformal_growth``: planar conformal metrics, growth exponent, Newton solver.
- ``catalog``: closed-form model surfaces and metrics.
- ``embed_probe``: meshes, self-intersection, Gauss injectivity, ideal boundary.
"""

from .minkowski import (
    HyperquadricTag,
    classify_quadric,
    from_ball,
    hyperbolic_distance,
    minkowski_inner,
    to_ball,
)
from .surface import ImmersionJet, PrincipalData, SurfaceChart, classify, jet, principal
from .horospherical import HorosphericalData, horo_sectional, light_cone, metric_relation_residual
from .normal_flow import flow_curvature, flow_point, flow_sectional
from .conformal_growth import PlaneConformalGrid, PolarGrid, growth_exponent, plane_curvature
from .catalog import CatalogEntry, resolve

__version__ = "0.1.0"

__all__ = [
    "HyperquadricTag", "classify_quadric", "from_ball", "hyperbolic_distance", "minkowski_inner", "to_ball",
    "ImmersionJet", "PrincipalData", "SurfaceChart", "classify", "jet", "principal",
    "HorosphericalData", "horo_sectional", "light_cone", "metric_relation_residual",
    "flow_curvature", "flow_point", "flow_sectional",
    "PlaneConformalGrid", "PolarGrid", "growth_exponent", "plane_curvature",
    "CatalogEntry", "resolve",
]
