"""Closed-form model surfaces and planar metrics.

Every surface entry is a :class:`~horogauss.surface.SurfaceChart` plus the
quantities it is known to have (principal curvatures, embeddedness, number of
ideal boundary points). The expectations are only ever checked by running the
generic pipeline on the chart; nothing downstream reads them as shortcuts.

Entries are addressable by selector strings such as
``"equidistant:d=0.5,wraps=2"`` through :func:`resolve`.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import conformal_growth as cg
from .surface import SurfaceChart, jet
from .minkowski import minkowski_inner


@dataclass
class CatalogEntry:
    name: str
    params: dict
    chart: Optional[SurfaceChart] = None
    metric: Optional[cg.PlaneConformalGrid] = None
    functions: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)

    @property
    def selector(self):
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())

    @property
    def kind(self):
        return "surface" if self.chart is not None else "metric"


def _orient(chart, p_ref, wanted):
    """Pick the chart orientation whose normal at ``p_ref`` agrees with ``wanted``."""
    j = jet(chart, np.asarray(p_ref, dtype=float))
    sign = 1 if minkowski_inner(j.normal, wanted(np.asarray(p_ref, dtype=float))) > 0 else -1
    return SurfaceChart(**{**chart.__dict__, "orientation": sign * chart.orientation})


# --- horosphere -------------------------------------------------------------

def horosphere(signed_distance=0.0, n=2, outward=False):
    """Horosphere centred at the ideal point e_1, at signed distance s from O.

    The horosphere is {x : x0 - x1 = e^{-s}}; the chart w in R^n is an
    isometry from flat R^n. With the default orientation (normal towards the
    centre) kappa_i = 1 and the Gauss map is a diffeomorphism onto S^n minus
    the centre. With ``outward=True`` kappa_i = -1 and the Gauss map and light
    cone map are constant, psi = e^s (1, e_1).
    """
    c = float(np.exp(-signed_distance))
    m = n + 2

    def phi(w):
        w = np.asarray(w, dtype=float)
        q = 1.0 + np.einsum("...i,...i->...", w, w)
        out = np.empty(w.shape[:-1] + (m,))
        out[..., 0] = 0.5 * (c + q / c)
        out[..., 1] = 0.5 * (q / c - c)
        out[..., 2:] = w
        return out

    def d1(w):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape[:-1] + (n, m))
        out[..., :, 0] = w / c
        out[..., :, 1] = w / c
        out[..., :, 2:] = np.eye(n)
        return out

    def d2(w):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape[:-1] + (n, n, m))
        out[..., :, :, 0] = np.eye(n) / c
        out[..., :, :, 1] = np.eye(n) / c
        return out

    ell = np.zeros(m)
    ell[0] = ell[1] = 1.0
    chart = SurfaceChart(phi, n, (-np.inf,) * n, (np.inf,) * n, d1=d1, d2=d2, name="horosphere")
    if outward:
        chart = _orient(chart, np.zeros(n), lambda w: phi(w) - ell / c)
    else:
        chart = _orient(chart, np.zeros(n), lambda w: ell / c - phi(w))
    k = -1.0 if outward else 1.0
    return CatalogEntry(
        "horosphere",
        {"s": signed_distance, **({"n": n} if n != 2 else {}), **({"outward": 1} if outward else {})},
        chart=chart,
        expected={"kappa": [k] * n, "boundary_points": 1, "embedded": True, "compact": False},
    )


# --- equidistant surface ----------------------------------------------------

def equidistant(d=0.5, wraps=1):
    """Surface at distance d from the geodesic t -> (cosh t, sinh t, 0, 0) in H^3.

    Chart (s, theta) -> (cosh s cosh d, sinh s cosh d, sinh d cos(k theta),
    sinh d sin(k theta)) with k = ``wraps``; k > 1 is a k-fold covering map.
    Oriented towards the axis so that kappa = (tanh d, coth d).
    """
    if d <= 0:
        raise ValueError("distance d must be positive")
    wraps = int(wraps)
    if wraps < 1:
        raise ValueError("wraps must be >= 1")
    ch, sh = np.cosh(d), np.sinh(d)

    def phi(p):
        p = np.asarray(p, dtype=float)
        s, t = p[..., 0], wraps * p[..., 1]
        return np.stack([np.cosh(s) * ch, np.sinh(s) * ch, sh * np.cos(t), sh * np.sin(t)], axis=-1)

    def d1(p):
        p = np.asarray(p, dtype=float)
        s, t = p[..., 0], wraps * p[..., 1]
        z = np.zeros_like(s)
        ds = np.stack([np.sinh(s) * ch, np.cosh(s) * ch, z, z], axis=-1)
        dt = np.stack([z, z, -wraps * sh * np.sin(t), wraps * sh * np.cos(t)], axis=-1)
        return np.stack([ds, dt], axis=-2)

    def d2(p):
        p = np.asarray(p, dtype=float)
        s, t = p[..., 0], wraps * p[..., 1]
        z = np.zeros_like(s)
        ss = np.stack([np.cosh(s) * ch, np.sinh(s) * ch, z, z], axis=-1)
        tt = np.stack([z, z, -wraps**2 * sh * np.cos(t), -wraps**2 * sh * np.sin(t)], axis=-1)
        st = np.zeros_like(ss)
        return np.stack([np.stack([ss, st], axis=-2), np.stack([st, tt], axis=-2)], axis=-3)

    def axis_normal(p):
        s, t = p[..., 0], wraps * p[..., 1]
        return -np.stack([np.cosh(s) * sh, np.sinh(s) * sh, ch * np.cos(t), ch * np.sin(t)], axis=-1)

    chart = SurfaceChart(phi, 2, (-np.inf, 0.0), (np.inf, 2 * np.pi), d1=d1, d2=d2,
                         periodic=(False, True), name="equidistant")
    chart = _orient(chart, np.array([0.0, 0.3]), axis_normal)
    return CatalogEntry(
        "equidistant",
        {"d": d, "wraps": wraps},
        chart=chart,
        expected={"kappa": [float(np.tanh(d)), float(1 / np.tanh(d))], "boundary_points": 2,
                  "embedded": wraps == 1, "compact": False},
    )


# --- geodesic sphere --------------------------------------------------------

def _hyperspherical_factors(n):
    """Factor table F[k][l] in {"sin", "cos", "one"} with omega_k = prod_l F[k][l](t_l)."""
    table = []
    for k in range(n + 1):
        row = []
        for l in range(n):
            if k == n:
                row.append("sin" if l < n - 1 else "sin")
            elif l < k:
                row.append("sin")
            elif l == k:
                row.append("cos")
            else:
                row.append("one")
        table.append(row)
    return table


_DERIV = {
    ("sin", 0): np.sin, ("sin", 1): np.cos, ("sin", 2): lambda t: -np.sin(t),
    ("cos", 0): np.cos, ("cos", 1): lambda t: -np.sin(t), ("cos", 2): lambda t: -np.cos(t),
    ("one", 0): np.ones_like, ("one", 1): np.zeros_like, ("one", 2): np.zeros_like,
}


def _sphere_omega(t, orders):
    """d^{orders} omega / dt, where orders[l] is the derivative order in t_l."""
    n = t.shape[-1]
    table = _hyperspherical_factors(n)
    out = np.empty(t.shape[:-1] + (n + 1,))
    for k in range(n + 1):
        val = np.ones(t.shape[:-1])
        for l in range(n):
            val = val * _DERIV[(table[k][l], orders[l])](t[..., l])
        out[..., k] = val
    return out


def geodesic_sphere(r=1.0, n=2):
    """Sphere of radius r about O in H^{n+1}, hyperspherical angle chart.

    Angles t_0..t_{n-2} lie in [0, pi] and t_{n-1} in [0, 2 pi). Oriented by
    the inward normal, so kappa_i = coth r.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    ch, sh = np.cosh(r), np.sinh(r)

    def phi(t):
        t = np.asarray(t, dtype=float)
        om = _sphere_omega(t, [0] * n)
        return np.concatenate([np.full(t.shape[:-1] + (1,), ch), sh * om], axis=-1)

    def d1(t):
        t = np.asarray(t, dtype=float)
        parts = []
        for i in range(n):
            orders = [0] * n
            orders[i] = 1
            om = _sphere_omega(t, orders)
            parts.append(np.concatenate([np.zeros(t.shape[:-1] + (1,)), sh * om], axis=-1))
        return np.stack(parts, axis=-2)

    def d2(t):
        t = np.asarray(t, dtype=float)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                orders = [0] * n
                orders[i] += 1
                orders[j] += 1
                om = _sphere_omega(t, orders)
                row.append(np.concatenate([np.zeros(t.shape[:-1] + (1,)), sh * om], axis=-1))
            rows.append(np.stack(row, axis=-2))
        return np.stack(rows, axis=-3)

    lower = (0.0,) * n
    upper = (np.pi,) * (n - 1) + (2 * np.pi,)
    periodic = (False,) * (n - 1) + (True,)
    chart = SurfaceChart(phi, n, lower, upper, d1=d1, d2=d2, periodic=periodic,
                         poles=(True, True) if n == 2 else (False, False), name="geodesic_sphere")
    ref = np.full(n, 1.0)

    def inward(t):
        om = _sphere_omega(t, [0] * n)
        return -np.concatenate([np.full(t.shape[:-1] + (1,), sh), ch * om], axis=-1)

    chart = _orient(chart, ref, inward)
    k = float(1 / np.tanh(r))
    return CatalogEntry(
        "sphere",
        {"r": r, **({"n": n} if n != 2 else {})},
        chart=chart,
        expected={"kappa": [k] * n, "boundary_points": 0, "embedded": True, "compact": True},
    )


# --- limacon cylinder -------------------------------------------------------

def _cosh_sqrt(q):
    small = q < 1e-8
    qs = np.where(small, 0.0, q)
    return np.where(small, 1 + q / 2 + q**2 / 24, np.cosh(np.sqrt(qs)))


def _sinhc_sqrt(q):
    small = q < 1e-8
    qs = np.where(small, 1.0, q)
    return np.where(small, 1 + q / 6 + q**2 / 120, np.sinh(np.sqrt(qs)) / np.sqrt(qs))


def limacon_cylinder(a=1.0, b=0.5, shift=0.3):
    """Cylinder along a geodesic over a limacon with an inner loop (a > b > 0).

    The cross-section in the normal plane of the geodesic is the limacon
    (y, z) = (b + a cos t)(cos t, sin t) + (shift, 0), mapped by the normal
    exponential map; (s, y, z) goes to (cosh s cosh R, sinh s cosh R,
    sinh(R)/R * (y, z)) with R = |(y, z)|. The curve crosses itself at
    (shift, 0) (cos t = -b/a), so the surface meets itself transversally
    along the curve over that node. With the node off the axis, the inner
    loop near the node has its concave side facing away from the axis, so
    the curvature along the geodesic direction is negative there while the
    curve curvature is positive: those points are not convex.
    """
    if not a > b > 0:
        raise ValueError("need a > b > 0 for an inner loop")
    if shift <= 0:
        raise ValueError("shift must be positive so the node is off the axis")

    def phi(p):
        p = np.asarray(p, dtype=float)
        s, t = p[..., 0], p[..., 1]
        rad = b + a * np.cos(t)
        y, z = rad * np.cos(t) + shift, rad * np.sin(t)
        q = y * y + z * z
        C, S = _cosh_sqrt(q), _sinhc_sqrt(q)
        return np.stack([np.cosh(s) * C, np.sinh(s) * C, S * y, S * z], axis=-1)

    chart = SurfaceChart(phi, 2, (-np.inf, 0.0), (np.inf, 2 * np.pi), periodic=(False, True),
                         name="limacon_cylinder")
    node = float(np.arccos(-b / a))
    return CatalogEntry(
        "limacon",
        {"a": a, "b": b, "shift": shift},
        chart=chart,
        expected={"boundary_points": 2, "embedded": False, "convex": False, "compact": False,
                  "node_angles": [node, 2 * np.pi - node],
                  # the node itself is a non-convex point whenever shift > 0
                  "nonconvex_param": [0.0, node],
                  # G is not injective: support checks use one sheet around this point
                  "support_base": [0.0, 0.0]},
    )


# --- planar metrics ---------------------------------------------------------

def model_metric(m=0.5, grid=None):
    """u_m = -m log sqrt(1 + |z|^2) with K_m = 2m (1 + |z|^2)^{m-2}.

    Complete for 0 < m <= 1; 1 < m < 2 is sampled but flagged incomplete.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    grid = cg.PolarGrid() if grid is None else grid
    u, K = cg.model_factor(m), cg.model_curvature(m)
    return CatalogEntry(
        "model",
        {"m": m},
        metric=cg.PlaneConformalGrid.from_functions(grid, u, K, name="model", m=m),
        functions={"u": u, "K": K, "u_radial": lambda r: -0.5 * m * np.log1p(r * r)},
        expected={"m": m, "complete": m <= 1, "flat": False, "total_curvature": m},
    )


def round_metric(grid=None):
    """Stereographic round sphere, u = log 2 - log(1 + |z|^2), K = 1."""
    grid = cg.PolarGrid() if grid is None else grid
    K = lambda x, y: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
    return CatalogEntry(
        "round",
        {},
        metric=cg.PlaneConformalGrid.from_functions(grid, cg.round_factor, K, name="round"),
        functions={"u": cg.round_factor, "K": K, "u_radial": lambda r: np.log(2.0) - np.log1p(r * r)},
        expected={"m": 2.0, "complete": False, "flat": False, "total_curvature": 2.0},
    )


def flat_metric(grid=None):
    """Euclidean plane, u = 0 and K = 0."""
    grid = cg.PolarGrid() if grid is None else grid
    zero = lambda x, y: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return CatalogEntry(
        "flat",
        {},
        metric=cg.PlaneConformalGrid.from_functions(grid, zero, zero, name="flat"),
        functions={"u": zero, "K": zero, "u_radial": lambda r: 0.0 * r},
        expected={"m": 0.0, "complete": True, "flat": True, "total_curvature": 0.0},
    )


# --- selectors --------------------------------------------------------------

REGISTRY = {
    "horosphere": (horosphere, {"s": ("signed_distance", float), "n": ("n", int), "outward": ("outward", int)}),
    "equidistant": (equidistant, {"d": ("d", float), "wraps": ("wraps", int)}),
    "sphere": (geodesic_sphere, {"r": ("r", float), "n": ("n", int)}),
    "limacon": (limacon_cylinder, {"a": ("a", float), "b": ("b", float), "shift": ("shift", float)}),
    "model": (model_metric, {"m": ("m", float)}),
    "round": (round_metric, {}),
    "flat": (flat_metric, {}),
}
ALIASES = {"geodesic_sphere": "sphere", "limacon_cylinder": "limacon", "model_metric": "model"}


class SelectorError(ValueError):
    pass


def parse_selector(text):
    """``name:key=value,key=value`` -> (name, {key: raw string})."""
    name, _, rest = text.strip().partition(":")
    name = ALIASES.get(name.strip(), name.strip())
    if name not in REGISTRY:
        raise SelectorError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(REGISTRY))}")
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise SelectorError(f"malformed parameter {item!r} (expected key=value)")
            params[key.strip()] = value.strip()
    return name, params


def resolve(text, **kwargs):
    """Build the catalog entry named by a selector string."""
    name, raw = parse_selector(text)
    factory, schema = REGISTRY[name]
    args = dict(kwargs)
    for key, value in raw.items():
        if key not in schema:
            raise SelectorError(f"{name} has no parameter {key!r}; allowed: {', '.join(schema) or 'none'}")
        arg, conv = schema[key]
        try:
            # float() parses '.'-decimals regardless of locale
            args[arg] = conv(float(value)) if conv is int else conv(value)
        except ValueError as exc:
            raise SelectorError(f"bad value for {key}: {value!r}") from exc
    if name == "horosphere" and "outward" in args:
        args["outward"] = bool(args["outward"])
    return factory(**args)


def listing():
    """One line of metadata per registered entry."""
    out = []
    for name, (factory, schema) in REGISTRY.items():
        doc = (factory.__doc__ or "").strip().splitlines()[0]
        out.append({"name": name, "parameters": sorted(schema), "summary": doc})
    return out
