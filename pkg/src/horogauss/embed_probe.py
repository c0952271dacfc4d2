"""Empirical embeddedness checks on sampled surfaces in the Poincare ball.

Meshes are built from a regular parameter grid and welded by parameter
topology (periodic axes, poles), never by position: a k-fold covering map
must keep its k sheets as distinct triangles so that coincident sheets can be
reported. Self-intersection runs a spatial-hash broad phase followed by exact
triangle-triangle predicates in ball coordinates.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .errors import DegenerateJetError
from .horospherical import light_cone
from .minkowski import to_ball
from .surface import jet, principal

TAU_COINC = 1e-7
THETA_SEP = 0.1
MIN_AREA = 1e-14


@dataclass
class SurfaceMesh:
    vertices: np.ndarray  # (V, 3) ball coordinates
    triangles: np.ndarray  # (T, 3) vertex indices
    params: np.ndarray  # (V, dim) parameter value of each vertex
    name: str = ""

    def __post_init__(self):
        if np.any(np.linalg.norm(self.vertices, axis=1) >= 1):
            raise ValueError("mesh vertices must lie strictly inside the unit ball")

    def areas(self):
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def edges(self):
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def euler_characteristic(self):
        used = np.unique(self.triangles)
        return int(used.size - len(self.edges()) + len(self.triangles))

    def is_closed(self):
        """Every edge borders exactly two triangles."""
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return bool(np.all(counts == 2))

    def to_off(self):
        lines = ["OFF", f"{len(self.vertices)} {len(self.triangles)} 0"]
        lines += [f"{x:.12g} {y:.12g} {z:.12g}" for x, y, z in self.vertices]
        lines += [f"3 {i} {j} {k}" for i, j, k in self.triangles]
        return "\n".join(lines) + "\n"

    def write_off(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_off())


def _axis_values(chart, i, resolution, extent):
    lo, hi = chart.lower[i], chart.upper[i]
    if chart.periodic[i]:
        # half-cell offset: symmetric angles such as 2 pi / 3 never land on a vertex,
        # so sheets crossing there meet inside triangles rather than along shared edges
        step = (hi - lo) / resolution
        return lo + step * (np.arange(resolution) + 0.5), True
    lo = lo if np.isfinite(lo) else -extent
    hi = hi if np.isfinite(hi) else extent
    return np.linspace(lo, hi, resolution + 1), False


def _grid_triangles(idx, wrap_u, wrap_v):
    """Split every quad of an index grid into two triangles."""
    if wrap_u:
        idx = np.concatenate([idx, idx[:1]], axis=0)
    if wrap_v:
        idx = np.concatenate([idx, idx[:, :1]], axis=1)
    a, b = idx[:-1, :-1], idx[1:, :-1]
    c, d = idx[1:, 1:], idx[:-1, 1:]
    tris = np.concatenate([np.stack([a, b, c], -1).reshape(-1, 3), np.stack([a, c, d], -1).reshape(-1, 3)])
    return tris


def sample_mesh(chart, resolution=32, extent=3.0):
    """Triangulate a regular ``resolution`` x ``resolution`` parameter grid.

    Unbounded parameter axes are truncated to [-extent, extent]. When the
    chart has poles on axis 0 (spheres) the end rings collapse to one vertex
    each and are closed by triangle fans.
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    if chart.dim != 2:
        raise ValueError("meshes are built for surfaces in H^3")
    v_vals, v_wrap = _axis_values(chart, 1, resolution, extent)
    poles = tuple(chart.poles)
    if any(poles):
        lo, hi = chart.lower[0], chart.upper[0]
        u_vals = np.linspace(lo, hi, resolution + 1)
        keep = slice(1 if poles[0] else 0, -1 if poles[1] else None)
        u_vals, u_wrap = u_vals[keep], False
    else:
        u_vals, u_wrap = _axis_values(chart, 0, resolution, extent)
    U, V = np.meshgrid(u_vals, v_vals, indexing="ij")
    params = np.stack([U, V], axis=-1).reshape(-1, 2)
    idx = np.arange(len(params)).reshape(U.shape)
    tris = [_grid_triangles(idx, u_wrap, v_wrap)]
    nv = len(params)
    ring = np.append(idx[0], idx[0, 0]) if v_wrap else idx[0]
    extra = []
    if poles[0]:
        extra.append([chart.lower[0], v_vals[0]])
        tris.append(np.stack([np.full(len(ring) - 1, nv), ring[1:], ring[:-1]], axis=1))
        nv += 1
    if poles[1]:
        ring = np.append(idx[-1], idx[-1, 0]) if v_wrap else idx[-1]
        extra.append([chart.upper[0], v_vals[0]])
        tris.append(np.stack([np.full(len(ring) - 1, nv), ring[:-1], ring[1:]], axis=1))
        nv += 1
    if extra:
        params = np.concatenate([params, np.array(extra)])
    try:
        points = chart.map(params)
        vertices = to_ball(points)
    except (ValueError, FloatingPointError) as exc:
        raise ValueError(f"chart evaluation failed while meshing: {exc}") from exc
    mesh = SurfaceMesh(vertices, np.concatenate(tris).astype(np.int64), params, chart.name)
    if np.any(mesh.areas() <= MIN_AREA):
        raise ValueError("mesh has degenerate triangles; reduce extent or resolution")
    return mesh


# --- broad phase -------------------------------------------------------------

def _enumerate_cells(lo_cell, hi_cell):
    """All (triangle, cell) incidences for integer AABB cell ranges."""
    span = hi_cell - lo_cell + 1
    count = np.prod(span, axis=1)
    tri = np.repeat(np.arange(len(span)), count)
    start = np.repeat(np.cumsum(count) - count, count)
    local = np.arange(count.sum()) - start
    s = span[tri]
    off = np.stack([local // (s[:, 1] * s[:, 2]), (local // s[:, 2]) % s[:, 1], local % s[:, 2]], axis=1)
    return tri, lo_cell[tri] + off


def candidate_pairs(mesh, cell=None):
    """Triangle pairs whose AABBs overlap, via a uniform spatial hash."""
    P = mesh.vertices[mesh.triangles]
    lo, hi = P.min(axis=1), P.max(axis=1)
    if cell is None:
        cell = float(np.median(np.max(hi - lo, axis=1))) * 2 + 1e-12
    # pad by the overlap tolerance so boxes touching across a cell face still meet
    lc = np.floor((lo - TAU_COINC) / cell).astype(np.int64)
    hc = np.floor((hi + TAU_COINC) / cell).astype(np.int64)
    tri, cells = _enumerate_cells(lc, hc)
    base = cells - cells.min(axis=0)
    dims = base.max(axis=0) + 1
    key = (base[:, 0] * dims[1] + base[:, 1]) * dims[2] + base[:, 2]
    order = np.lexsort((tri, key))
    key, tri = key[order], tri[order]
    bounds = np.flatnonzero(np.diff(key)) + 1
    starts = np.concatenate([[0], bounds])
    sizes = np.diff(np.concatenate([starts, [len(key)]]))
    pairs = []
    for g in np.unique(sizes[sizes > 1]):
        groups = starts[sizes == g][:, None] + np.arange(g)
        members = tri[groups]
        iu, ju = np.triu_indices(g, 1)
        pairs.append(np.stack([members[:, iu].ravel(), members[:, ju].ravel()], axis=1))
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    pairs = np.sort(np.concatenate(pairs), axis=1)
    pairs = np.unique(pairs, axis=0)
    a, b = pairs[:, 0], pairs[:, 1]
    overlap = np.all((lo[a] <= hi[b] + TAU_COINC) & (lo[b] <= hi[a] + TAU_COINC), axis=1)
    return pairs[overlap]


# --- narrow phase ------------------------------------------------------------

def _segment_hits(p0, p1, A, B, C, eps=1e-12):
    """Does segment p0->p1 cross triangle ABC (Moller-Trumbore, interior only)?"""
    d = p1 - p0
    e1, e2 = B - A, C - A
    pv = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, pv)
    ok = np.abs(det) > 1e-18
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tv = p0 - A
    u = np.einsum("ij,ij->i", tv, pv) * inv
    qv = np.cross(tv, e1)
    v = np.einsum("ij,ij->i", d, qv) * inv
    t = np.einsum("ij,ij->i", e2, qv) * inv
    return ok & (u >= -eps) & (v >= -eps) & (u + v <= 1 + eps) & (t >= -eps) & (t <= 1 + eps)


def _orient2d(a, b, c):
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def _coplanar_overlap(TA, TB, normal):
    """2-D overlap of coplanar triangles after dropping the dominant normal axis."""
    drop = np.argmax(np.abs(normal), axis=1)
    keep = np.array([[1, 2], [0, 2], [0, 1]])[drop]
    ta = np.take_along_axis(TA, keep[:, None, :], axis=2)
    tb = np.take_along_axis(TB, keep[:, None, :], axis=2)
    eps = 1e-14
    hit = np.zeros(len(TA), dtype=bool)
    for i in range(3):
        a0, a1 = ta[:, i], ta[:, (i + 1) % 3]
        for j in range(3):
            b0, b1 = tb[:, j], tb[:, (j + 1) % 3]
            d1, d2 = _orient2d(a0, a1, b0), _orient2d(a0, a1, b1)
            d3, d4 = _orient2d(b0, b1, a0), _orient2d(b0, b1, a1)
            hit |= (d1 * d2 < -eps) & (d3 * d4 < -eps)

    def inside(tri, pts):
        s = [_orient2d(tri[:, k], tri[:, (k + 1) % 3], pts) for k in range(3)]
        return (np.all(np.stack(s) >= -eps, axis=0)) | (np.all(np.stack(s) <= eps, axis=0))

    for k in range(3):
        hit |= inside(tb, ta[:, k]) | inside(ta, tb[:, k])
    return hit


@dataclass
class IntersectionResult:
    transversal: list
    coincident: list
    candidates: int


def self_intersect(mesh, tau_coinc=TAU_COINC):
    """Non-adjacent triangle pairs that intersect, split into transversal and coincident.

    Pairs sharing a vertex index, or a vertex position within ``tau_coinc``,
    are adjacent and only reported (as coincident) when the two triangles
    lie in a common plane. A coplanar overlapping pair is coincident: two
    sheets of a covering map lying on top of each other.
    """
    pairs = candidate_pairs(mesh)
    T = mesh.triangles
    if len(pairs):
        share = np.any(T[pairs[:, 0]][:, :, None] == T[pairs[:, 1]][:, None, :], axis=(1, 2))
        pairs = pairs[~share]
    n_cand = len(pairs)
    if not n_cand:
        return IntersectionResult([], [], 0)
    TA, TB = mesh.vertices[T[pairs[:, 0]]], mesh.vertices[T[pairs[:, 1]]]
    gap = np.linalg.norm(TA[:, :, None, :] - TB[:, None, :, :], axis=-1)
    touching = np.any(gap <= tau_coinc, axis=(1, 2))
    nA = np.cross(TA[:, 1] - TA[:, 0], TA[:, 2] - TA[:, 0])
    nA /= np.linalg.norm(nA, axis=1, keepdims=True)
    nB = np.cross(TB[:, 1] - TB[:, 0], TB[:, 2] - TB[:, 0])
    nB /= np.linalg.norm(nB, axis=1, keepdims=True)
    distB = np.abs(np.einsum("ikj,ij->ik", TB - TA[:, :1], nA))
    distA = np.abs(np.einsum("ikj,ij->ik", TA - TB[:, :1], nB))
    coplanar = np.all(distB <= tau_coinc, axis=1) & np.all(distA <= tau_coinc, axis=1)

    coinc = coplanar & (touching | _coplanar_overlap(TA, TB, nA))
    cross = np.zeros(n_cand, dtype=bool)
    test = ~coplanar & ~touching
    if np.any(test):
        a, b = TA[test], TB[test]
        hit = np.zeros(len(a), dtype=bool)
        for k in range(3):
            hit |= _segment_hits(a[:, k], a[:, (k + 1) % 3], b[:, 0], b[:, 1], b[:, 2])
            hit |= _segment_hits(b[:, k], b[:, (k + 1) % 3], a[:, 0], a[:, 1], a[:, 2])
        cross[test] = hit
    to_list = lambda m: [tuple(int(x) for x in p) for p in pairs[m]]  # noqa: E731
    return IntersectionResult(to_list(cross), to_list(coinc), n_cand)


# --- Gauss map injectivity ----------------------------------------------------

def _probe_grid(chart, samples, extent):
    axes = []
    for i in range(chart.dim):
        lo, hi = chart.lower[i], chart.upper[i]
        if chart.periodic[i]:
            axes.append(np.linspace(lo, hi, samples + 1)[:-1])
        elif np.isfinite(lo) and np.isfinite(hi):
            axes.append(lo + (np.arange(samples) + 0.5) * (hi - lo) / samples)
        else:
            axes.append(np.linspace(-extent, extent, samples))
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, chart.dim), axes


def _param_distance(chart, p, q):
    d = np.abs(p - q)
    for i, per in enumerate(chart.periodic):
        if per:
            L = chart.upper[i] - chart.lower[i]
            d[..., i] = np.minimum(d[..., i], L - d[..., i])
    return np.linalg.norm(d, axis=-1)


@dataclass
class InjectivityResult:
    violations: list
    degenerate: bool
    samples: int
    skipped: int = 0


def gauss_injectivity_probe(chart, samples=64, eps_g=1e-8, min_param_gap=None, extent=3.0):
    """Parameter pairs whose Gauss images (nearly) coincide.

    A pair is a violation when the angular distance of G is below ``eps_g``
    while the parameters are more than ``min_param_gap`` apart (default half
    the smallest grid spacing, so any two distinct samples qualify). Samples
    with some kappa <= -1 are skipped. If G is constant over the samples the
    map has rank zero; this is flagged as ``degenerate`` rather than reported
    as a violation.
    """
    P, axes = _probe_grid(chart, samples, extent)
    j = jet(chart, P)
    G = light_cone(j).gauss_point
    if float(np.max(np.linalg.norm(G - G.mean(axis=0), axis=1))) < 1e-8:
        return InjectivityResult([], True, len(P))
    kappa = principal(j).curvatures
    ok = np.all(kappa > -1, axis=1)
    spacing = min(float(np.min(np.diff(a))) if a.size > 1 else np.inf for a in axes)
    gap = 0.5 * spacing if min_param_gap is None else min_param_gap
    idx = np.flatnonzero(ok)
    pairs = cKDTree(G[idx]).query_pairs(2 * np.sin(eps_g / 2), output_type="ndarray")
    if len(pairs):
        pairs = np.sort(idx[pairs], axis=1)
        far = _param_distance(chart, P[pairs[:, 0]], P[pairs[:, 1]]) > gap
        pairs = pairs[far]
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    viol = [(tuple(float(x) for x in P[a]), tuple(float(x) for x in P[b])) for a, b in pairs]
    return InjectivityResult(viol, False, len(P), int((~ok).sum()))


# --- asymptotic boundary -----------------------------------------------------

@dataclass
class BoundaryResult:
    clusters: list  # [(unit vector tuple, count)]
    escaped: bool
    radius: float
    max_norm: float


def _far_samples(chart, R, samples):
    """Parameters on the boundary of the box |p_i| <= R over unbounded axes."""
    free = [i for i in range(chart.dim) if not (np.isfinite(chart.lower[i]) and np.isfinite(chart.upper[i]))]
    axes = []
    for i in range(chart.dim):
        if i in free:
            axes.append(np.linspace(-R, R, samples))
        elif chart.periodic[i]:
            axes.append(np.linspace(chart.lower[i], chart.upper[i], samples + 1)[:-1])
        else:
            axes.append(np.linspace(chart.lower[i], chart.upper[i], samples))
    P = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, chart.dim)
    if not free:
        return P
    on_edge = np.any(np.isclose(np.abs(P[:, free]), R), axis=1)
    return P[on_edge]


def _ball(points):
    return points[..., 1:] / (1.0 + points[..., :1])


def asymptotic_boundary(chart, radii=None, theta_sep=THETA_SEP, min_norm=0.99, stop_norm=0.999,
                        samples=48, start=2.0, max_doublings=40):
    """Cluster the ideal limit directions of far samples of a chart.

    Without an explicit ``radii`` schedule the parameter box is doubled from
    ``start`` until the farthest sample reaches ball norm ``stop_norm``.
    Samples of the last box with ball norm above ``min_norm`` are normalised
    to unit vectors and merged by single-linkage clustering at angular
    separation ``theta_sep``. Compact charts (or charts whose samples never
    get past ``min_norm``) return no clusters and ``escaped=False``.
    """
    if chart.compact:
        P = _far_samples(chart, start, samples)
        x = _ball(chart.map(P))
        return BoundaryResult([], False, float("nan"), float(np.max(np.linalg.norm(x, axis=1))))
    if radii is None:
        radii = start * 2.0 ** np.arange(max_doublings)
    x, R = None, float("nan")
    for R in radii:
        with np.errstate(over="ignore", invalid="ignore"):
            x = _ball(chart.map(_far_samples(chart, float(R), samples)))
        x = x[np.all(np.isfinite(x), axis=1)]
        if len(x) and np.max(np.linalg.norm(x, axis=1)) > stop_norm:
            break
    norms = np.linalg.norm(x, axis=1)
    far = x[norms > min_norm]
    max_norm = float(norms.max()) if len(norms) else 0.0
    if len(far) == 0:
        return BoundaryResult([], False, float(R), max_norm)
    u = far / np.linalg.norm(far, axis=1, keepdims=True)
    if len(u) == 1:
        labels = np.array([1])
    else:
        Z = linkage(pdist(u, metric="cosine"), method="single")
        labels = fcluster(Z, t=1 - np.cos(theta_sep), criterion="distance")
    clusters = []
    for lab in np.unique(labels):
        mem = u[labels == lab]
        rep = mem.mean(axis=0)
        rep /= np.linalg.norm(rep)
        clusters.append((tuple(float(c) for c in rep), int(len(mem))))
    clusters.sort(key=lambda c: (-c[1], c[0]))
    return BoundaryResult(clusters, True, float(R), max_norm)


# --- combined report ---------------------------------------------------------

@dataclass
class ProbeReport:
    intersecting_pairs: list
    coincident_pairs: list
    injectivity_violations: list
    gauss_degenerate: bool
    boundary_clusters: list
    escaped: bool
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "intersecting_pairs": [list(p) for p in self.intersecting_pairs],
            "coincident_pairs": [list(p) for p in self.coincident_pairs],
            "injectivity_violations": [[list(a), list(b)] for a, b in self.injectivity_violations],
            "gauss_degenerate": self.gauss_degenerate,
            "boundary_clusters": [{"direction": list(d), "count": c} for d, c in self.boundary_clusters],
            "escaped": self.escaped,
            "meta": dict(self.meta),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def probe(chart, resolution=32, extent=3.0, samples=64, theta_sep=THETA_SEP, tau_coinc=TAU_COINC):
    """Mesh the chart and run all three probes."""
    mesh = sample_mesh(chart, resolution, extent)
    inter = self_intersect(mesh, tau_coinc)
    try:
        inj = gauss_injectivity_probe(chart, samples, extent=extent)
    except DegenerateJetError:
        inj = InjectivityResult([], True, 0)
    bnd = asymptotic_boundary(chart, theta_sep=theta_sep)
    meta = {
        "chart": chart.name,
        "resolution": resolution,
        "extent": extent,
        "vertices": len(mesh.vertices),
        "triangles": len(mesh.triangles),
        "candidate_pairs": inter.candidates,
        "gauss_samples": inj.samples,
        "gauss_skipped": inj.skipped,
        "boundary_radius": bnd.radius,
    }
    return ProbeReport(inter.transversal, inter.coincident, inj.violations, inj.degenerate,
                       bnd.clusters, bnd.escaped, meta), mesh
