"""Light cone map, hyperbolic Gauss map and the horospherical metric.

For a hypersurface phi with unit normal eta, psi = phi - eta is a null vector
and psi = e^rho (1, G): G is the hyperbolic Gauss map into S^n and rho the
horospherical support function. The horospherical metric is
g_h = e^{2 rho} G^* g_{S^n} = <d psi, d psi>; in a principal frame
g_h(e_i, e_j) = (1 + kappa_i)^2 delta_ij.

Convention for the n = 2 tensor P built from a support function rho on a
region of the round sphere with metric g:

    P = -Hess_g(rho) + d rho (x) d rho - (|d rho|_g^2 - 1) g / 2.

Its trace with respect to g_h = e^{2 rho} g is e^{-2 rho}(1 - Delta_g rho),
which is the Gaussian curvature of g_h; this is the identity used to pin the
sign of the Hessian term. In flat coordinates z with g = e^{2 sigma}|dz|^2 the
same convention gives the componentwise formulas in :func:`p0_decompose`.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ._fd import central_interior
from .errors import SingularityError, StencilError
from .minkowski import minkowski_inner
from .surface import jet as surface_jet, principal as surface_principal, shape_operator

TAU_CURV = 1e-4
TAU_ARITH = 1e-10


@dataclass(frozen=True)
class HorosphericalData:
    psi: np.ndarray
    rho: np.ndarray
    gauss_point: np.ndarray
    g_h: np.ndarray


@dataclass
class CurvatureTensors:
    """Curvature of g_h in parameter coordinates.

    ``sectional[..., i, j]`` is K_{g_h} on the plane of principal directions
    i, j (diagonal entries are NaN). ``schouten`` is filled for n >= 3,
    ``p_tensor`` and ``gauss_curv`` for n = 2.
    """

    sectional: np.ndarray
    eigenvalues: np.ndarray
    schouten: np.ndarray = None
    p_tensor: np.ndarray = None
    gauss_curv: np.ndarray = None


def light_cone(j):
    """psi, rho, G and g_h at the points of a jet."""
    psi = j.position - j.normal
    if np.any(psi[..., 0] <= 0):
        raise SingularityError("psi_0 <= 0: normal orientation inconsistent with a future null psi")
    rho = np.log(psi[..., 0])
    G = psi[..., 1:] / psi[..., :1]
    g, II = j.first_form, j.second_form
    g_h = g + 2 * II + II @ np.linalg.solve(g, II)
    return HorosphericalData(psi=psi, rho=rho, gauss_point=G, g_h=0.5 * (g_h + np.swapaxes(g_h, -1, -2)))


def light_cone_derivatives(j):
    """Parameter derivatives of psi, rho and G computed from one jet.

    d psi = d phi (I + S) with S the shape operator, so no differencing of
    the normal is needed. Returns arrays shaped ``(..., n, n+2)``,
    ``(..., n)`` and ``(..., n, n+1)``.
    """
    S = shape_operator(j)  # S[a, b]: column b is S(d_b) in parameter basis
    dpsi = j.tangents + np.einsum("...kb,...kc->...bc", S, j.tangents)
    psi = j.position - j.normal
    drho = dpsi[..., 0] / psi[..., None, 0]
    G = psi[..., 1:] / psi[..., :1]
    dG = (dpsi[..., 1:] - dpsi[..., :1] * G[..., None, :]) / psi[..., None, None, 0]
    return dpsi, drho, dG


def _psi_at(chart, p):
    j = surface_jet(chart, p)
    return j.position - j.normal


def _central_first(f, p, h, i):
    e = np.zeros_like(p)
    e[..., i] = h
    # fourth-order central difference
    return (-f(p + 2 * e) + 8 * f(p + e) - 8 * f(p - e) + f(p - 2 * e)) / (12 * h)


def metric_relation_residual(chart, p, h=1e-3):
    """Check <d psi(e_i), d psi(e_j)> = (1 + kappa_i)^2 delta_ij with differenced psi.

    d psi and dG are fourth-order central differences of psi and G along the
    parameter axes, rotated into the principal frame of the jet at ``p``.
    Returns the larger of the psi residual and the mismatch against
    e^{2 rho} <dG(e_i), dG(e_j)>.
    """
    p = np.asarray(p, dtype=float)
    j = surface_jet(chart, p)
    pd = surface_principal(j)
    n = chart.dim
    psi0 = j.position - j.normal
    dpsi = np.stack([_central_first(lambda q: _psi_at(chart, q), p, h, i) for i in range(n)], axis=-2)

    def gauss(q):
        ps = _psi_at(chart, q)
        return ps[..., 1:] / ps[..., :1]

    dG = np.stack([_central_first(gauss, p, h, i) for i in range(n)], axis=-2)
    V = pd.directions
    frame_psi = np.einsum("...ai,...ak->...ik", V, dpsi)
    frame_G = np.einsum("...ai,...ak->...ik", V, dG)
    gram_psi = minkowski_inner(frame_psi[..., :, None, :], frame_psi[..., None, :, :])
    gram_G = np.exp(2 * np.log(psi0[..., 0]))[..., None, None] * np.einsum(
        "...ik,...jk->...ij", frame_G, frame_G)
    target = np.zeros(gram_psi.shape)
    idx = np.arange(n)
    target[..., idx, idx] = (1 + pd.curvatures) ** 2
    return float(max(np.max(np.abs(gram_psi - target)), np.max(np.abs(gram_G - target))))


def _check_pole(kappa):
    k = np.asarray(kappa, dtype=float)
    if np.any(k <= -1):
        raise SingularityError("principal curvature <= -1 (pole of the horospherical formulas)")
    return k


def horo_sectional(kappa_i, kappa_j):
    """Sectional curvature (k_i k_j - 1) / ((1 + k_i)(1 + k_j)) of g_h."""
    ki, kj = _check_pole(kappa_i), _check_pole(kappa_j)
    return (ki * kj - 1) / ((1 + ki) * (1 + kj))


def p_eigenvalues(kappa):
    """Eigenvalues 1/2 - 1/(1 + kappa_i) of the Schouten / P tensor w.r.t. g_h."""
    return 0.5 - 1 / (1 + _check_pole(kappa))


def schouten_tensor(pd, g_h=None):
    """Schouten tensor of g_h (P tensor when n = 2) in parameter coordinates.

    Built in the principal frame as Sch(e_i, e_j) = (1/2 - 1/(1+kappa_i))
    g_h(e_i, e_j) and pulled back with the g-dual coframe. ``g_h`` is only
    used to validate the frame; it may be omitted.
    """
    kappa = _check_pole(pd.curvatures)
    n = kappa.shape[-1]
    lam = p_eigenvalues(kappa)
    V = pd.directions
    coframe = np.linalg.inv(V)  # rows: dual covectors e^i in parameter coordinates
    weight = lam * (1 + kappa) ** 2
    sch = np.einsum("...i,...ia,...ib->...ab", weight, coframe, coframe)
    if g_h is not None:
        gh_frame = np.einsum("...ai,...ab,...bj->...ij", V, g_h, V)
        expected = np.zeros_like(gh_frame)
        idx = np.arange(n)
        expected[..., idx, idx] = (1 + kappa) ** 2
        scale = max(1.0, float(np.max(np.abs(expected))))
        if np.max(np.abs(gh_frame - expected)) > 1e-6 * scale:
            raise ValueError("g_h is not diagonal in the supplied principal frame")
    prod = kappa[..., :, None] * kappa[..., None, :]
    sect = (prod - 1) / ((1 + kappa[..., :, None]) * (1 + kappa[..., None, :]))
    sect = np.where(np.eye(n, dtype=bool), np.nan, sect)
    if n == 2:
        return CurvatureTensors(sectional=sect, eigenvalues=lam, p_tensor=sch,
                                gauss_curv=horo_sectional(kappa[..., 0], kappa[..., 1]))
    return CurvatureTensors(sectional=sect, eigenvalues=lam, schouten=sch)


def tensor_eigenvalues(T, metric):
    """Eigenvalues of the symmetric 2-tensor T relative to a metric (ascending)."""
    L = np.linalg.cholesky(metric)
    Li = np.linalg.inv(L)
    B = Li @ T @ np.swapaxes(Li, -1, -2)
    return np.linalg.eigvalsh(0.5 * (B + np.swapaxes(B, -1, -2)))


def second_form_psi(j, pd, g_h):
    """Second fundamental form of the light cone map in a principal frame.

    II_Psi(e_i, e_j) = (phi + kappa_i eta) / (1 + kappa_i) * g_h(e_i, e_j),
    the part of d_i d_j psi normal to the psi-surface, shape ``(..., n, n, n+2)``.
    The sign of the eta term follows from <d_j psi, eta> = 0 and
    d eta(e_i) = -kappa_i e_i; the Gauss equation for g_h cannot detect it,
    since it only sees <II_Psi, II_Psi>.
    """
    kappa = _check_pole(pd.curvatures)
    V = pd.directions
    gh_frame = np.einsum("...ai,...ab,...bj->...ij", V, g_h, V)
    coeff = (j.position[..., None, :] + kappa[..., :, None] * j.normal[..., None, :]) / (1 + kappa)[..., :, None]
    return coeff[..., :, None, :] * gh_frame[..., :, :, None]


def second_form_psi_residual(chart, p, h=1e-3):
    """Compare :func:`second_form_psi` with differenced second derivatives of psi.

    The second derivatives are projected onto the normal plane span(phi, eta)
    of the psi-surface.
    """
    p = np.asarray(p, dtype=float)
    j = surface_jet(chart, p)
    pd = surface_principal(j)
    hd = light_cone(j)
    n = chart.dim
    f = lambda q: _psi_at(chart, q)  # noqa: E731
    f0 = f(p)
    d2 = np.empty(p.shape[:-1] + (n, n) + f0.shape[-1:])
    I = np.eye(n) * h
    for a in range(n):
        d2[..., a, a, :] = (f(p + I[a]) - 2 * f0 + f(p - I[a])) / h**2
        for b in range(a + 1, n):
            mixed = (f(p + I[a] + I[b]) - f(p + I[a] - I[b]) - f(p - I[a] + I[b]) + f(p - I[a] - I[b])) / (4 * h * h)
            d2[..., a, b, :] = d2[..., b, a, :] = mixed
    V = pd.directions
    frame = np.einsum("...ai,...bj,...abk->...ijk", V, V, d2)
    phi, eta = j.position, j.normal
    normal_part = (-minkowski_inner(frame, phi[..., None, None, :])[..., None] * phi[..., None, None, :]
                   + minkowski_inner(frame, eta[..., None, None, :])[..., None] * eta[..., None, None, :])
    predicted = second_form_psi(j, pd, hd.g_h)
    scale = max(1.0, float(np.max(np.abs(predicted))))
    return float(np.max(np.abs(normal_part - predicted)) / scale)


# --- support functions on patches of the round sphere ----------------------

@dataclass(frozen=True)
class SpherePatch:
    """Longitude/latitude grid on S^2: zeta = (cos b cos l, cos b sin l, sin b).

    The default patch is centred on (0, 1, 0), away from the coordinate
    poles and from +-e_1 (where horosphere and equidistant supports blow up).
    """

    lon_center: float = np.pi / 2
    lat_center: float = 0.0
    lon_half: float = 0.6
    lat_half: float = 0.5
    n_lon: int = 61
    n_lat: int = 51

    def __post_init__(self):
        if self.n_lon < 9 or self.n_lat < 9:
            raise StencilError("sphere patch needs at least 9 points per axis")
        if abs(self.lat_center) + self.lat_half >= np.pi / 2 - 0.05:
            raise ValueError("patch reaches a coordinate pole; re-centre it")

    @property
    def lon(self):
        return np.linspace(self.lon_center - self.lon_half, self.lon_center + self.lon_half, self.n_lon)

    @property
    def lat(self):
        return np.linspace(self.lat_center - self.lat_half, self.lat_center + self.lat_half, self.n_lat)

    @property
    def h_lon(self):
        return 2 * self.lon_half / (self.n_lon - 1)

    @property
    def h_lat(self):
        return 2 * self.lat_half / (self.n_lat - 1)

    def mesh(self):
        return np.meshgrid(self.lon, self.lat, indexing="ij")

    def points(self):
        L, B = self.mesh()
        return np.stack([np.cos(B) * np.cos(L), np.cos(B) * np.sin(L), np.sin(B)], axis=-1)

    def round_metric(self):
        L, B = self.mesh()
        g = np.zeros(L.shape + (2, 2))
        g[..., 0, 0] = np.cos(B) ** 2
        g[..., 1, 1] = 1.0
        return g

    def interior(self, margin=6):
        mask = np.zeros((self.n_lon, self.n_lat), dtype=bool)
        mask[margin:-margin, margin:-margin] = True
        return mask


@dataclass
class SupportField:
    """Support function sampled on a sphere patch by inverting the Gauss map."""

    patch: SpherePatch
    rho: np.ndarray
    params: np.ndarray
    kappa: np.ndarray
    newton_residual: float
    meta: dict = field(default_factory=dict)


def _seed_box(chart, extent):
    lo = np.where(np.isfinite(chart.lower), chart.lower, -extent)
    hi = np.where(np.isfinite(chart.upper), chart.upper, extent)
    return lo, hi


def _tangent_frames(zeta):
    """Orthonormal frames (t1, t2) of T_zeta S^2, shape (N, 2, 3)."""
    axis = np.argmin(np.abs(zeta), axis=-1)
    a = np.eye(3)[axis]
    t1 = a - np.sum(a * zeta, axis=-1, keepdims=True) * zeta
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(zeta, t1)
    return np.stack([t1, t2], axis=-2)


@dataclass
class GaussInverse:
    params: np.ndarray
    rho: np.ndarray
    kappa: np.ndarray
    residual: float


def invert_gauss_map(chart, zeta, extent=4.0, seeds=80, tol=1e-13, max_iter=40, box=None):
    """Parameters p with G(p) = zeta for unit vectors ``zeta`` of shape (N, 3).

    Seeds come from a nearest-neighbour search over G on a parameter grid;
    each point is then refined by damped Newton on the two tangential
    components of G(p) - zeta. Jets supply dG analytically, so the chart
    only needs to be weakly horospherically convex over the preimage.

    When G is not injective, pass ``box = (lo, hi)`` to seed from one sheet
    only; the result is then the local inverse on that sheet.
    """
    if chart.dim != 2:
        raise ValueError("Gauss-map inversion is implemented for surfaces in H^3")
    target = np.asarray(zeta, dtype=float).reshape(-1, 3)
    lo, hi = _seed_box(chart, extent) if box is None else (np.asarray(box[0], float), np.asarray(box[1], float))
    axes = []
    for i in range(2):
        if box is not None:
            axes.append(np.linspace(lo[i], hi[i], seeds))
        elif chart.periodic[i]:
            axes.append(np.linspace(lo[i], hi[i], seeds + 1)[:-1])
        elif np.isfinite(chart.lower[i]) and np.isfinite(chart.upper[i]):
            span = hi[i] - lo[i]
            axes.append(np.linspace(lo[i] + 0.01 * span, hi[i] - 0.01 * span, seeds))
        else:
            axes.append(np.linspace(lo[i], hi[i], seeds))
    P = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2)
    Gs = light_cone(surface_jet(chart, P)).gauss_point
    _, nearest = cKDTree(Gs).query(target)
    p = P[nearest].copy()
    T = _tangent_frames(target)

    def defect(q):
        G = light_cone(surface_jet(chart, q)).gauss_point
        return np.einsum("nak,nk->na", T, G - target), np.linalg.norm(G - target, axis=-1)

    F, res = defect(p)
    stuck = np.zeros(len(p), dtype=bool)
    for _ in range(max_iter):
        if np.all((res <= tol) | stuck):
            break
        _, _, dG = light_cone_derivatives(surface_jet(chart, p))
        Jm = np.einsum("nak,nbk->nab", T, dG)
        step = np.linalg.solve(Jm, -F[..., None])[..., 0]
        lam = np.ones(len(p))
        active = (res > tol) & ~stuck
        for _ in range(30):
            trial = p + (lam * active)[:, None] * step
            Ft, rt = defect(trial)
            worse = active & ~(rt < res)
            # a full Newton step that fails this close to the root means rounding noise
            floor = worse & (res < 1e3 * tol)
            stuck |= floor
            active &= ~floor
            worse &= ~floor
            if not np.any(worse):
                break
            lam = np.where(worse, lam / 2, lam)
        else:
            stuck |= worse
        keep = stuck | worse
        trial[keep], Ft[keep], rt[keep] = p[keep], F[keep], res[keep]
        p, F, res = trial, Ft, rt
    j = surface_jet(chart, p)
    return GaussInverse(p, light_cone(j).rho, surface_principal(j).curvatures, float(np.max(res)))


def support_on_patch(chart, patch=None, **kwargs):
    """Sample rho(G^{-1}(zeta)) on a lon/lat ``patch`` of S^2."""
    patch = SpherePatch() if patch is None else patch
    inv = invert_gauss_map(chart, patch.points().reshape(-1, 3), **kwargs)
    shape = (patch.n_lon, patch.n_lat)
    return SupportField(patch, inv.rho.reshape(shape), inv.params.reshape(shape + (2,)),
                        inv.kappa.reshape(shape + (2,)), inv.residual, {"chart": chart.name})


def local_support(chart, base, half=0.3, n=41, reach=(2.0, 0.6), **kwargs):
    """Support on a patch centred at G(base), inverting G only near ``base``.

    For surfaces whose Gauss map is not injective (different sheets would
    give different rho at the same zeta); ``reach`` is the parameter
    half-width of the seeding box on each axis.
    """
    base = np.asarray(base, dtype=float)
    G = light_cone(surface_jet(chart, base[None])).gauss_point[0]
    patch = SpherePatch(lon_center=float(np.arctan2(G[1], G[0])), lat_center=float(np.arcsin(G[2])),
                        lon_half=half, lat_half=half, n_lon=n, n_lat=n)
    reach = np.asarray(reach, dtype=float)
    kwargs.setdefault("seeds", 24)
    return support_on_patch(chart, patch, box=(base - reach, base + reach), **kwargs)


def _patch_derivatives(rho, patch):
    hl, hb = patch.h_lon, patch.h_lat
    r_l = central_interior(rho, hl, 1, axis=0)
    r_b = central_interior(rho, hb, 1, axis=1)
    r_ll = central_interior(rho, hl, 2, axis=0)
    r_bb = central_interior(rho, hb, 2, axis=1)
    r_lb = central_interior(r_l, hb, 1, axis=1)
    return r_l, r_b, r_ll, r_bb, r_lb


def round_laplacian(rho, patch):
    """Laplace-Beltrami of the round metric on a lon/lat patch (NaN margins)."""
    _, r_b, r_ll, r_bb, _ = _patch_derivatives(rho, patch)
    _, B = patch.mesh()
    return r_ll / np.cos(B) ** 2 + r_bb - np.tan(B) * r_b


def p_tensor_from_support(rho, patch):
    """P tensor field (lon/lat components) from a support function on a patch."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (patch.n_lon, patch.n_lat):
        raise ValueError("support field does not match the patch grid")
    r_l, r_b, r_ll, r_bb, r_lb = _patch_derivatives(rho, patch)
    _, B = patch.mesh()
    c2 = np.cos(B) ** 2
    H = np.empty(rho.shape + (2, 2))
    H[..., 0, 0] = r_ll - np.sin(B) * np.cos(B) * r_b
    H[..., 0, 1] = H[..., 1, 0] = r_lb + np.tan(B) * r_l
    H[..., 1, 1] = r_bb
    d = np.stack([r_l, r_b], axis=-1)
    grad_sq = r_l**2 / c2 + r_b**2
    g = patch.round_metric()
    return -H + d[..., :, None] * d[..., None, :] - 0.5 * (grad_sq - 1)[..., None, None] * g


def p_field_eigenvalues(P, rho, patch):
    """Eigenvalues of P relative to g_h = e^{2 rho} g_round, NaN outside the stencil interior."""
    g_h = np.exp(2 * rho)[..., None, None] * patch.round_metric()
    ok = np.all(np.isfinite(P), axis=(-1, -2))
    out = np.full(rho.shape + (2,), np.nan)
    out[ok] = tensor_eigenvalues(P[ok], g_h[ok])
    return out


def p_field_trace(P, rho, patch):
    """Trace of P with respect to g_h (the Gaussian curvature of g_h)."""
    _, B = patch.mesh()
    return np.exp(-2 * rho) * (P[..., 0, 0] / np.cos(B) ** 2 + P[..., 1, 1])


def gauss_equation_residual(rho, K, patch):
    """-Delta_round rho + 1 - K e^{2 rho} on the patch (NaN margins)."""
    rho = np.asarray(rho, dtype=float)
    return -round_laplacian(rho, patch) + 1 - np.asarray(K, dtype=float) * np.exp(2 * rho)


# --- flat-coordinate decomposition -----------------------------------------

@dataclass(frozen=True)
class PlanarPatch:
    """Uniform square grid [x0 - a, x0 + a] x [y0 - a, y0 + a]."""

    center: tuple = (0.0, 0.0)
    half_width: float = 1.0
    n: int = 129

    @property
    def h(self):
        return 2 * self.half_width / (self.n - 1)

    def xy(self):
        x = np.linspace(self.center[0] - self.half_width, self.center[0] + self.half_width, self.n)
        y = np.linspace(self.center[1] - self.half_width, self.center[1] + self.half_width, self.n)
        return np.meshgrid(x, y, indexing="ij")


def _planar_derivatives(f, h):
    fx = central_interior(f, h, 1, axis=0)
    fy = central_interior(f, h, 1, axis=1)
    return fx, fy, central_interior(f, h, 2, axis=0), central_interior(f, h, 2, axis=1), central_interior(fx, h, 1, axis=1)


def p_tensor_conformal(rho, sigma, h):
    """P tensor of a support ``rho`` against the metric e^{2 sigma}|dz|^2.

    Both fields live on the same uniform planar grid of spacing ``h``.
    """
    rx, ry, rxx, ryy, rxy = _planar_derivatives(np.asarray(rho, dtype=float), h)
    sx, sy = central_interior(sigma, h, 1, axis=0), central_interior(sigma, h, 1, axis=1)
    dot = sx * rx + sy * ry
    H = np.empty(np.shape(rho) + (2, 2))
    H[..., 0, 0] = rxx - 2 * sx * rx + dot
    H[..., 1, 1] = ryy - 2 * sy * ry + dot
    H[..., 0, 1] = H[..., 1, 0] = rxy - sx * ry - sy * rx
    grad_sq = np.exp(-2 * np.asarray(sigma)) * (rx**2 + ry**2)
    g = np.exp(2 * np.asarray(sigma))[..., None, None] * np.eye(2)
    d = np.stack([rx, ry], axis=-1)
    return -H + d[..., :, None] * d[..., None, :] - 0.5 * (grad_sq - 1)[..., None, None] * g


@dataclass
class P0Decomposition:
    p0: np.ndarray
    trace: np.ndarray
    divergence: np.ndarray
    roundness: float

    def max_trace(self):
        return float(np.nanmax(np.abs(self.trace)))

    def max_divergence(self):
        return float(np.nanmax(np.linalg.norm(self.divergence, axis=-1)))


def p0_decompose(rho_tilde, rho_tilde0, p_tilde, h):
    """P_0 in flat coordinates from P~ and the flat-metric factor rho~_0.

    With rho_0 = rho~ - rho~_0 one gets, componentwise,
    (P_0)_11 = d_xx rho~_0 - ((d_x rho~_0)^2 - (d_y rho~_0)^2)/2 + P~_11,
    (P_0)_22 = d_yy rho~_0 - ((d_y rho~_0)^2 - (d_x rho~_0)^2)/2 + P~_22,
    (P_0)_12 = d_xy rho~_0 - d_x rho~_0 d_y rho~_0 + P~_12.
    Trace and divergence are taken with respect to |dz|^2. ``roundness`` is
    max |e^{2 rho_0} Delta rho_0 - 1|: zero when |dz|^2 = e^{2 rho_0} G^* g_{S^2}
    with G^* g_{S^2} the round metric, which is the standing assumption.
    """
    f = np.asarray(rho_tilde0, dtype=float)
    fx, fy, fxx, fyy, fxy = _planar_derivatives(f, h)
    P = np.asarray(p_tilde, dtype=float)
    P0 = np.empty(f.shape + (2, 2))
    P0[..., 0, 0] = fxx - 0.5 * (fx**2 - fy**2) + P[..., 0, 0]
    P0[..., 1, 1] = fyy - 0.5 * (fy**2 - fx**2) + P[..., 1, 1]
    P0[..., 0, 1] = P0[..., 1, 0] = fxy - fx * fy + P[..., 0, 1]
    trace = P0[..., 0, 0] + P0[..., 1, 1]
    div = np.stack([
        central_interior(P0[..., 0, 0], h, 1, axis=0) + central_interior(P0[..., 0, 1], h, 1, axis=1),
        central_interior(P0[..., 1, 0], h, 1, axis=0) + central_interior(P0[..., 1, 1], h, 1, axis=1),
    ], axis=-1)
    rho0 = np.asarray(rho_tilde, dtype=float) - f
    d = _planar_derivatives(rho0, h)
    roundness = float(np.nanmax(np.abs(np.exp(2 * rho0) * (d[2] + d[3]) - 1)))
    return P0Decomposition(P0, trace, div, roundness)


def inverse_stereographic(x, y):
    """z -> S^2 from the north pole e_3; the round metric is e^{2 sigma}|dz|^2."""
    q = x * x + y * y
    return np.stack([2 * x, 2 * y, q - 1], axis=-1) / (1 + q)[..., None]


def stereographic_factor(x, y):
    """sigma = log 2 - log(1 + |z|^2)."""
    return np.log(2.0) - np.log1p(x * x + y * y)
