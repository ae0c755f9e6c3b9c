"""Level-surface extraction: ray (radial) and marching-cubes backends."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..fields import RadialField, ScalarField, SingularPointError
from .geometry import PointGeometry, point_geometry
from .quadrature import default_order, sphere_rule

EPS_CRIT_REL = 1e-6
DEGENERATE_FRACTION = 0.05
DEFAULT_CELLS = 128


class EmptyLevelSetError(ValueError):
    """The requested level is not attained inside the search region."""


class NotStarShapedError(ValueError):
    """A ray from the star center crosses the level more than once."""


@dataclass
class LevelSurface:
    """Weighted samples of {u = t} with their geometry.

    ``weights`` are area elements in the metric of the field.  Samples that
    were dropped (near-critical, or with unusable derivatives) contribute to
    ``excluded_area`` instead.
    """

    n: int
    t: float
    geometry: PointGeometry
    weights: np.ndarray
    excluded_area: float = 0.0
    degenerate: bool = False
    backend: str = ""
    n_components: int = 1
    level_uncertainty: float = 0.0
    resolution: int = 0
    static: bool = False
    notes: list = dc_field(default_factory=list)

    @property
    def points(self):
        return self.geometry.points

    @property
    def normals(self):
        return self.geometry.normal

    @property
    def u(self):
        return self.geometry.u

    @property
    def grad_norm(self):
        return self.geometry.grad_norm

    @property
    def mean_curvature(self):
        return self.geometry.mean_curvature

    @property
    def h_norm2(self):
        return self.geometry.h_norm2

    @property
    def scalar_curvature(self):
        return self.geometry.scalar_curvature

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    @property
    def total_area(self) -> float:
        return self.area + self.excluded_area

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.broadcast_to(np.asarray(values, float), self.weights.shape)))


def _finalize(field, t, geom, weights, backend, resolution, eps_crit, degenerate_fraction,
              n_components, uncertainty, exclusion_radius=0.0, notes=None) -> LevelSurface:
    if weights.size == 0:
        raise EmptyLevelSetError(f"level {t} produced no samples")
    finite = np.isfinite(geom.grad_norm)
    for name in ("mean_curvature", "h_norm2", "scalar_curvature", "hessian_norm2"):
        finite &= np.isfinite(getattr(geom, name))
    finite &= np.isfinite(weights) & (weights > 0)
    gmax = float(np.max(geom.grad_norm[finite])) if np.any(finite) else 0.0
    eps = EPS_CRIT_REL * gmax if eps_crit is None else eps_crit
    keep = finite & (geom.grad_norm >= eps)
    if exclusion_radius > 0:
        for c in _critical_points_of(field):
            keep &= np.linalg.norm(geom.points - c, axis=1) > exclusion_radius
    excluded = float(np.sum(np.where(np.isfinite(weights), weights, 0.0)[~keep]))
    total = excluded + float(np.sum(weights[keep]))
    if not np.any(keep):
        raise EmptyLevelSetError(f"level {t}: every sample is near-critical or unusable")
    surface = LevelSurface(
        n=field.n, t=float(t), geometry=geom.take(keep), weights=weights[keep],
        excluded_area=excluded, degenerate=excluded > degenerate_fraction * total,
        backend=backend, n_components=n_components, level_uncertainty=uncertainty,
        resolution=resolution, static=bool(getattr(field, "is_static", False)),
        notes=list(notes or []))
    return surface


def _critical_points_of(field):
    cached = getattr(field, "_cached_critical_points", None)
    if cached is None:
        finder = getattr(field, "critical_points", None)
        cached = np.asarray(finder(), float).reshape(-1, field.n) if finder else np.zeros((0, field.n))
        try:
            field._cached_critical_points = cached
        except AttributeError:
            pass
    return cached


def extract(field: ScalarField, t: float, resolution: int | None = None, backend: str = "auto",
            eps_crit: float | None = None, degenerate_fraction: float = DEGENERATE_FRACTION) -> LevelSurface:
    """Sample the level set {u = t} of ``field``.

    backend "radial" casts rays from the field's star center through a
    product rule on the unit sphere (``resolution`` = polar order);
    "triangulation" runs marching cubes on [resolution]^3 cells (n = 3).
    "auto" picks radial for rotationally symmetric fields and
    triangulation otherwise, falling back to rays when n != 3.
    """
    if resolution is not None and resolution <= 0:
        raise ValueError("resolution must be positive")
    if backend == "auto":
        symmetric = isinstance(field, RadialField) or getattr(field, "radially_symmetric", False)
        backend = "radial" if symmetric or field.n != 3 else "triangulation"
    if backend == "radial":
        return _extract_radial(field, t, resolution, eps_crit, degenerate_fraction)
    if backend == "triangulation":
        return _extract_triangulation(field, t, resolution, eps_crit, degenerate_fraction)
    raise ValueError(f"unknown extraction backend {backend!r}")


# rays


def _ray_values(field, center, dirs, radii):
    pts = center + radii[..., None] * dirs[:, None, :]
    flat = pts.reshape(-1, field.n)
    vals = _safe_values(field, flat)
    return np.where(np.isnan(vals), -np.inf, vals).reshape(radii.shape)


def _safe_values(field, pts):
    """field.value with singular points reported as NaN, found by halving."""
    try:
        with np.errstate(all="ignore"):
            return np.asarray(field.value(pts), float)
    except SingularPointError:
        if len(pts) == 1:
            return np.array([np.nan])
        half = len(pts) // 2
        return np.concatenate([_safe_values(field, pts[:half]), _safe_values(field, pts[half:])])


def _extract_radial(field, t, resolution, eps_crit, degenerate_fraction) -> LevelSurface:
    n = field.n
    order = default_order(n) if resolution is None else int(resolution)
    dirs, w = sphere_rule(n, order)
    center = field.star_center()
    notes = []
    if isinstance(field, RadialField) and field.inverse is not None:
        r = np.full(len(w), field.level_radius(t))
        uncertainty = 0.0
    else:
        r = _ray_search(field, t, center, dirs)
        residual = field.value(center + r[:, None] * dirs) - t
        uncertainty = float(np.max(np.abs(residual)))
    pts = center + r[:, None] * dirs
    geom = point_geometry(field, pts)
    cosang = np.einsum("ni,ni->n", dirs, geom.flat_normal)
    if np.any(cosang <= 0):
        raise NotStarShapedError(f"level {t} is not a radial graph over the star center")
    weights = r ** (n - 1) * w / cosang * field.metric.area_factor(pts, geom.flat_normal)
    return _finalize(field, t, geom, weights, "radial", order, eps_crit, degenerate_fraction,
                     1, uncertainty, notes=notes)


def _ray_search(field, t, center, dirs, scan: int = 64, iters: int = 60):
    lo, hi = field.bounding_box(t)
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(field.n, -1).T
    rmax = float(np.max(np.linalg.norm(corners - center, axis=1)))
    radii = rmax * np.arange(1, scan + 1) / scan
    grid = np.broadcast_to(radii, (len(dirs), scan)).copy()
    vals = _ray_values(field, center, dirs, grid) - t
    sign = vals > 0
    if not np.any(sign) or np.all(sign):
        raise EmptyLevelSetError(f"level {t} not attained inside the search region")
    crossings = np.count_nonzero(sign[:, 1:] != sign[:, :-1], axis=1)
    if np.any(crossings != 1) or np.any(sign[:, 0]):
        raise NotStarShapedError(f"level {t}: rays must cross the level exactly once")
    j = np.argmax(sign, axis=1)
    a = radii[j - 1]
    b = radii[j]
    for _ in range(iters):
        mid = 0.5 * (a + b)
        above = field.value(center + mid[:, None] * dirs) > t
        b = np.where(above, mid, b)
        a = np.where(above, a, mid)
    r = 0.5 * (a + b)
    for _ in range(2):
        u, g = field.value_and_gradient(center + r[:, None] * dirs)
        slope = np.einsum("ni,ni->n", g, dirs)
        step = np.where(slope > 0, (u - t) / np.where(slope > 0, slope, 1.0), 0.0)
        r = np.clip(r - step, a, b)
    return r


# marching cubes


def _sample_volume(field, lo, hi, cells):
    grid_values = getattr(field, "values", None)
    if isinstance(grid_values, np.ndarray) and grid_values.ndim == 3:
        return np.array(grid_values, dtype=float), field.h, np.asarray(field.lower, float)
    axes = [np.linspace(lo[d], hi[d], cells + 1) for d in range(3)]
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    out = np.empty(len(X))
    chunk = 1 << 18
    for i in range(0, len(X), chunk):
        out[i:i + chunk] = _safe_values(field, X[i:i + chunk])
    vol = out.reshape((cells + 1,) * 3)
    spacing = (hi - lo) / cells
    return vol, spacing, lo


def _project(field, x, t, step_limit, iters=4):
    """Newton steps along the gradient onto {u = t}, each at most step_limit long."""
    x = x.copy()
    for _ in range(iters):
        with np.errstate(all="ignore"):
            u, g = field.value_and_gradient(x)
        g2 = np.einsum("ni,ni->n", g, g)
        ok = np.isfinite(u) & np.isfinite(g2) & (g2 > 1e-300)
        step = np.zeros_like(x)
        step[ok] = ((u[ok] - t) / g2[ok])[:, None] * g[ok]
        length = np.linalg.norm(step, axis=1)
        scale = np.minimum(1.0, step_limit / np.maximum(length, 1e-300))
        x -= scale[:, None] * step
    return x


def _curved_area_factor(field, t, verts, faces, tri_normal):
    """Area of the surface patch over each flat triangle, relative to the triangle.

    The patch is the closest-point image of the triangle, whose Jacobian is
    (nu . n_T)(1 - d H0) to second order in the signed distance d (H0 is the
    flat mean curvature).  The edge-midpoint rule integrates it exactly for
    quadratics, which removes the O(h^2) deficit of inscribed triangles.
    """
    edges = np.sort(np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1)
    keys, inv = np.unique(edges[:, 0] * np.int64(len(verts)) + edges[:, 1], return_inverse=True)
    a, b = np.divmod(keys, len(verts))
    mid = 0.5 * (verts[a] + verts[b])
    smp = field.evaluate(mid)
    g = smp.grad
    gn = np.linalg.norm(g, axis=1)
    nu = g / gn[:, None]
    lap = np.trace(smp.hess, axis1=1, axis2=2)
    h0 = (lap - np.sum(nu * np.matmul(smp.hess, nu[:, :, None])[:, :, 0], axis=1)) / gn
    d = (np.asarray(smp.u, float) - t) / gn
    inv = inv.reshape(3, -1).T  # (faces, 3) edge ids
    cos = np.abs(np.sum(nu[inv] * tri_normal[:, None, :], axis=2))
    factor = np.mean(cos * (1 - d[inv] * h0[inv]), axis=1)
    return np.where(np.isfinite(factor), factor, 1.0)


def _extract_triangulation(field, t, resolution, eps_crit, degenerate_fraction) -> LevelSurface:
    from skimage.measure import marching_cubes

    if field.n != 3:
        raise ValueError("the triangulation backend is three-dimensional")
    cells = DEFAULT_CELLS if resolution is None else int(resolution)
    lo, hi = (np.asarray(v, float) for v in field.bounding_box(t))
    vol, spacing, origin = _sample_volume(field, lo, hi, cells)
    finite = np.isfinite(vol)
    if not np.any(finite):
        raise EmptyLevelSetError("field is not finite on the sampling grid")
    vol = np.where(np.isnan(vol) | (vol == -np.inf), vol[finite].min(), vol)
    vol = np.where(vol == np.inf, vol[finite].max(), vol)
    if not vol.min() < t < vol.max():
        raise EmptyLevelSetError(f"level {t} not attained on the sampling grid")
    spacing = np.broadcast_to(np.asarray(spacing, float), (3,))
    verts, faces, _, _ = marching_cubes(vol, level=t, spacing=tuple(spacing))
    if len(faces) == 0:
        raise EmptyLevelSetError(f"level {t} produced an empty triangulation")
    verts = verts + origin
    h = float(spacing.max())
    pv = _project(field, verts, t, h)
    tri = pv[faces]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    flat_area = 0.5 * np.linalg.norm(cross, axis=1)
    centroids = _project(field, tri.mean(axis=1), t, h)
    with np.errstate(all="ignore"):
        geom = point_geometry(field, centroids)
        bulge = _curved_area_factor(field, t, pv, faces, cross / (2 * flat_area[:, None]))
        weights = flat_area * bulge * field.metric.area_factor(centroids, geom.flat_normal)
    residual = np.abs(geom.u - t)
    uncertainty = float(np.max(residual[np.isfinite(residual)])) if np.any(np.isfinite(residual)) else 0.0
    uncertainty = max(uncertainty, getattr(field, "value_uncertainty", 0.0))
    nv = len(verts)
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    adj = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(nv, nv))
    used = np.unique(faces)
    _, labels = connected_components(adj, directed=False)
    n_components = len(np.unique(labels[used]))
    return _finalize(field, t, geom, weights, "triangulation", cells, eps_crit, degenerate_fraction,
                     n_components, uncertainty, exclusion_radius=h)
