"""Harmonic test potentials on a flat background.

Two families are provided: closed-form multi-center fields
u = 1 - sum_i m_i |x - x_i|^{2-n}, and a red-black SOR solver for the
exterior Dirichlet problem on a uniform 3-D grid with excised balls.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .fields import FieldSample, FlatMetric, ScalarField, SingularPointError


class ConvergenceError(RuntimeError):
    """The iterative solver did not reach its residual tolerance."""


class MultiCenterField(ScalarField):
    """u(x) = 1 - sum_i m_i |x - x_i|^{2-n} on flat R^n minus the centers."""

    def __init__(self, centers: Sequence[Sequence[float]], weights: Sequence[float],
                 n: int | None = None, name: str = "multicenter"):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.weights = np.asarray(weights, dtype=float).ravel()
        if self.centers.shape[0] != self.weights.size:
            raise ValueError("one weight per center is required")
        if np.any(self.weights <= 0):
            raise ValueError("center weights must be positive")
        self.n = self.centers.shape[1] if n is None else n
        if self.centers.shape[1] != self.n or self.n < 3:
            raise ValueError("centers must be points in R^n with n >= 3")
        self.metric = FlatMetric(self.n)
        self.mass = float(self.weights.sum())
        self.name = name

    @classmethod
    def monopole(cls, n: int = 3, m: float = 1.0, center=None) -> "MultiCenterField":
        c = np.zeros(n) if center is None else center
        return cls([c], [m], n=n, name="monopole")

    @property
    def radially_symmetric(self) -> bool:
        return len(self.weights) == 1

    def _offsets(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = x[:, None, :] - self.centers[None, :, :]
        r = np.linalg.norm(y, axis=2)
        if np.any(r == 0):
            raise SingularPointError(f"{self.name}: evaluation at a center")
        return y, r

    def value(self, x):
        _, r = self._offsets(x)
        return 1.0 - (self.weights * r ** (2.0 - self.n)).sum(axis=1)

    def value_and_gradient(self, x):
        y, r = self._offsets(x)
        n = self.n
        u = 1.0 - (self.weights * r ** (2.0 - n)).sum(axis=1)
        coef = (n - 2) * self.weights * r ** (-float(n))
        return u, np.einsum("nc,nci->ni", coef, y)

    def evaluate(self, x) -> FieldSample:
        y, r = self._offsets(x)
        n = self.n
        u = 1.0 - (self.weights * r ** (2.0 - n)).sum(axis=1)
        coef = (n - 2) * self.weights * r ** (-float(n))
        grad = np.einsum("nc,nci->ni", coef, y)
        hess = (coef.sum(axis=1)[:, None, None] * np.eye(n)
                - n * np.einsum("nc,nci,ncj->nij", coef / r**2, y, y))
        return FieldSample(u, grad, hess)

    def bounding_box(self, t):
        if t >= 1:
            raise ValueError("levels of a multi-center field lie below 1")
        # outside every ball of this radius the sum is below 1 - t
        radius = (self.mass / (1.0 - t)) ** (1.0 / (self.n - 2))
        lo = self.centers.min(axis=0) - 1.02 * radius
        hi = self.centers.max(axis=0) + 1.02 * radius
        return lo, hi

    def star_center(self):
        return (self.weights[:, None] * self.centers).sum(axis=0) / self.mass

    def critical_points(self) -> np.ndarray:
        """Gradient zeros; they lie in the convex hull of the centers."""
        if len(self.weights) < 2:
            return np.zeros((0, self.n))
        lo, hi = self.centers.min(axis=0), self.centers.max(axis=0)
        pad = 0.25 * float(np.max(hi - lo))
        return critical_points(self, lo - pad, hi + pad, seeds_per_axis=5)

    def critical_values(self) -> list[float]:
        pts = self.critical_points()
        return sorted(float(v) for v in self.value(pts)) if len(pts) else []

    def describe(self):
        d = super().describe()
        d.update(centers=self.centers.tolist(), weights=self.weights.tolist())
        return d


def critical_points(field: ScalarField, lower, upper, seeds_per_axis: int = 6,
                    max_iter: int = 60, tol: float = 1e-11) -> np.ndarray:
    """Zeros of the gradient found by damped Newton from a seed lattice.

    Results closer than one lattice spacing are merged; points that ended
    up on top of a singular center are discarded.
    """
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    n = lower.size
    axes = [np.linspace(lower[d], upper[d], seeds_per_axis + 2)[1:-1] for d in range(n)]
    spacing = float(np.min((upper - lower) / (seeds_per_axis + 1)))
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    alive = np.ones(len(x), dtype=bool)
    converged = np.zeros(len(x), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(alive & ~converged)
        if idx.size == 0:
            break
        try:
            s = field.evaluate(x[idx])
        except SingularPointError:
            # drop seeds that walked onto a singularity, one at a time
            for i in idx:
                try:
                    field.evaluate(x[i:i + 1])
                except SingularPointError:
                    alive[i] = False
            continue
        gnorm = np.linalg.norm(s.grad, axis=1)
        scale = np.maximum(1.0, np.abs(s.u))
        done = gnorm < tol * scale
        converged[idx[done]] = True
        active = ~done
        if not np.any(active):
            continue
        det = np.linalg.det(s.hess[active])
        singular = np.abs(det) < 1e-300
        step = np.zeros((active.sum(), n))
        good = ~singular
        if np.any(good):
            step[good] = np.linalg.solve(s.hess[active][good], s.grad[active][good][..., None])[..., 0]
        # damp: never move further than one lattice spacing per iteration
        length = np.linalg.norm(step, axis=1)
        factor = np.minimum(1.0, spacing / np.maximum(length, 1e-300))
        ids = idx[active]
        x[ids] -= factor[:, None] * step
        alive[ids[singular]] = False
        outside = np.any((x[ids] < lower) | (x[ids] > upper), axis=1)
        alive[ids[outside]] = False
    found = x[converged & alive]
    unique: list[np.ndarray] = []
    for p in found:
        if all(np.linalg.norm(p - q) > spacing for q in unique):
            unique.append(p)
    centers = getattr(field, "centers", None)
    if centers is not None:
        unique = [p for p in unique if np.min(np.linalg.norm(centers - p, axis=1)) > 1e-6 * spacing]
    unique.sort(key=lambda p: tuple(p))
    return np.array(unique).reshape(-1, n)


# ---------------------------------------------------------------------------
# grid solver

FLUID, OUTER, EXCISED = 1, 0, 2
_MAGIC = b"SLGF"


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float
    value: float = 0.0


@dataclass
class GridSpec:
    """Uniform grid on the box [lower, upper] (3-D) with excised balls.

    Outer-boundary nodes carry 1 - outer_mass |x|^{2-n}; nodes inside a ball
    carry the ball's Dirichlet value.
    """

    lower: tuple
    upper: tuple
    h: float
    balls: list = field(default_factory=list)
    outer_mass: float = 1.0
    tol: float = 1e-10
    max_sweeps: int = 100_000
    check_every: int = 10

    def __post_init__(self):
        self.lower = tuple(float(v) for v in self.lower)
        self.upper = tuple(float(v) for v in self.upper)
        self.balls = [b if isinstance(b, Ball) else Ball(tuple(b[0]), float(b[1]), float(b[2]) if len(b) > 2 else 0.0)
                      for b in self.balls]

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple:
        cells = [(hi - lo) / self.h for lo, hi in zip(self.lower, self.upper)]
        counts = [int(round(c)) for c in cells]
        if any(abs(c - k) > 1e-9 * max(1.0, c) for c, k in zip(cells, counts)):
            raise ValueError("box extents must be integer multiples of h")
        return tuple(k + 1 for k in counts)

    def validate(self) -> None:
        if self.n != 3:
            raise ValueError("the grid solver works on 3-D grids")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        lo, hi = np.array(self.lower), np.array(self.upper)
        if np.any(hi - lo < 4 * self.h):
            raise ValueError("grid box is too small for the spacing")
        for b in self.balls:
            c = np.asarray(b.center, float)
            if b.radius <= 0:
                raise ValueError("excised balls need positive radius")
            if np.any(c - b.radius <= lo + self.h) or np.any(c + b.radius >= hi - self.h):
                raise ValueError("excised ball must lie strictly inside the grid box")
        self.shape  # noqa: B018 - raises on non-integer extents

    def axes(self):
        return [self.lower[d] + self.h * np.arange(k) for d, k in enumerate(self.shape)]


def _outer_data(x: np.ndarray, mass: float, n: int) -> np.ndarray:
    r = np.linalg.norm(x, axis=-1)
    with np.errstate(divide="ignore"):
        return 1.0 - mass * r ** (2.0 - n)


def _build_system(spec: GridSpec):
    """Node kinds, Shortley-Weller coefficients (scaled by h^2) and initial values."""
    shape = spec.shape
    h = spec.h
    X = np.stack(np.meshgrid(*spec.axes(), indexing="ij"), axis=-1)
    kind = np.full(shape, FLUID, dtype=np.int8)
    owner = np.full(shape, -1, dtype=np.int32)
    u = np.zeros(shape)
    boundary = np.zeros(shape, dtype=bool)
    for d in range(3):
        sl = [slice(None)] * 3
        sl[d] = 0
        boundary[tuple(sl)] = True
        sl[d] = -1
        boundary[tuple(sl)] = True
    kind[boundary] = OUTER
    u[boundary] = _outer_data(X[boundary], spec.outer_mass, 3)
    for i, b in enumerate(spec.balls):
        inside = np.sum((X - np.asarray(b.center)) ** 2, axis=-1) <= b.radius**2
        kind[inside] = EXCISED
        owner[inside] = i
        u[inside] = b.value
    fluid = kind == FLUID
    if not np.any(fluid):
        raise ValueError("grid has no interior unknowns")
    u[fluid] = u[boundary].mean()

    coef = np.zeros((6,) + shape)
    rhs = np.zeros(shape)
    diag = np.ones(shape)
    fi = np.argwhere(fluid)
    arm = np.ones((len(fi), 6))  # distance to each neighbour in units of h
    arm_value = np.zeros((len(fi), 6))
    cut = np.zeros((len(fi), 6), dtype=bool)
    for d in range(3):
        for side, sgn in ((0, -1), (1, 1)):
            j = 2 * d + side
            nb = fi.copy()
            nb[:, d] += sgn
            nb_kind = kind[tuple(nb.T)]
            hit = np.flatnonzero(nb_kind == EXCISED)
            for row in hit:
                ball = spec.balls[owner[tuple(nb[row])]]
                y = X[tuple(fi[row])] - np.asarray(ball.center)
                disc = y[d] ** 2 - (y @ y - ball.radius**2)
                root = -sgn * y[d] - math.sqrt(max(disc, 0.0))
                theta = min(max(root / h, 1e-8), 1.0)
                arm[row, j] = theta
                arm_value[row, j] = ball.value
                cut[row, j] = True
    total_diag = np.zeros(len(fi))
    total_rhs = np.zeros(len(fi))
    for d in range(3):
        a, b = arm[:, 2 * d], arm[:, 2 * d + 1]
        cm = 2.0 / (a * (a + b))
        cp = 2.0 / (b * (a + b))
        total_diag += 2.0 / (a * b)
        for j, c in ((2 * d, cm), (2 * d + 1, cp)):
            c_grid = np.where(cut[:, j], 0.0, c)
            coef[(j,) + tuple(fi.T)] = c_grid
            total_rhs += np.where(cut[:, j], c * arm_value[:, j], 0.0)
    diag[tuple(fi.T)] = total_diag
    rhs[tuple(fi.T)] = total_rhs
    return X, kind, u, coef, diag, rhs


@njit(cache=True)
def _half_sweep(u, coef, diag, rhs, kind, color, omega):
    nx, ny, nz = u.shape
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            k0 = 1 + ((i + j + 1 + color) % 2)
            for k in range(k0, nz - 1, 2):
                if kind[i, j, k] != 1:
                    continue
                s = (coef[0, i, j, k] * u[i - 1, j, k] + coef[1, i, j, k] * u[i + 1, j, k]
                     + coef[2, i, j, k] * u[i, j - 1, k] + coef[3, i, j, k] * u[i, j + 1, k]
                     + coef[4, i, j, k] * u[i, j, k - 1] + coef[5, i, j, k] * u[i, j, k + 1])
                gs = (s + rhs[i, j, k]) / diag[i, j, k]
                u[i, j, k] += omega * (gs - u[i, j, k])


@njit(cache=True)
def _max_residual(u, coef, diag, rhs, kind):
    nx, ny, nz = u.shape
    worst = 0.0
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            for k in range(1, nz - 1):
                if kind[i, j, k] != 1:
                    continue
                s = (coef[0, i, j, k] * u[i - 1, j, k] + coef[1, i, j, k] * u[i + 1, j, k]
                     + coef[2, i, j, k] * u[i, j - 1, k] + coef[3, i, j, k] * u[i, j + 1, k]
                     + coef[4, i, j, k] * u[i, j, k - 1] + coef[5, i, j, k] * u[i, j, k + 1])
                r = abs((s + rhs[i, j, k]) / diag[i, j, k] - u[i, j, k])
                if r > worst:
                    worst = r
    return worst


def solve_dirichlet(spec: GridSpec) -> "GridField":
    """Solve Laplace's equation on the grid by Chebyshev-accelerated red-black SOR.

    The residual is the max-norm over unknowns of the diagonally scaled
    discrete Laplacian, i.e. the size of the next Jacobi correction.
    """
    spec.validate()
    X, kind, u, coef, diag, rhs = _build_system(spec)
    rho = float(np.mean([math.cos(math.pi / (k - 1)) for k in spec.shape]))
    omega = 1.0
    residual = math.inf
    sweeps = 0
    while sweeps < spec.max_sweeps:
        for color in (0, 1):
            _half_sweep(u, coef, diag, rhs, kind, color, omega)
            omega = 1.0 / (1.0 - 0.5 * rho**2) if sweeps == 0 and color == 0 else \
                1.0 / (1.0 - 0.25 * rho**2 * omega)
        sweeps += 1
        if sweeps % spec.check_every == 0:
            residual = _max_residual(u, coef, diag, rhs, kind)
            if residual < spec.tol:
                break
    else:
        residual = _max_residual(u, coef, diag, rhs, kind)
    if not residual < spec.tol:
        raise ConvergenceError(f"SOR stopped after {sweeps} sweeps with residual {residual:.3e}")
    return GridField(spec, u, kind, iterations=sweeps, residual=residual)


def _shifted(a, axis, k):
    """b[i] = a[i + k] along axis, NaN past the ends."""
    out = np.full_like(a, np.nan)
    N = a.shape[axis]
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if k >= 0:
        src[axis], dst[axis] = slice(k, N), slice(0, N - k)
    else:
        src[axis], dst[axis] = slice(0, N + k), slice(-k, N)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _diff1(a, axis, h, order=4):
    if order == 2:
        return (_shifted(a, axis, 1) - _shifted(a, axis, -1)) / (2 * h)
    return (8 * (_shifted(a, axis, 1) - _shifted(a, axis, -1))
            - (_shifted(a, axis, 2) - _shifted(a, axis, -2))) / (12 * h)


def _diff2(a, axis, h, order=4):
    if order == 2:
        return (_shifted(a, axis, 1) + _shifted(a, axis, -1) - 2 * a) / h**2
    return (16 * (_shifted(a, axis, 1) + _shifted(a, axis, -1)) - 30 * a
            - (_shifted(a, axis, 2) + _shifted(a, axis, -2))) / (12 * h**2)


def _derivative_arrays(u, h, order):
    n = u.ndim
    grad = np.stack([_diff1(u, d, h, order) for d in range(n)])
    hess = np.empty((n, n) + u.shape)
    for d in range(n):
        hess[d, d] = _diff2(u, d, h, order)
        for c in range(d + 1, n):
            hess[d, c] = hess[c, d] = _diff1(grad[d], c, h, order)
    return grad, hess


@njit(cache=True)
def _interp_kernel(data, rel, ncomp, out):
    """Tricubic Lagrange interpolation of data[..., :ncomp] at fractional indices rel.

    Components whose 4^3 stencil contains NaN fall back to trilinear.
    """
    N0, N1, N2 = data.shape[0], data.shape[1], data.shape[2]
    shape = (N0, N1, N2)
    lin = np.empty(ncomp)
    wl = np.empty((3, 2))
    wc = np.empty((3, 4))
    bl = np.empty(3, np.int64)
    bc = np.empty(3, np.int64)
    for p in range(rel.shape[0]):
        for d in range(3):
            b = int(math.floor(rel[p, d]))
            b = min(max(b, 0), shape[d] - 2)
            f = rel[p, d] - b
            bl[d] = b
            wl[d, 0] = 1 - f
            wl[d, 1] = f
            b4 = min(max(b, 1), shape[d] - 3)
            f = rel[p, d] - b4
            bc[d] = b4 - 1
            wc[d, 0] = -f * (f - 1) * (f - 2) / 6
            wc[d, 1] = (f + 1) * (f - 1) * (f - 2) / 2
            wc[d, 2] = -(f + 1) * f * (f - 2) / 2
            wc[d, 3] = (f + 1) * f * (f - 1) / 6
        for c in range(ncomp):
            out[p, c] = 0.0
            lin[c] = 0.0
        for i in range(4):
            for j in range(4):
                wij = wc[0, i] * wc[1, j]
                for k in range(4):
                    w = wij * wc[2, k]
                    for c in range(ncomp):
                        out[p, c] += w * data[bc[0] + i, bc[1] + j, bc[2] + k, c]
        for i in range(2):
            for j in range(2):
                wij = wl[0, i] * wl[1, j]
                for k in range(2):
                    w = wij * wl[2, k]
                    for c in range(ncomp):
                        lin[c] += w * data[bl[0] + i, bl[1] + j, bl[2] + k, c]
        for c in range(ncomp):
            if not np.isfinite(out[p, c]):
                out[p, c] = lin[c]



class GridField(ScalarField):
    """Nodal solution on a uniform grid, with 4th-order centered derivatives.

    Off-node values and derivatives are tricubic Lagrange interpolants of the
    nodal values and of the nodal stencils.  Close to an excised ball or the
    outer boundary the stencils drop to 2nd order and the interpolant to
    trilinear; derivatives that still reach past them are reported as NaN.
    """

    def __init__(self, spec: GridSpec, values: np.ndarray, kind: np.ndarray | None = None,
                 iterations: int = 0, residual: float = float("nan"), name: str = "grid"):
        self.spec = spec
        self.values = np.ascontiguousarray(values, dtype=float)
        self.n = values.ndim
        self.kind = kind if kind is not None else np.full(values.shape, FLUID, dtype=np.int8)
        self.iterations = iterations
        self.residual = residual
        self.metric = FlatMetric(self.n)
        self.mass = spec.outer_mass
        self.name = name
        self.lower = np.asarray(spec.lower)
        self.h = spec.h
        self._derivatives()

    def _derivatives(self):
        u = np.where(self.kind == EXCISED, np.nan, self.values)
        # NaN propagation marks every stencil that touches an excised node or the edge
        grad, hess = _derivative_arrays(u, self.h, 4)
        high = np.all(np.isfinite(grad), axis=0) & np.all(np.isfinite(hess), axis=(0, 1))
        grad2, hess2 = _derivative_arrays(u, self.h, 2)
        grad = np.where(high, grad, grad2)
        hess = np.where(high, hess, hess2)
        self.valid = np.all(np.isfinite(grad), axis=0) & np.all(np.isfinite(hess), axis=(0, 1))
        n = self.n
        # components last: value, gradient, Hessian (row major)
        pack = np.empty(u.shape + (1 + n + n * n,))
        pack[..., 0] = self.values
        pack[..., 1:1 + n] = np.moveaxis(grad, 0, -1)
        pack[..., 1 + n:] = np.moveaxis(hess.reshape((n * n,) + u.shape), 0, -1)
        pack[~self.valid, 1:] = np.nan
        self._pack = pack

    def _locate(self, x):
        x = np.atleast_2d(np.asarray(x, float))
        rel = (x - self.lower) / self.h
        shape = np.array(self.values.shape)
        if np.any(rel < -1e-12) or np.any(rel > shape - 1 + 1e-12):
            raise SingularPointError("grid field evaluated outside its box")
        for b in self.spec.balls:
            if np.any(np.sum((x - np.asarray(b.center)) ** 2, axis=1) < b.radius**2):
                raise SingularPointError("grid field evaluated inside an excised ball")
        return np.ascontiguousarray(rel)

    def _interp(self, x, ncomp):
        rel = self._locate(x)
        out = np.empty((len(rel), ncomp))
        _interp_kernel(self._pack, rel, ncomp, out)
        return out

    def value(self, x):
        return self._interp(x, 1)[:, 0]

    def value_and_gradient(self, x):
        out = self._interp(x, 1 + self.n)
        return out[:, 0], out[:, 1:]

    def evaluate(self, x) -> FieldSample:
        n = self.n
        out = self._interp(x, 1 + n + n * n)
        return FieldSample(out[:, 0], out[:, 1:1 + n], out[:, 1 + n:].reshape(-1, n, n))

    def bounding_box(self, t):
        return self.lower.copy(), self.lower + self.h * (np.array(self.values.shape) - 1)

    def star_center(self):
        if self.spec.balls:
            return np.asarray(self.spec.balls[0].center, float)
        return super().star_center()

    def node_coordinates(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.spec.axes(), indexing="ij"), axis=-1)

    def fluid_mask(self) -> np.ndarray:
        return self.kind == FLUID

    # serialization

    def to_binary(self, path) -> None:
        """Flat little-endian layout: magic, version, ndim, dims, spacing, origin, payload."""
        dims = self.values.shape
        header = _MAGIC + struct.pack("<II", 1, len(dims))
        header += struct.pack(f"<{len(dims)}Q", *dims)
        header += struct.pack("<d", self.h)
        header += struct.pack(f"<{len(dims)}d", *self.lower)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(self.values.astype("<f8", copy=False).tobytes(order="C"))

    @classmethod
    def from_binary(cls, path, outer_mass: float = 1.0) -> "GridField":
        data = Path(path).read_bytes()
        if data[:4] != _MAGIC:
            raise ValueError("not a grid field file")
        version, ndim = struct.unpack_from("<II", data, 4)
        if version != 1:
            raise ValueError(f"unsupported grid file version {version}")
        off = 12
        dims = struct.unpack_from(f"<{ndim}Q", data, off)
        off += 8 * ndim
        (h,) = struct.unpack_from("<d", data, off)
        off += 8
        origin = struct.unpack_from(f"<{ndim}d", data, off)
        off += 8 * ndim
        values = np.frombuffer(data, dtype="<f8", offset=off, count=int(np.prod(dims))).reshape(dims)
        upper = tuple(o + h * (k - 1) for o, k in zip(origin, dims))
        spec = GridSpec(origin, upper, h, outer_mass=outer_mass)
        return cls(spec, values.astype(float))

    def to_csv(self, path) -> None:
        X = self.node_coordinates().reshape(-1, self.n)
        names = ["x", "y", "z"][: self.n] if self.n <= 3 else [f"x{i}" for i in range(self.n)]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names + ["u"])
            for row, val in zip(X, self.values.reshape(-1)):
                w.writerow([repr(float(v)) for v in row] + [repr(float(val))])


def monopole_error(field: GridField, mass: float) -> float:
    """Max nodal error over unknowns against 1 - mass |x|^{2-n}."""
    X = field.node_coordinates()
    exact = _outer_data(X, mass, field.n)
    mask = field.fluid_mask()
    return float(np.max(np.abs(field.values[mask] - exact[mask])))


def convergence_order(spacings: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    slope, _ = np.polyfit(np.log(spacings), np.log(errors), 1)
    return float(slope)


def spherical_excision_spec(h: float, radius: float = 0.5, half_width: float = 1.0,
                            u0: float = 0.0, tol: float = 1e-10) -> GridSpec:
    """Single ball at the origin with outer data from the matching exact monopole.

    The monopole 1 - m |x|^{-1} with m = (1 - u0) radius takes the value u0
    on the sphere, so the continuous problem has that monopole as solution.
    """
    mass = (1.0 - u0) * radius
    return GridSpec((-half_width,) * 3, (half_width,) * 3, h,
                    balls=[Ball((0.0, 0.0, 0.0), radius, u0)], outer_mass=mass, tol=tol)
