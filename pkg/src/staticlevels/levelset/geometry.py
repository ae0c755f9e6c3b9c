"""Covariant geometry of the level sets of u at individual points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fields import ScalarField


@dataclass(frozen=True)
class PointGeometry:
    """Geometry of {u = u(x)} and of u at N points, all in the metric g.

    ``normal`` is the unit normal Du/|Du| as a vector; ``flat_normal`` the
    Euclidean unit normal of the chart, used for area weights.  ``h_norm2``
    is |h|^2 of the second fundamental form, ``scalar_curvature`` the
    intrinsic scalar curvature of the level set from the Gauss equation.
    """

    points: np.ndarray
    u: np.ndarray
    grad_norm: np.ndarray
    normal: np.ndarray
    flat_normal: np.ndarray
    laplacian: np.ndarray
    mean_curvature: np.ndarray
    h_norm2: np.ndarray
    scalar_curvature: np.ndarray
    ambient_scalar: np.ndarray
    ricci_normal: np.ndarray
    hessian_norm2: np.ndarray
    gradnorm_grad2: np.ndarray
    hessian_normal: np.ndarray
    static_residual: np.ndarray

    def take(self, mask) -> "PointGeometry":
        return PointGeometry(*(getattr(self, f)[mask] for f in self.__dataclass_fields__))


def _contract(a, hess):
    """sum a_ia a_jb hess_ij hess_ab, batched."""
    return np.sum(np.matmul(np.matmul(np.swapaxes(a, 1, 2), hess), a) * hess, axis=(1, 2))


def point_geometry(field: ScalarField, x) -> PointGeometry:
    x = np.atleast_2d(np.asarray(x, float))
    s = field.evaluate(x)
    md = field.metric.data(x)
    du = s.grad
    up = np.einsum("nij,nj->ni", md.ginv, du)
    grad2 = np.einsum("ni,ni->n", du, up)
    with np.errstate(invalid="ignore", divide="ignore"):
        grad_norm = np.sqrt(grad2)
        hess = s.hess - np.einsum("nkij,nk->nij", md.christoffel, du)
        lap = np.einsum("nij,nij->n", md.ginv, hess)
        nu = up / grad_norm[:, None]
        hnn = np.einsum("ni,nj,nij->n", nu, nu, hess)
        H = (lap - hnn) / grad_norm
        proj = md.ginv - nu[:, :, None] * nu[:, None, :]
        h2 = _contract(proj, hess) / grad2
        ric_nn = np.einsum("ni,nj,nij->n", nu, nu, md.ricci)
        r_surface = md.scalar - 2 * ric_nn + H**2 - h2
        hess2 = _contract(md.ginv, hess)
        dgrad = np.einsum("nij,nj->ni", hess, up) / grad_norm[:, None]
        dgrad2 = np.einsum("nij,ni,nj->n", md.ginv, dgrad, dgrad)
        flat = du / np.linalg.norm(du, axis=1)[:, None]
        static = np.max(np.abs(s.u[:, None, None] * md.ricci - hess), axis=(1, 2))
    return PointGeometry(x, s.u, grad_norm, nu, flat, lap, H, h2, r_surface, md.scalar,
                         ric_nn, hess2, dgrad2, hnn, static)


def kato_gap(geom: PointGeometry, n: int) -> np.ndarray:
    """|D^2 u|^2 - n/(n-1) |grad |Du||^2, nonnegative for harmonic u."""
    return geom.hessian_norm2 - n / (n - 1) * geom.gradnorm_grad2
