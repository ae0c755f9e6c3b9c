"""The cylindrical change of variables phi = log((1+u)/(1-u)), g = (1-u^2)^{2/(n-2)} g0.

Pointwise conversions between (g0, u) and (g, phi), the U_p <-> Phi_p
dictionary, and a quadrature check of the first integral identity on the
Schwarzschild cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import StaticConfig


def _as_array(x):
    return np.asarray(x, dtype=float)


def to_phi(u):
    """phi = log((1+u)/(1-u)) = 2 artanh(u)."""
    u = _as_array(u)
    if np.any(np.abs(u) >= 1):
        raise ValueError("to_phi needs |u| < 1")
    out = 2.0 * np.arctanh(u)
    return float(out) if out.ndim == 0 else out


def from_phi(phi):
    out = np.tanh(_as_array(phi) / 2.0)
    return float(out) if out.ndim == 0 else out


def _one_minus_u2(u, one_minus_u2):
    if one_minus_u2 is not None:
        return _as_array(one_minus_u2)
    u = _as_array(u)
    return (1 - u) * (1 + u)


@dataclass(frozen=True)
class ConformalPointData:
    """Original-metric data at a point: u, |Du|, D^2u(nu,nu), |D^2u|^2, D^2u(Du,Du)."""

    u: float
    grad_norm: float
    hess_nn: float
    hess_norm2: float
    hess_grad_grad: float
    one_minus_u2: float | None = None

    @property
    def phi(self):
        return to_phi(self.u)

    def gradient_norm_g(self, config: StaticConfig):
        return gradient_norm_g(self.u, self.grad_norm, config.n, self.one_minus_u2)

    def hessian_norm_g(self, config: StaticConfig):
        return hessian_norm_g(self.u, self.grad_norm, self.hess_norm2, self.hess_grad_grad,
                              config.n, self.one_minus_u2)


def gradient_norm_g(u, grad_norm, n: int, one_minus_u2=None):
    """|grad phi|_g = 2|Du| / (1-u^2)^{(n-1)/(n-2)}."""
    w = _one_minus_u2(u, one_minus_u2)
    return 2 * _as_array(grad_norm) / w ** ((n - 1) / (n - 2))


def mean_curvature_g(H, u, grad_norm, n: int, one_minus_u2=None):
    """Mean curvature of the level set in g, from its mean curvature in g0."""
    w = _one_minus_u2(u, one_minus_u2)
    k = (n - 1) / (n - 2)
    return w ** (-1.0 / (n - 2)) * (_as_array(H) - k * 2 * _as_array(u) * _as_array(grad_norm) / w)


def mean_curvature_from_g(H_g, phi, grad_phi_g, n: int):
    """Inverse of :func:`mean_curvature_g`, written in phi and |grad phi|_g."""
    phi = _as_array(phi)
    k = (n - 1) / (n - 2)
    return np.cosh(phi / 2) ** (-2.0 / (n - 2)) * (_as_array(H_g) + k * np.tanh(phi / 2) * _as_array(grad_phi_g))


def hessian_norm_g(u, grad_norm, hess_norm2, hess_grad_grad, n: int, one_minus_u2=None):
    """|Hess_g phi|^2_g for harmonic u, from |D^2u|^2 and D^2u(Du,Du)."""
    w = _one_minus_u2(u, one_minus_u2)
    u = _as_array(u)
    g = _as_array(grad_norm)
    return (4 * _as_array(hess_norm2) / w ** (2 * n / (n - 2))
            + 16 * n / (n - 2) * u * _as_array(hess_grad_grad) / w ** ((3 * n - 2) / (n - 2))
            + 16 * n * (n - 1) / (n - 2) ** 2 * u**2 * g**4 / w ** ((4 * n - 4) / (n - 2)))


def hessian_phi_grad_grad(u, grad_norm, hess_grad_grad, n: int, one_minus_u2=None):
    """Hess_g phi(grad phi, grad phi) for harmonic u."""
    w = _one_minus_u2(u, one_minus_u2)
    u = _as_array(u)
    g = _as_array(grad_norm)
    conf4 = w ** (-4.0 / (n - 2))  # |.|_g of a (0,2) tensor against raised vectors
    fp = 2 / w
    return conf4 * fp**2 * (fp * _as_array(hess_grad_grad)
                            + 4 * u * (n - 1) * g**4 / ((n - 2) * w**2))


def scalar_curvature_g(grad_phi_g, n: int):
    """R_g = (n-1) |grad phi|^2_g / (n-2)."""
    if n < 3:
        raise ValueError("scalar_curvature_g needs n >= 3")
    return (n - 1) * _as_array(grad_phi_g) ** 2 / (n - 2)


# U_p <-> Phi_p


def _scale(config: StaticConfig, p: float) -> float:
    return (2 * config.m) ** config.prefactor_exponent(p)


def up_from_phi_p(phi_value, p: float, config: StaticConfig):
    return _scale(config, p) / 2.0**p * phi_value


def phi_p_from_up(up_value, p: float, config: StaticConfig):
    return 2.0**p / _scale(config, p) * up_value


def dup_from_dphi_p(dphi, t: float, p: float, config: StaticConfig):
    return _scale(config, p) / (2.0 ** (p - 1) * (1 - t) * (1 + t)) * dphi


def dphi_p_from_dup(dup, t: float, p: float, config: StaticConfig):
    return 2.0 ** (p - 1) * (1 - t) * (1 + t) / _scale(config, p) * dup


def d2up_from_phi(dphi, d2phi, t: float, p: float, config: StaticConfig):
    """U_p'' from Phi_p' and Phi_p'' at s = to_phi(t)."""
    w = (1 - t) * (1 + t)
    return _scale(config, p) / (2.0 ** (p - 2) * w**2) * (t * dphi + d2phi)


def d2phi_from_up(dup, d2up, t: float, p: float, config: StaticConfig):
    """Phi_p'' from U_p' and U_p''."""
    w = (1 - t) * (1 + t)
    dphi = dphi_p_from_dup(dup, t, p, config)
    return 2.0 ** (p - 2) * w**2 / _scale(config, p) * d2up - t * dphi


def phi_p_limit(config: StaticConfig, p: float) -> float:
    """Value of Phi_p on the Schwarzschild solution of mass m."""
    from .core import unit_sphere_area

    n, m = config.n, config.m
    return (2 * m) ** ((n - 1 - p) / (n - 2)) * (n - 2) ** p * unit_sphere_area(n)


# first integral identity on a cylinder


def _levels_integrand(field, config, phis, p, order):
    """phi -> int_{phi} F / |grad phi| dsigma_g, where F is the identity's volume integrand."""
    from .levelset.extract import extract
    from .levelset.functionals import conformal_area_factor

    n = config.n
    out = np.empty(len(phis))
    for i, ph in enumerate(phis):
        t = math.tanh(ph / 2)
        surf = extract(field, t, resolution=order, backend="radial")
        geo = surf.geometry
        w = 1 / np.cosh(ph / 2) ** 2
        grad_phi = gradient_norm_g(geo.u, geo.grad_norm, n, w)
        hgg = geo.hessian_normal * geo.grad_norm**2
        hphi = hessian_phi_grad_grad(geo.u, geo.grad_norm, hgg, n, w)
        F = grad_phi ** (p - 3) * (grad_phi**4 / math.tanh(ph) - (p - 1) * hphi) / math.sinh(ph)
        out[i] = surf.integrate(F / grad_phi * conformal_area_factor(surf, n))
    return out


def cylinder_identity_sides(field, config: StaticConfig, s: float, p: float,
                            nodes: int = 128, order: int = 8) -> tuple[float, float]:
    """Both sides of the first integral identity at the level phi = s.

    The volume side is reduced by coarea to an integral over phi in (s, inf),
    mapped to x = exp(-phi) in (0, exp(-s)] and integrated by Gauss-Legendre.
    """
    from .levelset.extract import extract
    from .levelset.functionals import conformal_area_factor

    if not s > 0:
        raise ValueError("the identity is stated for s > 0")
    if p < 1:
        raise ValueError("the identity needs p >= 1")
    n = config.n
    surf = extract(field, math.tanh(s / 2), resolution=order, backend="radial")
    grad_phi = gradient_norm_g(surf.u, surf.grad_norm, n, 1 / np.cosh(s / 2) ** 2)
    lhs = surf.integrate(grad_phi**p * conformal_area_factor(surf, n)) / math.sinh(s)
    x, wts = np.polynomial.legendre.leggauss(nodes)
    top = math.exp(-s)
    xs = 0.5 * top * (x + 1)
    values = _levels_integrand(field, config, -np.log(xs), p, order)
    rhs = float(np.dot(0.5 * top * wts, values / xs))
    if not np.isfinite(rhs):
        raise ArithmeticError("semi-infinite quadrature did not converge")
    return float(lhs), rhs


def cylinder_identity_check(field, config: StaticConfig, s: float, p: float, **kw) -> float:
    """|LHS - RHS| / |LHS| for the first integral identity."""
    lhs, rhs = cylinder_identity_sides(field, config, s, p, **kw)
    return abs(lhs - rhs) / abs(lhs)
