"""Level-set functionals U_p, W_p, Phi_p and their derivative formulas."""

from __future__ import annotations

import math

import numpy as np

from ..core import StaticConfig
from .extract import LevelSurface, extract


def prefactor(config: StaticConfig, t: float, p: float) -> float:
    """(2m/(1-t^2))^{(p-1)(n-1)/(n-2)}."""
    return (2 * config.m / ((1 - t) * (1 + t))) ** config.prefactor_exponent(p)


def _surface(field, t, surface, extract_kw) -> LevelSurface:
    if surface is not None:
        return surface
    return extract(field, t, **(extract_kw or {}))


def w_p(surface: LevelSurface, p: float) -> float:
    """Raw level integral of |Du|^p."""
    return surface.integrate(surface.grad_norm ** p)


def w_p_derivative(surface: LevelSurface, p: float) -> float:
    """d/dt of the raw integral for harmonic u: -(p-1) int |Du|^{p-1} H."""
    return -(p - 1) * surface.integrate(surface.grad_norm ** (p - 1) * surface.mean_curvature)


def u_p(field, config: StaticConfig, t: float, p: float, surface: LevelSurface | None = None,
        extract_kw: dict | None = None) -> float:
    s = _surface(field, t, surface, extract_kw)
    return prefactor(config, s.t, p) * w_p(s, p)


def up_integrand(surface: LevelSurface, config: StaticConfig) -> np.ndarray:
    """H - 2 (n-1)/(n-2) u |Du| / (1 - u^2) at every sample."""
    u = surface.u
    return surface.mean_curvature - 2 * config.k_exponent * u * surface.grad_norm / (1 - u**2)


def up_derivative_formula(field, config: StaticConfig, t: float, p: float,
                          surface: LevelSurface | None = None, extract_kw: dict | None = None) -> float:
    if p < 1:
        raise ValueError("the derivative formula needs p >= 1")
    s = _surface(field, t, surface, extract_kw)
    bracket = up_integrand(s, config)
    return -(p - 1) * prefactor(config, s.t, p) * s.integrate(s.grad_norm ** (p - 1) * bracket)


def up_second_derivative_at_zero(field, config: StaticConfig, p: float,
                                 surface: LevelSurface | None = None, extract_kw: dict | None = None) -> float:
    """Second derivative at t = 0 through the boundary scalar curvature."""
    s = _surface(field, 0.0, surface, extract_kw)
    n = config.n
    k = config.prefactor_exponent(p)
    g = s.grad_norm
    integrand = g ** (p - 2) * (s.scalar_curvature - 4 * config.k_exponent * g**2)
    return -0.5 * (p - 1) * (2 * config.m) ** k * s.integrate(integrand) if n >= 3 else math.nan


def conformal_gradient(surface: LevelSurface, n: int) -> np.ndarray:
    """|grad phi| in the cylindrical metric, phi = log((1+u)/(1-u))."""
    u = surface.u
    return 2 * surface.grad_norm / (1 - u**2) ** ((n - 1) / (n - 2))


def conformal_area_factor(surface: LevelSurface, n: int) -> np.ndarray:
    return (1 - surface.u**2) ** ((n - 1) / (n - 2))


def phi_p(field, config: StaticConfig, s_value: float | None, p: float,
          surface: LevelSurface | None = None, extract_kw: dict | None = None) -> float:
    """int |grad phi|^p over {phi = s}, both in the cylindrical metric."""
    if surface is None:
        t = math.tanh(s_value / 2)
        surface = extract(field, t, **(extract_kw or {}))
    n = config.n
    return surface.integrate(conformal_gradient(surface, n) ** p * conformal_area_factor(surface, n))
