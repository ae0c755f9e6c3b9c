"""Closed-form Schwarzschild solution in dimension n >= 3.

The oracle functions work in the areal radius r, where
u = sqrt(1 - 2m r^{2-n}) and the horizon sits at r_h^{n-2} = 2m.
:meth:`SchwarzschildModel.field` returns the same solution in isotropic
coordinates, g0 = psi^{4/(n-2)} delta with psi = 1 + (m/2) rho^{2-n}, which is
smooth across the horizon and is what the level-set engine samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import StaticConfig, unit_sphere_area
from .fields import RadialConformalMetric, RadialField


def _pow(base: float, exponent: float) -> float:
    if not base > 0:
        raise ValueError(f"power of a non-positive base {base}")
    return math.exp(exponent * math.log(base))


def _check_level(t: float) -> None:
    if not 0.0 <= t < 1.0:
        raise ValueError(f"Schwarzschild level must lie in [0, 1), got {t}")


@dataclass(frozen=True)
class LevelQuantities:
    radius: float
    u: float
    grad_norm: float
    mean_curvature: float
    area: float
    scalar_curvature: float


@dataclass(frozen=True)
class ConformalQuantities:
    phi_gradient_norm: float
    phi_p_value: float
    cross_section_area_g: float


@dataclass(frozen=True)
class SchwarzschildModel:
    config: StaticConfig

    def __post_init__(self) -> None:
        if self.config.u0 != 0.0:
            raise ValueError("the Schwarzschild model is normalized with u0 = 0")

    @classmethod
    def create(cls, n: int, m: float) -> "SchwarzschildModel":
        return cls(StaticConfig(n, m, 0.0))

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def m(self) -> float:
        return self.config.m

    @property
    def horizon_radius(self) -> float:
        return _pow(2 * self.m, 1.0 / (self.n - 2))

    # areal-radius oracle

    def potential(self, r: float) -> float:
        if r < self.horizon_radius * (1 - 1e-15):
            raise ValueError(f"radius {r} lies inside the horizon")
        return math.sqrt(max(0.0, 1.0 - 2 * self.m * _pow(r, 2 - self.n)))

    def radius_of_level(self, t: float) -> float:
        _check_level(t)
        return _pow(2 * self.m / ((1 - t) * (1 + t)), 1.0 / (self.n - 2))

    def level_quantities(self, t: float) -> LevelQuantities:
        n, m = self.n, self.m
        r = self.radius_of_level(t)
        area_sphere = unit_sphere_area(n)
        return LevelQuantities(
            radius=r,
            u=t,
            grad_norm=m * (n - 2) * _pow(r, 1 - n),
            mean_curvature=(n - 1) * t / r,
            area=_pow(r, n - 1) * area_sphere,
            scalar_curvature=(n - 1) * (n - 2) / r**2,
        )

    def up_exact(self, t: float, p: float) -> float:
        _check_level(t)
        if p < 0:
            raise ValueError("p must be nonnegative")
        n, m = self.n, self.m
        return _pow(m * (n - 2), p) * unit_sphere_area(n)

    def up_direct(self, t: float, p: float) -> float:
        """U_p assembled from its definition: prefactor times |Du|^p times area."""
        q = self.level_quantities(t)
        k = self.config.prefactor_exponent(p)
        return _pow(2 * self.m / ((1 - t) * (1 + t)), k) * _pow(q.grad_norm, p) * q.area

    def conformal_exact(self, p: float) -> ConformalQuantities:
        if p < 0:
            raise ValueError("p must be nonnegative")
        n, two_m = self.n, 2 * self.m
        area_sphere = unit_sphere_area(n)
        return ConformalQuantities(
            phi_gradient_norm=(n - 2) * _pow(two_m, -1.0 / (n - 2)),
            phi_p_value=_pow(two_m, (n - 1 - p) / (n - 2)) * (n - 2) ** p * area_sphere,
            cross_section_area_g=_pow(two_m, (n - 1) / (n - 2)) * area_sphere,
        )

    # isotropic chart

    def isotropic_radius(self, t: float) -> float:
        """Isotropic radius rho of the level {u = t}; t may be negative (second sheet)."""
        if not -1.0 < t < 1.0:
            raise ValueError(f"level {t} outside (-1, 1)")
        return _pow(self.m * (1 + t) / (2 * (1 - t)), 1.0 / (self.n - 2))

    def areal_radius(self, rho):
        psi = 1 + 0.5 * self.m * np.asarray(rho, float) ** (2 - self.n)
        return psi ** (2.0 / (self.n - 2)) * rho

    def _u_profile(self, rho):
        n, m = self.n, self.m
        rho = np.asarray(rho, float)
        q = 0.5 * m * rho ** (2 - n)
        psi = 1 + q
        u = (1 - q) / psi
        u1 = 2 * (n - 2) * q / (rho * psi**2)
        u2 = 2 * (n - 2) * q / (rho**2 * psi**2) * (-(n - 1) + 2 * (n - 2) * q / psi)
        return u, u1, u2

    def _w_profile(self, rho):
        n, m = self.n, self.m
        rho = np.asarray(rho, float)
        q = 0.5 * m * rho ** (2 - n)
        psi = 1 + q
        w = 2.0 / (n - 2) * np.log(psi)
        w1 = -2 * q / (rho * psi)
        w2 = -2 * q / (rho**2 * psi) * (-(n - 1) + (n - 2) * q / psi)
        return w, w1, w2

    def field(self) -> RadialField:
        metric = RadialConformalMetric(self.n, self._w_profile, label="schwarzschild-isotropic")
        return RadialField(self.n, self._u_profile, metric, self.m,
                           inverse=self.isotropic_radius, name="schwarzschild",
                           is_static=True, u0=0.0)
