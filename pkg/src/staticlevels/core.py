"""Dimensional constants, averaged norms and the K-factor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

# relative tolerance for "is this sample set constant" decisions
CONSTANCY_RTOL = 1e-9


class DegenerateLevelSetError(ValueError):
    """A level set has no usable area or a vanishing gradient everywhere."""


@dataclass(frozen=True)
class StaticConfig:
    """Dimension, ADM mass and Dirichlet boundary value of a static problem."""

    n: int
    m: float
    u0: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"dimension n must be an integer >= 3, got {self.n}")
        if not self.m > 0:
            raise ValueError(f"mass m must be positive, got {self.m}")
        if not 0.0 <= self.u0 < 1.0:
            raise ValueError(f"boundary value u0 must lie in [0, 1), got {self.u0}")

    @property
    def k_exponent(self) -> float:
        """(n-1)/(n-2), the exponent that recurs in every renormalization."""
        return (self.n - 1) / (self.n - 2)

    def prefactor_exponent(self, p: float) -> float:
        return (p - 1.0) * (self.n - 1) / (self.n - 2)


@dataclass(frozen=True)
class LevelValue:
    """A potential value t together with its conformal value s = log((1+t)/(1-t))."""

    t: float
    s: float

    def __post_init__(self) -> None:
        if not -1.0 < self.t < 1.0:
            raise ValueError(f"level t must lie in (-1, 1), got {self.t}")
        expected = 2.0 * math.atanh(self.t)
        if not math.isclose(self.s, expected, rel_tol=1e-14, abs_tol=1e-300):
            raise ValueError(f"inconsistent level pair t={self.t}, s={self.s}")

    @classmethod
    def from_t(cls, t: float) -> "LevelValue":
        return cls(float(t), 2.0 * math.atanh(t))

    @classmethod
    def from_s(cls, s: float) -> "LevelValue":
        t = math.tanh(s / 2.0)
        # store the s that t maps back to, so the pair is exactly consistent
        return cls(t, 2.0 * math.atanh(t))


def _gamma_half_integer(n: int) -> float:
    """Gamma(n/2) for a positive integer n, from the factorial closed forms."""
    if n % 2 == 0:
        return float(math.factorial(n // 2 - 1))
    k = (n - 1) // 2
    return math.factorial(2 * k) / (4**k * math.factorial(k)) * math.sqrt(math.pi)


def unit_sphere_area(n: int) -> float:
    """Hypersurface measure of the unit sphere S^{n-1} sitting in R^n."""
    if int(n) != n or n < 2:
        raise ValueError(f"unit_sphere_area needs an integer n >= 2, got {n}")
    n = int(n)
    return 2.0 * math.pi ** (n / 2) / _gamma_half_integer(n)


SurfaceFunction = Union[np.ndarray, Callable[["object"], np.ndarray], float]


def _sample_values(samples, f: SurfaceFunction) -> np.ndarray:
    if callable(f):
        values = f(samples)
    else:
        values = f
    return np.broadcast_to(np.asarray(values, dtype=float), samples.weights.shape)


def averaged_lp_norm(samples, f: SurfaceFunction, p: float) -> float:
    """Area-averaged L^p norm [ |S|^-1 int |f|^p ]^(1/p) over a weighted sample set.

    ``f`` may be an array aligned with the samples, a scalar, or a callable
    taking the sample set. ``p = inf`` gives the sample maximum of |f|.
    """
    weights = np.asarray(samples.weights, dtype=float)
    if weights.size == 0:
        raise ValueError("averaged_lp_norm on an empty sample set")
    if p < 1:
        raise ValueError(f"averaged_lp_norm needs p >= 1, got {p}")
    total = weights.sum()
    if not total > 0:
        raise DegenerateLevelSetError("total area weight is not positive")
    values = np.abs(_sample_values(samples, f))
    if math.isinf(p):
        return float(values.max())
    # factor out the max so large p does not overflow
    scale = values.max()
    if scale == 0.0:
        return 0.0
    mean = float(np.dot(weights, (values / scale) ** p)) / total
    return float(scale * mean ** (1.0 / p))


def lp_norm(samples, f: SurfaceFunction, p: float) -> float:
    """Plain (non-averaged) L^p norm over the samples; p may be inf."""
    if math.isinf(p):
        return averaged_lp_norm(samples, f, p)
    total = float(np.sum(samples.weights))
    return averaged_lp_norm(samples, f, p) * total ** (1.0 / p)


def is_constant(values: np.ndarray, weights: np.ndarray | None = None,
                rtol: float = CONSTANCY_RTOL) -> bool:
    """True when the coefficient of variation of the samples is below rtol."""
    values = np.asarray(values, dtype=float)
    if weights is None:
        weights = np.ones_like(values)
    mean = np.average(values, weights=weights)
    spread = math.sqrt(np.average((values - mean) ** 2, weights=weights))
    if mean == 0.0:
        return spread == 0.0
    return spread / abs(mean) <= rtol


def k_factor(surface, p: float, n: int | None = None) -> float:
    """[ ||Du||_{L^1_0} / ||Du||_{L^p_0} ]^{p(n-2)/((p-1)(n-1))} on a level surface.

    Always <= 1 by Jensen; equal to 1 exactly when |Du| is constant.
    """
    if p == 1:
        raise ValueError("k_factor is singular at p = 1")
    if p < 1:
        raise ValueError(f"k_factor needs p > 1, got {p}")
    n = surface.n if n is None else n
    grad = np.asarray(surface.grad_norm, dtype=float)
    if grad.size == 0 or not np.any(grad > 0):
        raise DegenerateLevelSetError("|Du| vanishes identically on the level set")
    l1 = averaged_lp_norm(surface, grad, 1.0)
    lp = averaged_lp_norm(surface, grad, p)
    if math.isinf(p):
        exponent = (n - 2) / (n - 1)
    else:
        exponent = p * (n - 2) / ((p - 1) * (n - 1))
    if is_constant(grad, surface.weights):
        return 1.0
    return float((l1 / lp) ** exponent)
