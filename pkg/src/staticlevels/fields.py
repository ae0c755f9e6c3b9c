"""Scalar potentials in a Cartesian chart together with their background metric.

Every field evaluates u, its partial gradient and its partial Hessian at an
array of points.  The metric attached to the field supplies what is needed to
turn partial derivatives into covariant ones: the inverse metric, Christoffel
symbols, Ricci tensor and the hypersurface area factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class SingularPointError(ValueError):
    """Evaluation requested at (or inside) a singular center or excised region."""


@dataclass(frozen=True)
class FieldSample:
    """u, partial gradient (N, n) and partial Hessian (N, n, n) at N points."""

    u: np.ndarray
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True)
class MetricData:
    """Metric quantities at N points; ``christoffel[:, k, i, j]`` is Gamma^k_ij."""

    g: np.ndarray
    ginv: np.ndarray
    christoffel: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray


class FlatMetric:
    """The Euclidean metric."""

    kind = "flat"

    def __init__(self, n: int):
        self.n = n

    def data(self, x: np.ndarray) -> MetricData:
        x = np.atleast_2d(x)
        N, n = x.shape
        eye = np.broadcast_to(np.eye(n), (N, n, n))
        zeros2 = np.zeros((N, n, n))
        return MetricData(eye, eye, np.zeros((N, n, n, n)), zeros2, np.zeros(N))

    def area_factor(self, x: np.ndarray, normal: np.ndarray) -> np.ndarray:
        return np.ones(np.atleast_2d(x).shape[0])

    def describe(self) -> dict:
        return {"kind": self.kind}


class RadialConformalMetric:
    """Rotationally symmetric metric written as g = exp(2 w(rho)) delta.

    Any rotationally symmetric metric admits such an isotropic form; the
    profile callable returns (w, w', w'') as arrays in rho = |x - center|.
    """

    kind = "rotationally-symmetric"

    def __init__(self, n: int, profile: Callable[[np.ndarray], tuple], center=None,
                 label: str = "profile"):
        self.n = n
        self.profile = profile
        self.center = np.zeros(n) if center is None else np.asarray(center, float)
        self.label = label

    def _radial(self, x):
        y = np.atleast_2d(x) - self.center
        rho = np.linalg.norm(y, axis=1)
        if np.any(rho == 0):
            raise SingularPointError("conformal profile evaluated at its center")
        return y / rho[:, None], rho

    def data(self, x: np.ndarray) -> MetricData:
        n = self.n
        rhat, rho = self._radial(x)
        w, w1, w2 = (np.asarray(a, float) for a in self.profile(rho))
        eye = np.eye(n)
        outer = rhat[:, :, None] * rhat[:, None, :]
        dw = w1[:, None] * rhat
        ddw = w2[:, None, None] * outer + (w1 / rho)[:, None, None] * (eye - outer)
        lap_w = w2 + (n - 1) * w1 / rho
        dw2 = w1**2
        e2w = np.exp(2 * w)
        g = e2w[:, None, None] * eye
        ginv = (1 / e2w)[:, None, None] * eye
        # Gamma^k_ij = delta_ik d_j w + delta_jk d_i w - delta_ij d_k w
        chris = (np.einsum("ki,nj->nkij", eye, dw) + np.einsum("kj,ni->nkij", eye, dw)
                 - np.einsum("ij,nk->nkij", eye, dw))
        ricci = (-(n - 2) * (ddw - dw[:, :, None] * dw[:, None, :])
                 - (lap_w + (n - 2) * dw2)[:, None, None] * eye)
        scalar = (-2 * (n - 1) * lap_w - (n - 1) * (n - 2) * dw2) / e2w
        return MetricData(g, ginv, chris, ricci, scalar)

    def area_factor(self, x: np.ndarray, normal: np.ndarray) -> np.ndarray:
        _, rho = self._radial(x)
        w = np.asarray(self.profile(rho)[0], float)
        return np.exp((self.n - 1) * w)

    def describe(self) -> dict:
        return {"kind": self.kind, "profile": self.label, "center": self.center.tolist()}


class ScalarField:
    """Base class for potentials u on a chart of R^n.

    Subclasses implement :meth:`evaluate`; :meth:`value` may be overridden
    with something cheaper.  ``mass`` is the leading coefficient m in
    u = 1 - m |x|^{2-n} + ...; ``is_static`` records whether the pair
    (metric, u) solves the static vacuum system.
    """

    n: int
    metric: object
    mass: float
    u0: float = 0.0
    is_static: bool = False
    name: str = "field"

    def evaluate(self, x: np.ndarray) -> FieldSample:
        raise NotImplementedError

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x).u

    def value_and_gradient(self, x: np.ndarray):
        s = self.evaluate(x)
        return s.u, s.grad

    def bounding_box(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box guaranteed to contain the level set {u = t}."""
        raise NotImplementedError

    def star_center(self) -> np.ndarray:
        """Point from which level sets are expected to be star-shaped."""
        return np.zeros(self.n)

    def critical_values(self) -> list[float]:
        return []

    def describe(self) -> dict:
        return {"name": self.name, "n": self.n, "mass": self.mass,
                "metric": self.metric.describe()}


class RadialField(ScalarField):
    """u = f(|x - center|) for a radial profile returning (f, f', f'')."""

    def __init__(self, n: int, profile: Callable[[np.ndarray], tuple], metric, mass: float,
                 center: Sequence[float] | None = None, inverse: Callable[[float], float] | None = None,
                 name: str = "radial", is_static: bool = False, u0: float = 0.0):
        self.n = n
        self.profile = profile
        self.metric = metric
        self.mass = mass
        self.center = np.zeros(n) if center is None else np.asarray(center, float)
        self.inverse = inverse
        self.name = name
        self.is_static = is_static
        self.u0 = u0

    def _radial(self, x):
        y = np.atleast_2d(np.asarray(x, float)) - self.center
        rho = np.linalg.norm(y, axis=1)
        if np.any(rho == 0):
            raise SingularPointError(f"{self.name}: evaluation at the center")
        return y, rho

    def value(self, x):
        _, rho = self._radial(x)
        return np.asarray(self.profile(rho)[0], float)

    def evaluate(self, x) -> FieldSample:
        y, rho = self._radial(x)
        f, f1, f2 = (np.asarray(a, float) for a in self.profile(rho))
        rhat = y / rho[:, None]
        outer = rhat[:, :, None] * rhat[:, None, :]
        grad = f1[:, None] * rhat
        hess = f2[:, None, None] * outer + (f1 / rho)[:, None, None] * (np.eye(self.n) - outer)
        return FieldSample(f, grad, hess)

    def level_radius(self, t: float) -> float:
        """Chart radius of the coordinate sphere {u = t}."""
        if self.inverse is None:
            raise NotImplementedError(f"{self.name} has no closed-form inverse")
        return float(self.inverse(t))

    def bounding_box(self, t):
        r = 1.05 * self.level_radius(t)
        return self.center - r, self.center + r

    def star_center(self):
        return self.center.copy()
