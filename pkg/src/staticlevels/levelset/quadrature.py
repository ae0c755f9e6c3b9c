"""Product quadrature rules on unit spheres S^{n-1} in R^n."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

DEFAULT_ORDERS = {3: 64, 4: 32, 5: 16}


def default_order(n: int) -> int:
    return DEFAULT_ORDERS.get(n, 12)


@lru_cache(maxsize=32)
def _rule(n: int, order: int):
    if n == 2:
        k = 2 * order
        ang = 2 * np.pi * np.arange(k) / k
        return np.stack([np.cos(ang), np.sin(ang)], axis=1), np.full(k, 2 * np.pi / k)
    # S^{n-1}: polar coordinate x = cos(theta) carries the weight (1-x^2)^{(n-3)/2}
    a = (n - 3) / 2.0
    x, w = roots_jacobi(order, a, a)
    sub_dirs, sub_w = _rule(n - 1, order)
    ring = np.sqrt(1 - x**2)
    dirs = np.concatenate([np.repeat(x, len(sub_w))[:, None],
                           (ring[:, None, None] * sub_dirs[None]).reshape(-1, n - 1)], axis=1)
    weights = (w[:, None] * sub_w[None]).reshape(-1)
    return dirs, weights


def sphere_rule(n: int, order: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Directions (N, n) and weights summing to |S^{n-1}|.

    Gauss-Jacobi in each polar cosine (Gauss-Legendre for S^2) and the
    trapezoid rule with 2*order points on the final circle.
    """
    if n < 2:
        raise ValueError("sphere rules need n >= 2")
    order = default_order(n) if order is None else int(order)
    if order < 2:
        raise ValueError("quadrature order must be at least 2")
    dirs, weights = _rule(n, order)
    return dirs.copy(), weights.copy()
