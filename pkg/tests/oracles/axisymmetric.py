"""Independent oracle for level surfaces of axisymmetric multi-center potentials in R^3.

Centers sit on the x-axis, so {u = t} is a surface of revolution.  The
meridian curve is traced in polar coordinates (r, theta) about a point on the
axis, with r(theta) found by brentq, and surface integrals become 1-D
integrals 2 pi int f y sqrt(r^2 + r'^2) dtheta done with adaptive quad.
Nothing here touches the package's extraction or quadrature code.

Run as a script to print the frozen values used in the tests.
"""

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


class AxialField:
    def __init__(self, xs, ms):
        self.xs = np.asarray(xs, float)
        self.ms = np.asarray(ms, float)

    def u(self, x, y):
        return 1.0 - sum(m / math.hypot(x - c, y) for c, m in zip(self.xs, self.ms))

    def grad_hess(self, x, y):
        # in the meridian plane, z = 0
        g = np.zeros(3)
        H = np.zeros((3, 3))
        p = np.array([x, y, 0.0])
        for c, m in zip(self.xs, self.ms):
            d = p - np.array([c, 0.0, 0.0])
            r = np.linalg.norm(d)
            g += m * d / r**3
            H += m * (np.eye(3) / r**3 - 3 * np.outer(d, d) / r**5)
        return g, H


def _radius(field, t, theta, x0, rmax):
    f = lambda r: field.u(x0 + r * math.cos(theta), r * math.sin(theta)) - t
    # u increases outward along every ray from x0 for the fields used here
    lo = 1e-9
    while f(lo) > 0:
        lo *= 0.5
    return brentq(f, lo, rmax, xtol=1e-15, rtol=1e-15, maxiter=500)


def surface_integral(field, t, integrand, x0=0.0, rmax=50.0):
    """2 pi int integrand(|Du|, H) y ds over the meridian, plus the area."""

    def pieces(theta):
        r = _radius(field, t, theta, x0, rmax)
        x, y = x0 + r * math.cos(theta), r * math.sin(theta)
        g, H = field.grad_hess(x, y)
        er = np.array([math.cos(theta), math.sin(theta), 0.0])
        et = np.array([-math.sin(theta), math.cos(theta), 0.0])
        drdth = -(r * g @ et) / (g @ er)
        ds = math.hypot(r, drdth)
        gn = float(np.linalg.norm(g))
        nu = g / gn
        mean_curv = -(nu @ H @ nu) / gn  # flat mean curvature of a harmonic level set
        return 2 * math.pi * y * ds, gn, mean_curv

    def weighted(theta, fn):
        w, gn, h = pieces(theta)
        return w * fn(gn, h)

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=400)
    area = quad(lambda th: weighted(th, lambda g, h: 1.0), 0.0, math.pi, **opts)[0]
    value = quad(lambda th: weighted(th, integrand), 0.0, math.pi, **opts)[0]
    return value, area


def two_center_equal():
    return AxialField([-0.5, 0.5], [0.5, 0.5])


def two_center_light():
    return AxialField([-0.5, 0.5], [0.1, 0.1])


def frozen_values():
    out = {}
    f = two_center_equal()
    t = 0.5
    g2, area = surface_integral(f, t, lambda g, h: g**2)
    g1, _ = surface_integral(f, t, lambda g, h: g)
    g3, _ = surface_integral(f, t, lambda g, h: g**3)
    out["equal_t05_area"] = area
    out["equal_t05_flux"] = g1
    out["equal_t05_l2_0_grad"] = math.sqrt(g2 / area)
    l1 = g1 / area
    l3 = (g3 / area) ** (1 / 3)
    out["equal_t05_k_factor_p3"] = (l1 / l3) ** (3 * 1 / (2 * 2))
    h2, area0 = surface_integral(f, 0.0, lambda g, h: (h / 2) ** 2)
    out["equal_t0_willmore_rhs"] = math.sqrt(h2)
    out["equal_t0_area"] = area0
    return out


if __name__ == "__main__":
    for k, v in frozen_values().items():
        print(f"{k} = {v!r}")
