"""Predefined check suites: each returns a list of named pass/fail results."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conformal as cf
from . import inequalities as iq
from .core import StaticConfig, unit_sphere_area
from .harmonicfields import MultiCenterField, convergence_order, monopole_error, solve_dirichlet, \
    spherical_excision_spec
from .levelset.extract import extract
from .levelset.functionals import phi_p, u_p, up_derivative_formula, up_second_derivative_at_zero, w_p
from .levelset.geometry import kato_gap, point_geometry
from .schwarzschild import SchwarzschildModel


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def schwarzschild_rigidity(tolerances: iq.Tolerances | None = None, dims=(3, 4, 5), m: float = 1.0,
                           ts=(0.0, 0.3, 0.6, 0.9), p: float = 3.0) -> list[CheckResult]:
    """Every inequality holds with equality (and rigidity) on Schwarzschild."""
    tl = tolerances or iq.Tolerances()
    out = []
    for n in dims:
        model = SchwarzschildModel.create(n, m)
        field, cfg = model.field(), model.config
        for t in ts:
            s = extract(field, t)
            reports = [iq.integral_inequality(s, cfg, p, tl), iq.lp_bounds(s, cfg, p, tl),
                       iq.lp_bounds(s, cfg, math.inf, tl)]
            reports += [r for r in iq.overdetermined_residuals(s, cfg, tl) if r is not None]
            reports += iq.mass_sandwich(s, cfg, p, tl).reports
            reports += iq.penrose_and_sufficient_conditions(s, cfg, p, tl)
            if t == 0.0:
                reports += [iq.boundary_integral_inequality(s, cfg, p, tl), iq.boundary_lp_bound(s, cfg, p, tl)]
                reports += [iq.willmore(s, cfg, "boundary", tl), iq.yamabe_comparison(s, cfg, tl)] if n >= 4 \
                    else iq.black_hole_uniqueness(s, cfg, tl)
            elif n >= 4:
                reports.append(iq.willmore(s, cfg, "static", tl))
            for r in reports:
                expect_rigid = 0.0 < t < 1.0 or r.name not in (
                    "integral-inequality", "lp-bound", "overdetermined-interior")
                expect_rigid = expect_rigid and r.name not in ("linf-bound", "boundary-linf-bound")
                ok = r.satisfied and (r.rigidity == expect_rigid)
                out.append(CheckResult(f"{r.name} n={n} t={t}", ok,
                                       f"lhs={r.lhs:.12g} rhs={r.rhs:.12g} rigidity={r.rigidity}"))
            d1 = up_derivative_formula(field, cfg, t, p, surface=s)
            out.append(CheckResult(f"dU_p n={n} t={t}", abs(d1) <= 1e-8, f"{d1:.3e}"))
            if t == 0.0:
                d2 = up_second_derivative_at_zero(field, cfg, p, surface=s)
                out.append(CheckResult(f"d2U_p(0) n={n}", abs(d2) <= 1e-8, f"{d2:.3e}"))
    return out


def _random_points(rng, n, count, lo, hi, avoid, min_dist):
    pts = []
    while sum(len(p) for p in pts) < count:
        x = rng.uniform(lo, hi, size=(count, n))
        d = np.min(np.linalg.norm(x[:, None, :] - avoid[None], axis=2), axis=1)
        pts.append(x[d > min_dist])
    return np.concatenate(pts)[:count]


def kato(samples: int = 10_000, seed: int = 0) -> list[CheckResult]:
    """Refined Kato inequality at random points of flat harmonic fields."""
    rng = np.random.default_rng(seed)
    fields = [MultiCenterField.monopole(3, 1.0),
              MultiCenterField([[-0.5, 0, 0], [0.5, 0, 0]], [0.5, 0.5]),
              MultiCenterField([[0, 0, 0], [2, 0, 0]], [1.0, 0.25]),
              MultiCenterField.monopole(4, 1.0)]
    out = []
    for f in fields:
        x = _random_points(rng, f.n, samples, -3.0, 3.0, f.centers, 0.05)
        geo = point_geometry(f, x)
        live = geo.grad_norm > 1e-6 * geo.grad_norm.max()
        gap = kato_gap(geo, f.n)[live] / np.maximum(geo.hessian_norm2[live], 1.0)
        worst = float(gap.min())
        out.append(CheckResult(f"kato {f.name} n={f.n} centers={len(f.weights)}", worst >= -1e-10,
                               f"min scaled gap {worst:.3e} over {int(live.sum())} points"))
    return out


def conformal_suite() -> list[CheckResult]:
    out = []
    us = np.array([0.0] + [s * v for v in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99) for s in (1, -1)])
    err = float(np.max(np.abs(cf.from_phi(cf.to_phi(us)) - us)))
    out.append(CheckResult("phi round trip", err <= 1e-14, f"{err:.2e}"))
    worst = 0.0
    for n in (3, 4, 5):
        for m in (0.5, 1.0, 2.0):
            cfg = StaticConfig(n, m)
            for p in (1.0, 3.0, 4.0):
                for t in (0.0, 0.4, 0.8):
                    v = 1.2345
                    worst = max(worst, _rel(cf.up_from_phi_p(cf.phi_p_from_up(v, p, cfg), p, cfg), v),
                                _rel(cf.dup_from_dphi_p(cf.dphi_p_from_dup(v, t, p, cfg), t, p, cfg), v),
                                _rel(cf.d2up_from_phi(cf.dphi_p_from_dup(v, t, p, cfg),
                                                      cf.d2phi_from_up(v, 2 * v, t, p, cfg), t, p, cfg), 2 * v))
    out.append(CheckResult("U_p <-> Phi_p round trip", worst <= 1e-12, f"{worst:.2e}"))
    worst = 0.0
    for n in (3, 4, 5):
        for m in (0.5, 1.0, 2.0):
            model = SchwarzschildModel.create(n, m)
            for p in (1.0, 3.0):
                val = phi_p(model.field(), model.config, 1.0, p)
                worst = max(worst, _rel(val, cf.phi_p_limit(model.config, p)))
    out.append(CheckResult("Phi_p Schwarzschild value", worst <= 1e-8, f"{worst:.2e}"))
    model = SchwarzschildModel.create(3, 1.0)
    for p in (1.0, 3.0):
        for s in (0.5, 1.0, 2.0):
            res = cf.cylinder_identity_check(model.field(), model.config, s, p)
            out.append(CheckResult(f"cylinder identity p={p:g} s={s:g}", res < 1e-8, f"{res:.2e}"))
    return out


def two_center_willmore_field():
    return MultiCenterField([[-0.5, 0, 0], [0.5, 0, 0]], [0.5, 0.5], name="two-center")


def willmore_suite(tolerances: iq.Tolerances | None = None) -> list[CheckResult]:
    tl = tolerances or iq.Tolerances()
    out = []
    model = SchwarzschildModel.create(4, 1.0)
    s = extract(model.field(), 0.5)
    r = iq.willmore(s, model.config, "static", tl)
    out.append(CheckResult("willmore static n=4 equality", r.satisfied and abs(r.slack) <= 1e-8 * r.lhs,
                           f"slack {r.slack:.2e}"))
    for n in (3, 4):
        sphere = extract(MultiCenterField.monopole(n, 1.0), 0.5, backend="radial")
        r = iq.willmore(sphere, StaticConfig(n, 1.0), "flat", tl)
        out.append(CheckResult(f"willmore flat round sphere n={n}", r.satisfied and abs(r.slack) <= 1e-8 * r.lhs,
                               f"slack {r.slack:.2e}"))
    f = two_center_willmore_field()
    s = extract(f, 0.0)
    r = iq.willmore(s, StaticConfig(3, f.mass), "flat", tl)
    out.append(CheckResult("willmore flat two-center strict", r.satisfied and r.slack > 1e-3,
                           f"slack {r.slack:.4g}"))
    return out


def grid_convergence(spacings=(1 / 16, 1 / 32, 1 / 64), radius: float = 0.5,
                     half_width: float = 1.0) -> list[CheckResult]:
    errors = []
    out = []
    for h in spacings:
        field = solve_dirichlet(spherical_excision_spec(h, radius, half_width))
        errors.append(monopole_error(field, radius))
        inner = field.values[field.fluid_mask()]
        lo = min(0.0, float(field.values[field.kind == 0].min()))
        hi = float(field.values[field.kind == 0].max())
        ok = bool(np.all(inner > lo) and np.all(inner < hi))
        out.append(CheckResult(f"maximum principle h={h:g}", ok, f"interior in ({inner.min():.6f}, {inner.max():.6f})"))
    order = convergence_order(spacings, errors)
    out.append(CheckResult("grid convergence order", 1.8 <= order <= 2.2,
                           f"order {order:.4f}, errors {', '.join(f'{e:.3e}' for e in errors)}"))
    return out


def monopole_flux() -> list[CheckResult]:
    out = []
    for n in (3, 4, 5):
        for m in (0.5, 1.0, 2.0):
            f = MultiCenterField.monopole(n, m)
            cfg = StaticConfig(n, m)
            exact = m * (n - 2) * unit_sphere_area(n)
            kw = {"backend": "radial", "resolution": 64 if n == 3 else 12}
            worst = max(_rel(u_p(f, cfg, t, 1.0, extract_kw=kw), exact) for t in (0.1, 0.5, 0.9))
            out.append(CheckResult(f"monopole U_1 n={n} m={m:g}", worst <= 1e-8, f"{worst:.2e}"))
    f = MultiCenterField([[-0.5, 0, 0], [0.5, 0, 0]], [0.5, 0.5])
    exact = 4 * math.pi
    for t in (-0.5, 0.3):
        val = w_p(extract(f, t, backend="radial"), 1.0)
        out.append(CheckResult(f"two-center flux t={t:g}", _rel(val, exact) <= 1e-6, f"{_rel(val, exact):.2e}"))
    return out


SUITES = {
    "schwarzschild-rigidity": schwarzschild_rigidity,
    "kato": kato,
    "conformal": conformal_suite,
    "willmore": willmore_suite,
    "grid-convergence": grid_convergence,
    "monopole-flux": monopole_flux,
}

# suites that consume inequality tolerances (and so honor rhs_scale overrides)
TOLERANCE_AWARE = {"schwarzschild-rigidity", "willmore"}


def run_suite(name: str, tolerances: iq.Tolerances | None = None) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(name)
    if name in TOLERANCE_AWARE:
        return SUITES[name](tolerances)
    return SUITES[name]()
