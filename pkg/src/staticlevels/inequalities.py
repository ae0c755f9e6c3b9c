"""Geometric inequalities and rigidity conditions evaluated on level surfaces.

Every check returns an :class:`InequalityReport` comparing lhs <= rhs.
Reports computed on fields that are not known static solutions carry the
note "hypotheses-not-verified": the numbers are descriptive only.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .core import DegenerateLevelSetError, StaticConfig, averaged_lp_norm, k_factor, lp_norm, unit_sphere_area

NOT_VERIFIED = "hypotheses-not-verified"


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances; rhs_scale multiplies every rhs (negative controls)."""

    tol: float = 1e-6
    rigidity_tol: float = 1e-8
    rhs_scale: float = 1.0


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    rigidity: bool
    params: dict = dc_field(default_factory=dict)
    note: str = ""
    tol: float = DEFAULT_TOLERANCES.tol
    rigidity_tol: float = DEFAULT_TOLERANCES.rigidity_tol

    def to_dict(self) -> dict:
        return asdict(self)


def make_report(name, lhs, rhs, params, tolerances=None, rigidity_allowed=True, notes=(),
                scale=None) -> InequalityReport:
    tl = tolerances or DEFAULT_TOLERANCES
    lhs = float(lhs)
    rhs = float(rhs) * tl.rhs_scale
    slack = rhs - lhs
    if scale is None:
        scale = max(abs(lhs), abs(rhs))
    satisfied = slack >= -tl.tol * scale
    rigidity = bool(rigidity_allowed and satisfied and abs(slack) <= tl.rigidity_tol * scale)
    return InequalityReport(name, lhs, rhs, slack, bool(satisfied), rigidity, dict(params),
                            "; ".join(n for n in notes if n), tl.tol, tl.rigidity_tol)


def _params(surface, config, **extra):
    out = {"n": config.n, "m": config.m, "t": float(surface.t)}
    for k, v in extra.items():
        out[k] = "inf" if isinstance(v, float) and math.isinf(v) else v
    return out


def _notes(surface, *extra):
    notes = [] if surface.static else [NOT_VERIFIED]
    if surface.excluded_area > 0:
        notes.append(f"excluded_area={surface.excluded_area:.6g}")
    return notes + [e for e in extra if e]


def _require_usable(surface):
    if surface.degenerate:
        raise DegenerateLevelSetError(f"level {surface.t}: excluded area above the configured fraction")
    if surface.area <= 0:
        raise DegenerateLevelSetError(f"level {surface.t} has no area")


def _interior(t) -> bool:
    return 0.0 < t < 1.0


def check_exponent(p: float, n: int, policy: str = "main", surface=None, allow_inf: bool = False) -> None:
    """Reject exponents outside the range where an inequality is proved.

    ``main`` admits p >= 3.  ``refined`` admits p >= 2 - 1/(n-1) on strictly
    regular level sets, i.e. with no excluded near-critical area.
    """
    if math.isinf(p):
        if allow_inf:
            return
        raise ValueError("p = inf is not admitted here")
    if policy == "main":
        if p < 3:
            raise ValueError(f"p = {p} is below 3")
    elif policy == "refined":
        if p < 2 - 1 / (n - 1):
            raise ValueError(f"p = {p} is below 2 - 1/(n-1)")
        if surface is not None and (surface.excluded_area > 0 or np.min(surface.grad_norm) <= 0):
            raise ValueError("the refined exponent range needs a strictly regular level set")
    else:
        raise ValueError(f"unknown exponent policy {policy!r}")


# interior level sets


def integral_inequality(surface, config: StaticConfig, p: float, tolerances=None,
                        policy: str = "main") -> InequalityReport:
    """(t/(1-t^2)) int 2|Du|^p/(n-2) <= int |Du|^{p-1} H/(n-1)."""
    _require_usable(surface)
    n, t = config.n, surface.t
    check_exponent(p, n, policy, surface)
    g = surface.grad_norm
    lhs = t / ((1 - t) * (1 + t)) * surface.integrate(2 * g**p / (n - 2))
    rhs = surface.integrate(g ** (p - 1) * surface.mean_curvature / (n - 1))
    # both sides scale like int |Du|^p, which stays positive when they vanish at t = 0
    scale = max(abs(lhs), abs(rhs), surface.integrate(g**p))
    return make_report("integral-inequality", lhs, rhs, _params(surface, config, p=p), tolerances,
                       rigidity_allowed=_interior(t), notes=_notes(surface), scale=scale)


def lp_bounds(surface, config: StaticConfig, p: float, tolerances=None, policy: str = "main") -> InequalityReport:
    """(t/(1-t^2)) ||2Du/(n-2)||_{L^p} <= ||H/(n-1)||_{L^p}; p may be inf."""
    _require_usable(surface)
    n, t = config.n, surface.t
    check_exponent(p, n, policy, surface, allow_inf=True)
    lhs = t / ((1 - t) * (1 + t)) * lp_norm(surface, 2 * surface.grad_norm / (n - 2), p)
    rhs = lp_norm(surface, surface.mean_curvature / (n - 1), p)
    scale = max(abs(lhs), abs(rhs), lp_norm(surface, surface.grad_norm, p))
    name = "linf-bound" if math.isinf(p) else "lp-bound"
    extra = "equality at p = inf does not imply rigidity" if math.isinf(p) else ""
    return make_report(name, lhs, rhs, _params(surface, config, p=float(p)), tolerances,
                       rigidity_allowed=_interior(t) and not math.isinf(p), notes=_notes(surface, extra),
                       scale=scale)


def overdetermined_residuals(surface, config: StaticConfig, tolerances=None):
    """Residuals of the two pointwise identities that hold on Schwarzschild.

    Returns (interior, boundary).  The interior identity
    (u/(1-u^2)) 2|Du|/(n-2) = H/(n-1) is checked on any level; the boundary
    identity (2|Du|/(n-2))^2 = R^S/((n-1)(n-2)) only on the level t = 0, and
    the second entry is None elsewhere.
    """
    n = config.n
    u, g = surface.u, surface.grad_norm
    left = u / (1 - u**2) * 2 * g / (n - 2)
    right = surface.mean_curvature / (n - 1)
    res = float(np.max(np.abs(left - right)))
    scale = float(max(np.max(np.abs(left)), np.max(np.abs(right)), np.max(g)))
    interior = make_report("overdetermined-interior", res, 0.0, _params(surface, config), tolerances,
                           rigidity_allowed=_interior(surface.t), notes=_notes(surface), scale=scale)
    boundary = None
    if surface.t == 0.0:
        bl = (2 * g / (n - 2)) ** 2
        br = surface.scalar_curvature / ((n - 1) * (n - 2))
        bres = float(np.max(np.abs(bl - br)))
        bscale = float(max(np.max(np.abs(bl)), np.max(np.abs(br)), 1e-300))
        boundary = make_report("overdetermined-boundary", bres, 0.0, _params(surface, config), tolerances,
                               notes=_notes(surface), scale=bscale)
    return interior, boundary


def _area_ratio(surface, n):
    return surface.area / unit_sphere_area(n)


@dataclass
class MassBounds:
    lower: float
    m: float
    upper: float
    reports: list


def interior_mass_bounds(surface, config: StaticConfig, p: float, tolerances=None) -> MassBounds:
    """Two-sided mass bound through K(n,p,t) and the L^p_0 norm of H."""
    t = surface.t
    if t == 0.0:
        raise ValueError("the interior mass bounds need t > 0; use boundary_mass_bounds")
    _require_usable(surface)
    n = config.n
    check_exponent(p, n)
    ratio = _area_ratio(surface, n)
    w = (1 - t) * (1 + t)
    lower = w / 2 * k_factor(surface, p, n) * ratio ** ((n - 2) / (n - 1))
    upper = w / (2 * t) * averaged_lp_norm(surface, surface.mean_curvature / (n - 1), p) * ratio
    return _mass_reports(surface, config, p, lower, upper, tolerances, _interior(t))


def boundary_mass_bounds(surface, config: StaticConfig, p: float, tolerances=None) -> MassBounds:
    """Two-sided mass bound on the boundary, through the boundary scalar curvature."""
    _require_boundary(surface)
    _require_usable(surface)
    n = config.n
    check_exponent(p, n)
    ratio = _area_ratio(surface, n)
    lower = 0.5 * k_factor(surface, p, n) * ratio ** ((n - 2) / (n - 1))
    rnorm = averaged_lp_norm(surface, surface.scalar_curvature / ((n - 1) * (n - 2)), p / 2)
    upper = 0.5 * math.sqrt(rnorm) * ratio
    return _mass_reports(surface, config, p, lower, upper, tolerances, True)


def _mass_reports(surface, config, p, lower, upper, tolerances, rigid_ok):
    prm = _params(surface, config, p=p)
    notes = _notes(surface)
    reports = [make_report("mass-lower", lower, config.m, prm, tolerances, rigid_ok, notes),
               make_report("mass-upper", config.m, upper, prm, tolerances, rigid_ok, notes)]
    return MassBounds(float(lower), config.m, float(upper), reports)


def mass_sandwich(surface, config: StaticConfig, p: float, tolerances=None) -> MassBounds:
    if surface.t == 0.0:
        return boundary_mass_bounds(surface, config, p, tolerances)
    return interior_mass_bounds(surface, config, p, tolerances)


# boundary (t = 0) statements


def _require_boundary(surface):
    if surface.t != 0.0:
        raise ValueError("boundary statements need the level t = 0")


def sphere_scalar_curvature(n: int) -> float:
    return (n - 1) * (n - 2)


def boundary_integral_inequality(surface, config: StaticConfig, p: float, tolerances=None) -> InequalityReport:
    """4 (n-1)/(n-2) int |Du|^p <= int |Du|^{p-2} R^S on the boundary."""
    _require_boundary(surface)
    check_exponent(p, config.n)
    g = surface.grad_norm
    lhs = 4 * config.k_exponent * surface.integrate(g**p)
    rhs = surface.integrate(g ** (p - 2) * surface.scalar_curvature)
    return make_report("boundary-integral-inequality", lhs, rhs, _params(surface, config, p=p), tolerances,
                       notes=_notes(surface))


def boundary_lp_bound(surface, config: StaticConfig, p: float, tolerances=None) -> InequalityReport:
    """||2Du/(n-2)||_{L^p} <= sqrt(||R^S/((n-1)(n-2))||_{L^{p/2}}) on the boundary."""
    _require_boundary(surface)
    n = config.n
    check_exponent(p, n, allow_inf=True)
    lhs = lp_norm(surface, 2 * surface.grad_norm / (n - 2), p)
    rhs = math.sqrt(lp_norm(surface, surface.scalar_curvature / ((n - 1) * (n - 2)), p / 2))
    name = "boundary-linf-bound" if math.isinf(p) else "boundary-lp-bound"
    return make_report(name, lhs, rhs, _params(surface, config, p=float(p)), tolerances,
                       rigidity_allowed=not math.isinf(p), notes=_notes(surface))


def einstein_hilbert(surface) -> float:
    """|S|^{-(n-3)/(n-1)} int R^S over the sampled (n-1)-manifold S."""
    n = surface.n
    return surface.area ** (-(n - 3) / (n - 1)) * surface.integrate(surface.scalar_curvature)


def sphere_einstein_hilbert(n: int) -> float:
    return (n - 1) * (n - 2) * unit_sphere_area(n) ** (2 / (n - 1))


def penrose_bounds(surface, config: StaticConfig, tolerances=None) -> list:
    """m >= (1/2)(|dM|/|S|)^{(n-2)/(n-1)} and the matching upper bound through E(dM)."""
    _require_boundary(surface)
    n = config.n
    base = 0.5 * _area_ratio(surface, n) ** ((n - 2) / (n - 1))
    ratio_e = einstein_hilbert(surface) / sphere_einstein_hilbert(n)
    prm = _params(surface, config)
    connected = "" if surface.n_components == 1 else "boundary is not connected; upper bound not applicable"
    return [make_report("penrose", base, config.m, prm, tolerances, notes=_notes(surface)),
            make_report("penrose-upper", config.m, base * math.sqrt(max(ratio_e, 0.0)), prm, tolerances,
                        notes=_notes(surface, connected))]


def _implication(report, text="rigidity-implied"):
    if report.satisfied:
        report.note = "; ".join(x for x in (report.note, text) if x)
    return report


def h_bound_condition(surface, config: StaticConfig, p: float, tolerances=None) -> InequalityReport:
    """||H/(n-1)||_{L^p_0} <= t K(n,p,t) (|S^{n-1}|/|{u=t}|)^{1/(n-1)}."""
    t = surface.t
    if not _interior(t):
        raise ValueError("the mean-curvature condition is stated for t in (0, 1)")
    n = config.n
    check_exponent(p, n)
    lhs = averaged_lp_norm(surface, surface.mean_curvature / (n - 1), p)
    rhs = t * k_factor(surface, p, n) * _area_ratio(surface, n) ** (-1 / (n - 1))
    return _implication(make_report("h-bound-condition", lhs, rhs, _params(surface, config, p=p), tolerances,
                                    notes=_notes(surface)))


def r_bound_condition(surface, config: StaticConfig, p: float, tolerances=None) -> InequalityReport:
    """sqrt(||R^S/R_sphere||_{L^{p/2}_0}) <= K(n,p,0) (|S^{n-1}|/|dM|)^{1/(n-1)}."""
    _require_boundary(surface)
    n = config.n
    check_exponent(p, n)
    lhs = math.sqrt(averaged_lp_norm(surface, surface.scalar_curvature / sphere_scalar_curvature(n), p / 2))
    rhs = k_factor(surface, p, n) * _area_ratio(surface, n) ** (-1 / (n - 1))
    return _implication(make_report("r-bound-condition", lhs, rhs, _params(surface, config, p=p), tolerances,
                                    notes=_notes(surface)))


def inverse_radius_condition(surface, config: StaticConfig, tolerances=None) -> InequalityReport:
    """max sqrt|R^S/R_sphere| <= (|S^{n-1}|/|dM|)^{1/(n-1)}."""
    _require_boundary(surface)
    n = config.n
    lhs = float(np.max(np.sqrt(np.abs(surface.scalar_curvature / sphere_scalar_curvature(n)))))
    rhs = _area_ratio(surface, n) ** (-1 / (n - 1))
    connected = "" if surface.n_components == 1 else "boundary is not connected"
    return _implication(make_report("inverse-radius-condition", lhs, rhs, _params(surface, config), tolerances,
                                    notes=_notes(surface, connected)))


def penrose_and_sufficient_conditions(surface, config: StaticConfig, p: float, tolerances=None) -> list:
    if surface.t == 0.0:
        return (penrose_bounds(surface, config, tolerances)
                + [r_bound_condition(surface, config, p, tolerances),
                   inverse_radius_condition(surface, config, tolerances)])
    return [h_bound_condition(surface, config, p, tolerances)]


def boundary_second_derivative(surface, config: StaticConfig, p: float) -> float:
    """U_p''(0) = -((p-1)/2)(2m)^k int |Du|^{p-2} [R^S - 4 (n-1)/(n-2) |Du|^2]."""
    _require_boundary(surface)
    check_exponent(p, config.n)
    g = surface.grad_norm
    k = config.prefactor_exponent(p)
    bracket = surface.scalar_curvature - 4 * config.k_exponent * g**2
    return -0.5 * (p - 1) * (2 * config.m) ** k * surface.integrate(g ** (p - 2) * bracket)


def boundary_second_derivative_report(surface, config, p, tolerances=None) -> InequalityReport:
    value = boundary_second_derivative(surface, config, p)
    scale = (2 * config.m) ** config.prefactor_exponent(p) * surface.integrate(
        surface.grad_norm ** (p - 2) * np.abs(surface.scalar_curvature))
    return make_report("boundary-second-derivative", value, 0.0, _params(surface, config, p=p), tolerances,
                       notes=_notes(surface), scale=max(scale, 1e-300))


def willmore(surface, config: StaticConfig, mode: str = "static", tolerances=None) -> InequalityReport:
    """Willmore-type bound |S^{n-1}|^{1/(n-1)} <= rhs.

    static:   rhs = (1/t) ||H/(n-1)||_{L^{n-1}}, static fields with n >= 4;
    boundary: rhs = sqrt(||R^S/((n-1)(n-2))||_{L^{(n-1)/2}}) on t = 0, n >= 4;
    flat:     rhs = ||H/(n-1)||_{L^{n-1}}, the classical inequality in R^n.
    """
    n = config.n
    lhs = unit_sphere_area(n) ** (1 / (n - 1))
    notes = _notes(surface)
    if mode == "static":
        if n < 4:
            raise ValueError("the static Willmore bound needs n >= 4")
        if not _interior(surface.t):
            raise ValueError("the static Willmore bound needs t in (0, 1)")
        rhs = lp_norm(surface, surface.mean_curvature / (n - 1), n - 1) / surface.t
    elif mode == "boundary":
        if n < 4:
            raise ValueError("the boundary Willmore bound needs n >= 4")
        _require_boundary(surface)
        rhs = math.sqrt(lp_norm(surface, surface.scalar_curvature / ((n - 1) * (n - 2)), (n - 1) / 2))
    elif mode == "flat":
        rhs = lp_norm(surface, surface.mean_curvature / (n - 1), n - 1)
        notes = ["flat mode evaluated on a curved background"] if surface.static else []
    else:
        raise ValueError(f"unknown Willmore mode {mode!r}")
    return make_report(f"willmore-{mode}", lhs, rhs, _params(surface, config, mode=mode), tolerances,
                       notes=notes)


def yamabe_comparison(surface, config: StaticConfig, tolerances=None) -> InequalityReport:
    """E(round S^{n-1}) <= E(dM), n >= 4."""
    n = config.n
    if n < 4:
        raise ValueError("the Einstein-Hilbert comparison needs n >= 4")
    _require_boundary(surface)
    return make_report("yamabe-comparison", sphere_einstein_hilbert(n), einstein_hilbert(surface),
                       _params(surface, config), tolerances,
                       notes=_notes(surface, "Yamabe property of the boundary metric not checked"))


def gauss_bonnet(surface, config: StaticConfig, tolerances=None) -> InequalityReport:
    """int R^S <= 8 pi for a connected surface in dimension 3 (4 pi chi, chi <= 2)."""
    if config.n != 3:
        raise ValueError("the Gauss-Bonnet bound is two-dimensional")
    return make_report("gauss-bonnet", surface.integrate(surface.scalar_curvature), 8 * math.pi,
                       _params(surface, config), tolerances, notes=_notes(surface))


def black_hole_uniqueness(surface, config: StaticConfig, tolerances=None) -> list:
    """Chain for n = 3: connected boundary, Gauss-Bonnet, then both Penrose bounds hold with equality."""
    if config.n != 3:
        raise ValueError("the uniqueness chain is three-dimensional")
    _require_boundary(surface)
    connected = make_report("boundary-connected", surface.n_components, 1, _params(surface, config),
                            tolerances, notes=_notes(surface))
    return [connected, gauss_bonnet(surface, config, tolerances)] + penrose_bounds(surface, config, tolerances)


def level_reports(surface, config: StaticConfig, ps, tolerances=None, policy: str = "main") -> list:
    """Every check that applies to this level surface, in a fixed order.

    Checks whose exponent or level is outside their stated range are skipped.
    """
    t, n = surface.t, config.n
    out = []

    def add(fn, *args):
        try:
            r = fn(*args)
        except ValueError:
            return
        out.extend(r if isinstance(r, list) else [r])

    for p in ps:
        add(integral_inequality, surface, config, p, tolerances, policy)
        add(lp_bounds, surface, config, p, tolerances, policy)
        add(lambda *a: mass_sandwich(*a).reports, surface, config, p, tolerances)
        if t == 0.0:
            add(boundary_integral_inequality, surface, config, p, tolerances)
            add(boundary_lp_bound, surface, config, p, tolerances)
            add(boundary_second_derivative_report, surface, config, p, tolerances)
            add(r_bound_condition, surface, config, p, tolerances)
        else:
            add(h_bound_condition, surface, config, p, tolerances)
    add(lp_bounds, surface, config, math.inf, tolerances, policy)
    add(lambda *a: [r for r in overdetermined_residuals(*a) if r is not None], surface, config, tolerances)
    if t == 0.0:
        add(penrose_bounds, surface, config, tolerances)
        add(inverse_radius_condition, surface, config, tolerances)
        if n >= 4:
            add(willmore, surface, config, "boundary", tolerances)
            add(yamabe_comparison, surface, config, tolerances)
        else:
            add(black_hole_uniqueness, surface, config, tolerances)
    if surface.static:
        add(willmore, surface, config, "static", tolerances)
    else:
        add(willmore, surface, config, "flat", tolerances)
    return out


# serialization


def _clean(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def reports_to_json(reports) -> str:
    rows = []
    for r in reports:
        d = r.to_dict()
        rows.append({k: _clean(d[k]) for k in ("name", "lhs", "rhs", "slack", "satisfied", "rigidity",
                                               "params", "note", "tol", "rigidity_tol")})
    return json.dumps(rows, indent=2) + "\n"


def reports_to_text(reports) -> str:
    header = ("t", "name", "lhs", "rhs", "slack", "ok", "rigid", "note")
    rows = [header]
    for r in reports:
        t = r.params.get("t")
        rows.append(("" if t is None else f"{t:.6g}", r.name, f"{r.lhs:.12g}", f"{r.rhs:.12g}", f"{r.slack:.3e}",
                     "yes" if r.satisfied else "NO", "yes" if r.rigidity else "no", r.note))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"
