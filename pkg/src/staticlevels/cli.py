"""Command line: config-driven sweeps, predefined check suites, quick Schwarzschild tables.

Exit status: 0 success, 2 configuration error, 3 numerical failure,
4 a requested check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import inequalities as iq
from .config import FORMATS, ConfigError, RunConfig, from_mapping, is_config_path, load
from .core import StaticConfig
from .harmonicfields import ConvergenceError, GridField, MultiCenterField, convergence_order, monopole_error, \
    solve_dirichlet, spherical_excision_spec
from .levelset.extract import extract
from .levelset.functionals import u_p
from .levelset.table import column_label, sweep
from .schwarzschild import SchwarzschildModel
from .suites import SUITES, TOLERANCE_AWARE, CheckResult, run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CHECK = 4

OUT_DIR_ENV = "STATICLEVELS_OUT_DIR"


def _versions() -> dict:
    import numba
    import scipy
    import skimage

    return {"staticlevels": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "scikit-image": skimage.__version__, "numba": numba.__version__}


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _json_safe(v.tolist())
    return v


class Timer:
    def __init__(self):
        self.entries = []

    def __call__(self, label):
        timer = self

        class _Span:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.entries.append((label, time.perf_counter() - self.t0))

        return _Span()

    def text(self) -> str:
        return "".join(f"{label}\t{sec:.3f}\n" for label, sec in self.entries)


def build_field(cfg: RunConfig, manifest: dict, timer: Timer):
    """Field and StaticConfig for the configured mode; grid solves also fill manifest['grid']."""
    r, hf = cfg.run, cfg.harmonicfields
    if r.mode == "schwarzschild":
        model = SchwarzschildModel.create(r.n, r.m)
        return model.field(), model.config
    if r.mode == "monopole":
        return MultiCenterField.monopole(r.n, r.m), StaticConfig(r.n, r.m)
    if r.mode == "multicenter":
        field = MultiCenterField(hf.centers, hf.weights, n=r.n)
        return field, StaticConfig(r.n, field.mass)
    # grid-solve: exterior of a ball with the matching monopole as exact solution
    spec = spherical_excision_spec(hf.h, hf.radius, hf.half_width, r.u0, hf.solver_tol)
    spec.max_sweeps = hf.max_sweeps
    with timer("grid solve"):
        field = solve_dirichlet(spec)
    grid = {"h": hf.h, "shape": list(field.values.shape), "iterations": field.iterations,
            "residual": field.residual, "mass": field.mass,
            "monopole_error": monopole_error(field, field.mass)}
    spacings = list(hf.convergence_h) or [2 * hf.h, hf.h]
    errors = []
    with timer("grid convergence"):
        for h in spacings:
            s = spherical_excision_spec(h, hf.radius, hf.convergence_half_width, r.u0, hf.solver_tol)
            s.max_sweeps = hf.max_sweeps
            errors.append(monopole_error(solve_dirichlet(s), s.outer_mass))
    grid["convergence"] = {"h": spacings, "half_width": hf.convergence_half_width, "errors": errors,
                           "order": convergence_order(spacings, errors)}
    manifest["grid"] = grid
    return field, StaticConfig(3, field.mass, r.u0)


def _self_convergence(field, config, table, ps, extract_kw) -> list:
    """Relative change of U_p between the run resolution and half of it, at the end levels."""
    out = []
    ok = [row for row in table.rows if row["status"] == "ok"]
    for row in ok[:1] + ok[-1:] if len(ok) > 1 else ok:
        t = row["t"]
        fine = extract(field, t, **extract_kw)
        kw = dict(extract_kw, resolution=max(fine.resolution // 2, 2))
        coarse = extract(field, t, **kw)
        for p in ps:
            a = row[f"U_{column_label(p)}"]
            b = u_p(field, config, t, p, surface=coarse)
            out.append({"t": t, "p": p, "resolution": fine.resolution, "coarse_resolution": coarse.resolution,
                        "relative_change": abs(a - b) / max(abs(a), 1e-300)})
    return out


def _table_finite(table) -> list[str]:
    bad = []
    for i, row in enumerate(table.rows):
        for c in table.columns:
            v = row.get(c)
            if c != "status" and not (isinstance(v, (int, float)) and math.isfinite(v)):
                bad.append(f"row {i} column {c}")
    return bad


def config_checks(cfg: RunConfig, table, reports, manifest) -> list[CheckResult]:
    ck = cfg.check
    out = []
    if ck.require_satisfied:
        bad = [r.name for r in reports if not r.satisfied]
        out.append(CheckResult("all inequalities satisfied", not bad and bool(reports),
                               f"{len(bad)} of {len(reports)} violated" + (f": {', '.join(bad[:5])}" if bad else "")))
    if ck.require_rigidity:
        bad = [r.name for r in reports if not r.rigidity and r.name not in ("linf-bound", "boundary-linf-bound")]
        out.append(CheckResult("all rigidity flags set", not bad and bool(reports),
                               f"{len(bad)} without rigidity" + (f": {', '.join(bad[:5])}" if bad else "")))
    for name in ck.constant_columns:
        if name not in table.columns:
            out.append(CheckResult(f"constant {name}", False, "no such column"))
            continue
        col = table.column(name)
        ref = float(np.median(col))
        dev = float(np.max(np.abs(col - ref)) / max(abs(ref), 1e-300))
        out.append(CheckResult(f"constant {name}", bool(dev <= ck.constant_rtol),
                               f"max relative deviation {dev:.3e} (rtol {ck.constant_rtol:g})"))
    if ck.order_range:
        order = manifest.get("grid", {}).get("convergence", {}).get("order")
        lo, hi = ck.order_range
        ok = order is not None and lo <= order <= hi
        out.append(CheckResult("grid convergence order", bool(ok), f"order {order} in [{lo}, {hi}]"))
    if ck.suite:
        out += run_suite(ck.suite, _tolerances(cfg))
    return out


def _tolerances(cfg: RunConfig) -> iq.Tolerances:
    q = cfg.inequalities
    return iq.Tolerances(q.tol, q.rigidity_tol, q.rhs_scale)


def execute(cfg: RunConfig, out_dir, stdout=None) -> int:
    """Run a validated configuration and write every artifact into out_dir."""
    stdout = stdout or sys.stdout
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    timer = Timer()
    manifest = {"versions": _versions(), "config": _json_safe(cfg.to_dict())}
    status = EXIT_OK
    try:
        field, config = build_field(cfg, manifest, timer)
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    manifest["field"] = _json_safe(field.describe())
    ls = cfg.levelset
    extract_kw = {"backend": ls.backend, "degenerate_fraction": ls.degenerate_fraction}
    if ls.resolution is not None:
        extract_kw["resolution"] = ls.resolution
    if ls.eps_crit is not None:
        extract_kw["eps_crit"] = ls.eps_crit
    ps = list(cfg.run.p)
    reports = []
    tol = _tolerances(cfg)

    def on_surface(_, surface):
        if cfg.inequalities.enabled:
            reports.extend(iq.level_reports(surface, config, ps, tol, cfg.inequalities.policy))

    t_grid = cfg.t_grid()
    with timer("sweep"):
        table = sweep(field, config, t_grid, ps, fd_step=ls.fd_step, extract_kw=extract_kw,
                      on_surface=on_surface)
    if isinstance(field, GridField):
        # marching cubes runs on the solver nodes; refinement means a new solve
        manifest["self_convergence"] = "not applicable: resolution fixed by the solver grid"
    else:
        with timer("self-convergence"):
            manifest["self_convergence"] = _self_convergence(field, config, table, ps, extract_kw)
    manifest["t_grid"] = t_grid
    manifest["failed_rows"] = table.failed_rows
    nonfinite = _table_finite(table)
    manifest["nonfinite_entries"] = nonfinite
    if table.failed_rows or nonfinite:
        status = EXIT_NUMERICAL
        for i in table.failed_rows:
            print(f"row {i} (t={table.rows[i]['t']!r}): {table.rows[i]['status']}", file=sys.stderr)
        for entry in nonfinite[:10]:
            print(f"non-finite value at {entry}", file=sys.stderr)

    with timer("checks"):
        checks = config_checks(cfg, table, reports, manifest)
    manifest["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    if status == EXIT_OK and not all(c.passed for c in checks):
        status = EXIT_CHECK

    written = []
    formats = cfg.output.formats
    if "csv" in formats:
        table.to_csv(out_dir / "table.csv")
        written.append("table.csv")
    if "json" in formats:
        table.to_json(out_dir / "table.json")
        (out_dir / "reports.json").write_text(iq.reports_to_json(reports), encoding="utf-8")
        written += ["table.json", "reports.json"]
    (out_dir / "reports.txt").write_text(iq.reports_to_text(reports), encoding="utf-8")
    written.append("reports.txt")
    if cfg.output.save_grid and hasattr(field, "to_binary"):
        field.to_binary(out_dir / "grid.bin")
        written.append("grid.bin")
    manifest["outputs"] = sorted(written + ["manifest.json"])
    manifest["exit_status"] = status
    (out_dir / "manifest.json").write_text(json.dumps(_json_safe(manifest), indent=2) + "\n", encoding="utf-8")
    # wall-clock numbers live apart from the reproducible artifacts
    (out_dir / "timings.txt").write_text(timer.text(), encoding="utf-8")

    if checks:
        print(format_checks(checks), file=stdout, end="")
    print(f"wrote {', '.join(manifest['outputs'])} to {out_dir}", file=stdout)
    return status


def format_checks(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}" for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} passed")
    return "\n".join(lines) + "\n"


# argument handling


def _parse_t_grid(text: str) -> dict:
    """'min:max:count' or 'min:max:count:tanh'."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError("--t-grid expects min:max:count[:linear|tanh]")
    try:
        out = {"t_min": float(parts[0]), "t_max": float(parts[1]), "t_count": int(parts[2])}
    except ValueError as exc:
        raise ConfigError(f"--t-grid: {exc}") from exc
    if len(parts) == 4:
        out["spacing"] = parts[3]
    return out


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _apply_common(cfg: RunConfig, args) -> RunConfig:
    if args.format is not None:
        cfg.output.formats = [f.strip() for f in args.format.split(",") if f.strip()]
    if args.tol is not None:
        cfg.inequalities.tol = args.tol
    if args.resolution is not None:
        cfg.levelset.resolution = args.resolution
    return cfg.validate()


def _out_dir(args, cfg: RunConfig) -> Path:
    return Path(args.out_dir or cfg.output.dir or os.environ.get(OUT_DIR_ENV) or "staticlevels-out")


def cmd_run(args) -> int:
    cfg = _apply_common(load(args.config), args)
    return execute(cfg, _out_dir(args, cfg))


def cmd_schwarzschild(args) -> int:
    data = {"run": {"mode": "schwarzschild", "n": args.n, "m": args.m, "p": _parse_floats(args.p, "--p")},
            "levelset": _parse_t_grid(args.t_grid)}
    cfg = _apply_common(from_mapping(data), args)
    return execute(cfg, _out_dir(args, cfg))


def cmd_check(args) -> int:
    target = args.target
    if target in SUITES:
        tol = iq.Tolerances(tol=args.tol) if args.tol is not None else iq.Tolerances()
        if args.rhs_scale is not None:
            tol = iq.Tolerances(tol.tol, tol.rigidity_tol, args.rhs_scale)
        if target not in TOLERANCE_AWARE and args.rhs_scale is not None:
            raise ConfigError(f"suite {target!r} does not take inequality tolerances")
        results = run_suite(target, tol)
        print(format_checks(results), end="")
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK
    if not is_config_path(target):
        raise ConfigError(f"{target!r} is neither a suite ({', '.join(SUITES)}) nor a config file")
    cfg = load(target)
    if args.tol is not None:
        cfg.inequalities.tol = args.tol
    if args.rhs_scale is not None:
        cfg.inequalities.rhs_scale = args.rhs_scale
    cfg.validate()
    if cfg.check.suite is None:
        raise ConfigError("check needs [check] suite = ... in the config")
    results = run_suite(cfg.check.suite, _tolerances(cfg))
    print(format_checks(results), end="")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or ./staticlevels-out)")
    common.add_argument("--format", help="comma-separated output formats: " + ",".join(FORMATS))
    common.add_argument("--tol", type=float, help="relative tolerance for inequality reports")
    common.add_argument("--resolution", type=int, help="quadrature order (radial) or cells per axis")

    parser = argparse.ArgumentParser(prog="staticlevels", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a TOML configuration")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", parents=[common], help="run a named suite or the suite named in a config")
    p.add_argument("target", help=f"one of {', '.join(SUITES)}, or a config path")
    p.add_argument("--rhs-scale", type=float, help="multiply every rhs (negative control)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("schwarzschild", parents=[common], help="sweep the Schwarzschild solution")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--p", default="1,3", help="comma-separated exponents")
    p.add_argument("--t-grid", default="0.05:0.95:19", help="min:max:count[:linear|tanh]")
    p.set_defaults(func=cmd_schwarzschild)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
