"""Sweeps of the functionals over a grid of levels, with CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from ..core import StaticConfig
from .extract import extract
from .functionals import phi_p, u_p, up_derivative_formula

TIE_BREAK = 1e-9
MIN_FD_STEP = 1e-4


def column_label(p: float) -> str:
    return str(int(p)) if float(p).is_integer() else repr(float(p))


def format_value(v) -> str:
    """Shortest round-trip text for a float; empty for NaN."""
    if isinstance(v, str):
        return v
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v) + 0.0)  # + 0.0 folds -0.0 into 0.0


@dataclass
class FunctionalTable:
    ps: list
    rows: list = dc_field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        cols = ["t", "s"]
        cols += [f"U_{column_label(p)}" for p in self.ps]
        cols += [f"Phi_{column_label(p)}" for p in self.ps]
        for p in self.ps:
            cols += [f"dU_{column_label(p)}_formula", f"dU_{column_label(p)}_fd"]
        cols += ["excluded_area", "t_shift", "status"]
        return cols

    def column(self, name: str) -> np.ndarray:
        return np.array([r.get(name, math.nan) for r in self.rows], dtype=float)

    @property
    def failed_rows(self) -> list[int]:
        return [i for i, r in enumerate(self.rows) if r["status"] != "ok"]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([format_value(r.get(c, math.nan)) for c in self.columns])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    def to_json(self, path=None) -> str:
        def clean(v):
            if isinstance(v, float):
                return v + 0.0 if math.isfinite(v) else None
            return v
        doc = {"columns": self.columns, "p": [float(p) for p in self.ps],
               "rows": [{c: clean(r.get(c, math.nan)) for c in self.columns} for r in self.rows]}
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _shift_off_critical(t: float, critical: Sequence[float]) -> float:
    for c in critical:
        if abs(t - c) <= 1e-12 * max(1.0, abs(c)):
            return TIE_BREAK
    return 0.0


def sweep(field, config: StaticConfig, t_grid: Sequence[float], ps: Sequence[float],
          fd_step: float | None = None, extract_kw: dict | None = None,
          critical_values: Sequence[float] | None = None, on_surface=None) -> FunctionalTable:
    """Evaluate U_p, Phi_p and both derivative estimates at every level.

    A level equal to a critical value is moved up by TIE_BREAK and the shift
    is recorded.  A row whose extraction fails keeps NaN entries and an
    error status; the sweep continues.  ``on_surface(index, surface)`` is
    called with every successfully extracted level surface.
    """
    t_grid = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("t grid must be strictly increasing")
    # static potentials live on [u0, 1); flat test fields on (-1, 1)
    floor = config.u0 if field.is_static else -1.0
    if any(not (floor <= t < 1 and t > -1) for t in t_grid):
        raise ValueError(f"t grid must lie in [{floor}, 1)")
    kw = dict(extract_kw or {})
    if critical_values is None:
        critical_values = field.critical_values()
    table = FunctionalTable(list(ps))
    for t0 in t_grid:
        shift = _shift_off_critical(t0, critical_values)
        t = t0 + shift
        row = {"t": t, "s": 2 * math.atanh(t), "t_shift": shift, "excluded_area": math.nan}
        try:
            surf = extract(field, t, **kw)
            row["excluded_area"] = surf.excluded_area
            step = fd_step if fd_step is not None else max(MIN_FD_STEP, 10 * surf.level_uncertainty)
            lo_t = max(t - step, floor) if field.is_static else t - step
            hi_t = t + step
            lo_s = extract(field, lo_t, **kw)
            hi_s = extract(field, hi_t, **kw)
            for p in ps:
                lab = column_label(p)
                row[f"U_{lab}"] = u_p(field, config, t, p, surface=surf)
                row[f"Phi_{lab}"] = phi_p(field, config, None, p, surface=surf)
                row[f"dU_{lab}_formula"] = up_derivative_formula(field, config, t, p, surface=surf)
                row[f"dU_{lab}_fd"] = (u_p(field, config, hi_t, p, surface=hi_s)
                                       - u_p(field, config, lo_t, p, surface=lo_s)) / (hi_t - lo_t)
            row["status"] = "degenerate" if surf.degenerate else "ok"
            if on_surface is not None:
                on_surface(len(table.rows), surf)
        except (ValueError, ArithmeticError) as exc:
            row["status"] = f"failed: {exc}"
        table.rows.append(row)
    return table


def linear_grid(start: float, stop: float, count: int) -> list[float]:
    return [float(v) for v in np.linspace(start, stop, count)]


def tanh_grid(start: float, stop: float, count: int) -> list[float]:
    """Levels uniform in s = 2 artanh(t) between the end points."""
    s = np.linspace(2 * math.atanh(start), 2 * math.atanh(stop), count)
    return [float(v) for v in np.tanh(s / 2)]
