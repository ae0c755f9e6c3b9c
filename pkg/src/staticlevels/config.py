"""Run configuration: a TOML file with one table per module, unknown keys rejected."""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("schwarzschild", "monopole", "multicenter", "grid-solve")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """The configuration is malformed or inconsistent."""


@dataclass
class RunSection:
    mode: str = "schwarzschild"
    n: int = 3
    m: float = 1.0
    u0: float = 0.0
    p: list = field(default_factory=lambda: [1.0, 3.0])


@dataclass
class LevelsetSection:
    t_min: float = 0.05
    t_max: float = 0.95
    t_count: int = 19
    spacing: str = "linear"
    resolution: int | None = None
    backend: str = "auto"
    fd_step: float | None = None
    eps_crit: float | None = None
    degenerate_fraction: float = 0.05


@dataclass
class HarmonicSection:
    centers: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    h: float = 1 / 32
    half_width: float = 2.0
    radius: float = 0.5
    solver_tol: float = 1e-10
    max_sweeps: int = 100_000
    convergence_h: list = field(default_factory=list)
    convergence_half_width: float = 1.0


@dataclass
class InequalitySection:
    tol: float = 1e-6
    rigidity_tol: float = 1e-8
    rhs_scale: float = 1.0
    policy: str = "main"
    enabled: bool = True


@dataclass
class OutputSection:
    dir: str | None = None
    formats: list = field(default_factory=lambda: list(FORMATS))
    save_grid: bool = False


@dataclass
class CheckSection:
    suite: str | None = None
    require_satisfied: bool = False
    require_rigidity: bool = False
    constant_columns: list = field(default_factory=list)
    constant_rtol: float = 1e-6
    order_range: list = field(default_factory=list)


@dataclass
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    levelset: LevelsetSection = field(default_factory=LevelsetSection)
    harmonicfields: HarmonicSection = field(default_factory=HarmonicSection)
    inequalities: InequalitySection = field(default_factory=InequalitySection)
    output: OutputSection = field(default_factory=OutputSection)
    check: CheckSection = field(default_factory=CheckSection)

    def to_dict(self) -> dict:
        return asdict(self)

    def t_grid(self) -> list[float]:
        from .levelset.table import linear_grid, tanh_grid

        ls = self.levelset
        make = tanh_grid if ls.spacing == "tanh" else linear_grid
        return make(ls.t_min, ls.t_max, ls.t_count)

    def validate(self) -> "RunConfig":
        r, ls, hf = self.run, self.levelset, self.harmonicfields
        if r.mode not in MODES:
            raise ConfigError(f"run.mode must be one of {', '.join(MODES)}")
        if int(r.n) != r.n or r.n < 3:
            raise ConfigError("run.n must be an integer >= 3")
        if not r.m > 0 and r.mode in ("schwarzschild", "monopole"):
            raise ConfigError("run.m must be positive")
        if not 0 <= r.u0 < 1:
            raise ConfigError("run.u0 must lie in [0, 1)")
        if not r.p:
            raise ConfigError("run.p must be a nonempty list")
        if any(not isinstance(p, (int, float)) or not 1 <= p < math.inf for p in r.p):
            raise ConfigError("run.p entries must be finite numbers >= 1")
        if len(set(r.p)) != len(r.p):
            raise ConfigError("run.p entries must be distinct")
        if ls.spacing not in ("linear", "tanh"):
            raise ConfigError("levelset.spacing must be 'linear' or 'tanh'")
        if ls.t_count < 1:
            raise ConfigError("levelset.t_count must be positive")
        lower = r.u0 if r.mode in ("schwarzschild", "grid-solve") else -1.0
        if not (lower <= ls.t_min and ls.t_max < 1 and ls.t_min > -1):
            raise ConfigError(f"t grid must lie in [{lower}, 1)")
        if ls.t_count > 1 and not ls.t_min < ls.t_max:
            raise ConfigError("levelset.t_min must be below levelset.t_max")
        if ls.resolution is not None and ls.resolution <= 0:
            raise ConfigError("levelset.resolution must be positive")
        if ls.backend not in ("auto", "radial", "triangulation"):
            raise ConfigError("levelset.backend must be auto, radial or triangulation")
        if r.mode == "multicenter":
            if not hf.centers or len(hf.centers) != len(hf.weights):
                raise ConfigError("multicenter mode needs matching harmonicfields.centers and weights")
            if any(len(c) != r.n for c in hf.centers):
                raise ConfigError("every center must have run.n coordinates")
        if r.mode == "grid-solve":
            if r.n != 3:
                raise ConfigError("grid-solve runs in dimension 3")
            if not hf.h > 0 or not hf.radius > 0 or not hf.half_width > hf.radius:
                raise ConfigError("grid-solve needs h > 0 and 0 < radius < half_width")
        if self.inequalities.policy not in ("main", "refined"):
            raise ConfigError("inequalities.policy must be 'main' or 'refined'")
        if any(f not in FORMATS for f in self.output.formats) or not self.output.formats:
            raise ConfigError("output.formats must be a nonempty subset of csv, json")
        if self.check.order_range and len(self.check.order_range) != 2:
            raise ConfigError("check.order_range must be [low, high]")
        return self


_SECTIONS = {
    "run": RunSection, "levelset": LevelsetSection, "harmonicfields": HarmonicSection,
    "inequalities": InequalitySection, "output": OutputSection, "check": CheckSection,
}

_FLOAT_KEYS = {"m", "u0", "t_min", "t_max", "fd_step", "eps_crit", "degenerate_fraction", "h",
               "half_width", "radius", "solver_tol", "tol", "rigidity_tol", "rhs_scale",
               "constant_rtol", "convergence_half_width"}


def _coerce(section: str, key: str, value, default):
    if key in _FLOAT_KEYS and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if key == "p":
        if not isinstance(value, list):
            value = [value]
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            raise ConfigError(f"{section}.p entries must be numbers")
        return [float(v) for v in value]
    if default is not None and not isinstance(value, type(default)):
        if isinstance(default, float) and isinstance(value, int):
            return float(value)
        raise ConfigError(f"{section}.{key} should be {type(default).__name__}, got {type(value).__name__}")
    return value


def from_mapping(data: dict) -> RunConfig:
    cfg = RunConfig()
    for name, section in data.items():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        if not isinstance(section, dict):
            raise ConfigError(f"[{name}] must be a table")
        target = getattr(cfg, name)
        for key, value in section.items():
            if key not in target.__dataclass_fields__:
                raise ConfigError(f"unknown key {name}.{key}")
            setattr(target, key, _coerce(name, key, value, getattr(target, key)))
    return cfg.validate()


def load(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return from_mapping(data)


def is_config_path(text: str) -> bool:
    return text.endswith(".toml") or Path(text).is_file()
