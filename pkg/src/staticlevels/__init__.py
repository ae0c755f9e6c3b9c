"""Level sets of static potentials: functionals, inequalities and test fields."""

__version__ = "0.1.0"

from .core import DegenerateLevelSetError, LevelValue, StaticConfig, unit_sphere_area
from .schwarzschild import SchwarzschildModel
from .harmonicfields import GridField, MultiCenterField, solve_dirichlet
from .levelset import extract, phi_p, sweep, u_p, up_derivative_formula

__all__ = [
    "DegenerateLevelSetError", "GridField", "LevelValue", "MultiCenterField", "SchwarzschildModel",
    "StaticConfig", "extract", "phi_p", "solve_dirichlet", "sweep", "u_p", "unit_sphere_area",
    "up_derivative_formula",
]
