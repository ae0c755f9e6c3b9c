"""Level-surface extraction, geometry sampling and the U_p / Phi_p functionals."""

from .extract import EmptyLevelSetError, LevelSurface, NotStarShapedError, extract
from .functionals import phi_p, u_p, up_derivative_formula, up_second_derivative_at_zero, w_p
from .geometry import PointGeometry, point_geometry
from .quadrature import sphere_rule
from .table import FunctionalTable, linear_grid, sweep, tanh_grid

__all__ = [
    "EmptyLevelSetError", "FunctionalTable", "LevelSurface", "NotStarShapedError", "PointGeometry",
    "extract", "linear_grid", "phi_p", "point_geometry", "sphere_rule", "sweep", "tanh_grid", "u_p",
    "up_derivative_formula", "up_second_derivative_at_zero", "w_p",
]
