"""Grids, coefficient fields, operator assembly and sparse solvers."""
from .cg import CGResult, NonConvergenceError, cg_solve
from .coefficients import (
    CoefficientField,
    MollifiedPotential,
    checkerboard,
    coefficient_preset,
    constant,
    laplacian,
    mollified_potential_value,
    rotated_anisotropic,
    smooth_isotropic,
)
from .grid import Grid, build_grid
from .operator import AssemblyError, DiscreteOperator, assemble_operator, is_m_matrix_rows
from .textio import read_field, read_matrix_triplets, write_field, write_matrix_triplets

__all__ = [
    "AssemblyError",
    "CGResult",
    "CoefficientField",
    "DiscreteOperator",
    "Grid",
    "MollifiedPotential",
    "NonConvergenceError",
    "assemble_operator",
    "build_grid",
    "cg_solve",
    "checkerboard",
    "coefficient_preset",
    "constant",
    "is_m_matrix_rows",
    "laplacian",
    "mollified_potential_value",
    "read_field",
    "read_matrix_triplets",
    "rotated_anisotropic",
    "smooth_isotropic",
    "write_field",
    "write_matrix_triplets",
]
