"""Elliptic and parabolic equations with an inverse-square type potential.

Subpackages: :mod:`singpot.special_fn` (decay exponents, Bessel solutions),
:mod:`singpot.discretize` (graded grids, flux-form operators, CG),
:mod:`singpot.elliptic`, :mod:`singpot.parabolic`, :mod:`singpot.analyze`
and the scenario runner :mod:`singpot.cli`.
"""
from .special_fn import ExponentParams, SpecialSolution, alpha_of, bessel_K
from .discretize import build_grid
from .elliptic import EllipticProblem, solve_elliptic, solve_mollified_sequence
from .parabolic import ParabolicProblem, estimate_kernel, solve_parabolic

__version__ = "0.1.0"

__all__ = [
    "EllipticProblem",
    "ExponentParams",
    "ParabolicProblem",
    "SpecialSolution",
    "alpha_of",
    "bessel_K",
    "build_grid",
    "estimate_kernel",
    "solve_elliptic",
    "solve_mollified_sequence",
    "solve_parabolic",
]
