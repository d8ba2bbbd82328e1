"""
Faster-than-polynomial decay for a supercritical potential
==========================================================

For ``V = A / |x|^(2 + beta)`` with ``beta > 0`` the radial special solution
is a modified Bessel function of ``r^(-beta/2)`` and vanishes faster than
any power of ``r``.  A power-law fit over shrinking windows shows the
slope growing without bound.
"""

import numpy as np

from singpot.analyze import check_comparison, windowed_slopes
from singpot.discretize import build_grid
from singpot.elliptic import EllipticProblem, solve_elliptic
from singpot.special_fn import ExponentParams, SpecialSolution

J = SpecialSolution(ExponentParams(3, 1.0, 1.0))
for r in (0.5, 0.2, 0.1, 0.05):
    print(f"J_1({r}) = {J(np.array([r]))[0]:.3e}")

###############################################################################
# Solve with ``J_1`` as boundary data and fit slopes on four windows, each
# half the size of the previous one.

grid = build_grid(3, [33] * 3, 0.7)
prob = EllipticProblem(grid, 1.0, beta=1.0)
sol = solve_elliptic(prob)
windows = [(0.2, 0.5), (0.1, 0.25), (0.05, 0.125)]
for (lo, hi), fit in zip(windows, windowed_slopes(sol, windows, beta=1.0)):
    print(f"  window [{lo}, {hi}]  slope {fit.exponent:.3f}")

###############################################################################
# The solution still sits below a multiple of ``J_1`` inside ``B_1/2``.

rep = check_comparison(sol, J)
print(f"comparison constant C = {rep.extra['C']:.4f}, violations: {rep.n_violations}")
