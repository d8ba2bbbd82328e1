"""
Energy balance and decay for the parabolic problem
==================================================

Backward Euler dissipates energy exactly in the discrete sense: the
stiffness form summed over steps plus the final ``L^2`` mass never exceeds
the initial mass.  Starting from ``u0 = 1`` with zero boundary data, the
solution also develops the ``|x|^alpha`` profile near the origin.
"""

import numpy as np

from singpot.analyze import fit_decay_exponent
from singpot.discretize import build_grid
from singpot.elliptic import EllipticProblem
from singpot.parabolic import ParabolicProblem, solve_parabolic


def zero(x):
    return np.zeros(len(x))


grid = build_grid(2, [129, 129], 0.6, geometry="axisymmetric")
prob = ParabolicProblem(EllipticProblem(grid, 1.0, boundary=zero), 1.0, 0.2, 400,
                        save=[0.05, 0.1, 0.15])
run = solve_parabolic(prob)
led = run.ledger
print(f"initial {led.initial:.6f}, left-hand side {led.lhs:.6f}, "
      f"relative defect {led.relative_defect:.1e}")

###############################################################################
# The ``L^2`` norm at the saved times.

for t, norm in zip(run.times, run.l2_norms()):
    print(f"  t = {t:.3f}  |u| = {norm:.5f}")

###############################################################################
# Decay exponent near the origin at each saved time.

radii = np.geomspace(0.1, 0.01, 6)
for t, slab in zip(run.times, run.slabs):
    fit = fit_decay_exponent(grid, radii, values=slab)
    print(f"  t = {t:.3f}  exponent {fit.exponent:.3f}")
