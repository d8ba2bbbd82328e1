"""Preconditioned conjugate gradients for the SPD systems of this package."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class NonConvergenceError(RuntimeError):
    """CG ran out of iterations; carries the best iterate and the history."""

    def __init__(self, message, best, residuals):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residuals: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.residuals[-1] if self.residuals else 0.0


def cg_solve(matrix, rhs, tol: float = 1e-10, max_iter: int | None = None, x0=None,
             preconditioner: str | None = "jacobi") -> CGResult:
    """Solve ``matrix @ x = rhs`` for symmetric positive definite ``matrix``.

    Stops once ``||rhs - matrix x||_2 <= tol * ||rhs||_2``.  ``residuals``
    records the 2-norm after every iteration and ``energies`` the quadratic
    functional ``x.A.x / 2 - b.x``, which CG decreases monotonically.

    Raises
    ------
    NonConvergenceError
        If the tolerance is not met within ``max_iter`` iterations.
    """
    a = sp.csr_matrix(matrix) if not hasattr(matrix, "dot") else matrix
    b = np.asarray(rhs, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 10 * n
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return CGResult(np.zeros(n), 0, [0.0], [0.0])

    if preconditioner == "jacobi":
        dinv = 1.0 / a.diagonal()
    elif preconditioner is None:
        dinv = np.ones(n)
    else:
        raise ValueError(f"unknown preconditioner {preconditioner!r}")

    r = b - a @ x
    z = dinv * r
    p = z.copy()
    rz = float(r @ z)
    residuals = [float(np.linalg.norm(r))]
    energies = [-0.5 * float(x @ (b + r))]
    target = tol * bnorm
    best_x, best_r = x.copy(), residuals[0]
    if residuals[0] <= target:
        return CGResult(x, 0, residuals, energies)
    for it in range(1, max_iter + 1):
        ap = a @ p
        pap = float(p @ ap)
        if pap <= 0:
            raise NonConvergenceError("matrix is not positive definite", best_x, residuals)
        step = rz / pap
        x += step * p
        r -= step * ap
        rn = float(np.linalg.norm(r))
        residuals.append(rn)
        energies.append(-0.5 * float(x @ (b + r)))
        if rn < best_r:
            best_x, best_r = x.copy(), rn
        if rn <= target:
            return CGResult(x, it, residuals, energies)
        z = dinv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergenceError(
        f"CG did not reach {tol:g} relative residual in {max_iter} iterations "
        f"(best {best_r / bnorm:.3e})", best_x, residuals)
