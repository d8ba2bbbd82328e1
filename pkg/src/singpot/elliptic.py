"""Elliptic problems ``div(a grad u) = A |x|^-(2+beta) u`` and the mollified sequence."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .discretize import (
    CoefficientField,
    DiscreteOperator,
    Grid,
    MollifiedPotential,
    assemble_operator,
    cg_solve,
    laplacian,
    write_field,
)
from .special_fn import ExponentParams, SpecialSolution


@dataclass(eq=False)
class EllipticProblem:
    """Dirichlet problem on the ball carved out of ``grid``.

    ``boundary`` maps an ``(n, dim)`` coordinate array to boundary values.
    When omitted, the trace of the special solution ``J_beta`` is used so the
    exact solution of the Laplacian case is known; this needs ``A > 0``.
    """

    grid: Grid
    A: float = 1.0
    beta: float = 0.0
    coeffs: CoefficientField = field(default_factory=laplacian)
    boundary: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("A must be nonnegative")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.boundary is None and self.A == 0:
            raise ValueError("A = 0 has no special solution; pass boundary data")

    @property
    def d(self) -> int:
        return self.grid.d

    @property
    def params(self) -> ExponentParams:
        return ExponentParams(self.d, self.A, self.beta)

    @property
    def special_solution(self) -> SpecialSolution | None:
        return SpecialSolution(self.params) if self.A > 0 else None

    def boundary_values(self) -> np.ndarray:
        """Boundary data sampled at every node (only Dirichlet nodes are used)."""
        g = self.grid
        if self.boundary is not None:
            vals = np.asarray(self.boundary(g.coords), dtype=float)
            vals = np.broadcast_to(vals, (g.size,)).copy()
        else:
            vals = np.zeros(g.size)
            r = g.radius
            pos = r > 0
            vals[pos] = self.special_solution(r[pos])
        if not np.all(np.isfinite(vals[g.boundary])):
            raise ValueError("boundary data must be finite")
        return vals

    def operator(self, k: float = math.inf) -> DiscreteOperator:
        return assemble_operator(self.grid, self.coeffs, MollifiedPotential(self.A, self.beta, k))


@dataclass(eq=False)
class SolutionField:
    """Nodal values of a solved (or injected) field on ``grid``."""

    grid: Grid
    values: np.ndarray
    k: float = math.inf
    iterations: int = 0
    residual: float = 0.0
    operator: DiscreteOperator | None = field(default=None, repr=False)

    def l2_norm(self) -> float:
        m = ~self.grid.boundary
        return float(np.sqrt(np.sum(self.grid.volumes[m] * self.values[m] ** 2)))

    def l2_distance(self, other: "SolutionField") -> float:
        m = ~self.grid.boundary
        diff = self.values[m] - other.values[m]
        return float(np.sqrt(np.sum(self.grid.volumes[m] * diff * diff)))

    def max_error(self, exact: np.ndarray, region: np.ndarray | None = None) -> float:
        m = ~self.grid.boundary if region is None else region
        return float(np.max(np.abs(self.values[m] - exact[m])))

    def write(self, path) -> None:
        write_field(path, self.grid.coords, self.values)


def _solve_reduced(op: DiscreteOperator, g: np.ndarray, tol: float, method: str,
                   x0: np.ndarray | None, max_iter: int | None):
    kii, kib = op.reduced
    ii, bb = op.interior_index, op.boundary_index
    rhs = -(kib @ g[bb])
    if method == "cg":
        res = cg_solve(kii, rhs, tol=tol, max_iter=max_iter,
                       x0=None if x0 is None else x0[ii])
        ui, its, resid = res.x, res.iterations, res.residual
    elif method == "direct":
        ui = spla.spsolve(kii.tocsc(), rhs)
        its = 0
        resid = float(np.linalg.norm(rhs - kii @ ui))
    else:
        raise ValueError(f"unknown method {method!r}")
    u = g.copy()
    u[ii] = ui
    return u, its, resid


def solve_elliptic(problem: EllipticProblem, k: float = math.inf, *, tol: float = 1e-11,
                   method: str = "cg", x0: np.ndarray | None = None,
                   max_iter: int | None = None) -> SolutionField:
    """Solve the Dirichlet problem with the potential mollified at level ``k``.

    The interior unknowns solve the symmetric system ``K_II u_I = -K_IB g``
    obtained from the volume-weighted stiffness matrix.

    Raises
    ------
    NonConvergenceError
        If CG does not reach ``tol``.
    """
    op = problem.operator(k)
    g = problem.boundary_values()
    g = np.where(problem.grid.boundary, g, 0.0)
    u, its, resid = _solve_reduced(op, g, tol, method, x0, max_iter)
    return SolutionField(problem.grid, u, k=k, iterations=its, residual=resid, operator=op)


@dataclass
class MollifiedSequenceResult:
    levels: list
    fields: list
    distances: list
    energies: list
    accepted: int

    @property
    def accepted_field(self) -> SolutionField:
        return self.fields[self.accepted]

    def rows(self):
        """``(k, distance to previous level, energy)`` per level; NaN for the first."""
        out = []
        for i, (k, e) in enumerate(zip(self.levels, self.energies)):
            out.append((k, self.distances[i - 1] if i else math.nan, e))
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "l2_distance", "energy"])
            for k, dist, e in self.rows():
                w.writerow([f"{k:.17g}", f"{dist:.17g}", f"{e:.17g}"])


def solve_mollified_sequence(problem: EllipticProblem, ks: Sequence[float], *,
                             stop_rtol: float = 1e-8, tol: float = 1e-11,
                             method: str = "cg") -> MollifiedSequenceResult:
    """Solve at increasing mollification levels ``ks``.

    Consecutive fields are compared in the discrete L2 norm; the sequence
    stops early once a distance falls below ``stop_rtol * ||u||``.  Energies
    are ``lambda int |grad u|^2 + int V_k u^2``.
    """
    ks = [float(k) for k in ks]
    if not ks:
        raise ValueError("need at least one level")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("levels must be strictly increasing")
    lam = problem.coeffs.lam
    fields, dists, energies = [], [], []
    prev = None
    for k in ks:
        f = solve_elliptic(problem, k, tol=tol, method=method,
                           x0=None if prev is None else prev.values)
        op = f.operator
        energies.append(lam * op.gradient_energy(f.values, weighted=False)
                        + op.potential_energy(f.values))
        if prev is not None:
            dists.append(f.l2_distance(prev))
        fields.append(f)
        prev = f
        if dists and dists[-1] < stop_rtol * max(f.l2_norm(), 1e-300):
            break
    return MollifiedSequenceResult(ks[:len(fields)], fields, dists, energies, len(fields) - 1)


def weak_residual(field: SolutionField, problem: EllipticProblem, psi,
                  k: float | None = None) -> float:
    """Discrete ``int a grad psi . grad u + int V psi u``.

    ``psi`` is an array of nodal values or a callable on coordinates; it
    must vanish on Dirichlet nodes.
    """
    grid = problem.grid
    vals = np.asarray(psi(grid.coords) if callable(psi) else psi, dtype=float)
    if np.any(vals[grid.boundary] != 0):
        raise ValueError("test function must vanish on Dirichlet nodes")
    kk = field.k if k is None else k
    op = field.operator if (field.operator is not None and kk == field.k) else problem.operator(kk)
    return op.bilinear(vals, field.values)


def smooth_bump(center, radius: float):
    """``exp(1 - 1/(1 - s^2))`` with ``s = |x - center| / radius``, zero outside."""
    center = np.asarray(center, dtype=float)

    def psi(x):
        s2 = np.sum((x - center) ** 2, axis=1) / radius ** 2
        out = np.zeros(len(x))
        m = s2 < 1
        out[m] = np.exp(1.0 - 1.0 / (1.0 - s2[m]))
        return out

    return psi
