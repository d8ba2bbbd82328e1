"""Backward Euler for ``u_t = div(a grad u) - A |x|^-(2+beta) u`` and heat-kernel runs."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretize import DiscreteOperator, Grid, MollifiedPotential, assemble_operator, cg_solve
from .elliptic import EllipticProblem


@dataclass(eq=False)
class ParabolicProblem:
    """Initial-boundary value problem on ``[0, T]`` with ``M`` equal steps.

    ``u0`` is an array of nodal values or a callable on coordinates.  The
    boundary is homogeneous Dirichlet.  ``save`` selects what is kept: every
    slab (``None``), every ``n``-th slab (an int), or the slabs nearest to a
    list of times.
    """

    elliptic: EllipticProblem
    u0: np.ndarray | Callable
    T: float
    M: int
    k: float = math.inf
    save: int | Sequence[float] | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError("step count M must be a positive integer")
        self.M = int(self.M)

    @property
    def grid(self) -> Grid:
        return self.elliptic.grid

    @property
    def dt(self) -> float:
        return self.T / self.M

    def initial_values(self) -> np.ndarray:
        g = self.grid
        u0 = self.u0(g.coords) if callable(self.u0) else self.u0
        u0 = np.array(np.broadcast_to(np.asarray(u0, dtype=float), (g.size,)))
        if not np.all(np.isfinite(u0)):
            raise ValueError("initial field must be finite")
        u0[g.boundary] = 0.0
        return u0

    def operator(self, t: float = 0.0) -> DiscreteOperator:
        e = self.elliptic
        return assemble_operator(e.grid, e.coeffs, MollifiedPotential(e.A, e.beta, self.k), t)


def suggest_steps(grid: Grid, T: float, max_steps: int = 20000) -> tuple[int, bool]:
    """Step count with ``dt <= min spacing^2``, capped at ``max_steps``.

    Returns ``(M, feasible)``; ``feasible`` is False when the cap was hit,
    which happens on strongly graded grids.
    """
    hmin = min(float(np.min(np.diff(ax))) for ax in grid.axes)
    m = math.ceil(T / hmin ** 2)
    return (m, True) if m <= max_steps else (max_steps, False)


@dataclass
class EnergyLedger:
    """Per-run sums for the discrete energy balance of backward Euler.

    With homogeneous boundary data every step satisfies
    ``|u1|^2 - |u0|^2 + |u1 - u0|^2 + 2 dt a(u1, u1) = 0`` in the
    volume-weighted norm, so ``identity_defect`` measures only round-off.
    """

    lam: float
    initial: float = 0.0
    final: float = 0.0
    grad: float = 0.0
    grad_weighted: float = 0.0
    potential: float = 0.0
    increments: float = 0.0

    @property
    def lhs(self) -> float:
        """``lam sum dt |grad u|^2 + sum dt int V u^2 + |u(T)|^2``."""
        return self.lam * self.grad + self.potential + self.final

    @property
    def relative_defect(self) -> float:
        """Positive part of ``lhs - |u0|^2`` relative to ``|u0|^2``."""
        if self.initial == 0:
            return max(self.lhs, 0.0)
        return max(self.lhs - self.initial, 0.0) / self.initial

    @property
    def identity_defect(self) -> float:
        full = self.final + self.increments + 2.0 * (self.grad_weighted + self.potential)
        return abs(full - self.initial) / max(self.initial, 1e-300)


class ImplicitStepper:
    """Solves ``(W + dt K) u1 = W u0`` on interior nodes.

    The matrix is factorized once (``solver="direct"``) unless the
    coefficients depend on time, in which case it is rebuilt every step.
    ``solver="cg"`` uses warm-started Jacobi CG instead.
    """

    def __init__(self, problem: ParabolicProblem, dt: float, solver: str = "direct",
                 tol: float = 1e-12):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.problem = problem
        self.dt = dt
        self.solver = solver
        self.tol = tol
        self.time_dependent = problem.elliptic.coeffs.time_dependent
        self._setup(problem.operator(0.0))

    def _setup(self, op: DiscreteOperator):
        self.op = op
        kii, _ = op.reduced
        self.ii = op.interior_index
        self.w = op.volumes[self.ii]
        self.system = sp.csr_matrix(sp.diags(self.w) + self.dt * kii)
        self._lu = None
        if self.solver == "direct":
            self._lu = spla.factorized(self.system.tocsc())
        elif self.solver != "cg":
            raise ValueError(f"unknown solver {self.solver!r}")

    def step(self, u: np.ndarray, t_next: float | None = None) -> np.ndarray:
        if self.time_dependent and t_next is not None:
            self._setup(self.problem.operator(t_next))
        rhs = self.w * u[self.ii]
        out = np.zeros_like(u)
        if self._lu is not None:
            out[self.ii] = self._lu(rhs)
        else:
            out[self.ii] = cg_solve(self.system, rhs, tol=self.tol, x0=u[self.ii]).x
        return out


def step_implicit(problem: ParabolicProblem, u: np.ndarray, dt: float,
                  solver: str = "direct") -> np.ndarray:
    """One backward Euler step of size ``dt`` from the nodal field ``u``."""
    return ImplicitStepper(problem, dt, solver).step(np.asarray(u, dtype=float), dt)


@dataclass(eq=False)
class SpaceTimeField:
    grid: Grid
    times: np.ndarray
    slabs: list
    ledger: EnergyLedger | None = None
    steps: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.slabs):
            raise ValueError("one slab per time")

    @classmethod
    def constant(cls, grid: Grid, values: np.ndarray, horizon: float = 1.0) -> "SpaceTimeField":
        """Time-independent field on ``[0, horizon]``, e.g. an elliptic solution."""
        v = np.asarray(values, dtype=float)
        return cls(grid, np.array([0.0, horizon]), [v, v])

    def at(self, t: float) -> np.ndarray:
        """Slab nearest to time ``t``."""
        return self.slabs[int(np.argmin(np.abs(self.times - t)))]

    def l2_norms(self) -> np.ndarray:
        w = self.grid.volumes
        return np.array([math.sqrt(float(np.sum(w * s * s))) for s in self.slabs])

    def write_csv(self, path, times: Sequence[float] | None = None) -> None:
        """``t, node, value`` rows for the selected slabs (all by default)."""
        idx = range(len(self.times)) if times is None else sorted(
            {int(np.argmin(np.abs(self.times - t))) for t in times})
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "node", "value"])
            for i in idx:
                t = self.times[i]
                for node, v in enumerate(self.slabs[i]):
                    w.writerow([f"{t:.17g}", node, f"{v:.17g}"])


def _save_plan(problem: ParabolicProblem) -> set:
    m = problem.M
    if problem.save is None:
        return set(range(m + 1))
    if isinstance(problem.save, (int, np.integer)):
        step = max(int(problem.save), 1)
        return set(range(0, m + 1, step)) | {m}
    dt = problem.dt
    return {min(max(int(round(t / dt)), 0), m) for t in problem.save} | {m}


def solve_parabolic(problem: ParabolicProblem, solver: str = "direct") -> SpaceTimeField:
    """March ``M`` backward Euler steps and keep the energy ledger.

    The ledger sums ``dt |grad u^n|^2``, ``dt int V u^n^2`` and the squared
    increments over ``n = 1..M``.
    """
    dt = problem.dt
    stepper = ImplicitStepper(problem, dt, solver)
    u = problem.initial_values()
    w = problem.grid.volumes
    ledger = EnergyLedger(lam=problem.elliptic.coeffs.lam, initial=float(np.sum(w * u * u)))
    keep = _save_plan(problem)
    times, slabs = [], []
    if 0 in keep:
        times.append(0.0)
        slabs.append(u.copy())
    for n in range(1, problem.M + 1):
        t = n * dt
        un = stepper.step(u, t)
        op = stepper.op
        ledger.grad += dt * op.gradient_energy(un, weighted=False)
        ledger.grad_weighted += dt * op.gradient_energy(un)
        ledger.potential += dt * op.potential_energy(un)
        du = un - u
        ledger.increments += float(np.sum(w * du * du))
        if not np.all(np.isfinite(un)):
            raise FloatingPointError(f"non-finite values at step {n}")
        u = un
        if n in keep:
            times.append(t)
            slabs.append(u.copy())
    ledger.final = float(np.sum(w * u * u))
    return SpaceTimeField(problem.grid, np.array(times), slabs, ledger, problem.M)


@dataclass(eq=False)
class KernelEstimate:
    """Numerical fundamental solution with source at ``y``.

    ``source_time`` is ``eps^2 / 2``: the Gaussian source equals the free
    heat kernel at that time, so ``times + source_time`` is the effective
    age of the kernel.
    """

    grid: Grid
    y: np.ndarray
    eps: float
    times: np.ndarray
    values: list
    masses: np.ndarray
    initial_mass: float

    @property
    def source_time(self) -> float:
        return 0.5 * self.eps ** 2

    def distance(self) -> np.ndarray:
        return self.grid.distance_to(self.y)

    def write_profiles(self, path, bins: int = 128) -> None:
        """``t, |x-y|, value`` rows with the largest value per distance bin."""
        dist = self.distance()
        inner = ~self.grid.boundary
        edges = np.linspace(0.0, float(dist[inner].max()), bins + 1)
        which = np.clip(np.searchsorted(edges, dist[inner], side="right") - 1, 0, bins - 1)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "distance", "value"])
            for t, vals in zip(self.times, self.values):
                best = np.full(bins, -np.inf)
                np.maximum.at(best, which, vals[inner])
                mid = 0.5 * (edges[:-1] + edges[1:])
                for b in np.flatnonzero(np.isfinite(best)):
                    w.writerow([f"{t:.17g}", f"{mid[b]:.17g}", f"{best[b]:.17g}"])


def gaussian_source(grid: Grid, y, eps: float) -> np.ndarray:
    """Discrete Gaussian of standard deviation ``eps`` with unit discrete mass."""
    dist = grid.distance_to(y)
    u = np.exp(-0.5 * (dist / eps) ** 2)
    u[grid.boundary] = 0.0
    mass = float(np.sum(grid.volumes * u))
    if mass <= 0:
        raise ValueError("source has no mass on the grid")
    return u / mass


def estimate_kernel(elliptic: EllipticProblem, y, eps: float, times: Sequence[float],
                    M: int, k: float = math.inf, solver: str = "direct") -> KernelEstimate:
    """Evolve a mollified point mass at ``y`` and keep the slabs at ``times``.

    The horizon is ``max(times)`` with ``M`` equal steps; each requested
    time is snapped to the nearest step and the snapped times are returned.

    Raises
    ------
    ValueError
        If ``y`` is not an interior point or ``eps`` is below twice the local
        grid spacing at ``y``.
    """
    grid = elliptic.grid
    y = np.asarray(y, dtype=float)
    times = np.sort(np.asarray(times, dtype=float))
    if np.any(times <= 0):
        raise ValueError("kernel times must be positive")
    dist = grid.distance_to(y)
    near = int(np.argmin(dist))
    if grid.boundary[near] or (grid.ball_radius is not None
                               and float(np.linalg.norm(y)) >= grid.ball_radius):
        raise ValueError("source point must be interior")
    h = float(grid.local_spacing[near])
    if eps < 2.0 * h:
        raise ValueError(f"source scale {eps:g} is under-resolved (local spacing {h:g})")
    u0 = gaussian_source(grid, y, eps)
    prob = ParabolicProblem(elliptic, u0, float(times[-1]), M, k=k, save=list(times))
    st = solve_parabolic(prob, solver)
    keep = [int(np.argmin(np.abs(st.times - t))) for t in times]
    vals = [st.slabs[i] for i in keep]
    w = grid.volumes
    masses = np.array([float(np.sum(w * v)) for v in vals])
    return KernelEstimate(grid, y, eps, st.times[keep], vals, masses, float(np.sum(w * u0)))
