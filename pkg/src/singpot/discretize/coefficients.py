"""Coefficient fields ``a_ij(x[, t])`` and the mollified singular potential."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class CoefficientField:
    """Uniformly elliptic coefficients with bounds ``lam I <= a <= Lam I``.

    ``scalar`` returns the isotropic value ``a(x)`` for an ``(n, dim)``
    array of points; ``tensor`` (optional) returns the full ``(n, dim, dim)``
    matrix and takes precedence.  A callable taking ``(x, t)`` is flagged with
    ``time_dependent=True``.
    """

    lam: float
    Lam: float
    scalar: Callable | None = None
    tensor: Callable | None = None
    time_dependent: bool = False
    name: str = "custom"

    def __post_init__(self):
        if not (0 < self.lam <= self.Lam):
            raise ValueError("need 0 < lambda <= Lambda")
        if self.scalar is None and self.tensor is None:
            raise ValueError("give a scalar or a tensor evaluator")

    @property
    def isotropic(self) -> bool:
        return self.tensor is None

    def _call(self, f, x, t):
        return f(x, t) if self.time_dependent else f(x)

    def matrix(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        x = np.atleast_2d(x)
        if self.tensor is not None:
            return np.asarray(self._call(self.tensor, x, t), dtype=float)
        a = np.asarray(self._call(self.scalar, x, t), dtype=float)
        return a[:, None, None] * np.eye(x.shape[1])[None]

    def diagonal(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        """``(n, dim)`` array of ``a_kk``."""
        x = np.atleast_2d(x)
        if self.tensor is None:
            a = np.asarray(self._call(self.scalar, x, t), dtype=float)
            return np.repeat(a[:, None], x.shape[1], axis=1)
        return np.einsum("nkk->nk", self.matrix(x, t))

    def check_ellipticity(self, x: np.ndarray, t: float = 0.0, rtol: float = 1e-12) -> bool:
        """Spot check symmetry and the eigenvalue bounds at the points ``x``."""
        m = self.matrix(x, t)
        if not np.allclose(m, np.swapaxes(m, 1, 2), rtol=0, atol=rtol * self.Lam):
            return False
        ev = np.linalg.eigvalsh(m)
        return bool(ev.min() >= self.lam * (1 - rtol) and ev.max() <= self.Lam * (1 + rtol))


def laplacian(dim: int | None = None) -> CoefficientField:
    return CoefficientField(1.0, 1.0, scalar=lambda x: np.ones(len(x)), name="laplacian")


def constant(value: float) -> CoefficientField:
    return CoefficientField(value, value, scalar=lambda x: np.full(len(x), float(value)),
                            name="constant")


def checkerboard(lam: float, Lam: float, cell: float = 0.25) -> CoefficientField:
    """``lam`` or ``Lam`` on alternating cubes of side ``cell``; the origin is a corner."""

    def a(x):
        parity = np.sum(np.floor(x / cell).astype(np.int64), axis=1) % 2
        return np.where(parity == 0, lam, Lam)

    return CoefficientField(lam, Lam, scalar=a, name="checkerboard")


def smooth_isotropic(lam: float, Lam: float, freq: float = 3.0) -> CoefficientField:
    mid, amp = 0.5 * (lam + Lam), 0.5 * (Lam - lam)

    def a(x):
        return mid + amp * np.prod(np.sin(freq * math.pi * x + 0.3), axis=1)

    return CoefficientField(lam, Lam, scalar=a, name="smooth")


def rotated_anisotropic(lam: float, Lam: float, angle: float = math.pi / 6) -> CoefficientField:
    """Constant tensor with eigenvalues ``Lam, lam`` rotated in the first two axes."""
    c, s = math.cos(angle), math.sin(angle)

    def tensor(x):
        dim = x.shape[1]
        m = np.eye(dim) * lam
        rot = np.array([[c, -s], [s, c]])
        m[:2, :2] = rot @ np.diag([Lam, lam]) @ rot.T
        return np.broadcast_to(m, (len(x), dim, dim)).copy()

    return CoefficientField(lam, Lam, tensor=tensor, name="anisotropic")


PRESETS = {
    "laplacian": lambda lam, Lam: laplacian(),
    "checkerboard": checkerboard,
    "smooth": smooth_isotropic,
    "anisotropic": rotated_anisotropic,
}


def coefficient_preset(name: str, lam: float = 1.0, Lam: float = 1.0) -> CoefficientField:
    try:
        return PRESETS[name](lam, Lam)
    except KeyError:
        raise ValueError(f"unknown coefficient preset {name!r}; "
                         f"choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class MollifiedPotential:
    """``A (|x|^2 + k^-2)^-(2+beta)/2``; ``k = inf`` gives the singular potential."""

    A: float
    beta: float = 0.0
    k: float = math.inf

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("the potential strength must be nonnegative")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if not self.k > 0:
            raise ValueError("mollification level must be positive")

    def value(self, r):
        """Potential at distance ``r`` from the origin; ``inf`` at ``r = 0``, ``k = inf``."""
        r = np.asarray(r, dtype=float)
        eps2 = 0.0 if math.isinf(self.k) else self.k ** -2.0
        s = r * r + eps2
        if self.A == 0:
            out = np.zeros_like(s)
        else:
            with np.errstate(divide="ignore", over="ignore"):
                out = self.A * np.where(s > 0, s, 0.0) ** (-(2.0 + self.beta) / 2.0)
        return float(out) if out.ndim == 0 else out


def mollified_potential_value(pot: MollifiedPotential, x) -> float:
    """Potential at the point ``x`` (a coordinate vector or a radius)."""
    x = np.asarray(x, dtype=float)
    r = float(np.sqrt(np.sum(x * x))) if x.ndim else abs(float(x))
    return pot.value(r)
