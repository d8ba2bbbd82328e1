"""Weight-exponent fit for numerical heat kernels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._fields import AnalysisError
from .decay import linear_fit


@dataclass
class KernelWeightFit:
    """Result of :func:`fit_kernel_weight`.

    ``exponent`` is ``-slope`` of the envelope residual against
    ``log(1 + sqrt(t) / |x|)``; ``c`` is the Gaussian rate of the far field
    and ``log_amplitudes`` the per-time intercepts.
    """

    exponent: float
    c: float
    log_amplitudes: np.ndarray
    r2: float
    span: tuple
    n_far: int
    n_near: int
    alpha_formula: float | None = None
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def to_dict(self) -> dict:
        return {
            "exponent": float(self.exponent),
            "c": float(self.c),
            "r2": float(self.r2),
            "span": [float(s) for s in self.span],
            "n_far": int(self.n_far),
            "n_near": int(self.n_near),
            "alpha_formula": None if self.alpha_formula is None else float(self.alpha_formula),
            "times": [float(t) for t in self.times],
        }


def fit_kernel_weight(kernel, alpha_formula: float | None = None, *, far: float = 3.0,
                      near: float = 0.5, floor: float = 1e-6,
                      shift_time: bool = True) -> KernelWeightFit:
    """Fit the spatial weight exponent of a kernel estimate.

    1. Far field ``|x| >= far * sqrt(t)``: least squares of
       ``log p = a_t - c |x - y|^2 / t`` with one intercept per time.
    2. Near field ``|x| |y| / (2 t) <= near``, where the kernel is dominated
       by its radial mode: regress ``log p - a_t + c |x - y|^2 / t`` on
       ``log(1 + sqrt(t) / |x|)``.

    Times are the kernel's ages, ``t + eps^2 / 2`` when ``shift_time``.
    Only values above ``floor`` times the slab maximum are used.

    Raises
    ------
    AnalysisError
        If either region is empty, the source is at the origin, or
        ``sqrt(t) / |x|`` spans less than one decade in the near field.
    """
    grid = kernel.grid
    r = grid.radius
    dy = kernel.distance()
    ynorm = float(np.linalg.norm(kernel.y))
    if ynorm == 0:
        raise AnalysisError("the source must sit away from the origin")
    ages = np.asarray(kernel.times, dtype=float) + (kernel.source_time if shift_time else 0.0)
    inner = ~grid.boundary & (r > 0)
    nt = len(ages)

    blocks, rhs, masks = [], [], []
    for i, (t, p) in enumerate(zip(ages, kernel.values)):
        ok = inner & (p > floor * float(np.max(p)))
        masks.append(ok)
        m = ok & (r >= far * np.sqrt(t))
        rows = np.zeros((int(np.count_nonzero(m)), nt + 1))
        rows[:, i] = 1.0
        rows[:, nt] = -dy[m] ** 2 / t
        blocks.append(rows)
        rhs.append(np.log(p[m]))
    design = np.vstack(blocks)
    if design.shape[0] < nt + 2 or np.any([b.shape[0] == 0 for b in blocks]):
        raise AnalysisError("far-field region is empty at some time")
    coef, *_ = np.linalg.lstsq(design, np.concatenate(rhs), rcond=None)
    amps, c = coef[:nt], float(coef[nt])

    xs, ys = [], []
    for i, (t, p) in enumerate(zip(ages, kernel.values)):
        m = masks[i] & (r * ynorm / (2.0 * t) <= near)
        xs.append(np.log1p(np.sqrt(t) / r[m]))
        ys.append(np.log(p[m]) - amps[i] + c * dy[m] ** 2 / t)
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    if x.size < 3:
        raise AnalysisError("near-field region is empty")
    ratio = np.expm1(x)
    span = (float(ratio.min()), float(ratio.max()))
    if span[1] < 10.0 * span[0]:
        raise AnalysisError("sqrt(t)/|x| spans less than one decade; fit is ill-conditioned")
    slope, _, r2, _ = linear_fit(x, y)
    return KernelWeightFit(-slope, c, amps, r2, span, design.shape[0], int(x.size),
                           alpha_formula, ages)
