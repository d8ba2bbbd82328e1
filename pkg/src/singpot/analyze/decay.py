"""Power-law decay fits near the origin."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._fields import AnalysisError, nodes_between, unpack


@dataclass
class ExponentFit:
    """Least-squares fit of ``log value = intercept + exponent * log r``.

    ``radii`` are the radii actually sampled (strictly decreasing) and
    ``values`` the matching magnitudes.  ``alternative`` holds extra fits,
    e.g. ``log|u|`` against ``r^(-beta/2)`` for supercritical potentials.
    """

    exponent: float
    intercept: float
    r2: float
    radii: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    alternative: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "exponent": float(self.exponent),
            "intercept": float(self.intercept),
            "r2": float(self.r2),
            "radii": [float(r) for r in self.radii],
            "values": [float(v) for v in self.values],
            "alternative": {k: float(v) for k, v in self.alternative.items()},
        }


def linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, np.ndarray]:
    """Slope, intercept, R^2 and residuals of the least-squares line through ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    design = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(design, y, rcond=None)
    res = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(res * res)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(icpt), min(max(r2, 0.0), 1.0), res


def cells_within(grid, r: float) -> int:
    """Nodes of the first axis in ``(0, r]``: the radial resolution at ``r``."""
    ax = grid.axes[0]
    return int(np.count_nonzero((ax > 0) & (ax <= r)))


def fit_decay_exponent(field, radii, center=None, *, values=None, beta: float = 0.0,
                       shell: float = 1.15, min_cells: int = 4,
                       floor: float = 1e-14) -> ExponentFit:
    """Fit the decay exponent of ``|u|`` toward ``center`` (default: origin).

    For every requested radius ``r`` the node of largest ``|u|`` inside the
    shell ``r / shell <= |x - center| <= r * shell`` is taken, and its exact
    distance enters the regression, so pure power laws are fitted exactly.

    Raises
    ------
    AnalysisError
        With fewer than 4 radii, a radius resolved by fewer than
        ``min_cells`` nodes, an empty shell, or all shell maxima below
        ``floor``.
    """
    grid, u = unpack(field, values)
    radii = np.sort(np.asarray(radii, dtype=float))[::-1]
    if len(radii) < 4:
        raise AnalysisError("need at least 4 radii")
    if np.any(radii <= 0):
        raise AnalysisError("radii must be positive")
    rs, vs = [], []
    for r in radii:
        if cells_within(grid, r) < min_cells:
            raise AnalysisError(f"radius {r:g} is resolved by fewer than {min_cells} cells")
        idx, dist = nodes_between(grid, center, r / shell, r * shell)
        if idx.size == 0:
            raise AnalysisError(f"no nodes in the shell around radius {r:g}")
        best = idx[int(np.argmax(np.abs(u[idx])))]
        rs.append(float(dist[best]))
        vs.append(float(abs(u[best])))
    rs = np.array(rs)
    vs = np.array(vs)
    if np.all(vs < floor):
        raise AnalysisError("field vanishes on every shell; decay fit is degenerate")
    ok = vs > 0
    if np.count_nonzero(ok) < 2:
        raise AnalysisError("fewer than two shells with nonzero values")
    # overlapping shells may pick the same node twice
    rs, first = np.unique(rs[ok], return_index=True)
    rs, vs = rs[::-1], vs[ok][first][::-1]
    if len(rs) < 2:
        raise AnalysisError("fewer than two distinct sample radii")
    slope, icpt, r2, res = linear_fit(np.log(rs), np.log(vs))
    alt = {}
    if beta > 0:
        s2, i2, r2b, _ = linear_fit(rs ** (-beta / 2.0), np.log(vs))
        alt = {"exp_rate": s2, "exp_intercept": i2, "exp_r2": r2b}
    return ExponentFit(slope, icpt, r2, rs, vs, res, alt)


def windowed_slopes(field, windows, *, values=None, per_window: int = 6,
                    center=None, beta: float = 0.0) -> list[ExponentFit]:
    """Decay fits over a list of ``(r_lo, r_hi)`` windows."""
    fits = []
    for lo, hi in windows:
        radii = np.geomspace(hi, lo, per_window)
        fits.append(fit_decay_exponent(field, radii, center, values=values, beta=beta))
    return fits
