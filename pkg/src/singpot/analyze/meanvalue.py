"""Weighted mean-value ratios over parabolic cylinders."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._fields import AnalysisError


@dataclass
class MeanValueReport:
    """Ratios ``u^2(x, t) / (w * avg_{Q_r(x, t)} u^2)``.

    The weight is ``w = max{r / (ell + |x|), 1}^(-2 alpha)``; ``ell = 1`` is
    the unit-scale form and ``ell = 1/k`` the form for a field mollified at
    level ``k``.  ``per_radius`` maps each radius to the largest ratio over
    the sampled points, and ``spread`` is max over min of those values.
    """

    samples: list
    ratios: np.ndarray
    weights: np.ndarray
    alpha: float
    alpha_provenance: str
    ell: float
    per_radius: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def spread(self) -> float:
        vals = np.array(list(self.per_radius.values()))
        return float(vals.max() / vals.min())

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "spread": self.spread,
            "alpha": float(self.alpha),
            "alpha_provenance": self.alpha_provenance,
            "ell": float(self.ell),
            "per_radius": {f"{r:.6g}": float(v) for r, v in self.per_radius.items()},
        }


def mean_value_weight(r, x_norm, alpha: float, ell: float = 1.0):
    """``max{r / (ell + |x|), 1}^(-2 alpha)``."""
    with np.errstate(divide="ignore"):
        q = np.asarray(r, dtype=float) / (ell + np.asarray(x_norm, dtype=float))
    return np.maximum(q, 1.0) ** (-2.0 * alpha)


def _time_weights(times: np.ndarray, t0: float, t1: float) -> np.ndarray:
    """Trapezoidal weights on ``times`` for the integral over ``[t0, t1]``.

    Values at ``t0`` and ``t1`` are linear interpolants of neighbouring slabs.
    """
    w = np.zeros(len(times))
    if t1 <= t0:
        i = int(np.argmin(np.abs(times - t1)))
        w[i] = 1.0
        return w
    knots = np.unique(np.concatenate([[t0, t1], times[(times > t0) & (times < t1)]]))
    for a, b in zip(knots[:-1], knots[1:]):
        for tt, half in ((a, 0.5 * (b - a)), (b, 0.5 * (b - a))):
            j = int(np.searchsorted(times, tt, side="right")) - 1
            j = min(max(j, 0), len(times) - 1)
            if j == len(times) - 1 or times[j] == tt:
                w[j] += half
            else:
                s = (tt - times[j]) / (times[j + 1] - times[j])
                w[j] += half * (1.0 - s)
                w[j + 1] += half * s
    return w / (t1 - t0)


def check_mean_value(spacetime, points, radii, alpha: float, *, t: float | None = None,
                     ell: float = 1.0, alpha_provenance: str = "formula") -> MeanValueReport:
    """Mean-value ratios for every sampled point and radius.

    ``points`` are coordinates, snapped to the nearest grid node; ``t``
    defaults to the last slab.  The cylinder is ``B(x, r) x [t - r^2, t]``;
    spatial averages are volume-weighted nodal sums normalised by the
    discrete ball volume, and the time average is trapezoidal.

    Raises
    ------
    AnalysisError
        If some ``Q_2r(x, t)`` leaves the computed domain in space or time.
    """
    grid = spacetime.grid
    times = np.asarray(spacetime.times, dtype=float)
    t = float(times[-1]) if t is None else float(t)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vol = grid.volumes
    slabs = np.asarray(spacetime.slabs)
    outer = grid.ball_radius if grid.ball_radius is not None else np.inf
    samples, ratios, weights = [], [], []
    per_radius: dict = {}
    u_now = spacetime.at(t)
    for p in pts:
        node = int(np.argmin(np.sum((grid.coords - p) ** 2, axis=1)))
        x = grid.coords[node]
        if grid.geometry == "axisymmetric":
            # balls are centred on the axis point level with the node
            x = np.array([0.0, x[1]])
        xn = float(np.linalg.norm(x))
        dist = grid.distance_to(x)
        for r in radii:
            r = float(r)
            if xn + 2 * r >= outer or t - 4 * r * r < times[0] - 1e-12:
                raise AnalysisError(f"cylinder of radius {2 * r:g} at |x|={xn:g}, t={t:g} "
                                    "leaves the computed domain")
            ball = (dist < r) & ~grid.boundary
            bvol = float(np.sum(vol[ball]))
            if bvol <= 0:
                raise AnalysisError(f"no nodes within radius {r:g} of the sample point")
            space_avg = (slabs[:, ball] ** 2) @ vol[ball] / bvol
            avg = float(_time_weights(times, t - r * r, t) @ space_avg)
            w = float(mean_value_weight(r, xn, alpha, ell))
            ratio = float(u_now[node] ** 2 / (w * avg)) if avg > 0 else np.inf
            samples.append((tuple(float(c) for c in x), t, r))
            ratios.append(ratio)
            weights.append(w)
            per_radius[r] = max(per_radius.get(r, 0.0), ratio)
    ratios = np.array(ratios)
    if not np.all(np.isfinite(ratios)):
        raise AnalysisError("non-finite mean-value ratio")
    return MeanValueReport(samples, ratios, np.array(weights), float(alpha), alpha_provenance,
                           float(ell), per_radius)
