"""Empirical Hölder exponents from dyadic oscillation decay."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ._fields import AnalysisError, unpack
from .decay import linear_fit


@dataclass
class HolderEstimate:
    """Dyadic-oscillation Hölder exponent with a pair-quotient cross-check.

    ``levels`` rows are ``(rho, oscillation, resolved centers)`` for the
    admitted levels.  ``seminorm`` is the largest sampled quotient
    ``|u(x1) - u(x2)| / |x1 - x2|^exponent``.
    """

    exponent: float
    slope: float
    seminorm: float
    region: dict
    levels: np.ndarray
    pair_exponent: float
    pair_budget: int
    seed: int
    r2: float = 1.0
    scan: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "exponent": float(self.exponent),
            "slope": float(self.slope),
            "seminorm": float(self.seminorm),
            "region": self.region,
            "levels": [[float(v) for v in row] for row in self.levels],
            "pair_exponent": float(self.pair_exponent),
            "pair_budget": int(self.pair_budget),
            "seed": int(self.seed),
            "r2": float(self.r2),
        }


def _unit_ball_samples(rng, n, dim):
    v = rng.normal(size=(n, dim))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.uniform(size=n)[:, None] ** (1.0 / dim)


def _physical(grid, pts):
    """Map sample points into grid coordinates (meridian plane for axisymmetric grids)."""
    if grid.geometry == "axisymmetric":
        return np.column_stack([np.hypot(pts[:, 0], pts[:, 1]), pts[:, 2]])
    return pts


def estimate_holder(field, radius: float = 0.25, *, values=None, centers: int = 64,
                    levels: int = 6, pairs: int = 20000, seed: int = 0,
                    min_levels: int = 4, admit_fraction: float = 0.5) -> HolderEstimate:
    """Estimate the Hölder exponent of a field on ``B(0, radius)``.

    Level ``j`` uses balls of radius ``rho_j = (2 radius / 3) 2^-j`` around
    the centers ``rho_j xi_i / 2``, with ``xi_i`` fixed seeded points of the
    unit ball plus the origin.  The sets are scale-similar, so every level
    probes the same geometry around the origin, and all balls stay inside
    ``B(0, radius)``.  A center counts at a level when the grid spacing at
    it is at most ``rho_j / 2``; a level is admitted when at least
    ``admit_fraction`` of the centers count.  The exponent is the slope of
    ``log osc`` against ``log rho``, capped at 1.

    Raises
    ------
    AnalysisError
        If fewer than ``min_levels`` levels are admitted.
    """
    grid, u = unpack(field, values)
    dim = grid.d if grid.geometry != "cartesian" else grid.dim
    if grid.geometry == "radial":
        raise AnalysisError("Hölder estimates need a cartesian or axisymmetric grid")
    rng = np.random.default_rng(seed)
    xi = np.vstack([np.zeros((1, dim)), _unit_ball_samples(rng, centers, dim)])
    coords = grid.coords
    tree = cKDTree(coords)
    spacing = grid.local_spacing
    rows = []
    for j in range(levels):
        rho = (2.0 * radius / 3.0) * 2.0 ** -j
        cent = _physical(grid, 0.5 * rho * xi)
        _, near = tree.query(cent)
        ok = spacing[near] <= rho / 2.0
        if np.count_nonzero(ok) < admit_fraction * len(cent):
            continue
        osc = 0.0
        for c in cent[ok]:
            nb = tree.query_ball_point(c, rho)
            if len(nb) > 1:
                v = u[nb]
                osc = max(osc, float(v.max() - v.min()))
        rows.append((rho, osc, int(np.count_nonzero(ok))))
    table = np.array(rows, dtype=float).reshape(-1, 3)
    good = table[:, 1] > 0
    if np.count_nonzero(good) < min_levels:
        raise AnalysisError(f"only {int(np.count_nonzero(good))} dyadic levels resolved; "
                            f"need {min_levels}")
    table = table[good]
    slope, _, r2, _ = linear_fit(np.log(table[:, 0]), np.log(table[:, 1]))
    exponent = min(slope, 1.0)

    pair_exp, seminorm, scan = _pair_scan(grid, u, radius, exponent, pairs, rng)
    region = {"center": [0.0] * dim, "radius": float(radius)}
    return HolderEstimate(exponent, slope, seminorm, region, table, pair_exp, pairs, seed,
                          r2, scan)


def _pair_scan(grid, u, radius, exponent, budget, rng):
    """Sampled pair quotients on ``B(0, radius)``.

    Pairs join every sampled node to its nearest neighbours and to random
    partners.  For each ``gamma`` in a scan the supremum of the quotient is
    compared between the shortest and the longest pair-distance bands; the
    largest ``gamma`` whose short-range supremum stays within twice the
    long-range one is reported.
    """
    dist0 = grid.radius
    inside = np.flatnonzero((dist0 < radius) & ~grid.boundary)
    if inside.size < 2:
        return float("nan"), float("nan"), {}
    coords = grid.coords[inside]
    vals = u[inside]
    n_near = max(budget // 2, 1)
    a = rng.integers(0, inside.size, size=n_near)
    tree = cKDTree(coords)
    kq = min(5, inside.size)
    _, nb = tree.query(coords[a], k=kq)
    b_near = nb[np.arange(n_near), rng.integers(1, kq, size=n_near)] if kq > 1 else a
    c = rng.integers(0, inside.size, size=budget - n_near)
    d = rng.integers(0, inside.size, size=budget - n_near)
    i1 = np.concatenate([a, c])
    i2 = np.concatenate([b_near, d])
    sep = np.linalg.norm(coords[i1] - coords[i2], axis=1)
    keep = sep > 0
    sep, du = sep[keep], np.abs(vals[i1[keep]] - vals[i2[keep]])
    seminorm = float(np.max(du / sep ** exponent)) if sep.size else float("nan")
    edges = np.quantile(sep, [0.0, 0.25, 0.75, 1.0])
    short = sep <= edges[1]
    long_ = sep >= edges[2]
    gammas = np.round(np.arange(0.05, 1.0001, 0.05), 2)
    sup_short = np.array([np.max(du[short] / sep[short] ** g) for g in gammas])
    sup_long = np.array([np.max(du[long_] / sep[long_] ** g) for g in gammas])
    stable = sup_short <= 2.0 * sup_long
    pair_exp = float(gammas[stable].max()) if np.any(stable) else 0.0
    scan = {"gammas": gammas.tolist(), "short": sup_short.tolist(), "long": sup_long.tolist()}
    return pair_exp, seminorm, scan
