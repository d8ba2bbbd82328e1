"""Small helpers shared by the analyzers."""
from __future__ import annotations

import numpy as np


class AnalysisError(ValueError):
    """Raised when an analysis precondition (resolution, geometry, data) fails."""


def unpack(field, values=None):
    """Return ``(grid, values)`` from a solution field or an explicit pair."""
    if values is not None:
        return field, np.asarray(values, dtype=float)
    return field.grid, np.asarray(field.values, dtype=float)


def nodes_between(grid, center, r_lo, r_hi):
    """Non-Dirichlet nodes whose distance from ``center`` lies in ``[r_lo, r_hi]``."""
    dist = grid.radius if center is None else grid.distance_to(center)
    return np.flatnonzero((dist >= r_lo) & (dist <= r_hi) & ~grid.boundary), dist
