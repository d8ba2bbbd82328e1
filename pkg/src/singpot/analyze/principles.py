"""Maximum-principle and comparison checks on a sub-ball."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._fields import unpack


@dataclass
class PrincipleReport:
    """Outcome of a pointwise check; violations are reported, never raised."""

    name: str
    passed: bool
    measured: float
    tolerance: float
    violations: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def n_violations(self) -> int:
        return len(self.violations)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "measured": float(self.measured),
            "tolerance": float(self.tolerance),
            "violations": self.violations[:20],
            "n_violations": self.n_violations,
            **self.extra,
        }


def sub_ball(grid, radius: float):
    """``(S, dS)``: interior nodes with ``|x| < radius`` and their outer neighbours."""
    s = (grid.radius < radius) & ~grid.boundary
    return s, grid.outer_neighbors(s)


def check_max_principle(field, radius: float = 0.5, *, values=None, subdomain=None,
                        tol: float = 1e-10) -> PrincipleReport:
    """Check ``sup_S u <= max(0, sup_dS u)`` and ``inf_S u >= min(0, inf_dS u)``.

    ``S`` is the node set ``|x| < radius`` (or ``subdomain`` when given) and
    ``dS`` the nodes outside ``S`` adjacent to it.  The tolerance is
    relative to ``max(1, max |u|)``.
    """
    grid, u = unpack(field, values)
    if subdomain is None:
        s, ds = sub_ball(grid, radius)
    else:
        s = np.asarray(subdomain, dtype=bool)
        ds = grid.outer_neighbors(s)
    scale = max(1.0, float(np.max(np.abs(u))))
    atol = tol * scale
    upper = max(0.0, float(np.max(u[ds])))
    lower = min(0.0, float(np.min(u[ds])))
    idx = np.flatnonzero(s)
    over = idx[u[idx] > upper + atol]
    under = idx[u[idx] < lower - atol]
    viol = [{"node": int(i), "x": [float(c) for c in grid.coords[i]], "value": float(u[i]),
             "bound": upper, "kind": "max"} for i in over]
    viol += [{"node": int(i), "x": [float(c) for c in grid.coords[i]], "value": float(u[i]),
              "bound": lower, "kind": "min"} for i in under]
    excess = max(float(np.max(u[idx])) - upper, lower - float(np.min(u[idx])))
    return PrincipleReport("max_principle", not viol, excess / scale, tol, viol,
                           {"sup_boundary": upper, "inf_boundary": lower})


def check_comparison(field, special, radius: float = 0.5, *, values=None,
                     base_tol: float = 1e-6) -> PrincipleReport:
    """Check ``|u| <= C J + tol`` on ``|x| < radius``.

    ``C`` is the largest ``|u| / J`` over the discrete boundary layer ``dS``
    and ``tol = base_tol + 2 max|u| h^2`` with ``h`` the largest grid
    spacing inside the sub-ball.  The tolerance is absolute because ``J``
    underflows near the origin when ``beta > 0``.
    """
    grid, u = unpack(field, values)
    s, ds = sub_ball(grid, radius)
    r = grid.radius
    j_ds = special(r[ds])
    c = float(np.max(np.abs(u[ds]) / j_ds))
    h = float(np.max(grid.local_spacing[s]))
    umax = float(np.max(np.abs(u[s | ds])))
    atol = base_tol + 2.0 * umax * h * h
    idx = np.flatnonzero(s)
    j_s = special(r[idx])
    excess = np.abs(u[idx]) - c * j_s
    bad = idx[excess > atol]
    viol = [{"node": int(i), "x": [float(q) for q in grid.coords[i]], "value": float(u[i]),
             "bound": float(c * special(r[i]))} for i in bad]
    return PrincipleReport("comparison", not viol, float(np.max(excess)), atol, viol,
                           {"C": c, "h": h})
