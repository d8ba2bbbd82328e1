"""Closed-form radial quantities for the operator ``div(a grad u) - A |x|^-(2+beta) u``.

The decay exponent ``alpha(A)``, the modified Bessel function of the second
kind ``K_nu``, the explicit radial solutions ``J_beta`` and the constants of
the crude mean-value iteration all live here.  Everything is a pure function
of its arguments.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExponentParams",
    "TransformParams",
    "SolutionKind",
    "SpecialSolution",
    "alpha_of",
    "bessel_K",
    "log_bessel_K",
    "bessel_K_integral",
    "derive_transform_params",
    "eval_special_solution",
    "radial_ode_residual",
    "bessel_ode_residual",
    "crude_threshold_a0",
    "crude_mu",
]

# distance from an integer below which the reflection formula is not used
_REFLECTION_MIN_GAP = 0.05
# largest argument handled by the power series of I_{+-nu}
_SERIES_MAX_X = 1.0


@dataclass(frozen=True)
class ExponentParams:
    """Dimension ``d``, potential strength ``A`` and exponent ``beta``."""

    d: int
    A: float
    beta: float = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 3:
            raise ValueError(f"d must be an integer >= 3, got {self.d}")
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")


@dataclass(frozen=True)
class TransformParams:
    mu: float
    nu: float
    theta: float
    order: float


class SolutionKind(enum.Enum):
    POWER_LAW = "power_law"
    BESSEL_DECAY = "bessel_decay"


def alpha_of(params: ExponentParams | None = None, *, d: int | None = None,
             A: float | None = None) -> float:
    """Positive root of ``alpha**2 + (d - 2) alpha - A = 0``.

    Accepts either an :class:`ExponentParams` or the keywords ``d`` and ``A``.
    The root is evaluated as ``2A / ((d-2) + sqrt((d-2)^2 + 4A))`` which has
    no cancellation for small ``A``.
    """
    if params is not None:
        d, A = params.d, params.A
    if d is None or A is None:
        raise TypeError("alpha_of needs params or both d and A")
    if not A > 0:
        raise ValueError(f"A must be positive, got {A}")
    m = float(d) - 2.0
    return 2.0 * A / (m + math.sqrt(m * m + 4.0 * A))


# ---------------------------------------------------------------------------
# Modified Bessel function of the second kind
# ---------------------------------------------------------------------------

def _log_cosh(z):
    z = np.abs(z)
    return z + np.log1p(np.exp(-2.0 * z)) - math.log(2.0)


def _logsumexp(a, axis=-1):
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.log(np.sum(np.exp(a - m), axis=axis))
    return s + np.squeeze(m, axis=axis)


def _integral_log(order: float, x: np.ndarray, h0: float | None = None,
                  rtol: float = 1e-15, max_halvings: int = 12):
    """log K_order(x) from ``int_0^inf exp(-x cosh t) cosh(order t) dt``.

    Trapezoidal rule on the even, doubly-exponentially decaying integrand,
    with the step halved until two successive sums agree.  The factor
    ``exp(-x)`` is pulled out so that nothing under- or overflows.
    Returns ``(logK, h_final)``.
    """
    x = np.asarray(x, dtype=float)
    nu = abs(float(order))
    scale = max(float(np.max(x)), nu, 1.0)
    h = h0 if h0 is not None else min(0.5, 2.0 / math.sqrt(scale))
    # past t_max the log-integrand is at least 60 below its peak
    t_max = math.log(2.0 * (nu + 60.0) / float(np.min(x))) + 3.0
    t_max = max(t_max, 1.0)

    def log_sum(step):
        n = int(math.ceil(t_max / step)) + 1
        t = np.arange(n) * step
        # x (cosh t - 1) = 2 x sinh^2(t/2), exact for small t
        logf = -2.0 * x[:, None] * np.sinh(0.5 * t)[None, :] ** 2 + _log_cosh(nu * t)[None, :]
        w = np.full(n, math.log(step))
        w[0] = math.log(0.5 * step)
        return _logsumexp(logf + w[None, :], axis=1)

    prev = log_sum(h)
    for _ in range(max_halvings):
        h *= 0.5
        cur = log_sum(h)
        if np.max(np.abs(cur - prev)) <= rtol:
            return cur - x, h
        prev = cur
    return prev - x, h


def _series_log(order: float, x: float) -> float:
    """log K_order(x) from the reflection ``pi (I_-nu - I_nu) / (2 sin nu pi)``.

    Only valid for non-integer order and small ``x``; both ``I`` series are
    summed relative to ``(x/2)^-nu`` so large orders do not overflow.
    """
    nu = abs(float(order))
    q = 0.25 * x * x
    lhalf = math.log(0.5 * x)

    def inv_gamma(z):
        # 1 / Gamma(z) for z not a nonpositive integer
        lg = math.lgamma(z)
        if z > 0:
            return math.exp(-lg)
        sign = -1.0 if math.floor(-z) % 2 == 0 else 1.0
        return sign * math.exp(-lg)

    s_minus = 0.0
    s_plus = 0.0
    term_q = 1.0
    for k in range(200):
        tm = term_q * inv_gamma(k + 1 - nu)
        tp = term_q * inv_gamma(k + 1 + nu)
        s_minus += tm
        s_plus += tp
        if k > nu + 2 and abs(tm) <= 1e-18 * abs(s_minus) and abs(tp) <= 1e-18 * abs(s_plus):
            break
        term_q *= q / (k + 1)
    diff = s_minus - math.exp(2.0 * nu * lhalf) * s_plus
    pref = math.pi / (2.0 * math.sin(nu * math.pi))
    val = pref * diff
    if val <= 0:
        raise ArithmeticError("reflection series lost all significance")
    return math.log(val) - nu * lhalf


def _use_series(order: float, x: float) -> bool:
    nu = abs(order)
    gap = abs(nu - round(nu))
    return gap > _REFLECTION_MIN_GAP and x <= _SERIES_MAX_X


def log_bessel_K(order: float, x):
    """Natural log of ``K_order(x)`` (the function is positive, so sign is +1).

    Use this form wherever ``K`` would overflow (small ``x``, large order) or
    underflow (large ``x``).
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise ValueError("bessel_K requires x > 0")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    series_mask = np.array([_use_series(order, v) for v in flat], dtype=bool)
    for i in np.flatnonzero(series_mask):
        out[i] = _series_log(order, flat[i])
    rest = np.flatnonzero(~series_mask)
    if rest.size:
        # group arguments by magnitude so each group shares a step size
        order_idx = rest[np.argsort(flat[rest])]
        for chunk in np.array_split(order_idx, max(1, int(math.ceil(order_idx.size / 256)))):
            lo, hi = flat[chunk].min(), flat[chunk].max()
            if hi / lo > 4.0:
                for sub in _split_by_ratio(chunk, flat, 4.0):
                    out[sub] = _integral_log(order, flat[sub])[0]
            else:
                out[chunk] = _integral_log(order, flat[chunk])[0]
    if np.ndim(xa) == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def _split_by_ratio(idx, values, ratio):
    groups = []
    start = 0
    v = values[idx]
    for i in range(1, len(idx) + 1):
        if i == len(idx) or v[i] > ratio * v[start]:
            groups.append(idx[start:i])
            start = i
    return groups


def bessel_K(order: float, x):
    """Modified Bessel function of the second kind ``K_order(x)``, ``x > 0``.

    Non-integer orders at ``x <= 1`` go through the power series of
    ``I_{+-order}`` and the reflection formula; everything else through the
    integral ``int_0^inf exp(-x cosh t) cosh(order t) dt``.  Values beyond the
    double range come back as ``inf`` or ``0``; call :func:`log_bessel_K` for
    those.

    Examples
    --------
    >>> round(bessel_K(0.5, 1.0), 9)
    0.461068504
    """
    return np.exp(log_bessel_K(order, x))


def bessel_K_integral(order: float, x: float, rtol: float = 1e-15) -> float:
    """``K_order(x)`` by the integral representation alone (no series branch)."""
    return float(np.exp(_integral_log(order, np.array([float(x)]), rtol=rtol)[0][0]))


def bessel_ode_residual(order: float, t: float, h: float) -> float:
    """Centered-difference residual of ``t^2 K'' + t K' - (t^2 + order^2) K``.

    Scaled by ``1 / K(t)`` so the result is a relative defect.
    """
    km, k0, kp = (bessel_K(order, v) for v in (t - h, t, t + h))
    d2 = (kp - 2.0 * k0 + km) / (h * h)
    d1 = (kp - km) / (2.0 * h)
    return (t * t * d2 + t * d1 - (t * t + order * order) * k0) / k0


# ---------------------------------------------------------------------------
# Explicit radial solutions
# ---------------------------------------------------------------------------

def derive_transform_params(params: ExponentParams) -> TransformParams:
    """Substitution constants turning the radial equation into Bessel's equation.

    ``g(r) = B(nu r^mu)`` with ``mu = -beta/2`` and ``nu = 2 sqrt(A)/beta``
    absorbs the potential; ``h = r^theta g`` with ``theta = 1 - d/2`` fixes
    the first-order coefficient, which forces the Bessel order
    ``(d - 2)/beta``.
    """
    if params.beta == 0:
        raise ValueError("the Bessel substitution needs beta > 0")
    b = params.beta
    return TransformParams(
        mu=-b / 2.0,
        nu=2.0 * math.sqrt(params.A) / b,
        theta=1.0 - params.d / 2.0,
        order=(params.d - 2.0) / b,
    )


@dataclass(frozen=True)
class SpecialSolution:
    """Radial solution ``J_beta`` of ``Laplace(u) = A |x|^-(2+beta) u``.

    ``kind`` follows ``params.beta``: a power law ``r^alpha`` for ``beta == 0``
    and ``r^(1-d/2) K_{(d-2)/beta}(2 sqrt(A) r^(-beta/2) / beta)`` otherwise.
    """

    params: ExponentParams

    @property
    def kind(self) -> SolutionKind:
        return SolutionKind.POWER_LAW if self.params.beta == 0 else SolutionKind.BESSEL_DECAY

    @property
    def alpha(self) -> float:
        return alpha_of(self.params)

    def log_value(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~(r > 0)):
            raise ValueError("J_beta is evaluated at r > 0 only")
        if self.kind is SolutionKind.POWER_LAW:
            return self.alpha * np.log(r)
        tp = derive_transform_params(self.params)
        z = tp.nu * r ** tp.mu
        return tp.theta * np.log(r) + log_bessel_K(tp.order, z)

    def __call__(self, r):
        return np.exp(self.log_value(r))


def eval_special_solution(sol: SpecialSolution, r):
    """Value of ``J_beta`` at radius ``r`` (scalar or array, ``r > 0``)."""
    out = sol(r)
    return float(out) if np.ndim(out) == 0 else out


def radial_ode_residual(sol, r: float, h: float, *, d: int | None = None,
                        A: float | None = None, beta: float | None = None) -> float:
    """Centered-difference residual of ``u'' + (d-1)/r u' - A r^-(2+beta) u``.

    ``sol`` is a :class:`SpecialSolution` or any callable of ``r``; for a bare
    callable the equation parameters must be passed as keywords.
    """
    if not (h > 0 and r - h > 0):
        raise ValueError("need h > 0 and r - h > 0")
    if isinstance(sol, SpecialSolution):
        d, A, beta = sol.params.d, sol.params.A, sol.params.beta
    if d is None or A is None or beta is None:
        raise TypeError("d, A and beta are required for a bare callable")
    um, u0, up = (float(sol(v)) for v in (r - h, r, r + h))
    d2 = (up - 2.0 * u0 + um) / (h * h)
    d1 = (up - um) / (2.0 * h)
    return d2 + (d - 1.0) / r * d1 - A / r ** (2.0 + beta) * u0


# ---------------------------------------------------------------------------
# Crude mean-value iteration constants
# ---------------------------------------------------------------------------

def crude_threshold_a0(lam: float, Lam: float, d: int) -> float:
    """Smallest potential strength ``a`` for which the crude iteration closes.

    ``192 (d + 4)^2 (1 + Lam) / lam``.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if Lam < lam:
        raise ValueError("need lambda <= Lambda")
    return 192.0 * (d + 4) ** 2 * (1.0 + Lam) / lam


def crude_mu(a: float, lam: float, Lam: float) -> float:
    """Growth factor ``(12 (1 + Lam) / (a lam))^(1/2)`` of the radius iteration."""
    if not (a > 0 and lam > 0):
        raise ValueError("a and lambda must be positive")
    return math.sqrt(12.0 * (1.0 + Lam) / (a * lam))
