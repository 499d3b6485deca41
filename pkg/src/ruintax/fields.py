"""Deterministic surfaces behind the ruin asymptotics, as computable functions.

The ruin event rewrites as a two-parameter Gaussian field crossing a level;
the approximation quality rests on where that field's standard deviation
(finite horizon) or standard-deviation-to-boundary ratio (infinite horizon)
peaks.  This module evaluates those surfaces, locates their grid argmaxes,
 and verifies the first-order expansion of the standard deviation at the
finite-horizon peak by finite differences.

Finite-horizon surfaces live on ``{0 <= s <= t <= T}``; infinite-horizon
surfaces use the rescaled coordinate ``e^{-2 delta . time}`` and live on
``{0 < t <= s <= 1}`` (the point ``t = 0`` is the coordinate singularity of
the time change, so grids start at ``t = T_MIN``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DELTA_ZERO_TOL, ModelParams, expm1_ratio

#: Lower end of infinite-horizon grids in the rescaled coordinate.
T_MIN = 1e-8


@dataclass(frozen=True)
class FieldPoint:
    """A point of one of the two field domains."""

    s: float
    t: float
    domain: str  # "finite" (0 <= s <= t <= T) or "infinite" (0 < t <= s <= 1)


class DegenerateArgmaxError(RuntimeError):
    """Grid maximum tied across non-adjacent cells."""


def _check_finite_domain(s, t, p: ModelParams) -> None:
    T = p.horizon
    if p.is_infinite_horizon:
        raise ValueError("finite-horizon field needs a finite horizon")
    if np.any(np.asarray(s) < 0) or np.any(np.asarray(t) < np.asarray(s)) \
            or np.any(np.asarray(t) > T * (1 + 1e-12)):
        raise ValueError(f"need 0 <= s <= t <= T = {T}")


def _check_infinite_domain(s, t, p: ModelParams) -> None:
    if p.delta <= DELTA_ZERO_TOL:
        raise ValueError("infinite-horizon field needs delta > 0")
    s = np.asarray(s)
    t = np.asarray(t)
    if np.any(t <= 0) or np.any(s < t) or np.any(s > 1 + 1e-12):
        raise ValueError("need 0 < t <= s <= 1")


def _int_exp(x, delta: float):
    """``int_0^x e^{-delta v} dv``, increasing in x for either sign of delta."""
    x = np.asarray(x, dtype=float)
    if abs(delta) < DELTA_ZERO_TOL:
        out = x
    else:
        out = x * expm1_ratio(delta * x)
    return float(out) if np.ndim(out) == 0 else out


def variance_finite(s, t, p: ModelParams):
    """Variance surface of the finite-horizon crossing field,

        sigma^2 [(1-e^{-2 delta t}) - gamma(2-gamma)(1-e^{-2 delta s})]
        / (2 delta (1-gamma+gamma e^{-delta s})^2),

    nonnegative on ``0 <= s <= t <= T`` and continuous through delta = 0.
    """
    _check_finite_domain(s, t, p)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    g = p.gamma
    it = _int_exp(t, 2.0 * p.delta)
    is_ = _int_exp(s, 2.0 * p.delta)
    denom = 1.0 - g + g * np.exp(-p.delta * s)
    out = p.sigma**2 * (it - g * (2.0 - g) * is_) / denom**2
    return float(out) if np.ndim(out) == 0 else out


def mean_finite(s, t, p: ModelParams):
    """Mean surface ``c (gamma J(s) - J(t)) / (1-gamma+gamma e^{-delta s})``
    with ``J(x) = int_0^x e^{-delta v} dv``; nonpositive for ``t >= s``."""
    _check_finite_domain(s, t, p)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    g = p.gamma
    js = _int_exp(s, p.delta)
    jt = _int_exp(t, p.delta)
    denom = 1.0 - g + g * np.exp(-p.delta * s)
    out = p.c * (g * js - jt) / denom
    return float(out) if np.ndim(out) == 0 else out


def variance_infinite(s, t, p: ModelParams):
    """Variance in the rescaled coordinate:
    ``sigma^2 ((1-t) - gamma(2-gamma)(1-s)) / (2 delta)`` on ``0 < t <= s <= 1``."""
    _check_infinite_domain(s, t, p)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    g = p.gamma
    out = p.sigma**2 / (2.0 * p.delta) * ((1.0 - t) - g * (2.0 - g) * (1.0 - s))
    return float(out) if np.ndim(out) == 0 else out


def g_u(s, t, p: ModelParams):
    """Boundary surface ``u - gamma (u + c/delta)(1 - sqrt(s)) +
    (c/delta)(1 - sqrt(t))``; positive on the whole domain for gamma < 1."""
    _check_infinite_domain(s, t, p)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    cd = p.c / p.delta
    out = p.u - p.gamma * (p.u + cd) * (1.0 - np.sqrt(s)) + cd * (1.0 - np.sqrt(t))
    return float(out) if np.ndim(out) == 0 else out


def m_u_ratio(s, t, p: ModelParams):
    """Boundary-to-spread ratio ``G/V``; at ``(1, t_u)`` it equals
    ``sqrt(2 (delta u^2 + 2 c u)) / sigma``."""
    g = g_u(s, t, p)
    v = np.sqrt(variance_infinite(s, t, p))
    if np.any(np.asarray(g) <= 0):
        raise ValueError("boundary surface is nonpositive at the requested point")
    out = g / v
    return float(out) if np.ndim(out) == 0 else out


def f_u(s, t, p: ModelParams):
    """Spread-to-boundary ratio ``V/G``, the reciprocal of :func:`m_u_ratio`."""
    g = g_u(s, t, p)
    v = np.sqrt(variance_infinite(s, t, p))
    if np.any(np.asarray(g) <= 0):
        raise ValueError("boundary surface is nonpositive at the requested point")
    out = v / g
    return float(out) if np.ndim(out) == 0 else out


def _grid_argmax(values: np.ndarray, tie_rel_tol: float = 1e-12):
    """Index of the max; raises when ties span non-adjacent cells."""
    flat = np.argmax(values)
    idx = np.unravel_index(flat, values.shape)
    vmax = values[idx]
    tol = tie_rel_tol * max(abs(vmax), 1e-300)
    tied = np.argwhere(values >= vmax - tol)
    for other in tied:
        if np.any(np.abs(other - np.asarray(idx)) > 1):
            raise DegenerateArgmaxError(
                f"maximum tied between grid cells {tuple(idx)} and {tuple(other)}"
            )
    return idx


def argmax_variance_grid(p: ModelParams, resolution: int = 200) -> FieldPoint:
    """Grid argmax of :func:`variance_finite` over ``0 <= s <= t <= T``.

    The peak sits at ``(0, T)``; this evaluates the claim numerically.  For
    ``gamma = 0`` the surface does not depend on ``s`` and the argmax is
    reported at ``s = 0`` by convention.
    """
    if resolution < 50:
        raise ValueError(f"resolution must be >= 50, got {resolution}")
    T = p.horizon
    ts = np.linspace(0.0, T, resolution + 1)
    if p.gamma == 0.0:
        var = variance_finite(np.zeros_like(ts), ts, p)
        i = int(np.argmax(var))
        return FieldPoint(s=0.0, t=float(ts[i]), domain="finite")
    ss = ts[:, None]
    tt = ts[None, :]
    mask = ss <= tt
    g = p.gamma
    it = _int_exp(tt, 2.0 * p.delta)
    is_ = _int_exp(ss, 2.0 * p.delta)
    denom = 1.0 - g + g * np.exp(-p.delta * ss)
    var = p.sigma**2 * (it - g * (2.0 - g) * is_) / denom**2
    var = np.where(mask, var, -np.inf)
    i, j = _grid_argmax(var)
    return FieldPoint(s=float(ts[i]), t=float(ts[j]), domain="finite")


def argmax_f_grid(p: ModelParams, resolution: int = 200) -> FieldPoint:
    """Grid argmax of :func:`f_u` over ``T_MIN <= t <= s <= 1``.

    The peak sits at ``(1, (c/(delta u + c))^2)``; this evaluates the claim
    numerically on a uniform grid (for gamma = 0 the surface does not
    depend on ``s`` and the argmax is reported at ``s = 1``).
    """
    if resolution < 50:
        raise ValueError(f"resolution must be >= 50, got {resolution}")
    xs = np.linspace(T_MIN, 1.0, resolution + 1)
    if p.gamma == 0.0:
        vals = f_u(np.ones_like(xs), xs, p)
        j = int(np.argmax(vals))
        return FieldPoint(s=1.0, t=float(xs[j]), domain="infinite")
    ss = xs[:, None]
    tt = xs[None, :]
    mask = tt <= ss
    cd = p.c / p.delta
    g = p.u - p.gamma * (p.u + cd) * (1.0 - np.sqrt(ss)) + cd * (1.0 - np.sqrt(tt))
    v2 = p.sigma**2 / (2.0 * p.delta) * ((1.0 - tt) - p.gamma * (2.0 - p.gamma) * (1.0 - ss))
    if np.any((g <= 0) & mask):
        raise ValueError("boundary surface nonpositive inside the domain")
    vals = np.where(mask, np.sqrt(np.maximum(v2, 0.0)) / g, -np.inf)
    i, j = _grid_argmax(vals)
    return FieldPoint(s=float(xs[i]), t=float(xs[j]), domain="infinite")


@dataclass(frozen=True)
class ExpansionCheck:
    """Analytic vs finite-difference slopes of the standard deviation at (0, T)."""

    coeff_s_analytic: float
    coeff_s_fd: float
    coeff_t_analytic: float   # slope in (T - t)
    coeff_t_fd: float
    rel_err_s: float
    rel_err_t: float
    h: float

    def within(self, rel_tol: float = 1e-3) -> bool:
        return self.rel_err_s < rel_tol and self.rel_err_t < rel_tol


def expansion_check_vz(p: ModelParams, h: float | None = None) -> ExpansionCheck:
    """Check the first-order expansion of ``sqrt(variance_finite)`` at ``(0, T)``.

    The expansion has slope ``-gamma sigma^2 (1 - gamma + e^{-2 delta T}) /
    (2a)`` in ``s`` and ``-sigma^2 e^{-2 delta T} / (2a)`` in ``(T - t)``
    with ``a^2`` the peak variance; both are compared against one-sided
    finite differences with step ``h`` (default ``1e-5 T``).
    """
    if p.is_infinite_horizon:
        raise ValueError("needs a finite horizon")
    T = p.horizon
    if h is None:
        h = 1e-5 * T
    if not 0 < h < T / 4:
        raise ValueError(f"step h = {h!r} out of range for T = {T}")
    a = math.sqrt(variance_finite(0.0, T, p))
    e2 = math.exp(-2.0 * p.delta * T)
    coeff_s = -p.gamma * p.sigma**2 * (1.0 - p.gamma + e2) / (2.0 * a)
    coeff_t = -p.sigma**2 * e2 / (2.0 * a)

    sd = lambda s, t: math.sqrt(variance_finite(s, t, p))
    fd_s = (sd(h, T) - a) / h
    fd_t = (sd(0.0, T - h) - a) / h  # slope in (T - t)

    def rel(analytic, fd):
        if analytic == 0.0:
            return abs(fd)
        return abs(fd - analytic) / abs(analytic)

    return ExpansionCheck(
        coeff_s_analytic=coeff_s, coeff_s_fd=fd_s,
        coeff_t_analytic=coeff_t, coeff_t_fd=fd_t,
        rel_err_s=rel(coeff_s, fd_s), rel_err_t=rel(coeff_t, fd_t), h=h,
    )
