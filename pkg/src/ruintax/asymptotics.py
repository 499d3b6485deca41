"""Closed-form ruin approximations for the taxed surplus with interest.

Large-capital approximations for the ruin probability on a finite horizon
(any nonzero force of interest) and on the infinite horizon (positive force
of interest, where a Brownian-functional constant estimated by
:mod:`ruintax.constants` enters), the classical zero-interest closed form,
and the limit laws of the conditional ruin time.  All probability outputs
have a log-scale companion because the normal tail underflows for large
initial capital.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    DELTA_ZERO_TOL,
    ModelParams,
    expm1_ratio,
    log_normal_survival,
    normal_survival,
)

#: Exponent convention for the zero-interest closed form, selected by the
#: Monte Carlo adjudication run (scripts/adjudicate_closed_form.py and the
#: acceptance suite): the tax-free ruin probability is e^{-2 c u / sigma^2},
#: not e^{-c u / sigma^2}.
DEFAULT_EXPONENT_FACTOR = 2


class UnsupportedRegimeError(ValueError):
    """Raised when a formula is evaluated outside its regime of validity."""


def _require_finite_nonzero_delta(p: ModelParams) -> float:
    if p.is_infinite_horizon:
        raise UnsupportedRegimeError("finite-horizon formula needs a finite horizon")
    if abs(p.delta) < DELTA_ZERO_TOL:
        raise UnsupportedRegimeError(
            "finite-horizon approximation needs delta != 0; for delta = 0 use "
            "albrecher_hipp_exact, which is exact for every u"
        )
    return p.horizon


def _require_positive_delta(p: ModelParams) -> None:
    if p.delta <= DELTA_ZERO_TOL:
        raise UnsupportedRegimeError(
            "infinite-horizon quantities need delta > 0: with delta <= 0 the "
            "discounted fluctuations are unbounded and ruin is certain"
        )


@dataclass(frozen=True)
class FiniteHorizonQuantities:
    """Scalars driving the finite-horizon approximation.

    ``a_sq``      variance of the discounted surplus at the horizon,
                  ``sigma^2 (1 - e^{-2 delta T}) / (2 delta)`` (positive for
                  either sign of delta);
    ``prefactor`` ``2 (1 + e^{-2 delta T}) / (1 - gamma + e^{-2 delta T})``,
                  equal to 2 at gamma = 0 and increasing in gamma;
    ``psi_arg``   ``(u + (c/delta)(1 - e^{-delta T})) / a``;
    ``rate_lambda`` decay rate ``sigma^2 e^{-2 delta T} / (2 a^2)`` of the
                  rescaled time-to-horizon at ruin.
    """

    a_sq: float
    prefactor: float
    psi_arg: float
    rate_lambda: float

    @property
    def a(self) -> float:
        return math.sqrt(self.a_sq)

    @classmethod
    def from_params(cls, p: ModelParams) -> "FiniteHorizonQuantities":
        T = _require_finite_nonzero_delta(p)
        d = p.delta
        a_sq = p.sigma**2 * T * expm1_ratio(2.0 * d * T)
        drift = p.c * T * expm1_ratio(d * T)
        x = 2.0 * d * T
        if x >= 0:
            e2 = math.exp(-x)
            prefactor = 2.0 * (1.0 + e2) / (1.0 - p.gamma + e2)
        else:
            # e^{-2 delta T} > 1 can overflow; divide through by it.
            w = math.exp(x)
            prefactor = 2.0 * (w + 1.0) / ((1.0 - p.gamma) * w + 1.0)
        psi_arg = (p.u + drift) / math.sqrt(a_sq)
        rate = p.sigma**2 * math.exp(-x) / (2.0 * a_sq) if x >= 0 else \
            p.sigma**2 / (2.0 * a_sq * math.exp(x))
        return cls(a_sq=a_sq, prefactor=prefactor, psi_arg=psi_arg, rate_lambda=rate)


def finite_horizon_ruin_asymptotic(p: ModelParams) -> float:
    """Large-u ruin probability approximation on a finite horizon.

    Valid for delta of either sign; strictly increasing in gamma.  Raises
    :class:`UnsupportedRegimeError` at delta = 0 (use the exact
    :func:`albrecher_hipp_exact` there).
    """
    q = FiniteHorizonQuantities.from_params(p)
    return q.prefactor * normal_survival(q.psi_arg)


def log_finite_horizon_ruin_asymptotic(p: ModelParams) -> float:
    q = FiniteHorizonQuantities.from_params(p)
    return math.log(q.prefactor) + log_normal_survival(q.psi_arg)


@dataclass(frozen=True)
class InfiniteHorizonQuantities:
    """Scalars driving the infinite-horizon approximation (delta > 0).

    ``b``   dimensionless constant ``c^2 / (sigma^2 delta)`` selecting the
            Brownian-functional constant;
    ``t_u`` location ``(c / (delta u + c))^2`` of the critical point in the
            rescaled coordinate ``e^{-2 delta . time}``;
    ``m_u`` boundary-to-spread ratio ``sqrt(2) sqrt(delta u^2 + 2 c u) / sigma``
            at that point.
    """

    b: float
    t_u: float
    m_u: float

    @classmethod
    def from_params(cls, p: ModelParams) -> "InfiniteHorizonQuantities":
        _require_positive_delta(p)
        b = p.c**2 / (p.sigma**2 * p.delta)
        tu = (p.c / (p.delta * p.u + p.c)) ** 2
        mu = math.sqrt(2.0) / p.sigma * math.sqrt(p.delta * p.u**2 + 2.0 * p.c * p.u)
        return cls(b=b, t_u=tu, m_u=mu)


def t_u(p: ModelParams) -> float:
    """Rescaled-coordinate location of the infinite-horizon critical point."""
    return InfiniteHorizonQuantities.from_params(p).t_u


def infinite_horizon_ruin_asymptotic(p: ModelParams, phat: float) -> float:
    """Large-u ruin probability approximation on the infinite horizon.

    ``phat`` is the Brownian-functional constant for ``b = c^2/(sigma^2 delta)``
    on ``[0, inf)`` (estimate it with
    :func:`ruintax.constants.estimate_constant`, family ``phat``, ``f = 1``).
    """
    _require_positive_delta(p)
    if not phat > 0:
        raise ValueError(f"phat must be > 0, got {phat}")
    q = InfiniteHorizonQuantities.from_params(p)
    return phat / (1.0 - p.gamma) * normal_survival(q.m_u)


def log_infinite_horizon_ruin_asymptotic(p: ModelParams, phat: float) -> float:
    _require_positive_delta(p)
    if not phat > 0:
        raise ValueError(f"phat must be > 0, got {phat}")
    q = InfiniteHorizonQuantities.from_params(p)
    return math.log(phat) - math.log1p(-p.gamma) + log_normal_survival(q.m_u)


def albrecher_hipp_exact(
    u: float, c: float, sigma: float, gamma: float,
    exponent_factor: int = DEFAULT_EXPONENT_FACTOR,
) -> float:
    """Exact infinite-horizon ruin probability of the zero-interest taxed model,

        1 - (1 - e^{-kappa c u / sigma^2})^{1/(1-gamma)},

    with ``kappa = exponent_factor``.  Both conventions kappa in {1, 2} are
    callable; the default is the one selected by simulation (kappa = 2, the
    classical reflection value for drifted Brownian motion).
    """
    if exponent_factor not in (1, 2):
        raise ValueError(f"exponent_factor must be 1 or 2, got {exponent_factor}")
    if not c > 0 or not sigma > 0:
        raise ValueError("c and sigma must be > 0")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if not u >= 0:
        raise ValueError(f"u must be >= 0, got {u}")
    q = math.exp(-exponent_factor * c * u / sigma**2)
    if q >= 1.0:
        return 1.0
    return -math.expm1(math.log1p(-q) / (1.0 - gamma))


def finite_horizon_ruin_time_tail(x: float, p: ModelParams) -> float:
    """Limit tail ``P(u^2 (T - tau) > x | ruin by T) -> exp(-rate_lambda x)``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    q = FiniteHorizonQuantities.from_params(p)
    return math.exp(-q.rate_lambda * x)


def infinite_horizon_ruin_time_cdf(
    x: float, p: ModelParams, phat_partial: float, phat_full: float
) -> float:
    """Limit CDF of ``u^2 (e^{-2 delta tau} - t_u)`` given eventual ruin.

    ``phat_partial`` is the constant on ``[0, x + sqrt(b)]`` and ``phat_full``
    on ``[0, inf)``; the limit value is their ratio.  Estimates must come from
    the same run for the output to be monotone in ``x``.
    """
    q = InfiniteHorizonQuantities.from_params(p)
    boundary = -math.sqrt(q.b)
    if x <= boundary:
        raise ValueError(
            f"x must exceed the domain boundary {boundary!r} "
            "(the rescaled ruin time cannot reach it)"
        )
    if not 0.0 < phat_partial <= phat_full:
        raise ValueError(
            f"need 0 < phat_partial <= phat_full, got {phat_partial!r}, {phat_full!r}"
        )
    return phat_partial / phat_full


@dataclass(frozen=True)
class EquivalencePair:
    """Both infinite-horizon approximation forms, for asymptotic-ratio tests."""

    lhs: float
    rhs: float
    log_lhs: float
    log_rhs: float

    @property
    def log_ratio(self) -> float:
        return self.log_lhs - self.log_rhs


def infinite_horizon_form_equivalence(
    p: ModelParams, phat: float, ptilde: float
) -> EquivalencePair:
    """Evaluate the two equivalent infinite-horizon approximations.

    The first uses the constant ``phat`` with tail argument
    ``sqrt(2 (delta u^2 + 2 c u)) / sigma``, the second the companion
    constant ``ptilde`` with argument ``sqrt(2) (delta u + c) / (sigma
    sqrt(delta))``.  When ``phat = e^{-b} ptilde`` (their path-wise relation),
    the ratio of the two tends to 1 as u grows.  Values are returned in both
    linear and log scale; the linear ones underflow for very large u.
    """
    _require_positive_delta(p)
    q = InfiniteHorizonQuantities.from_params(p)
    arg_rhs = math.sqrt(2.0) * (p.delta * p.u + p.c) / (p.sigma * math.sqrt(p.delta))
    log_lhs = math.log(phat) - math.log1p(-p.gamma) + log_normal_survival(q.m_u)
    log_rhs = math.log(ptilde) - math.log1p(-p.gamma) + log_normal_survival(arg_rhs)
    return EquivalencePair(
        lhs=math.exp(log_lhs), rhs=math.exp(log_rhs), log_lhs=log_lhs, log_rhs=log_rhs
    )
