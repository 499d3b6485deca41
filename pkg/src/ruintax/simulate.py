"""Monte Carlo engine for ruin events and ruin times of the taxed surplus.

The discounted surplus ``Y`` has independent Gaussian increments, so it is
simulated exactly on a uniform grid; writing ``D(t) = Y(t) - u`` (which does
not depend on ``u``) the taxed surplus is ``U(t_i) = u + D(t_i) - gamma
max_{j<=i} D(t_j)`` and ruin on the grid means ``min_i (D_i - gamma M_i) <
-u``.  One pass over the paths therefore yields, with common random numbers,
the ruin indicator for every initial capital, every tax rate, every horizon
checkpoint, and every dyadic coarsening of the grid at once; all the
monotonicity relations between those estimates hold path by path.

Grid inspection only undershoots the continuous-time infimum, so ruin
estimates are biased low; the bias is controlled by the refinement ladder
(:func:`ruin_probability_refined`) and, where a sharp value is needed,
removed to first order by square-root-of-step extrapolation
(:func:`ruin_probability_extrapolated`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mc
from .mc import MCEstimate
from .model import DELTA_ZERO_TOL, GridSpec, ModelParams, expm1_ratio

#: Variance-saturation criterion for truncating the infinite horizon.
INFINITE_TRUNCATION_FACTOR = 1e-8

_CHUNK_STEPS = 1024


class InsufficientRuinEventsError(RuntimeError):
    """Too few ruin events for a conditional ruin-time law."""


@dataclass(frozen=True)
class SimConfig:
    """Path count, grid, seeding and options for the ruin simulator."""

    n_paths: int
    grid: GridSpec
    seed: int
    infinite_truncation: float | None = None
    record_ruin_times: bool = False
    n_workers: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")

    def as_record(self) -> dict:
        return {
            "n_paths": self.n_paths,
            "step": self.grid.step,
            "t_end": self.grid.t_end,
            "seed": self.seed,
            "infinite_truncation": self.infinite_truncation,
        }


def _resolve_horizon(p: ModelParams, cfg: SimConfig) -> float:
    """Simulation end time; validates the infinite-horizon truncation."""
    if not p.is_infinite_horizon:
        if abs(cfg.grid.t_end - p.horizon) > 1e-9 * max(1.0, p.horizon):
            raise ValueError(
                f"grid spans [0, {cfg.grid.t_end!r}] but the horizon is {p.horizon!r}"
            )
        return p.horizon
    if p.delta <= DELTA_ZERO_TOL:
        raise ValueError("infinite horizon requires delta > 0")
    t_trunc = cfg.infinite_truncation
    if t_trunc is None:
        raise ValueError("infinite horizon needs cfg.infinite_truncation")
    if math.exp(-2.0 * p.delta * t_trunc) >= INFINITE_TRUNCATION_FACTOR:
        need = -math.log(INFINITE_TRUNCATION_FACTOR) / (2.0 * p.delta)
        raise ValueError(
            f"infinite_truncation {t_trunc!r} too short: discounted variance is "
            f"not saturated, need at least {need:.3f}"
        )
    if abs(cfg.grid.t_end - t_trunc) > 1e-9 * max(1.0, t_trunc):
        raise ValueError(
            f"grid spans [0, {cfg.grid.t_end!r}] but infinite_truncation is {t_trunc!r}"
        )
    return t_trunc


def _increment_moments(p: ModelParams, dt: float, n_steps: int):
    """Per-step mean and standard deviation of the ``Y`` increments."""
    k = np.arange(n_steps, dtype=float)
    t = k * dt
    if abs(p.delta) < DELTA_ZERO_TOL:
        means = np.full(n_steps, p.c * dt)
        stds = np.full(n_steps, p.sigma * math.sqrt(dt))
    else:
        d = p.delta
        means = p.c * np.exp(-d * t) * (dt * expm1_ratio(d * dt))
        stds = p.sigma * np.sqrt(np.exp(-2.0 * d * t) * (dt * expm1_ratio(2.0 * d * dt)))
    return means, stds


@dataclass
class RuinSweep:
    """Ruin counts from one common-random-numbers pass.

    ``counts[cp, level, gamma, u]`` is the number of ruined paths when the
    horizon is ``t_checkpoints[cp]``, the grid is the level-``level`` dyadic
    refinement of the base grid (level 0 = base, each level halves the
    step), the tax rate is ``gammas[gamma]`` and the initial capital is
    ``u_values[u]``.
    """

    counts: np.ndarray
    n_paths: int
    seed: int
    t_checkpoints: list[float]
    level_steps: list[float]
    gammas: list[float]
    u_values: list[float]
    tau: np.ndarray | None = None
    ruined: np.ndarray | None = None

    def estimate(self, cp: int = -1, level: int = -1, gamma: int = 0,
                 u: int = 0, **extras) -> MCEstimate:
        return MCEstimate.from_bernoulli(
            self.counts[cp, level, gamma, u], self.n_paths, self.seed,
            horizon=self.t_checkpoints[cp], step=self.level_steps[level],
            gamma=self.gammas[gamma], u=self.u_values[u], **extras,
        )


def ruin_sweep(
    p: ModelParams,
    cfg: SimConfig,
    gammas=None,
    u_values=None,
    t_checkpoints=None,
    n_levels: int = 1,
    tau_for=None,
) -> RuinSweep:
    """Simulate once, count ruin events across a parameter sweep.

    ``gammas``/``u_values`` default to the model's values; ``t_checkpoints``
    (base-grid times) defaults to the full horizon; ``n_levels`` adds dyadic
    refinements of ``cfg.grid`` (the finest level drives the simulation and
    coarser levels just inspect fewer points).  ``tau_for = (gamma_index,
    level_index)`` additionally records per-path first-crossing times for
    the model capital ``p.u``.
    """
    t_end = _resolve_horizon(p, cfg)
    gammas = sorted(set([p.gamma] if gammas is None else [float(g) for g in gammas]))
    u_values = [p.u] if u_values is None else [float(u) for u in u_values]
    if any(g < 0 or g >= 1 for g in gammas):
        raise ValueError("tax rates must lie in [0, 1)")
    base = cfg.grid
    L = int(n_levels)
    if L < 1:
        raise ValueError("n_levels must be >= 1")
    s_max = 2 ** (L - 1)
    n_fine = base.n_steps * s_max
    dt = base.step / s_max
    if t_checkpoints is None:
        t_checkpoints = [t_end]
    cp_fine = sorted({min(n_fine, max(1, int(round(t / base.step))) * s_max)
                      for t in t_checkpoints})
    if cp_fine[-1] != n_fine:
        cp_fine.append(n_fine)
    cp_pos = {idx: k for k, idx in enumerate(cp_fine)}

    means, stds = _increment_moments(p, dt, n_fine)
    strides = [2 ** (L - 1 - lvl) for lvl in range(L)]
    neg_u = -np.asarray(u_values, dtype=float)
    n_g, n_u, n_cp = len(gammas), len(u_values), len(cp_fine)

    chunk = _CHUNK_STEPS * s_max
    bounds = sorted(set(range(0, n_fine, chunk)) | set(cp_fine) | {n_fine})
    segments = [(lo, hi) for lo, hi in zip([0] + bounds, bounds) if hi > lo]

    want_tau = tau_for is not None
    if want_tau:
        tau_g, tau_lvl = tau_for
        u_tau = p.u

    def run_block(block: int, start: int, count: int):
        rng = mc.block_rng(cfg.seed, block)
        d_carry = np.zeros(count)
        m_carry = np.zeros((L, count))
        w_min = np.full((L, n_g, count), np.inf)
        counts = np.zeros((n_cp, L, n_g, n_u), dtype=np.int64)
        tau_idx = np.full(count, -1, dtype=np.int64) if want_tau else None

        for lo, hi in segments:
            k = hi - lo
            z = rng.standard_normal((count, k))
            z *= stds[lo:hi]
            z += means[lo:hi]
            np.cumsum(z, axis=1, out=z)
            z += d_carry[:, None]
            d_carry = z[:, -1].copy()
            for lvl, s in enumerate(strides):
                sl = z[:, s - 1::s]
                m = sl.copy()
                np.maximum(m[:, 0], m_carry[lvl], out=m[:, 0])
                np.maximum.accumulate(m, axis=1, out=m)
                m_carry[lvl] = m[:, -1]
                prev_g = None
                buf = None
                for gi, g in enumerate(gammas):
                    if g == 0.0:
                        w = sl
                    else:
                        if buf is None:
                            buf = sl - g * m
                        else:
                            buf -= (g - prev_g) * m
                        prev_g = g
                        w = buf
                    np.minimum(w_min[lvl, gi], w.min(axis=1), out=w_min[lvl, gi])
                    if want_tau and gi == tau_g and lvl == tau_lvl:
                        fresh = tau_idx < 0
                        if np.any(fresh):
                            cross = w[fresh] < -u_tau
                            has = cross.any(axis=1)
                            if np.any(has):
                                cols = cross.argmax(axis=1)
                                rows = np.flatnonzero(fresh)[has]
                                tau_idx[rows] = lo + (cols[has] + 1) * s
            if hi in cp_pos:
                kcp = cp_pos[hi]
                counts[kcp] = (w_min[:, :, :, None] < neg_u).sum(axis=2)
        if want_tau:
            return counts, tau_idx
        return counts, None

    results = mc.map_blocks(run_block, cfg.n_paths, cfg.n_workers)
    counts = sum(r[0] for r in results)
    tau = ruined = None
    if want_tau:
        tau_idx = np.concatenate([r[1] for r in results])[: cfg.n_paths]
        ruined = tau_idx >= 0
        tau = np.where(ruined, tau_idx * dt, np.nan)
    return RuinSweep(
        counts=counts,
        n_paths=cfg.n_paths,
        seed=cfg.seed,
        t_checkpoints=[i * dt for i in cp_fine],
        level_steps=[base.step / 2**lvl for lvl in range(L)],
        gammas=gammas,
        u_values=u_values,
        tau=tau,
        ruined=ruined,
    )


def ruin_probability_mc(p: ModelParams, cfg: SimConfig) -> MCEstimate:
    """Fraction of paths ruined on the grid, with Bernoulli standard error.

    Deterministic given ``(seed, cfg, p)`` whatever ``n_workers`` is.  The
    estimate is biased low by grid inspection; see
    :func:`ruin_probability_refined` for the convergence ladder.
    """
    sweep = ruin_sweep(p, cfg)
    return sweep.estimate()


def ruin_probability_refined(p: ModelParams, cfg: SimConfig, n_levels: int = 3) -> list[MCEstimate]:
    """Common-random-numbers ruin estimates on ``cfg.grid`` and its first
    ``n_levels - 1`` dyadic refinements, coarse to fine (nondecreasing)."""
    sweep = ruin_sweep(p, cfg, n_levels=n_levels)
    return [sweep.estimate(level=lvl) for lvl in range(n_levels)]


def extrapolate_from_sweep(sweep: RuinSweep, cp: int = -1, gamma: int = 0,
                           u: int = 0) -> MCEstimate:
    """Square-root-of-step Richardson extrapolation from a refinement ladder.

    Grid inspection biases the ruin estimate low by ``O(sqrt(step))``; the
    two finest common-random-numbers levels remove that term:

        p* = p_fine + (p_fine - p_half) / (sqrt(2) - 1).

    The per-path correction indicator is 0/1 and coupled to the fine
    indicator, so the reported standard error is exact.
    """
    if sweep.counts.shape[1] < 2:
        raise ValueError("extrapolation needs a sweep with n_levels >= 2")
    n = sweep.n_paths
    p_fine = sweep.counts[cp, -1, gamma, u] / n
    p_half = sweep.counts[cp, -2, gamma, u] / n
    k = 1.0 / (math.sqrt(2.0) - 1.0)
    p_d = p_fine - p_half
    est = p_fine + k * p_d
    second_moment = p_fine + (k * k + 2.0 * k) * p_d
    var = max(second_moment - est * est, 0.0)
    se = math.sqrt(var / n)
    return MCEstimate(
        est, se, n, (est - 1.96 * se, est + 1.96 * se), sweep.seed,
        extras={
            "ladder": [sweep.counts[cp, lvl, gamma, u] / n
                       for lvl in range(sweep.counts.shape[1])],
            "level_steps": sweep.level_steps,
            "fine_estimate": p_fine,
            "gamma": sweep.gammas[gamma],
            "u": sweep.u_values[u],
        },
    )


def ruin_probability_extrapolated(p: ModelParams, cfg: SimConfig, n_levels: int = 3) -> MCEstimate:
    """Refinement ladder plus extrapolation for the model's own (u, gamma)."""
    if n_levels < 2:
        raise ValueError("extrapolation needs n_levels >= 2")
    sweep = ruin_sweep(p, cfg, n_levels=n_levels)
    return extrapolate_from_sweep(sweep)


@dataclass
class RuinTimeResult:
    """Per-path ruin flags and first-crossing times (right grid endpoint)."""

    ruined: np.ndarray
    tau: np.ndarray
    estimate: MCEstimate

    def records(self):
        for i in range(len(self.ruined)):
            yield {"path_id": i, "ruined": bool(self.ruined[i]),
                   "tau": float(self.tau[i]) if self.ruined[i] else None}


def ruin_time_samples(p: ModelParams, cfg: SimConfig) -> RuinTimeResult:
    """Simulate and record, per path, whether ruin happened and the first
    grid time ``tau`` with taxed surplus below zero (no interpolation)."""
    sweep = ruin_sweep(p, cfg, tau_for=(0, 0))
    est = sweep.estimate()
    return RuinTimeResult(ruined=sweep.ruined, tau=sweep.tau, estimate=est)


@dataclass
class ConditionalRuinTimeLaw:
    """Empirical law of the rescaled ruin time given ruin."""

    values: np.ndarray  # sorted transformed samples
    n_ruined: int
    n_paths: int
    transform: str

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.values, x, side="right") / self.n_ruined
        return float(out) if out.ndim == 0 else out

    def ks_distance(self, reference_cdf) -> float:
        """Kolmogorov-Smirnov sup-distance to a reference CDF callable."""
        ref = np.asarray(reference_cdf(self.values), dtype=float)
        n = self.n_ruined
        upper = np.abs(np.arange(1, n + 1) / n - ref)
        lower = np.abs(np.arange(0, n) / n - ref)
        return float(np.maximum(upper, lower).max())


def conditional_ruin_time_empirical(
    p: ModelParams, cfg: SimConfig, transform: str, min_events: int = 200
) -> ConditionalRuinTimeLaw:
    """Empirical conditional law of the rescaled ruin time.

    ``transform='finite'`` rescales as ``u^2 (T - tau)``; ``'infinite'`` as
    ``u^2 (e^{-2 delta tau} - (c/(delta u + c))^2)``.  Raises
    :class:`InsufficientRuinEventsError` below ``min_events`` ruin events.
    """
    if transform not in ("finite", "infinite"):
        raise ValueError(f"transform must be 'finite' or 'infinite', got {transform!r}")
    res = ruin_time_samples(p, cfg)
    taus = res.tau[res.ruined]
    n_ruined = int(res.ruined.sum())
    if n_ruined < min_events:
        raise InsufficientRuinEventsError(
            f"only {n_ruined} ruin events (< {min_events}); increase n_paths"
        )
    if transform == "finite":
        if p.is_infinite_horizon:
            raise ValueError("finite transform needs a finite horizon")
        x = p.u**2 * (p.horizon - taus)
    else:
        if p.delta <= DELTA_ZERO_TOL:
            raise ValueError("infinite transform needs delta > 0")
        t_u = (p.c / (p.delta * p.u + p.c)) ** 2
        x = p.u**2 * (np.exp(-2.0 * p.delta * taus) - t_u)
    return ConditionalRuinTimeLaw(
        values=np.sort(x), n_ruined=n_ruined, n_paths=cfg.n_paths, transform=transform
    )
