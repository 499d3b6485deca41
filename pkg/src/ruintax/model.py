"""Core model types and the exact Gaussian law of the discounted surplus.

The surplus process earns interest at a constant force ``delta``, collects
premiums at rate ``c``, loses money through a Brownian component with
volatility ``sigma``, and pays tax at rate ``gamma`` on every new running
maximum of the surplus above the initial capital (loss-carry-forward
taxation).  Everything in this package works with the *discounted* surplus

    Y(t) = u + c * int_0^t e^{-delta v} dv - sigma * int_0^t e^{-delta v} dB(v),

whose ruin events coincide with those of the original process.  ``Y`` is a
Gaussian process with independent increments, so it can be simulated exactly
on any time grid; :func:`y_increment_law` provides the per-step law and
:func:`apply_tax` turns a realized path of ``Y`` into the taxed surplus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

#: |delta| below this threshold is routed to the zero-interest limit branch.
DELTA_ZERO_TOL = 1e-12

#: Horizon value meaning "no terminal time".
INFINITE = math.inf

_SQRT2 = math.sqrt(2.0)


def expm1_ratio(x):
    """Stable kernel ``(1 - e^{-x}) / x`` with the limit value 1 at ``x = 0``.

    All interest-rate formulas in this package reduce to this kernel, which
    keeps them finite and continuous through ``delta = 0`` for either sign
    of ``delta``.
    """
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    out = np.where(x == 0.0, 1.0, -np.expm1(-safe) / safe)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ModelParams:
    """Model parameter tuple (u, c, sigma, delta, gamma) plus horizon.

    ``horizon`` is a time; pass ``math.inf`` (or :data:`INFINITE`) for the
    unbounded horizon, which requires ``delta > 0`` because the discounted
    fluctuation variance ``sigma^2 (1 - e^{-2 delta t}) / (2 delta)``
    diverges otherwise and ruin is certain.
    """

    u: float
    c: float
    sigma: float
    delta: float
    gamma: float
    horizon: float = INFINITE

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"premium rate c must be > 0, got {self.c}")
        if not self.sigma > 0:
            raise ValueError(f"volatility sigma must be > 0, got {self.sigma}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"tax rate gamma must lie in [0, 1), got {self.gamma}")
        if not self.u >= 0:
            raise ValueError(f"initial capital u must be >= 0, got {self.u}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if self.is_infinite_horizon and self.delta <= DELTA_ZERO_TOL:
            raise ValueError(
                "infinite horizon requires delta > 0: for delta <= 0 the "
                "discounted surplus has unbounded fluctuations and ruin is "
                "certain, so the infinite-horizon problem is degenerate"
            )

    @property
    def is_infinite_horizon(self) -> bool:
        return math.isinf(self.horizon)

    def with_horizon(self, horizon: float) -> "ModelParams":
        return ModelParams(self.u, self.c, self.sigma, self.delta, self.gamma, horizon)


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid on ``[0, t_end]`` with ``n_steps`` steps of size ``step``."""

    step: float
    n_steps: int
    t_end: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"grid step must be > 0, got {self.step}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if abs(self.step * self.n_steps - self.t_end) > 1e-9 * max(1.0, abs(self.t_end)):
            raise ValueError(
                f"inconsistent grid: step*n_steps = {self.step * self.n_steps!r} "
                f"but t_end = {self.t_end!r}"
            )

    @classmethod
    def from_step(cls, step: float, t_end: float) -> "GridSpec":
        if not step > 0:
            raise ValueError(f"grid step must be > 0, got {step}")
        n = int(round(t_end / step))
        n = max(n, 1)
        return cls(step=t_end / n, n_steps=n, t_end=t_end)

    @classmethod
    def from_n_steps(cls, n_steps: int, t_end: float) -> "GridSpec":
        return cls(step=t_end / n_steps, n_steps=n_steps, t_end=t_end)

    @property
    def times(self) -> np.ndarray:
        """Grid points including both endpoints, length ``n_steps + 1``."""
        return np.linspace(0.0, self.t_end, self.n_steps + 1)

    def refined(self, factor: int) -> "GridSpec":
        """Same span with every step split into ``factor`` parts."""
        return GridSpec(self.step / factor, self.n_steps * factor, self.t_end)


@dataclass
class PathSample:
    """One realized discounted-surplus path on a grid.

    ``running_max_excess[i] = max_{j<=i}(y_values[j] - u)`` is the quantity
    taxed so far; it starts at 0 and never decreases.
    """

    times: np.ndarray
    y_values: np.ndarray
    running_max_excess: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.y_values = np.asarray(self.y_values, dtype=float)
        self.running_max_excess = np.asarray(self.running_max_excess, dtype=float)
        if not (len(self.times) == len(self.y_values) == len(self.running_max_excess)):
            raise ValueError("times, y_values and running_max_excess must have equal length")
        if self.times[0] != 0.0:
            raise ValueError("path must start at time 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        rme = self.running_max_excess
        if rme[0] < 0 or np.any(np.diff(rme) < 0):
            raise ValueError("running_max_excess must be nonnegative and nondecreasing")

    @classmethod
    def from_y(cls, times, y_values, u: float) -> "PathSample":
        y = np.asarray(y_values, dtype=float)
        if abs(y[0] - u) > 1e-9 * max(1.0, abs(u)):
            raise ValueError(f"y_values[0] = {y[0]!r} does not equal u = {u!r}")
        return cls(np.asarray(times, dtype=float), y, np.maximum.accumulate(y - u))


def y_increment_law(t: float, dt: float, p: ModelParams) -> tuple[float, float]:
    """Mean and variance of ``Y(t + dt) - Y(t)``.

    Exact for any ``dt``:

        mean     = (c / delta)      (e^{-delta t}   - e^{-delta (t+dt)})
        variance = (sigma^2/2delta) (e^{-2 delta t} - e^{-2 delta (t+dt)})

    evaluated through expm1-based kernels whose ``delta -> 0`` limit is
    ``(c dt, sigma^2 dt)``; ``|delta| < DELTA_ZERO_TOL`` takes that branch.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if abs(p.delta) < DELTA_ZERO_TOL:
        return p.c * dt, p.sigma**2 * dt
    d = p.delta
    mean = p.c * math.exp(-d * t) * dt * expm1_ratio(d * dt)
    var = p.sigma**2 * math.exp(-2.0 * d * t) * dt * expm1_ratio(2.0 * d * dt)
    return mean, var


def apply_tax(path: PathSample, p: ModelParams) -> np.ndarray:
    """Taxed discounted surplus ``U(t_i) = Y(t_i) - gamma * max_{j<=i}(Y(t_j) - u)``.

    With ``gamma = 0`` this is ``Y`` itself.  Ruin on the grid means
    ``min_i U(t_i) < 0``.
    """
    y = path.y_values
    if abs(y[0] - p.u) > 1e-9 * max(1.0, abs(p.u)):
        raise ValueError(
            f"path starts at {y[0]!r} but model has initial capital u = {p.u!r}"
        )
    return y - p.gamma * path.running_max_excess


def is_ruined(taxed_values: np.ndarray) -> bool:
    return bool(np.min(taxed_values) < 0.0)


def normal_survival(x):
    """Standard normal survival function ``P(N(0,1) > x)``.

    Computed from the complementary error function; absolute error stays
    below 1e-14 on ``[-8, 8]``.  Rejects NaN input.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError("normal_survival: NaN input")
    out = 0.5 * special.erfc(arr / _SQRT2)
    return float(out) if out.ndim == 0 else out


def log_normal_survival(x):
    """``log P(N(0,1) > x)``, stable far into the tail (no underflow to -inf
    for x up to at least 1e6)."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError("log_normal_survival: NaN input")
    out = special.log_ndtr(-arr)
    return float(out) if out.ndim == 0 else out


def sample_paths(p: ModelParams, grid: GridSpec, n_paths: int, seed: int) -> list[PathSample]:
    """Draw ``n_paths`` exact realizations of ``Y`` on ``grid``.

    Convenience constructor for tests and path export; the Monte Carlo
    estimators in :mod:`ruintax.simulate` use a streaming engine instead and
    never materialize paths.
    """
    from . import mc

    times = grid.times
    means = np.empty(grid.n_steps)
    stds = np.empty(grid.n_steps)
    for k in range(grid.n_steps):
        m, v = y_increment_law(times[k], grid.step, p)
        means[k] = m
        stds[k] = math.sqrt(v)

    out: list[PathSample] = []
    for block, start, count in mc.iter_path_blocks(n_paths):
        rng = mc.block_rng(seed, block)
        z = rng.standard_normal((count, grid.n_steps))
        incr = z * stds + means
        y = np.empty((count, grid.n_steps + 1))
        y[:, 0] = p.u
        np.cumsum(incr, axis=1, out=y[:, 1:])
        y[:, 1:] += p.u
        for i in range(count):
            out.append(PathSample.from_y(times, y[i], p.u))
    return out
