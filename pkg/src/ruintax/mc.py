"""Monte Carlo plumbing: deterministic per-block random streams and estimates.

Randomness is organized in fixed-size path blocks.  Block ``b`` always draws
from ``SeedSequence(seed, spawn_key=(b,))``, so every path's noise is a pure
function of ``(seed, path_index)`` and results are bit-identical no matter
how blocks are scheduled across workers.  Per-block partial results are
stored in block order and reduced in that order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

#: Paths per random-stream block.  Fixed: changing it changes the stream layout.
BLOCK_SIZE = 4096


def block_rng(seed: int, block_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.SFC64(ss))


def iter_path_blocks(n_paths: int):
    """Yield ``(block_index, start, count)`` covering ``range(n_paths)``."""
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    for b in range(0, -(-n_paths // BLOCK_SIZE)):
        start = b * BLOCK_SIZE
        yield b, start, min(BLOCK_SIZE, n_paths - start)


def map_blocks(fn, n_paths: int, n_workers: int = 1) -> list:
    """Run ``fn(block_index, start, count)`` for every block.

    Returns results in block order regardless of ``n_workers``; with more
    than one worker the blocks are farmed out to threads (the heavy numpy
    kernels release the GIL) but the reduction order never changes.
    """
    blocks = list(iter_path_blocks(n_paths))
    if n_workers <= 1:
        return [fn(*blk) for blk in blocks]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(fn, *blk) for blk in blocks]
        return [f.result() for f in futures]


@dataclass
class MCEstimate:
    """Point estimate with its standard error and 95% normal interval."""

    estimate: float
    stderr: float
    n: int
    ci95: tuple[float, float]
    seed: int
    extras: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_bernoulli(cls, successes: float, n: int, seed: int, **extras) -> "MCEstimate":
        p = successes / n
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        return cls(p, se, n, (p - 1.96 * se, p + 1.96 * se), seed, dict(extras))

    @classmethod
    def from_moments(cls, total: float, total_sq: float, n: int, seed: int, **extras) -> "MCEstimate":
        mean = total / n
        var = max(total_sq / n - mean * mean, 0.0)
        if n > 1:
            var *= n / (n - 1)
        se = math.sqrt(var / n)
        return cls(mean, se, n, (mean - 1.96 * se, mean + 1.96 * se), seed, dict(extras))

    def as_record(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n": self.n,
            "ci95_low": self.ci95[0],
            "ci95_high": self.ci95[1],
            "seed": self.seed,
        }
