#!/usr/bin/env python3
"""One-off calibration of the acceptance-scale Monte Carlo runs.

Times each heavy criterion at its pinned configuration and prints the
numbers the acceptance suite will assert, so tolerances can be verified
against an actual run before freezing.
"""

import math
import time

import numpy as np

from ruintax import (
    ConstantSpec,
    EstimatorConfig,
    GridSpec,
    ModelParams,
    SimConfig,
    albrecher_hipp_exact,
    estimate_constant,
    extrapolate_from_sweep,
    finite_horizon_ruin_asymptotic,
    ruin_sweep,
)
from ruintax.asymptotics import FiniteHorizonQuantities
from ruintax.simulate import conditional_ruin_time_empirical


def timed(label, fn):
    t0 = time.time()
    out = fn()
    print(f"[{time.time() - t0:7.1f}s] {label}: {out}")
    return out


def crit2_piterbarg():
    results = {}
    for a, eta, seed in [(0.5, 0.004, 101), (1.0, 0.002, 102), (2.0, 0.001, 103)]:
        cfg = EstimatorConfig(n_paths=100_000, seed=seed, grid_step=eta)
        est = timed(f"P^{a}", lambda: estimate_constant(ConstantSpec.piterbarg(a), cfg))
        target = 1 + 1 / a
        band = 3 * est.stderr + 0.02 * target
        ok = abs(est.estimate - target) <= band
        print(f"    target {target}: |dev| {abs(est.estimate-target):.4f} "
              f"vs band {band:.4f} -> {'PASS' if ok else 'FAIL'}")
        results[a] = est
    return results


def crit4_phat():
    printed = {
        (5.0, 0.05, 0.1): 0.0467, (5.0, 0.05, 0.2): 0.0526,
        (5.0, 0.07, 0.1): 0.0256, (5.0, 0.07, 0.2): 0.0288,
        (5.0, 0.10, 0.1): 0.0113, (5.0, 0.10, 0.2): 0.0128,
        (4.0, 0.10, 0.1): 0.0378, (4.0, 0.10, 0.2): 0.0425,
    }
    phats = {}
    for delta, seed in [(0.05, 201), (0.07, 202), (0.10, 203)]:
        b = 0.01 / delta
        cfg = EstimatorConfig(n_paths=100_000, seed=seed, grid_step=0.002)
        est = timed(f"phat(b={b:.4f})",
                    lambda: estimate_constant(ConstantSpec.generalized_phat(1.0, b), cfg))
        phats[delta] = est.estimate
    from ruintax import infinite_horizon_ruin_asymptotic

    for (u, delta, gamma), target in printed.items():
        p = ModelParams(u, 0.1, 1.0, delta, gamma)
        ours = infinite_horizon_ruin_asymptotic(p, phats[delta])
        print(f"    u={u} d={delta} g={gamma}: ours {ours:.4f} printed {target} "
              f"rel dev {(ours-target)/target:+.1%}")
    return phats


def crit5_adjudication():
    p = ModelParams(1.0, 1.0, 1.0, 0.0, 0.0, horizon=10.0)
    cfg = SimConfig(n_paths=1_000_000, grid=GridSpec.from_step(2e-3, 10.0), seed=500)
    sweep = timed("adjudication sweep (n=1e6, 3 levels, 3 gammas)",
                  lambda: ruin_sweep(p, cfg, gammas=[0.0, 0.1, 0.3], n_levels=3))
    for gi, g in enumerate(sweep.gammas):
        est = extrapolate_from_sweep(sweep, gamma=gi)
        print(f"    gamma={g}: est {est.estimate:.6f} +- {est.stderr:.6f} "
              f"ladder {[f'{x:.5f}' for x in est.extras['ladder']]}")
        for kappa in (1, 2):
            p0 = albrecher_hipp_exact(1.0, 1.0, 1.0, g, exponent_factor=kappa)
            within = abs(est.estimate - p0) / est.stderr
            print(f"      kappa={kappa}: exact {p0:.6f}  |dev|/se = {within:.2f}")
    return sweep


def crit7_ratio():
    p = ModelParams(5.0, 0.1, 1.0, 0.05, 0.1, horizon=20.0)
    cfg = SimConfig(n_paths=200_000, grid=GridSpec.from_step(2.5e-3, 20.0), seed=700)
    sweep = timed("ratio sweep u in {4,5,6}",
                  lambda: ruin_sweep(p, cfg, u_values=[4.0, 5.0, 6.0]))
    for ui, u in enumerate(sweep.u_values):
        est = sweep.estimate(u=ui)
        asym = finite_horizon_ruin_asymptotic(ModelParams(u, 0.1, 1.0, 0.05, 0.1,
                                                          horizon=20.0))
        print(f"    u={u}: mc {est.estimate:.5f} asym {asym:.5f} "
              f"ratio {est.estimate/asym:.4f} se_ratio {est.stderr/asym:.4f}")
    return sweep


def crit8_ks():
    p = ModelParams(5.0, 0.1, 1.0, 0.05, 0.1, horizon=20.0)
    cfg = SimConfig(n_paths=60_000, grid=GridSpec.from_step(5e-3, 20.0), seed=800)
    law = timed("ruin-time law", lambda: conditional_ruin_time_empirical(p, cfg, "finite"))
    rate = FiniteHorizonQuantities.from_params(p).rate_lambda
    ks = law.ks_distance(lambda x: -np.expm1(-rate * np.asarray(x)))
    print(f"    events {law.n_ruined}, KS {ks:.4f} (< 0.1 required)")
    return ks


if __name__ == "__main__":
    import sys

    which = sys.argv[1:] or ["2", "4", "5", "7", "8"]
    t0 = time.time()
    if "2" in which:
        crit2_piterbarg()
    if "4" in which:
        crit4_phat()
    if "5" in which:
        crit5_adjudication()
    if "7" in which:
        crit7_ratio()
    if "8" in which:
        crit8_ks()
    print(f"total {time.time()-t0:.0f}s")
