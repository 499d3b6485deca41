"""Command line front end.

Subcommands: ``approx`` (closed-form approximations), ``simulate`` (Monte
Carlo ruin probability), ``constant`` (Brownian-functional constants),
``ruin-time`` (per-path ruin times), ``table`` (the built-in benchmark
grids; asymptotic evaluation, not path simulation), ``verify-lemmas``
(numeric checks of the deterministic surfaces).

Every run resolves its parameters from defaults, then an optional flat JSON
config file (``--config``), then explicit flags, and embeds the fully
resolved configuration and seed in its output, so any output can be fed
back via ``--config`` to reproduce bit-identical numbers.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import asymptotics, benchmarks, constants, fields, simulate
from .model import GridSpec, ModelParams


def _model_from(cfg: dict) -> ModelParams:
    horizon = math.inf if cfg.get("infinite") else cfg.get("T")
    if horizon is None:
        raise ValueError("specify a horizon: --T <time> or --infinite")
    return ModelParams(u=cfg["u"], c=cfg["c"], sigma=cfg["sigma"],
                       delta=cfg["delta"], gamma=cfg["gamma"], horizon=horizon)


def _auto_truncation(cfg: dict, p: ModelParams) -> float:
    if cfg.get("truncation") is not None:
        return cfg["truncation"]
    return 1.01 * -math.log(simulate.INFINITE_TRUNCATION_FACTOR) / (2.0 * p.delta)


def _estimator_config(cfg: dict) -> constants.EstimatorConfig:
    return constants.EstimatorConfig(
        n_paths=int(cfg["n_paths"]), seed=int(cfg["seed"]),
        grid_step=cfg["eta"], truncation_horizon=cfg.get("truncation"),
        refinement_checks=bool(cfg.get("refinement", True)),
    )


def _phat_for(cfg: dict, p: ModelParams) -> tuple[float, dict]:
    if cfg.get("phat") is not None:
        return float(cfg["phat"]), {"phat_source": "given"}
    if not cfg.get("phat_from_mc"):
        raise ValueError(
            "infinite-horizon approximation needs the constant: pass --phat "
            "<value> or --phat-from-mc"
        )
    b = p.c**2 / (p.sigma**2 * p.delta)
    spec = constants.ConstantSpec.generalized_phat(f=1.0, b=b)
    est = constants.estimate_constant(spec, _estimator_config(cfg))
    return est.estimate, {"phat_source": "mc", "phat_stderr": est.stderr, "b": b}


# ---------------------------------------------------------------------------
# subcommand runners: each returns {"command", "config", "columns", "rows"}
# ---------------------------------------------------------------------------

def _run_approx(cfg: dict) -> dict:
    p = _model_from(cfg)
    meta = {}
    if p.is_infinite_horizon:
        phat, meta = _phat_for(cfg, p)
        value = asymptotics.infinite_horizon_ruin_asymptotic(p, phat)
        log_value = asymptotics.log_infinite_horizon_ruin_asymptotic(p, phat)
        row = [p.u, p.c, p.sigma, p.delta, "inf", p.gamma, phat, value, log_value]
        cols = ["u", "c", "sigma", "delta", "horizon", "gamma", "phat",
                "asymptotic", "log_asymptotic"]
    else:
        value = asymptotics.finite_horizon_ruin_asymptotic(p)
        log_value = asymptotics.log_finite_horizon_ruin_asymptotic(p)
        row = [p.u, p.c, p.sigma, p.delta, p.horizon, p.gamma, value, log_value]
        cols = ["u", "c", "sigma", "delta", "horizon", "gamma",
                "asymptotic", "log_asymptotic"]
    cfg.update(meta)
    return {"command": "approx", "config": cfg, "columns": cols, "rows": [row]}


def _run_simulate(cfg: dict) -> dict:
    p = _model_from(cfg)
    t_end = _auto_truncation(cfg, p) if p.is_infinite_horizon else p.horizon
    grid = GridSpec.from_step(cfg["step"], t_end)
    sim = simulate.SimConfig(
        n_paths=int(cfg["n_paths"]), grid=grid, seed=int(cfg["seed"]),
        infinite_truncation=t_end if p.is_infinite_horizon else None,
    )
    cfg["truncation"] = sim.infinite_truncation
    est = simulate.ruin_probability_mc(p, sim)
    cols = ["u", "c", "sigma", "delta", "horizon", "gamma",
            "estimate", "stderr", "ci95_low", "ci95_high", "n", "seed"]
    row = [p.u, p.c, p.sigma, p.delta,
           "inf" if p.is_infinite_horizon else p.horizon, p.gamma,
           est.estimate, est.stderr, est.ci95[0], est.ci95[1], est.n, est.seed]
    return {"command": "simulate", "config": cfg, "columns": cols, "rows": [row]}


def _run_constant(cfg: dict) -> dict:
    fam = cfg["family"]
    s2 = math.inf if cfg.get("s2") in (None, "inf") else float(cfg["s2"])
    spec = constants.ConstantSpec(
        family=fam, s1=float(cfg.get("s1") or 0.0), s2=s2,
        a=cfg.get("a"), f=cfg.get("f"), b=cfg.get("b"),
    )
    est = constants.estimate_constant(spec, _estimator_config(cfg))
    record = {"spec": spec.as_record(), "cfg": _estimator_config(cfg).as_record(),
              "estimate": est.estimate, "stderr": est.stderr, "n": est.n}
    cols = ["family", "s1", "s2", "a", "f", "b", "estimate", "stderr", "n", "seed"]
    row = [fam, spec.s1, "inf" if math.isinf(spec.s2) else spec.s2,
           spec.a, spec.f, spec.b, est.estimate, est.stderr, est.n, est.seed]
    return {"command": "constant", "config": cfg, "columns": cols,
            "rows": [row], "record": record}


def _run_ruin_time(cfg: dict) -> dict:
    p = _model_from(cfg)
    t_end = _auto_truncation(cfg, p) if p.is_infinite_horizon else p.horizon
    grid = GridSpec.from_step(cfg["step"], t_end)
    sim = simulate.SimConfig(
        n_paths=int(cfg["n_paths"]), grid=grid, seed=int(cfg["seed"]),
        infinite_truncation=t_end if p.is_infinite_horizon else None,
        record_ruin_times=True,
    )
    cfg["truncation"] = sim.infinite_truncation
    res = simulate.ruin_time_samples(p, sim)
    rows = [[r["path_id"], r["ruined"], r["tau"]] for r in res.records()]
    return {
        "command": "ruin-time", "config": cfg,
        "columns": ["path_id", "ruined", "tau"], "rows": rows,
        "estimate": res.estimate.as_record(),
    }


def _run_table(cfg: dict) -> dict:
    which = int(cfg["which"])
    if which == 1:
        cols = ["u", "c", "sigma", "delta", "T", "gamma", "asymptotic"]
        rows = []
        for (u, c, s, d, T, g) in benchmarks.FINITE_GRID:
            p = ModelParams(u, c, s, d, g, horizon=T)
            rows.append([u, c, s, d, T, g, asymptotics.finite_horizon_ruin_asymptotic(p)])
        return {"command": "table", "config": cfg, "columns": cols, "rows": rows}
    if which != 2:
        raise ValueError(f"--which must be 1 or 2, got {which}")
    if cfg.get("phat") is None and not cfg.get("phat_from_mc"):
        raise ValueError("table --which 2 needs --phat-from-mc or --phat <value>")
    phat_cache: dict = {}
    cols = ["u", "c", "sigma", "delta", "gamma", "b", "phat", "asymptotic"]
    rows = []
    for (u, c, s, d, g) in benchmarks.INFINITE_GRID:
        p = ModelParams(u, c, s, d, g, horizon=math.inf)
        key = (c, s, d)
        if key not in phat_cache:
            if cfg.get("phat") is not None:
                phat_cache[key] = float(cfg["phat"])
            else:
                phat_cache[key], _ = _phat_for(cfg, p)
        phat = phat_cache[key]
        b = c * c / (s * s * d)
        rows.append([u, c, s, d, g, b, phat,
                     asymptotics.infinite_horizon_ruin_asymptotic(p, phat)])
    return {"command": "table", "config": cfg, "columns": cols, "rows": rows}


def _run_verify_lemmas(cfg: dict) -> dict:
    checks = []

    def add(name, ok, detail):
        checks.append({"name": name, "pass": bool(ok), "detail": detail})

    res = int(cfg.get("resolution") or 200)
    if cfg.get("T") is not None and abs(cfg["delta"]) > 0:
        p = _model_from({**cfg, "infinite": False})
        cell = p.horizon / res
        fp = fields.argmax_variance_grid(p, resolution=res)
        add("variance_argmax_at_origin_horizon",
            fp.s <= cell + 1e-12 and fp.t >= p.horizon - cell - 1e-12,
            {"s": fp.s, "t": fp.t, "cell": cell})
        exp = fields.expansion_check_vz(p)
        add("stddev_expansion_first_order", exp.within(1e-3),
            {"rel_err_s": exp.rel_err_s, "rel_err_t": exp.rel_err_t})
    if cfg["delta"] > 0:
        p_inf = _model_from({**cfg, "T": None, "infinite": True})
        cell = (1.0 - fields.T_MIN) / res
        fp = fields.argmax_f_grid(p_inf, resolution=res)
        tu = asymptotics.t_u(p_inf)
        add("spread_boundary_argmax_at_critical_point",
            fp.s >= 1.0 - cell - 1e-12 and abs(fp.t - tu) <= cell + 1e-12,
            {"s": fp.s, "t": fp.t, "t_u": tu, "cell": cell})
        mf = fields.m_u_ratio(1.0, tu, p_inf) * fields.f_u(1.0, tu, p_inf)
        add("ratio_product_identity", abs(mf - 1.0) < 1e-12, {"product": mf})
        q = asymptotics.InfiniteHorizonQuantities.from_params(p_inf)
        rel = abs(fields.m_u_ratio(1.0, tu, p_inf) - q.m_u) / q.m_u
        add("critical_ratio_closed_form", rel < 1e-10, {"rel_err": rel})
    result = {"command": "verify-lemmas", "config": cfg,
              "columns": ["name", "pass", "detail"],
              "rows": [[c["name"], c["pass"], json.dumps(c["detail"], sort_keys=True)]
                       for c in checks],
              "all_pass": all(c["pass"] for c in checks)}
    return result


_RUNNERS = {
    "approx": _run_approx,
    "simulate": _run_simulate,
    "constant": _run_constant,
    "ruin-time": _run_ruin_time,
    "table": _run_table,
    "verify-lemmas": _run_verify_lemmas,
}

_DEFAULTS = {
    "approx": {"u": 5.0, "c": 0.1, "sigma": 1.0, "delta": 0.05, "gamma": 0.1,
               "n_paths": 100_000, "eta": 0.002, "seed": 0},
    "simulate": {"u": 5.0, "c": 0.1, "sigma": 1.0, "delta": 0.05, "gamma": 0.1,
                 "n_paths": 100_000, "step": 0.01, "seed": 0},
    "constant": {"family": "piterbarg", "n_paths": 100_000, "eta": 0.005, "seed": 0},
    "ruin-time": {"u": 5.0, "c": 0.1, "sigma": 1.0, "delta": 0.05, "gamma": 0.1,
                  "n_paths": 10_000, "step": 0.01, "seed": 0},
    "table": {"which": 1, "n_paths": 100_000, "eta": 0.002, "seed": 0},
    "verify-lemmas": {"u": 5.0, "c": 0.1, "sigma": 1.0, "delta": 0.05,
                      "gamma": 0.1, "T": 20.0, "resolution": 200},
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ruintax",
        description="Ruin probabilities for a Brownian surplus with interest and tax",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(sp, *, model=True, mc=False, est=False):
        sp.add_argument("--config", help="flat JSON config file; flags override it")
        sp.add_argument("--out", help="write results to this file")
        sp.add_argument("--format", choices=["csv", "json"], default=None)
        sp.add_argument("--seed", type=int)
        if model:
            sp.add_argument("--u", type=float)
            sp.add_argument("--c", type=float)
            sp.add_argument("--sigma", type=float)
            sp.add_argument("--delta", type=float)
            sp.add_argument("--gamma", type=float)
            sp.add_argument("--T", type=float, dest="T")
            sp.add_argument("--infinite", action="store_const", const=True, default=None)
        if mc:
            sp.add_argument("--n-paths", type=int, dest="n_paths")
            sp.add_argument("--step", type=float)
            sp.add_argument("--truncation", type=float)
        if est:
            sp.add_argument("--n-paths", type=int, dest="n_paths")
            sp.add_argument("--eta", type=float, help="constant-estimator grid step")
            sp.add_argument("--truncation", type=float)

    sp = sub.add_parser("approx", help="closed-form ruin approximation")
    add_common(sp, est=True)
    sp.add_argument("--phat", type=float)
    sp.add_argument("--phat-from-mc", action="store_const", const=True,
                    default=None, dest="phat_from_mc")

    sp = sub.add_parser("simulate", help="Monte Carlo ruin probability")
    add_common(sp, mc=True)

    sp = sub.add_parser("constant", help="estimate a Brownian-functional constant")
    add_common(sp, model=False, est=True)
    sp.add_argument("--family", choices=["pickands", "piterbarg", "phat", "ptilde"])
    sp.add_argument("--a", type=float)
    sp.add_argument("--f", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--s1", type=float)
    sp.add_argument("--s2", type=float)
    sp.add_argument("--no-refinement", action="store_const", const=False,
                    default=None, dest="refinement")

    sp = sub.add_parser("ruin-time", help="per-path ruin times")
    add_common(sp, mc=True)

    sp = sub.add_parser("table", help="evaluate the built-in benchmark grids")
    add_common(sp, model=False, est=True)
    sp.add_argument("--which", type=int, choices=[1, 2])
    sp.add_argument("--phat", type=float)
    sp.add_argument("--phat-from-mc", action="store_const", const=True,
                    default=None, dest="phat_from_mc")

    sp = sub.add_parser("verify-lemmas", help="numeric checks of the lemma surfaces")
    add_common(sp)
    sp.add_argument("--resolution", type=int)

    return ap


def _resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS[args.command])
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict) or any(isinstance(v, (dict, list))
                                               for v in loaded.values()):
            raise ValueError("config file must be a flat JSON object")
        loaded.pop("command", None)
        cfg.update(loaded)
    skip = {"command", "config", "out", "format"}
    for key, val in vars(args).items():
        if key not in skip and val is not None:
            cfg[key] = val
    return cfg


def _fmt_cell(v, display: bool = False) -> str:
    if isinstance(v, float):
        return f"{v:.4f}" if display else repr(v)
    return "" if v is None else str(v)


def render_csv(result: dict) -> str:
    lines = ["# config = " + json.dumps(result["config"], sort_keys=True)]
    float_cols = [
        i for i, _ in enumerate(result["columns"])
        if any(isinstance(r[i], float) for r in result["rows"])
    ]
    header = list(result["columns"]) + [result["columns"][i] + "_display"
                                        for i in float_cols]
    lines.append(",".join(header))
    for row in result["rows"]:
        cells = [_fmt_cell(v) for v in row]
        cells += [_fmt_cell(row[i], display=True) for i in float_cols]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_json(result: dict) -> str:
    return json.dumps(result, sort_keys=True) + "\n"


def _print_table(result: dict, stream) -> None:
    widths = [max(len(str(c)), 12) for c in result["columns"]]
    print("  ".join(str(c).ljust(w) for c, w in zip(result["columns"], widths)),
          file=stream)
    for row in result["rows"][:50]:
        print("  ".join(_fmt_cell(v).ljust(w) for v, w in zip(row, widths)),
              file=stream)
    if len(result["rows"]) > 50:
        print(f"... ({len(result['rows'])} rows total)", file=stream)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        cfg["command"] = args.command
        result = _RUNNERS[args.command](cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or "csv"
    if args.format == "json":
        sys.stdout.write(render_json(result))
    else:
        _print_table(result, sys.stdout)
        if result.get("estimate"):
            print("estimate: " + json.dumps(result["estimate"], sort_keys=True))
    if args.out:
        text = render_json(result) if fmt == "json" else render_csv(result)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.command == "verify-lemmas" and not result["all_pass"]:
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
