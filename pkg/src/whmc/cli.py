"""Command-line front end.

Four subcommands, each driven by a single JSON configuration document:

    estimate     one estimator run (plain | whmc | mlmc) -> report artifact
    fptime-cdf   analytic / factor-walk / plain-walk passage cdf comparison
    rate-study   consecutive-level mean-square differences per level
    gerber-shiu  discounted-overshoot estimates across step counts

Exit codes: 0 success, 2 configuration error, 3 numerical error.  The seed is
mandatory (there is no wall-clock fallback); identical (config, seed,
workers) reproduce artifacts byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import report
from .baselines import (
    analytic_fptime_table,
    bm_fptime_cdf,
    bm_plain_mc_fptime_cdf,
    bm_plain_mc_passage_times,
    default_time_grid,
    sup_norm_error,
    whmc_bm_fptime_cdf,
)
from .engine import GridSpec
from .errors import ConfigError, WhmcError
from .estimators import (
    DiscountedOvershootIndicator,
    EstimateReport,
    FirstPassageTime,
    IndicatorCdf,
    LevelSchedule,
    fit_log2_slope,
    level_mse_study,
    mc_estimate,
    mlmc_estimate,
    mlmc_pilot,
    mlmc_plan,
    substream,
)
from .models import BetaFamily, BetaFamilyParams, BrownianMotion

_COORDS = ("time", "overshoot", "undershoot", "gap_to_max")


# ---------------------------------------------------------------------------
# config access

def _get(cfg: dict, path: str, required: bool = True, default=None):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(path, "missing required field")
            return default
        node = node[part]
    return node


def _number(cfg, path, required=True, default=None, positive=False):
    v = _get(cfg, path, required, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(path, "must be > 0")
    return float(v)


def _integer(cfg, path, required=True, default=None, minimum=None):
    v = _get(cfg, path, required, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return int(v)


def parse_model(cfg: dict):
    kind = _get(cfg, "model.type")
    if kind == "brownian":
        return BrownianMotion(
            drift=_number(cfg, "model.drift", required=False, default=0.0),
            volatility=_number(cfg, "model.volatility", required=False, default=1.0, positive=True),
        )
    if kind in ("beta", "beta_family"):
        try:
            params = BetaFamilyParams(
                c1=_number(cfg, "model.c1"),
                alpha1=_number(cfg, "model.alpha1", positive=True),
                beta1=_number(cfg, "model.beta1", positive=True),
                lambda1=_number(cfg, "model.lambda1", positive=True),
                c2=_number(cfg, "model.c2"),
                alpha2=_number(cfg, "model.alpha2", positive=True),
                beta2=_number(cfg, "model.beta2", positive=True),
                lambda2=_number(cfg, "model.lambda2", positive=True),
                sigma=_number(cfg, "model.sigma", required=False, default=0.0),
                a=_number(cfg, "model.a", required=False, default=0.0),
            )
        except WhmcError as exc:
            raise ConfigError("model", str(exc)) from exc
        return BetaFamily(params)
    raise ConfigError("model.type", f"unknown model type {kind!r}")


def parse_functional(cfg: dict):
    kind = _get(cfg, "functional.kind")
    u = _number(cfg, "functional.u", positive=True)
    t = _number(cfg, "functional.t", positive=True)
    if kind == "first_passage_time":
        return FirstPassageTime(), u, t
    if kind == "indicator_cdf":
        return IndicatorCdf(s=_number(cfg, "functional.s", positive=True)), u, t
    if kind in ("discounted_overshoot_indicator", "gerber_shiu"):
        return (
            DiscountedOvershootIndicator(
                q=_number(cfg, "functional.q", positive=True),
                y=_number(cfg, "functional.y", positive=True),
            ),
            u,
            t,
        )
    raise ConfigError("functional.kind", f"unknown functional kind {kind!r}")


def parse_rng(cfg: dict, args) -> tuple[int, int]:
    seed = args.seed if args.seed is not None else _integer(cfg, "rng.seed", minimum=0)
    workers = args.workers if args.workers is not None else _integer(
        cfg, "rng.workers", required=False, default=1, minimum=1
    )
    return seed, workers


def parse_output(cfg: dict, args) -> tuple[Path, str, bool]:
    path = args.out if args.out is not None else _get(cfg, "output.path")
    fmt = _get(cfg, "output.format", required=False)
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format", f"unknown format {fmt!r}")
    plot = bool(_get(cfg, "output.plot", required=False, default=True)) and not args.no_plot
    return Path(path), fmt, plot


# ---------------------------------------------------------------------------
# commands

def _report_payload(rep) -> dict:
    payload = {
        "value": rep.value,
        "std_error": rep.std_error,
        "ci95": list(rep.ci95),
        "samples": rep.samples,
        "steps_consumed": rep.steps_consumed,
    }
    if rep.levels is not None:
        payload["levels"] = [
            {
                "level": ls.level,
                "n": ls.n,
                "samples": ls.samples,
                "mean": ls.mean,
                "variance": ls.variance,
                "steps": ls.steps,
            }
            for ls in rep.levels
        ]
    return payload


def _write_report(rep, path, fmt) -> None:
    if fmt == "json":
        report.write_json(path, _report_payload(rep))
    else:
        report.write_csv(
            path,
            ["value", "std_error", "ci_lo", "ci_hi", "samples_total", "steps_consumed"],
            [[rep.value, rep.std_error, rep.ci95[0], rep.ci95[1], sum(rep.samples), rep.steps_consumed]],
        )


def _plain_estimate(cfg, functional, u, t, seed, workers):
    model = parse_model(cfg)
    if not isinstance(model, BrownianMotion):
        raise ConfigError("method.type", "the plain method requires a brownian model")
    if not isinstance(functional, (FirstPassageTime, IndicatorCdf)):
        raise ConfigError("functional.kind", "the plain method supports passage-time functionals only")
    h = _number(cfg, "method.h", positive=True)
    m = _integer(cfg, "method.m", minimum=2)
    times_parts = []
    crossed_parts = []
    sizes = [m // workers + (1 if w < m % workers else 0) for w in range(workers)]
    for w, m_w in enumerate(sizes):
        if m_w == 0:
            continue
        times, crossed = bm_plain_mc_passage_times(u, t, h, m_w, substream(seed, 0, w))
        times_parts.append(times)
        crossed_parts.append(crossed)
    times = np.concatenate(times_parts)
    crossed = np.concatenate(crossed_parts)
    if isinstance(functional, FirstPassageTime):
        vals = times
    else:
        vals = (crossed & (times <= functional.s)).astype(float)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(m))
    steps = int(np.floor(t / h + 1e-9)) * m
    return EstimateReport(
        value=mean,
        std_error=se,
        ci95=(mean - 1.96 * se, mean + 1.96 * se),
        samples=[m],
        steps_consumed=steps,
        levels=None,
    )


def cmd_estimate(cfg: dict, args) -> int:
    functional, u, t = parse_functional(cfg)
    seed, workers = parse_rng(cfg, args)
    out, fmt, _ = parse_output(cfg, args)
    method = _get(cfg, "method.type")
    trunc = _integer(cfg, "method.truncation_n", required=False, minimum=1)
    model = parse_model(cfg)
    if method == "plain":
        rep = _plain_estimate(cfg, functional, u, t, seed, workers)
    elif method == "whmc":
        n = _integer(cfg, "method.n", minimum=1)
        m = _integer(cfg, "method.m", minimum=2)
        rep = mc_estimate(model, functional, u, GridSpec(n=n, t=t), m, seed, workers=workers, truncation_n=trunc)
    elif method == "mlmc":
        n0 = _integer(cfg, "method.n0", minimum=1)
        m_list = _get(cfg, "method.m_per_level", required=False)
        if m_list is not None:
            if not isinstance(m_list, list) or not all(isinstance(x, int) and x >= 1 for x in m_list):
                raise ConfigError("method.m_per_level", "expected a list of positive integers")
            schedule = LevelSchedule(n0=n0, levels=len(m_list) - 1, m=m_list)
        else:
            target = _number(cfg, "method.target_stderr", positive=True)
            max_levels = _integer(cfg, "method.max_levels", required=False, default=6, minimum=1)
            pilot_m = _integer(cfg, "method.pilot_m", required=False, default=1000, minimum=2)
            means, variances, costs = mlmc_pilot(
                model, functional, u, t, n0, max_levels, seed, m_pilot=pilot_m,
                workers=workers, truncation_n=trunc,
            )
            schedule = mlmc_plan(variances, costs, target, n0=n0, level_means=means)
        rep = mlmc_estimate(model, functional, u, t, schedule, seed, workers=workers, truncation_n=trunc)
    else:
        raise ConfigError("method.type", f"unknown method {method!r}")
    _write_report(rep, out, fmt)
    print(f"value={rep.value!r} std_error={rep.std_error!r} -> {out}")
    return 0


def cmd_fptime_cdf(cfg: dict, args) -> int:
    model = parse_model(cfg)
    if model != BrownianMotion():
        raise ConfigError("model", "fptime-cdf compares against the standard-Brownian analytic cdf")
    u = _number(cfg, "cdf.u", positive=True)
    t = _number(cfg, "cdf.t", positive=True)
    n = _integer(cfg, "cdf.n", minimum=1)
    m = _integer(cfg, "cdf.m", minimum=1)
    points = _integer(cfg, "cdf.grid_points", required=False, default=200, minimum=1)
    h = _number(cfg, "cdf.h", required=False, positive=True)
    if h is None:
        h = t / (2.0 * n)
    seed, workers = parse_rng(cfg, args)
    out, fmt, plot = parse_output(cfg, args)

    grid = default_time_grid(t, points)
    analytic = analytic_fptime_table(u, t, points)
    whmc_tab = whmc_bm_fptime_cdf(u, t, n, m, substream(seed, 0, 0), grid=grid)
    plain_tab = bm_plain_mc_fptime_cdf(u, t, h, m, substream(seed, 1, 0), grid=grid)
    rows = [
        [s, a, w, p, abs(w - a), abs(p - a)]
        for s, a, w, p in zip(grid, analytic.values, whmc_tab.values, plain_tab.values)
    ]
    header = ["time", "analytic", "whmc", "plain", "whmc_abs_error", "plain_abs_error"]
    if fmt == "json":
        report.write_json(out, {"header": header, "rows": rows})
    else:
        report.write_csv(out, header, rows)
    if plot:
        report.render_cdf_figure(
            report.figure_path(out), grid, analytic.values, whmc_tab.values, plain_tab.values,
            title=f"passage cdf, u={u:g}",
        )
    print(
        f"sup-norm error: whmc={sup_norm_error(whmc_tab, analytic)!r} "
        f"plain={sup_norm_error(plain_tab, analytic)!r} -> {out}"
    )
    return 0


def cmd_rate_study(cfg: dict, args) -> int:
    model = parse_model(cfg)
    u = _number(cfg, "rate_study.u", positive=True)
    t = _number(cfg, "rate_study.t", positive=True)
    lo = _integer(cfg, "rate_study.level_min", minimum=1)
    hi = _integer(cfg, "rate_study.level_max", minimum=lo)
    m = _integer(cfg, "rate_study.m", minimum=1)
    trunc = _integer(cfg, "rate_study.truncation_n", required=False, minimum=1)
    seed, workers = parse_rng(cfg, args)
    out, fmt, plot = parse_output(cfg, args)

    rows = level_mse_study(model, u, t, range(lo, hi + 1), m, seed, workers=workers, truncation_n=trunc)
    levels = [r.level for r in rows]
    slopes = {
        k: (fit_log2_slope(levels, [r.mse[k] for r in rows]) if len(rows) >= 2 else None)
        for k in _COORDS
    }
    header = ["level", "n_fine", "n_coarse", "samples"]
    for k in _COORDS:
        header += [f"mse_{k}", f"se_{k}"]
    header += [f"slope_{k}" for k in _COORDS]
    out_rows = []
    for r in rows:
        row = [r.level, r.n_fine, r.n_coarse, r.samples]
        for k in _COORDS:
            row += [r.mse[k], r.se[k]]
        row += [slopes[k] for k in _COORDS]
        out_rows.append(row)
    if fmt == "json":
        report.write_json(out, {"header": header, "rows": out_rows})
    else:
        report.write_csv(out, header, out_rows)
    if plot:
        report.render_rate_figure(
            report.figure_path(out),
            levels,
            {k: [r.mse[k] for r in rows] for k in _COORDS},
            {k: (s if s is not None else float("nan")) for k, s in slopes.items()},
            title=f"consecutive-level MSE, u={u:g}, t={t:g}",
        )
    print(f"levels {lo}..{hi} -> {out}")
    return 0


def cmd_gerber_shiu(cfg: dict, args) -> int:
    model = parse_model(cfg)
    u = _number(cfg, "gerber_shiu.u", positive=True)
    y = _number(cfg, "gerber_shiu.y", positive=True)
    q = _number(cfg, "gerber_shiu.q", positive=True)
    t = _number(cfg, "gerber_shiu.t", positive=True)
    e_lo = _integer(cfg, "gerber_shiu.n_exp_min", minimum=1)
    e_hi = _integer(cfg, "gerber_shiu.n_exp_max", minimum=e_lo)
    m = _integer(cfg, "gerber_shiu.m", minimum=2)
    trunc = _integer(cfg, "gerber_shiu.truncation_n", required=False, minimum=1)
    seed, workers = parse_rng(cfg, args)
    out, fmt, plot = parse_output(cfg, args)

    functional = DiscountedOvershootIndicator(q=q, y=y)
    ns, values, ses, rows = [], [], [], []
    for exp in range(e_lo, e_hi + 1):
        n = 1 << exp
        rep = mc_estimate(model, functional, u, GridSpec(n=n, t=t), m, seed, workers=workers, truncation_n=trunc)
        ns.append(n)
        values.append(rep.value)
        ses.append(rep.std_error)
        rows.append([n, rep.value, rep.std_error, rep.ci95[0], rep.ci95[1], m, rep.steps_consumed])
    header = ["n", "value", "std_error", "ci_lo", "ci_hi", "samples", "steps_consumed"]
    if fmt == "json":
        report.write_json(out, {"header": header, "rows": rows})
    else:
        report.write_csv(out, header, rows)
    if plot:
        report.render_estimate_figure(
            report.figure_path(out), ns, values, ses,
            title=f"discounted overshoot indicator, u={u:g}, y={y:g}, q={q:g}",
        )
    print(f"n=2^{e_lo}..2^{e_hi} -> {out}")
    return 0


# ---------------------------------------------------------------------------

_COMMANDS = {
    "estimate": cmd_estimate,
    "fptime-cdf": cmd_fptime_cdf,
    "rate-study": cmd_rate_study,
    "gerber-shiu": cmd_gerber_shiu,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="whmc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override rng.seed")
        p.add_argument("--workers", type=int, default=None, help="override rng.workers")
        p.add_argument("--out", default=None, help="override output.path")
        p.add_argument("--no-plot", action="store_true", help="skip the companion figure")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config", "the configuration must be a JSON object")
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error at {exc}", file=sys.stderr)
        return 2
    except WhmcError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
