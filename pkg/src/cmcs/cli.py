"""
``cmcs`` command line.

Subcommands: ``mcs``, ``cpa``, ``simulate {power,rejection,region}`` and
``stress``. Statistical outcomes never change the exit status; input
errors exit with 2, other execution failures with 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .bootstrap import BootstrapPlan
from .core import InsufficientDataError, LossPanel, StateSeries
from .cpa import (
    CovEstimatorSpec,
    TwoStateDesign,
    dfc_select,
    dm_test,
    instrument,
    relative_to_baseline,
    statewise_t_test,
    wald_test,
)
from .io import (
    InputFormatError,
    read_es_horizon_csv,
    read_factor_csv,
    read_loss_csv,
    read_state_csv,
    write_es_horizon_csv,
    write_rows_csv,
    write_state_csv,
    write_text,
)
from .losses import find_stress_window, states_from_windows
from .mcs import McsConfig, cmcs_run, mcs_run
from .simlab import (
    FIG1_PRESET,
    REJECTION_PRESETS,
    rejection_region_grid,
    run_study_config,
    table_layout,
)
from .statsutil import RandomStream

EXIT_INPUT = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


def _envelope(command: str, args: argparse.Namespace, **extra: Any) -> dict[str, Any]:
    out = {
        "tool": "cmcs",
        "version": __version__,
        "command": command,
        "seed": getattr(args, "seed", None),
        "B": getattr(args, "boot_b", None),
        "block_len": getattr(args, "block_len", None),
        "alpha": getattr(args, "alpha", None),
    }
    out.update(extra)
    return out


def _emit_json(obj: dict[str, Any], out: str | None) -> None:
    write_text(json.dumps(obj, indent=2, default=_json_default) + "\n", out)


def _json_default(x: Any) -> Any:
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _load_inputs(args: argparse.Namespace) -> tuple[LossPanel, StateSeries | None]:
    panel = read_loss_csv(args.losses)
    if not args.states:
        return panel, None
    _, states = read_state_csv(args.states)
    if len(states) != panel.n:
        raise InputFormatError(
            args.states, None,
            f"{len(states)} state rows but the loss panel has {panel.n} rows",
        )
    return panel, states


def _cov_spec(args: argparse.Namespace) -> CovEstimatorSpec:
    if args.cov == "hac":
        return CovEstimatorSpec("truncated_hac", args.hac_lag)
    return CovEstimatorSpec("sample", 0)


# --------------------------------------------------------------------------

def cmd_mcs(args: argparse.Namespace) -> int:
    panel, states = _load_inputs(args)
    cfg = McsConfig(
        args.alpha, BootstrapPlan(args.boot_b, args.block_len, RandomStream(args.seed)),
        args.min_state_obs,
    )
    if states is None:
        results = {"unconditional": mcs_run(panel, cfg)}
    else:
        results = cmcs_run(panel, states, cfg)
    if args.format == "json":
        payload = {str(k): r.to_dict() for k, r in results.items()}
        key = "results" if states is None else "states"
        _emit_json(_envelope("mcs", args, n=panel.n, methods=list(panel.method_ids),
                             **{key: payload}), args.out)
        return 0
    rows = []
    for key, r in results.items():
        order = {rec["eliminated"]: k + 1 for k, rec in enumerate(r.trace)}
        for mid in r.method_ids:
            rows.append({
                "state": key, "method": mid, "surviving": mid in r.surviving,
                "elimination_step": order.get(mid), "p_mcs": r.mcs_p_values[mid],
                "n": r.n, "block_len": r.block_len, "B": r.B, "seed": r.seed,
                "alpha": r.alpha, "version": __version__, "reason": r.reason,
            })
    write_text(write_rows_csv(rows), args.out)
    return 0


def cmd_cpa(args: argparse.Namespace) -> int:
    panel, states = _load_inputs(args)
    spec = _cov_spec(args)
    if spec.kind == "truncated_hac" and spec.lag >= panel.n:
        raise InputFormatError(args.losses, None,
                               f"HAC lag {spec.lag} must be smaller than n={panel.n}")
    if states is None:
        states = StateSeries(("all",) * panel.n, ("all",))
    report: dict[str, Any] = {"n": panel.n, "states": [str(s) for s in states.alphabet],
                              "cov": {"kind": spec.kind, "lag": spec.lag}}
    if panel.m == 2 and args.baseline is None:
        ids = panel.method_ids
        d = panel.losses[:, 0] - panel.losses[:, 1]
        wald = wald_test(instrument(d, states), spec)
        report["methods"] = list(ids)
        report["wald"] = {"statistic": wald.statistic, "df": wald.df,
                          "p_value": wald.p_value, "rejects": wald.rejects(args.alpha)}
        t_out = {}
        for s in states.alphabet:
            try:
                t = statewise_t_test(d, states, s)
                t_out[str(s)] = {"t": t.t, "p_value": t.p_value, "n": t.n, "mean": t.mean,
                                 "rejects": t.rejects(args.alpha)}
            except InsufficientDataError as exc:
                t_out[str(s)] = {"reason": str(exc)}
        report["statewise_t"] = t_out
        sel = dfc_select(d, states, wald, args.alpha, ids)
        report["selection"] = {str(s): list(v) for s, v in sel.selected.items()}
        report["conditional_means"] = {str(s): v for s, v in sel.conditional_means.items()}
        report["ties"] = [str(s) for s in sel.ties]
        dm_t, dm_p = dm_test(d, spec)
        report["dm"] = {"t": dm_t, "t_squared": dm_t * dm_t, "p_value": dm_p}
    else:
        if args.baseline is None:
            raise UsageError("--baseline is required with more than two methods")
        if args.baseline not in panel.method_ids:
            raise UsageError(f"unknown baseline method {args.baseline!r}")
        d = relative_to_baseline(panel, args.baseline)
        wald = wald_test(instrument(d, states), spec)
        report["baseline"] = args.baseline
        report["methods"] = list(panel.method_ids)
        report["wald"] = {"statistic": wald.statistic, "df": wald.df,
                          "p_value": wald.p_value, "rejects": wald.rejects(args.alpha)}
    if args.format == "json":
        _emit_json(_envelope("cpa", args, **report), args.out)
        return 0
    rows = [{"test": "wald", "state": "", "statistic": report["wald"]["statistic"],
             "p_value": report["wald"]["p_value"], "rejects": report["wald"]["rejects"]}]
    for s, t in report.get("statewise_t", {}).items():
        rows.append({"test": "statewise_t", "state": s, "statistic": t.get("t"),
                     "p_value": t.get("p_value"), "rejects": t.get("rejects")})
    if "dm" in report:
        rows.append({"test": "dm", "state": "", "statistic": report["dm"]["t"],
                     "p_value": report["dm"]["p_value"],
                     "rejects": report["dm"]["p_value"] < args.alpha})
    for r in rows:
        r.update(alpha=args.alpha, version=__version__)
    write_text(write_rows_csv(rows), args.out)
    return 0


def _load_config(path: str) -> dict[str, Any]:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise InputFormatError(path, None, f"cannot open file ({exc.strerror})") from None
    if p.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            return tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise InputFormatError(path, None, str(exc)) from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputFormatError(path, exc.lineno, exc.msg) from None


def cmd_simulate(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind == "region":
        design = TwoStateDesign(args.delta1, args.v, args.p, args.sigma2)
        alpha = 0.05 if args.alpha is None else args.alpha
        grid = rejection_region_grid(design, args.n, alpha,
                                     tuple(args.d1_bounds), tuple(args.d2_bounds),
                                     args.resolution)
        rows = grid.rows()
        if args.format == "json":
            _emit_json(_envelope("simulate region", args, alpha=alpha, design=asdict(design),
                                 n=args.n, cells=rows), args.out)
        else:
            write_text(write_rows_csv(rows), args.out)
        return 0

    if args.config:
        config = _load_config(args.config)
        config.setdefault("kind", kind)
        if config["kind"] != kind:
            raise UsageError(f"config describes a {config['kind']!r} study, not {kind!r}")
    elif kind == "rejection":
        if args.table is None:
            raise UsageError("simulate rejection needs --table {1,2,3,4} or --config")
        config = {"kind": kind, "preset": f"table{args.table}"}
    else:
        if args.preset not in (None, "fig1"):
            raise UsageError(f"unknown preset {args.preset!r}")
        if args.preset is None:
            raise UsageError("simulate power needs --preset fig1 or --config")
        config = {"kind": kind, **FIG1_PRESET}
    if args.seed is not None:
        config["seed"] = args.seed
    if args.reps is not None:
        config["reps"] = args.reps
    if args.alpha is not None:
        config["alpha"] = args.alpha
    if kind == "power" and args.boot_b is not None:
        config["B"] = args.boot_b
    if kind == "power" and args.block_len is not None:
        config["block_len"] = args.block_len
    result = run_study_config(config, workers=args.workers)
    if args.format == "json":
        _emit_json({"tool": "cmcs", "version": __version__, "command": f"simulate {kind}",
                    "config": result.config, "cells": result.rows()}, args.out)
    elif args.format == "table":
        if kind != "rejection" or args.table is None:
            raise UsageError("--format table is available for the rejection presets only")
        write_text(table_layout(result, args.table) + "\n", args.out)
    else:
        rows = [{**r, "seed": result.config["seed"], "version": __version__}
                for r in result.rows()]
        write_text(write_rows_csv(rows), args.out)
    return 0


def cmd_stress(args: argparse.Namespace) -> int:
    report: dict[str, Any] = {}
    if args.factor:
        windows, times, n = {}, None, None
        for spec in args.factor:
            name, _, path = spec.rpartition("=")
            name = name or Path(path).stem
            t, x = read_factor_csv(path)
            if n is not None and len(x) != n:
                raise InputFormatError(path, None, f"{len(x)} rows, expected {n}")
            times, n = t, len(x)
            try:
                windows[name] = find_stress_window(x, args.win, args.how)
            except ValueError as exc:
                raise InputFormatError(path, None, str(exc)) from None
        report["windows"] = {
            k: {"start": w.start, "stop": w.stop, "length": w.length,
                "first_time": times[w.start], "last_time": times[w.stop - 1]}
            for k, w in windows.items()
        }
        states = states_from_windows(windows, n, args.baseline_label)
        report["state_counts"] = {str(s): int(np.sum(states.codes() == k))
                                  for k, s in enumerate(states.alphabet)}
        if args.states_out:
            write_state_csv(args.states_out, times, states)
            report["states_file"] = args.states_out
    if args.es:
        rows = read_es_horizon_csv(args.es, args.T)
        if args.format == "csv":
            write_text(write_es_horizon_csv(rows), args.out)
            return 0
        report["es_bcbs"] = {r.asset: r.es_bcbs for r in rows}
    if not args.factor and not args.es:
        raise UsageError("stress needs --factor and/or --es")
    if args.format == "csv":
        rows = [{"regime": k, **v} for k, v in report["windows"].items()]
        write_text(write_rows_csv(rows), args.out)
    else:
        _emit_json({"tool": "cmcs", "version": __version__, "command": "stress",
                    "win": args.win, "how": args.how, "T": args.T, **report}, args.out)
    return 0


# --------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _alpha(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmcs", description=__doc__.strip().splitlines()[0])
    ap.add_argument("--version", action="version", version=f"cmcs {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common_out(p: argparse.ArgumentParser, formats=("json", "csv"), default="json"):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, default=default)

    p = sub.add_parser("mcs", help="(conditional) method confidence set")
    p.add_argument("--losses", required=True, help="loss panel CSV")
    p.add_argument("--states", help="state series CSV; omit for the unconditional MCS")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--boot-b", type=_positive_int, default=1000)
    p.add_argument("--block-len", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-state-obs", type=int, default=10)
    common_out(p)
    p.set_defaults(func=cmd_mcs)

    p = sub.add_parser("cpa", help="Wald conditional predictive ability test")
    p.add_argument("--losses", required=True)
    p.add_argument("--states")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--cov", choices=("sample", "hac"), default="sample")
    p.add_argument("--hac-lag", type=int, default=0)
    p.add_argument("--baseline", help="baseline method when comparing more than two")
    p.add_argument("--seed", type=int, default=None)
    common_out(p)
    p.set_defaults(func=cmd_cpa)

    p = sub.add_parser("simulate", help="Monte Carlo studies")
    p.add_argument("kind", choices=("power", "rejection", "region"))
    p.add_argument("--table", type=int, choices=sorted(int(k[-1]) for k in REJECTION_PRESETS))
    p.add_argument("--preset")
    p.add_argument("--config", help="study config file (.json or .toml)")
    p.add_argument("--reps", type=_positive_int)
    p.add_argument("--alpha", type=_alpha)
    p.add_argument("--boot-b", type=_positive_int)
    p.add_argument("--block-len", type=_positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--delta1", type=float, default=-0.3)
    p.add_argument("--v", type=float, default=0.0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--sigma2", type=float, default=4.0,
                   help="variance of the loss differential (default 4, the table scale)")
    p.add_argument("--n", type=float, default=500)
    p.add_argument("--d1-bounds", type=float, nargs=2, default=(-0.6, 0.6))
    p.add_argument("--d2-bounds", type=float, nargs=2, default=(-0.6, 0.6))
    p.add_argument("--resolution", type=int, default=121)
    common_out(p, ("json", "csv", "table"), "csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stress", help="stress windows and ES aggregation")
    p.add_argument("--factor", action="append",
                   help="risk-factor CSV, optionally NAME=PATH; repeatable")
    p.add_argument("--win", type=_positive_int, default=252)
    p.add_argument("--how", choices=("mean", "max"), default="mean")
    p.add_argument("--baseline-label", default="calm")
    p.add_argument("--states-out", help="write the derived state series CSV here")
    p.add_argument("--es", help="ES-by-horizon CSV")
    p.add_argument("--T", type=float, default=10.0, help="base horizon of the ES forecasts")
    common_out(p)
    p.set_defaults(func=cmd_stress)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (InputFormatError, InsufficientDataError, KeyError, ValueError) as exc:
        print(f"cmcs: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"cmcs: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
