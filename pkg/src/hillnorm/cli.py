"""Command-line front end.

Exit codes: 0 success, 2 validation or input error, 3 experiment failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import CliConfig, ConfigError, load_config, sanitize
from .estimators import hill, hill_confidence_interval, order_statistics, weissman_quantile
from .functionals import discrete_norm, error_rate_bound, norm_order, tradeoff_required_m
from .harness import ExperimentFailure, ExperimentResult, run_experiment, sweep
from .paths import ProductSpec, read_path_csv, simulate_product, write_path_csv
from .streams import RandomStream

WORKERS_ENV = "HILLNORM_WORKERS"
EXIT_OK, EXIT_VALIDATION, EXIT_FAILURE = 0, 2, 3

TABLE_COLUMNS = ("rep_index", "gamma_hat", "gamma_hat_oracle", "x_hat", "x_hat_oracle",
                 "c_n", "std_gamma_err", "std_quant_err", "failed")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_json(obj, out: str | None) -> None:
    text = json.dumps(sanitize(obj), indent=2, sort_keys=False) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}") from exc


def _open_out(path: str):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from exc


def write_table(result: ExperimentResult, path: str, extra: dict | None = None) -> None:
    with _open_out(path) as fh:
        _write_table_rows(csv.writer(fh, lineterminator="\n"), [result], extra and [extra])


def _write_table_rows(writer, results, extras=None) -> None:
    prefix = list(extras[0]) if extras else []
    writer.writerow(prefix + list(TABLE_COLUMNS))
    for j, result in enumerate(results):
        pre = [_fmt(v) for v in extras[j].values()] if extras else []
        for r in result.table:
            writer.writerow(pre + [_fmt(getattr(r, c)) for c in TABLE_COLUMNS])


def _workers(args, cfg: CliConfig | None) -> int:
    if args.workers is not None:
        w = args.workers
    elif os.environ.get(WORKERS_ENV):
        try:
            w = int(os.environ[WORKERS_ENV])
        except ValueError as exc:
            raise CliError(f"{WORKERS_ENV} must be an integer") from exc
    else:
        w = cfg.workers if cfg else 1
    if w < 1:
        raise CliError("worker count must be >= 1")
    return w


def _envelope(cfg: CliConfig, exp_cfg, workers: int) -> dict:
    return {"version": __version__, "master_seed": exp_cfg.master_seed, "workers": workers,
            "config": exp_cfg.to_dict(), "config_file": cfg.raw}


# --- subcommands ----------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not isinstance(cfg.source, ProductSpec):
        raise CliError("simulate needs a product-mode [source]")
    seed = args.seed if args.seed is not None else cfg.master_seed
    matrix = simulate_product(cfg.source, cfg.m, cfg.n, RandomStream(seed).child("simulate"))
    out = args.out or cfg.output.get("paths")
    if not out:
        raise CliError("no output path: pass --out or set [output] paths")
    with _open_out(out) as fh:
        write_path_csv(matrix, fh)
    meta = {"version": __version__, "master_seed": seed, "m": cfg.m, "n": cfg.n,
            "source": cfg.source.to_dict(), "config_file": cfg.raw}
    _write_json(meta, out + ".json")
    return EXIT_OK


def _read_values(path: str) -> np.ndarray:
    values = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 1:
                raise CliError(f"{path}: line {lineno}: expected one value, got {len(row)}")
            try:
                values.append(float(row[0]))
            except ValueError:
                if lineno == 1 and not values:
                    continue  # header
                raise CliError(f"{path}: line {lineno}: not a number: {row[0]!r}") from None
    return np.array(values)


def estimate_payload(values, k: int, tail_prob: float | None, level: float) -> dict:
    ordered = order_statistics(values)
    h = hill(ordered, k)
    lo, hi = hill_confidence_interval(h, level)
    out = {"n": h.n, "k": h.k, "gamma_hat": h.gamma_hat, "threshold": h.threshold,
           "ci": [lo, hi], "ci_level": level}
    if tail_prob is not None:
        q = weissman_quantile(ordered, k, tail_prob, h.gamma_hat)
        out.update(tail_prob=tail_prob, x_hat=q.x_hat, d_n=q.d_n)
    return out


def cmd_estimate(args) -> int:
    if (args.values is None) == (args.paths is None):
        raise CliError("pass exactly one of --values or --paths")
    if args.values is not None:
        values = _read_values(args.values)
        source = {"values": args.values}
    else:
        if args.norm_order is None:
            raise CliError("--paths needs --norm-order")
        try:
            matrix = read_path_csv(args.paths)
        except OSError as exc:
            raise CliError(f"cannot read {args.paths}: {exc.strerror}") from exc
        except ValueError as exc:
            raise CliError(f"{args.paths}: {exc}") from exc
        order = norm_order(args.norm_order)
        values = np.atleast_1d(discrete_norm(matrix.values, order))
        source = {"paths": args.paths, "norm_order": "inf" if math.isinf(order) else order}
    try:
        payload = estimate_payload(values, args.k, args.tail_prob, args.level)
    except (ValueError, TypeError) as exc:
        raise CliError(str(exc)) from exc
    payload["input"] = source
    payload["version"] = __version__
    _write_json(payload, args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    exp_cfg = cfg.experiment_config(args.seed)
    workers = _workers(args, cfg)
    table_path = args.table or cfg.output.get("table")
    try:
        result = run_experiment(exp_cfg, workers)
    except ExperimentFailure as exc:
        if exc.result is not None and table_path:
            write_table(exc.result, table_path)
        raise CliError(str(exc), EXIT_FAILURE) from exc
    payload = {**_envelope(cfg, exp_cfg, workers), "summary": result.summary.to_dict(),
               "warnings": result.warnings}
    if table_path:
        write_table(result, table_path)
    _write_json(payload, args.out or cfg.output.get("summary"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    exp_cfg = cfg.experiment_config(args.seed)
    workers = _workers(args, cfg)
    axis = cfg.sweep.get("axis")
    values = cfg.sweep.get("values")
    if axis is None or values is None:
        raise CliError("[sweep] needs axis and values")
    cells = sweep(exp_cfg, axis, values, workers,
                  shared_realizations=cfg.sweep.get("shared_realizations", False))
    payload = {**_envelope(cfg, exp_cfg, workers), "axis": axis, "cells": [
        {"value": c.value,
         "config": c.config.to_dict() if c.config else None,
         "summary": c.result.summary.to_dict() if c.result else None,
         "warnings": c.result.warnings if c.result else [],
         "error": c.error} for c in cells]}
    table_path = args.table or cfg.output.get("table")
    if table_path:
        done = [c for c in cells if c.result is not None]
        with _open_out(table_path) as fh:
            _write_table_rows(csv.writer(fh, lineterminator="\n"), [c.result for c in done],
                              [{axis: c.value} for c in done] if done else None)
    _write_json(payload, args.out or cfg.output.get("summary"))
    return EXIT_FAILURE if any(c.error for c in cells) and all(c.result is None for c in cells) \
        else EXIT_OK


def check_rates_payload(n: int, lambda_exp: float, gamma: float, eta: float, eps_prime: float,
                        m: int, gamma_prime: float | None = None,
                        threshold: float = 0.1) -> dict:
    required = float(format(tradeoff_required_m(n, lambda_exp, gamma, eta, eps_prime), ".12g"))
    k = max(1, int(math.floor(n**lambda_exp * (1 + 1e-12))))
    bound = error_rate_bound(eta, m, n, k, gamma, gamma_prime if gamma_prime is not None else gamma,
                             threshold)
    return {"required_m": required, "satisfied": m >= required, "bound_value": bound.value,
            "sqrt_k_bound": bound.scaled, "negligible": bound.negligible, "k": k,
            "inputs": {"n": n, "lambda_exp": lambda_exp, "gamma": gamma, "eta": eta,
                       "eps_prime": eps_prime, "m": m}}


def cmd_check_rates(args) -> int:
    try:
        payload = check_rates_payload(args.n, args.lambda_exp, args.gamma, args.eta,
                                      args.eps_prime, args.m, args.gamma_prime)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    payload["version"] = __version__
    _write_json(payload, args.out)
    return EXIT_OK


# --- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hillnorm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="TOML configuration file")
            sp.add_argument("--seed", type=int, help="master seed (overrides the config)")
            sp.add_argument("--workers", type=int,
                            help=f"worker threads (overrides ${WORKERS_ENV} and the config)")
        sp.add_argument("--out", help="output path (default: stdout / config)")

    sp = sub.add_parser("simulate", help="write a path-matrix CSV")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("estimate", help="Hill and Weissman estimates from data")
    common(sp, config=False)
    sp.add_argument("--values", help="CSV with one value per line")
    sp.add_argument("--paths", help="path-matrix CSV (see simulate)")
    sp.add_argument("--norm-order", help="norm order for --paths: a number >= 1 or 'inf'")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tail-prob", type=float)
    sp.add_argument("--level", type=float, default=0.95)
    sp.set_defaults(func=cmd_estimate)

    for name, fn in (("experiment", cmd_experiment), ("sweep", cmd_sweep)):
        sp = sub.add_parser(name, help=f"run a Monte Carlo {name}")
        common(sp)
        sp.add_argument("--table", help="per-replication CSV path")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("check-rates", help="discretisation trade-off calculator")
    common(sp, config=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--lambda-exp", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--gamma-prime", type=float)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--eps-prime", type=float, default=0.05)
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(func=cmd_check_rates)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"hillnorm {args.command}: error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"hillnorm {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
