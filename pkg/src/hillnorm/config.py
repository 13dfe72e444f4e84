"""TOML run configuration with strict key checking.

Unknown keys are rejected: a silently ignored typo in a Monte Carlo design
produces plausible but wrong numbers.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .harness import ConfigError, ExperimentConfig, KRule, TailProbRule
from .paths import ProcessSpec, ProductSpec
from .tail_models import TailModel, lambda_limit

_TOP = {"experiment", "source", "sweep", "output"}
_EXPERIMENT = {"n", "m", "m_oracle", "replications", "master_seed", "norm_order", "true_gamma",
               "true_rho", "lambda_limit", "ci_level", "negligible_threshold",
               "reference_paths", "workers", "k_rule", "tail_prob_rule"}
_SWEEP = {"axis", "values", "shared_realizations"}
_OUTPUT = {"summary", "table", "paths"}


def _check_keys(section: dict, allowed: set, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(unknown)}")


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return section[key]


def parse_model(d: dict, where: str) -> TailModel:
    family = _require(d, "family", where)
    try:
        if family == "pareto":
            _check_keys(d, {"family", "gamma", "scale"}, where)
            return TailModel.pareto(_require(d, "gamma", where), d.get("scale", 1.0))
        if family == "frechet":
            _check_keys(d, {"family", "gamma", "scale"}, where)
            return TailModel.frechet(_require(d, "gamma", where), d.get("scale", 1.0))
        if family == "burr":
            _check_keys(d, {"family", "tau", "lambda_shape", "scale", "gamma", "rho"}, where)
            return TailModel("burr", d.get("gamma"), rho=d.get("rho"),
                             tau=_require(d, "tau", where),
                             lambda_shape=_require(d, "lambda_shape", where),
                             scale=d.get("scale", 1.0))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{where}]: {exc}") from exc
    raise ConfigError(f"[{where}]: unknown family {family!r}")


def parse_driver(d: dict, where: str = "source.driver") -> ProcessSpec:
    _check_keys(d, {"kind", "hurst", "value", "eps_prime", "method"}, where)
    try:
        return ProcessSpec(_require(d, "kind", where), hurst=d.get("hurst"),
                           value=d.get("value", 0.0), eps_prime=d.get("eps_prime", 0.05),
                           method=d.get("method", "circulant"))
    except ValueError as exc:
        raise ConfigError(f"[{where}]: {exc}") from exc


def parse_source(d: dict) -> TailModel | ProductSpec:
    mode = _require(d, "mode", "source")
    if mode == "direct":
        _check_keys(d, {"mode", "model"}, "source")
        return parse_model(_require(d, "model", "source"), "source.model")
    if mode == "product":
        _check_keys(d, {"mode", "multiplier", "driver"}, "source")
        mult = _require(d, "multiplier", "source")
        if "value" in mult:
            _check_keys(mult, {"value"}, "source.multiplier")
            multiplier = mult["value"]
        else:
            multiplier = parse_model(mult, "source.multiplier")
        try:
            return ProductSpec(multiplier, parse_driver(_require(d, "driver", "source")))
        except ValueError as exc:
            raise ConfigError(f"[source]: {exc}") from exc
    raise ConfigError(f"[source]: unknown mode {mode!r}")


def _parse_k_rule(d: dict) -> KRule:
    _check_keys(d, {"kind", "k", "exponent"}, "experiment.k_rule")
    return KRule(_require(d, "kind", "experiment.k_rule"), k=d.get("k"), exponent=d.get("exponent"))


def _parse_tail_rule(d: dict) -> TailProbRule:
    _check_keys(d, {"kind", "value", "c"}, "experiment.tail_prob_rule")
    return TailProbRule(d.get("kind", "one_over_n"), value=d.get("value"), c=d.get("c"))


@dataclass
class CliConfig:
    raw: dict
    source: TailModel | ProductSpec
    experiment: dict
    workers: int = 1
    sweep: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.experiment["n"]

    @property
    def m(self) -> int:
        return self.experiment.get("m", 64)

    @property
    def master_seed(self) -> int:
        return self.experiment.get("master_seed", 0)

    def experiment_config(self, seed: int | None = None) -> ExperimentConfig:
        e = dict(self.experiment)
        e.pop("workers", None)
        if seed is not None:
            e["master_seed"] = seed
        try:
            e["k_rule"] = _parse_k_rule(_require(e, "k_rule", "experiment"))
            e["tail_prob_rule"] = _parse_tail_rule(e.get("tail_prob_rule", {}))
            if e.get("true_rho") == "unknown":
                e["true_rho"] = None
            if e.get("lambda_limit") == "auto":
                if not isinstance(self.source, TailModel):
                    raise ConfigError("lambda_limit = 'auto' needs a direct-mode model")
                n = _require(e, "n", "experiment")
                e["lambda_limit"] = lambda_limit(self.source, n, e["k_rule"].k_for(n))
            return ExperimentConfig(self.source, **e)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[experiment]: {exc}") from exc


def parse_config(raw: dict) -> CliConfig:
    _check_keys(raw, _TOP, "top level")
    exp = raw.get("experiment", {})
    _check_keys(exp, _EXPERIMENT, "experiment")
    sweep = raw.get("sweep", {})
    _check_keys(sweep, _SWEEP, "sweep")
    output = raw.get("output", {})
    _check_keys(output, _OUTPUT, "output")
    if "n" not in exp:
        raise ConfigError("missing key 'n' in [experiment]")
    for key in ("n", "m", "m_oracle", "replications", "workers", "reference_paths"):
        v = exp.get(key)
        if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
            raise ConfigError(f"[experiment] {key} must be an integer, got {v!r}")
    if exp["n"] < 1:
        raise ConfigError(f"[experiment] n must be >= 1, got {exp['n']}")
    workers = exp.get("workers", 1)
    if workers < 1:
        raise ConfigError("[experiment] workers must be >= 1")
    source = parse_source(_require(raw, "source", "top level"))
    return CliConfig(raw=raw, source=source, experiment=exp, workers=workers,
                     sweep=sweep, output=output)


def load_config(path: str | Path) -> CliConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw)


def sanitize(obj):
    """Round floats to 12 significant digits; NaN becomes null, infinities strings."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return sanitize(obj.item())
    return obj
