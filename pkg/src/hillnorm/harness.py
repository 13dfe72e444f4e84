"""Reproducible Monte Carlo experiments for Hill and Weissman estimation on
discretised norm functionals.

Each replication draws from ``RandomStream(master_seed).child("replication", r)``
and is therefore fully determined by ``(master_seed, r)``.  Aggregation always
runs over the table in replication order, so summaries do not depend on the
worker count.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .estimators import (LimitLaw, hill, hill_confidence_interval, normal_cdf,
                         order_statistics, weissman_quantile)
from .functionals import INF, discrete_norm, downsample, norm_order
from .paths import ProductSpec, iter_product_blocks
from .streams import RandomStream
from .tail_models import TailModel, sample, tail_quantile

FAILURE_CEILING = 0.1
LOG4 = math.log(4.0)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ExperimentFailure(RuntimeError):
    """Too many replications failed for the summary to be trusted."""

    def __init__(self, message: str, result: ExperimentResult | None = None):
        super().__init__(message)
        self.result = result


# --- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class KRule:
    """``fixed``: a constant ``k``; ``power``: ``k = floor(n^exponent)``."""

    kind: str
    k: int | None = None
    exponent: float | None = None

    def __post_init__(self):
        if self.kind == "fixed":
            if self.k is None or int(self.k) != self.k:
                raise ConfigError(f"fixed k rule needs an integer k, got {self.k!r}")
            object.__setattr__(self, "k", int(self.k))
        elif self.kind == "power":
            if self.exponent is None or not 0.0 < self.exponent < 1.0:
                raise ConfigError(f"power k rule needs an exponent in (0, 1), got {self.exponent!r}")
        else:
            raise ConfigError(f"unknown k rule {self.kind!r}")

    @classmethod
    def fixed(cls, k: int) -> KRule:
        return cls("fixed", k=k)

    @classmethod
    def power(cls, exponent: float) -> KRule:
        return cls("power", exponent=exponent)

    def k_for(self, n: int) -> int:
        if self.kind == "fixed":
            return self.k
        # the small offset guards floor() against n**exponent landing just below an integer
        return int(math.floor(n**self.exponent * (1 + 1e-12)))

    def to_dict(self) -> dict:
        return {"kind": "fixed", "k": self.k} if self.kind == "fixed" else {
            "kind": "power", "exponent": self.exponent}


@dataclass(frozen=True)
class TailProbRule:
    """``fixed``: constant ``p``; ``one_over_n``: ``p = 1/n``; ``c_over_n``: ``p = c/n``."""

    kind: str = "one_over_n"
    value: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind == "fixed":
            if self.value is None or not 0.0 < self.value < 1.0:
                raise ConfigError(f"fixed tail probability must lie in (0, 1), got {self.value!r}")
        elif self.kind == "c_over_n":
            if self.c is None or not self.c > 0:
                raise ConfigError(f"c_over_n needs c > 0, got {self.c!r}")
        elif self.kind != "one_over_n":
            raise ConfigError(f"unknown tail probability rule {self.kind!r}")

    def tail_prob_for(self, n: int) -> float:
        if self.kind == "fixed":
            return self.value
        if self.kind == "one_over_n":
            return 1.0 / n
        return self.c / n

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "fixed":
            d["value"] = self.value
        elif self.kind == "c_over_n":
            d["c"] = self.c
        return d


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo design.

    ``source`` is either a :class:`TailModel` (direct mode: the functional
    values are sampled from it, no discretisation) or a :class:`ProductSpec`
    whose paths are simulated on ``m_oracle`` points and restricted to ``m``.
    """

    source: TailModel | ProductSpec
    n: int
    k_rule: KRule
    replications: int = 100
    master_seed: int = 0
    norm_order: float = INF
    m: int = 64
    m_oracle: int = 4096
    tail_prob_rule: TailProbRule = field(default_factory=TailProbRule)
    true_gamma: float | None = None
    true_rho: float | None = None
    lambda_limit: float = 0.0
    ci_level: float = 0.95
    negligible_threshold: float = 0.1
    reference_paths: int = 4000

    def __post_init__(self):
        object.__setattr__(self, "norm_order", norm_order(self.norm_order))
        if not isinstance(self.source, (TailModel, ProductSpec)):
            raise ConfigError("source must be a TailModel or a ProductSpec")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        k = self.k
        if not 1 <= k <= self.n - 1:
            raise ConfigError(f"k rule gives k = {k}; need 1 <= k <= n-1 = {self.n - 1}")
        if not self.direct:
            if self.m < 2 or self.m_oracle < 2:
                raise ConfigError("grid sizes must be >= 2")
            if self.m_oracle % self.m:
                raise ConfigError(f"m_oracle = {self.m_oracle} is not a multiple of m = {self.m}")
        if self.true_gamma is None:
            src = self.source if self.direct else self.source.multiplier
            if not isinstance(src, TailModel):
                raise ConfigError("true_gamma is required with a forced multiplier")
            object.__setattr__(self, "true_gamma", src.gamma)
        if self.true_rho is None and self.direct:
            object.__setattr__(self, "true_rho", self.source.rho)
        if not self.true_gamma > 0:
            raise ConfigError(f"true_gamma must be positive, got {self.true_gamma}")
        if self.true_rho is not None and self.true_rho > 0:
            raise ConfigError(f"true_rho must be non-positive, got {self.true_rho}")
        if self.lambda_limit != 0 and self.true_rho is None:
            raise ConfigError("a non-zero lambda_limit needs a known true_rho")
        if not 0.0 < self.ci_level < 1.0:
            raise ConfigError(f"ci_level must lie in (0, 1), got {self.ci_level}")

    @property
    def direct(self) -> bool:
        return isinstance(self.source, TailModel)

    @property
    def k(self) -> int:
        return self.k_rule.k_for(self.n)

    @property
    def tail_prob(self) -> float:
        return self.tail_prob_rule.tail_prob_for(self.n)

    @property
    def limit(self) -> LimitLaw:
        """Law of the standardised errors ``sqrt(k)(gamma_hat - gamma)/gamma``."""
        rho = self.true_rho if self.true_rho is not None else 0.0
        return LimitLaw(lam=self.lambda_limit / self.true_gamma, rho=rho, gamma=1.0)

    def lint(self) -> list[str]:
        """Warnings about designs outside the asymptotic regime of the limit theorems."""
        out = []
        k, np_ = self.k, self.n * self.tail_prob
        if np_ >= k:
            out.append(f"n*tail_prob = {np_:g} >= k = {k}: extrapolation condition np = o(k) violated")
        if np_ > 0 and math.log(np_) >= math.sqrt(k):
            out.append(f"log(n*tail_prob) = {math.log(np_):g} >= sqrt(k): condition log(np) = o(sqrt(k)) violated")
        if self.replications < 100:
            out.append(f"B = {self.replications} < 100: KS p-values rely on the asymptotic Kolmogorov law")
        if not self.direct and self.m_oracle < 64 * self.m:
            out.append(f"m_oracle = {self.m_oracle} < 64*m = {64 * self.m}: oracle gap is not negligible")
        return out

    def to_dict(self) -> dict:
        src = ({"mode": "direct", "model": self.source.to_dict()} if self.direct
               else {"mode": "product", **self.source.to_dict()})
        return {
            "source": src,
            "n": self.n,
            "m": None if self.direct else self.m,
            "m_oracle": None if self.direct else self.m_oracle,
            "norm_order": "inf" if self.norm_order == INF else self.norm_order,
            "k_rule": self.k_rule.to_dict(),
            "k": self.k,
            "tail_prob_rule": self.tail_prob_rule.to_dict(),
            "tail_prob": self.tail_prob,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "true_gamma": self.true_gamma,
            "true_rho": self.true_rho if self.true_rho is not None else "unknown",
            "lambda_limit": self.lambda_limit,
            "ci_level": self.ci_level,
            "negligible_threshold": self.negligible_threshold,
            "reference_paths": self.reference_paths,
        }


# --- Kolmogorov-Smirnov -------------------------------------------------------

@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float


def kolmogorov_sf(x: float, terms: int = 100) -> float:
    """``P(K > x)`` for the Kolmogorov distribution, truncated alternating series."""
    if x <= 0.05:
        # the series has not converged here; the true value is 1 to 1e-100
        return 1.0
    j = np.arange(1, terms + 1)
    s = 2.0 * np.sum((-1.0) ** (j - 1) * np.exp(-2.0 * j**2 * x * x))
    return float(min(1.0, max(0.0, s)))


def ks_test(samples: Sequence[float], reference: LimitLaw) -> KSResult:
    """One-sample KS test of ``samples`` against the normal law ``reference``."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("ks_test needs at least one sample")
    if not reference.variance > 0:
        raise ValueError("reference variance must be positive")
    b = x.size
    cdf = np.array([normal_cdf(v) for v in (x - reference.mean) / reference.sd])
    i = np.arange(1, b + 1)
    d = float(max(np.max(i / b - cdf), np.max(cdf - (i - 1) / b)))
    return KSResult(d, kolmogorov_sf(math.sqrt(b) * d))


# --- replications ------------------------------------------------------------

@dataclass(frozen=True)
class ReplicationResult:
    """Per-replication record; estimator fields are NaN when ``failed``.

    ``c_n_threshold`` divides the maximal error by the oracle threshold
    ``X_{n-k,n}``; it is the ``K`` of the order-statistic perturbation bound.
    """

    rep_index: int
    k: int
    tail_prob: float
    d_n: float
    gamma_hat: float = math.nan
    gamma_hat_oracle: float = math.nan
    x_hat: float = math.nan
    x_hat_oracle: float = math.nan
    x_p: float = math.nan
    max_abs_error: float = math.nan
    c_n: float = math.nan
    c_n_threshold: float = math.nan
    std_gamma_err: float = math.nan
    std_quant_err: float = math.nan
    ci_lo: float = math.nan
    ci_hi: float = math.nan
    failed: bool = False
    failure: str | None = None

    def proof_chain_holds(self) -> bool | None:
        """``|gamma_hat - gamma_hat_oracle| <= 2 log(4) K`` when ``K <= 1/2``, else None."""
        if self.failed or not self.c_n_threshold <= 0.5:
            return None
        return abs(self.gamma_hat - self.gamma_hat_oracle) <= 2.0 * LOG4 * self.c_n_threshold


def _rep_stream(config: ExperimentConfig, rep_index: int) -> RandomStream:
    return RandomStream(config.master_seed).child("replication", rep_index)


def simulate_norms(config: ExperimentConfig, rep_index: int,
                   grids: Sequence[int] | None = None) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Oracle norms and coarse norms for each grid in ``grids`` (default ``[config.m]``)."""
    grids = tuple(grids) if grids is not None else (config.m,)
    stream = _rep_stream(config, rep_index)
    if config.direct:
        x = sample(config.source, stream.child("direct"), config.n)
        return x, {g: x for g in grids}
    for g in grids:
        if config.m_oracle % g:
            raise ConfigError(f"m_oracle = {config.m_oracle} is not a multiple of m = {g}")
    oracle = np.empty(config.n)
    coarse = {g: np.empty(config.n) for g in grids}
    for rows, r, z in iter_product_blocks(config.source, config.m_oracle, config.n, stream):
        z *= r[:, None]
        sl = slice(rows.start, rows.stop)
        oracle[sl] = discrete_norm(z, config.norm_order)
        for g in grids:
            coarse[g][sl] = discrete_norm(downsample(z, g), config.norm_order)
    return oracle, coarse


@functools.lru_cache(maxsize=32)
def reference_quantile(product: ProductSpec, order: float, m_oracle: int, tail_prob: float,
                       seed: int, count: int) -> tuple[float, float]:
    """``(x_p, standard error)`` of ``||R Z||`` by conditioning on a sample of ``||Z||``.

    With ``W = ||Z||`` independent of ``R``, ``P(R W > x) = E[P(R > x/W)]``;
    the closed-form survival function of ``R`` turns a sample of ``W`` into an
    unbiased estimate of the exceedance probability, which is inverted for
    ``x``.  The standard error is propagated to the quantile scale through the
    local slope of the estimated survival function.
    """
    stream = RandomStream(seed).child("quantile-reference")
    spec = dataclasses.replace(product, multiplier=1.0)
    w = np.concatenate([discrete_norm(z, order)
                        for _, _, z in iter_product_blocks(spec, m_oracle, count, stream)])
    if not isinstance(product.multiplier, TailModel):
        x = float(np.quantile(product.multiplier * w, 1.0 - tail_prob))
        return x, math.nan
    model = product.multiplier
    w = w[w > 0]

    def excess(log_x):
        return float(np.mean(model.sf(np.exp(log_x) / w))) * w.size / count - tail_prob

    lo = math.log(model.scale * w.min())
    hi = lo + 1.0
    while excess(hi) > 0:
        hi += 2.0 * (hi - lo)
    log_x = optimize.brentq(excess, lo, hi, xtol=1e-14, rtol=1e-13)
    x = math.exp(log_x)
    terms = model.sf(x / w)
    se_p = float(np.std(np.concatenate([terms, np.zeros(count - w.size)]), ddof=1) / math.sqrt(count))
    h = 1e-4
    slope = (excess(log_x + h) - excess(log_x - h)) / (2.0 * h) / x
    return x, (se_p / abs(slope) if slope else math.inf)


def _true_quantile(config: ExperimentConfig) -> float:
    if config.direct:
        return tail_quantile(config.source, 1.0 / config.tail_prob)
    x, _ = reference_quantile(config.source, config.norm_order, config.m_oracle,
                              config.tail_prob, config.master_seed, config.reference_paths)
    return x


def estimate_replication(config: ExperimentConfig, rep_index: int, coarse: np.ndarray,
                         oracle: np.ndarray, x_p: float | None = None) -> ReplicationResult:
    """Estimators on coarse and oracle values of one replication."""
    k, p = config.k, config.tail_prob
    d_n = (k / config.n) / p
    base = dict(rep_index=rep_index, k=k, tail_prob=p, d_n=d_n)
    try:
        ord_c, ord_o = order_statistics(coarse), order_statistics(oracle)
        h_c, h_o = hill(ord_c, k), hill(ord_o, k)
        q_c = weissman_quantile(ord_c, k, p, h_c.gamma_hat)
        q_o = weissman_quantile(ord_o, k, p, h_o.gamma_hat)
        lo, hi = hill_confidence_interval(h_c, config.ci_level)
    except ValueError as exc:
        return ReplicationResult(**base, failed=True, failure=str(exc))
    gamma = config.true_gamma
    max_abs = float(np.max(np.abs(oracle - coarse)))
    c_n_thr = max_abs / h_o.threshold
    if config.direct:
        c_n = max_abs / tail_quantile(config.source, config.n / k)
    else:
        c_n = c_n_thr
    if x_p is None:
        x_p = _true_quantile(config)
    sk = math.sqrt(k)
    std_q = sk / math.log(d_n) * (q_c.x_hat / x_p - 1.0) / gamma if d_n != 1.0 else math.nan
    return ReplicationResult(
        **base,
        gamma_hat=h_c.gamma_hat,
        gamma_hat_oracle=h_o.gamma_hat,
        x_hat=q_c.x_hat,
        x_hat_oracle=q_o.x_hat,
        x_p=x_p,
        max_abs_error=max_abs,
        c_n=c_n,
        c_n_threshold=c_n_thr,
        std_gamma_err=sk * (h_c.gamma_hat - gamma) / gamma,
        std_quant_err=std_q,
        ci_lo=lo,
        ci_hi=hi,
    )


def run_replication(config: ExperimentConfig, rep_index: int) -> ReplicationResult:
    oracle, coarse = simulate_norms(config, rep_index)
    return estimate_replication(config, rep_index, coarse[config.m], oracle)


# --- aggregation --------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSummary:
    replications: int
    replication_failures: int
    k: int
    tail_prob: float
    d_n: float
    mean_gamma_hat: float
    mean_gamma_hat_oracle: float
    mean_bias: float
    rmse: float
    empirical_sd_of_standardized: float
    limit_mean_standardized: float
    ks_statistic: float
    ks_p_value: float
    ci_coverage: float
    quantile_ks_statistic: float
    quantile_ks_p_value: float
    median_relative_quantile_error: float
    c_n_median: float
    c_n_p90: float
    c_n_threshold_median: float
    max_abs_error_median: float
    sqrt_k_c_n_median: float
    negligible_fraction: float
    reference_quantile: float
    reference_quantile_se: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    summary: ExperimentSummary
    table: list[ReplicationResult]
    warnings: list[str]


def _nan_stat(fn: Callable, values: np.ndarray) -> float:
    return float(fn(values)) if values.size else math.nan


def summarize(config: ExperimentConfig, table: Sequence[ReplicationResult]) -> ExperimentSummary:
    """Fold replication records (in the given order) into a summary."""
    ok = [r for r in table if not r.failed]
    gamma = config.true_gamma
    col = lambda name: np.array([getattr(r, name) for r in ok], dtype=float)  # noqa: E731
    g, g_o = col("gamma_hat"), col("gamma_hat_oracle")
    std_g, std_q = col("std_gamma_err"), col("std_quant_err")
    c_n, c_thr, err = col("c_n"), col("c_n_threshold"), col("max_abs_error")
    lo, hi = col("ci_lo"), col("ci_hi")
    rel_q = np.abs(col("x_hat") / col("x_p") - 1.0)
    limit = config.limit
    ks_g = ks_test(std_g, limit) if std_g.size else KSResult(math.nan, math.nan)
    std_q = std_q[np.isfinite(std_q)]
    ks_q = ks_test(std_q, limit) if std_q.size else KSResult(math.nan, math.nan)
    sqrt_k_c = math.sqrt(config.k) * c_n
    if config.direct:
        ref_x, ref_se = _true_quantile(config), 0.0
    else:
        ref_x, ref_se = reference_quantile(config.source, config.norm_order, config.m_oracle,
                                           config.tail_prob, config.master_seed,
                                           config.reference_paths)
    return ExperimentSummary(
        replications=len(table),
        replication_failures=len(table) - len(ok),
        k=config.k,
        tail_prob=config.tail_prob,
        d_n=(config.k / config.n) / config.tail_prob,
        mean_gamma_hat=_nan_stat(np.mean, g),
        mean_gamma_hat_oracle=_nan_stat(np.mean, g_o),
        mean_bias=_nan_stat(np.mean, g - gamma),
        rmse=_nan_stat(lambda v: np.sqrt(np.mean(v**2)), g - gamma),
        empirical_sd_of_standardized=float(np.std(std_g, ddof=1)) if std_g.size > 1 else math.nan,
        limit_mean_standardized=limit.mean,
        ks_statistic=ks_g.statistic,
        ks_p_value=ks_g.p_value,
        ci_coverage=_nan_stat(np.mean, (lo <= gamma) & (gamma <= hi)),
        quantile_ks_statistic=ks_q.statistic,
        quantile_ks_p_value=ks_q.p_value,
        median_relative_quantile_error=_nan_stat(np.median, rel_q),
        c_n_median=_nan_stat(np.median, c_n),
        c_n_p90=_nan_stat(lambda v: np.quantile(v, 0.9), c_n),
        c_n_threshold_median=_nan_stat(np.median, c_thr),
        max_abs_error_median=_nan_stat(np.median, err),
        sqrt_k_c_n_median=_nan_stat(np.median, sqrt_k_c),
        negligible_fraction=_nan_stat(np.mean, sqrt_k_c < config.negligible_threshold),
        reference_quantile=ref_x,
        reference_quantile_se=ref_se,
    )


def _finish(config: ExperimentConfig, table: list[ReplicationResult]) -> ExperimentResult:
    result = ExperimentResult(config, summarize(config, table), table, config.lint())
    failures = result.summary.replication_failures
    if failures > FAILURE_CEILING * len(table):
        raise ExperimentFailure(
            f"{failures} of {len(table)} replications failed (ceiling {FAILURE_CEILING:.0%})",
            result)
    return result


def _map(fn: Callable[[int], object], indices: range, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all replications and fold them; raises :class:`ExperimentFailure` above 10% failures."""
    if not config.direct:
        _true_quantile(config)  # warm the cache before fanning out
    table = _map(functools.partial(run_replication, config), range(config.replications), workers)
    return _finish(config, table)


# --- sweeps ---------------------------------------------------------------------

SWEEP_AXES = ("m", "k", "n")


def cell_config(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    """The configuration of one sweep cell, re-seeded from ``(master_seed, axis, value)``."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    seed = RandomStream(config.master_seed).child("sweep", axis, str(value)).derive_seed()
    if axis == "m":
        return dataclasses.replace(config, m=int(value), master_seed=seed)
    if axis == "k":
        return dataclasses.replace(config, k_rule=KRule.fixed(int(value)), master_seed=seed)
    return dataclasses.replace(config, n=int(value), master_seed=seed)


@dataclass
class SweepCell:
    axis: str
    value: object
    config: ExperimentConfig | None
    result: ExperimentResult | None = None
    error: str | None = None


def sweep(config: ExperimentConfig, axis: str, values: Sequence, workers: int = 1,
          shared_realizations: bool = False) -> list[SweepCell]:
    """Independent experiments along one axis; failing cells are recorded, not raised.

    With ``shared_realizations`` (axis ``m`` only) every cell restricts the
    same oracle-grid realizations, seeded by ``config.master_seed``, to its
    own coarse grid: common random numbers across the sweep.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if len(values) == 0:
        raise ConfigError("sweep needs at least one value")
    if shared_realizations:
        if axis != "m":
            raise ConfigError("shared realizations are only defined for the m axis")
        return _shared_m_sweep(config, [int(v) for v in values], workers)
    cells = []
    for value in values:
        try:
            cfg = cell_config(config, axis, value)
        except (ConfigError, ValueError) as exc:
            cells.append(SweepCell(axis, value, None, error=str(exc)))
            continue
        try:
            cells.append(SweepCell(axis, value, cfg, run_experiment(cfg, workers)))
        except (ExperimentFailure, ValueError) as exc:
            cells.append(SweepCell(axis, value, cfg, getattr(exc, "result", None), str(exc)))
    return cells


def _shared_m_sweep(config: ExperimentConfig, grids: list[int], workers: int) -> list[SweepCell]:
    cells, cfgs = [], {}
    for g in grids:
        try:
            cfgs[g] = dataclasses.replace(config, m=g)
        except (ConfigError, ValueError) as exc:
            cells.append(SweepCell("m", g, None, error=str(exc)))
    valid = list(cfgs)
    x_p = _true_quantile(config)

    def one(rep):
        oracle, coarse = simulate_norms(config, rep, valid)
        return [estimate_replication(cfgs[g], rep, coarse[g], oracle, x_p) for g in valid]

    rows = _map(one, range(config.replications), workers)
    by_grid = {g: [row[j] for row in rows] for j, g in enumerate(valid)}
    out = []
    for g in grids:
        if g not in cfgs:
            out.append(next(c for c in cells if c.value == g))
            continue
        try:
            out.append(SweepCell("m", g, cfgs[g], _finish(cfgs[g], by_grid[g])))
        except ExperimentFailure as exc:
            out.append(SweepCell("m", g, cfgs[g], exc.result, str(exc)))
    return out
