"""Order statistics, the Hill estimator and the Weissman-type quantile estimator.

The same formulas serve both the "true" values ``X_i`` and their
approximations ``X^_i``; only the input differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np


class NonPositiveThresholdError(ValueError):
    """Top order statistics include a non-positive value; log-ratios are undefined."""


@dataclass(frozen=True)
class OrderedSample:
    """Ascending order statistics ``X_{1,n} <= ... <= X_{n,n}``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("an ordered sample needs at least two values")
        if np.any(np.diff(v) < 0):
            raise ValueError("values must be sorted nondecreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def top(self, i: int) -> float:
        """``X_{n-i,n}`` (``i = 0`` is the maximum)."""
        return float(self.values[self.n - 1 - i])


@dataclass(frozen=True)
class HillEstimate:
    gamma_hat: float
    k: int
    n: int
    threshold: float


@dataclass(frozen=True)
class QuantileEstimate:
    x_hat: float
    tail_prob: float
    d_n: float
    gamma_hat_used: float
    threshold: float


@dataclass(frozen=True)
class LimitLaw:
    """Normal limit ``N(lambda/(1 - rho), gamma^2)`` of ``sqrt(k)(gamma_hat - gamma)``."""

    lam: float
    rho: float
    gamma: float

    @property
    def mean(self) -> float:
        return self.lam / (1.0 - self.rho)

    @property
    def variance(self) -> float:
        return self.gamma**2

    @property
    def sd(self) -> float:
        return self.gamma


def order_statistics(sample: Sequence[float]) -> OrderedSample:
    values = np.asarray(sample, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("order_statistics needs a 1-d sample of length >= 2")
    return OrderedSample(np.sort(values, kind="stable"))


def _check_k(ordered: OrderedSample, k: int) -> float:
    if isinstance(k, bool) or int(k) != k:
        raise TypeError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= ordered.n - 1:
        raise ValueError(f"k must be <= n-1 = {ordered.n - 1} and >= 1, got {k}")
    threshold = ordered.top(int(k))
    if not threshold > 0:
        raise NonPositiveThresholdError(f"non-positive threshold X_(n-k,n) = {threshold}")
    return threshold


def hill(ordered: OrderedSample, k: int) -> HillEstimate:
    threshold = _check_k(ordered, k)
    top = ordered.values[ordered.n - int(k):]
    gamma_hat = float(np.mean(np.log(top / threshold)))
    return HillEstimate(gamma_hat=gamma_hat, k=int(k), n=ordered.n, threshold=threshold)


def weissman_quantile(ordered: OrderedSample, k: int, tail_prob: float,
                      gamma_hat: float) -> QuantileEstimate:
    """Extrapolated quantile ``X_{n-k,n} (k/(n p))^gamma_hat`` for tail probability ``p``."""
    threshold = _check_k(ordered, k)
    if not 0.0 < tail_prob < 1.0:
        raise ValueError(f"tail_prob must lie in (0, 1), got {tail_prob}")
    if not gamma_hat >= 0:
        raise ValueError(f"gamma_hat must be non-negative, got {gamma_hat}")
    # (k/n)/p rather than k/(n p): exactly 1 when tail_prob is the float k/n
    d_n = (k / ordered.n) / tail_prob
    return QuantileEstimate(
        x_hat=threshold * d_n**gamma_hat,
        tail_prob=tail_prob,
        d_n=d_n,
        gamma_hat_used=gamma_hat,
        threshold=threshold,
    )


def limit_law(lam: float, rho: float, gamma: float) -> LimitLaw:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not rho <= 0:
        raise ValueError(f"rho must be non-positive, got {rho}")
    return LimitLaw(lam=float(lam), rho=float(rho), gamma=float(gamma))


# Acklam's rational approximation to the standard normal quantile.  Its
# relative error is below 1.15e-9; one Halley step against erfc brings the
# absolute error to the 1e-15 level.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    """Standard normal quantile, absolute error below 1e-8 on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    x = _acklam(p)
    e = normal_cdf(x) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def hill_confidence_interval(estimate: HillEstimate, level: float) -> tuple[float, float]:
    """Asymptotic interval ``gamma_hat +- z gamma_hat / sqrt(k)``, assuming no bias."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    z = normal_quantile(0.5 * (1.0 + level))
    half = z * estimate.gamma_hat / math.sqrt(estimate.k)
    return estimate.gamma_hat - half, estimate.gamma_hat + half


class HillPlotRow(NamedTuple):
    k: int
    gamma_hat: float | None
    error: str | None = None


def hill_plot(ordered: OrderedSample, k_values: Sequence[int]) -> list[HillPlotRow]:
    """Hill estimates over a range of ``k``; bad ``k`` values become error rows."""
    if len(k_values) == 0:
        raise ValueError("k_values is empty")
    rows = []
    for k in k_values:
        try:
            rows.append(HillPlotRow(int(k), hill(ordered, k).gamma_hat))
        except (ValueError, TypeError) as exc:
            rows.append(HillPlotRow(k, None, str(exc)))
    return rows
