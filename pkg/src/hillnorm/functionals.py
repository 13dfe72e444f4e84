"""Discretised L^p norms, nested-grid oracles, and discretisation-rate calculators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

INF = math.inf


def norm_order(value) -> float:
    """Parse a norm order: a real ``>= 1`` or infinity (``"inf"``)."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        value = float(value)
    value = float(value)
    if math.isnan(value) or value < 1.0:
        raise ValueError(f"norm order must be >= 1 or infinity, got {value}")
    return value


def discrete_norm(path, order: float) -> np.ndarray | float:
    """Left-endpoint Riemann norm ``((1/m) sum |Y(j/m)|^p)^(1/p)``, or ``max |Y(j/m)|``.

    Accepts one row or a matrix of rows (norms along the last axis).  Finite
    orders are evaluated relative to the row maximum, which keeps the result
    exactly homogeneous under power-of-two scaling and avoids overflow.
    """
    order = norm_order(order)
    a = np.abs(np.asarray(path, dtype=float))
    if a.shape[-1] < 1:
        raise ValueError("empty path")
    top = a.max(axis=-1)
    if order == INF:
        out = top
    elif order == 1.0:
        out = a.mean(axis=-1)
    else:
        safe = np.where(top > 0, top, 1.0)
        rel = a / safe[..., None]
        out = top * np.mean(rel**order, axis=-1) ** (1.0 / order)
    return out if np.ndim(out) else float(out)


def downsample(fine, m_coarse: int) -> np.ndarray:
    """Restrict fine-grid rows to the coarse grid ``{j/m_coarse}``."""
    fine = np.asarray(fine)
    m_fine = fine.shape[-1]
    if m_coarse < 1 or m_fine % m_coarse:
        raise ValueError(f"fine grid size {m_fine} is not a multiple of {m_coarse}")
    return fine[..., :: m_fine // m_coarse]


def oracle_norm(fine_path, order: float, m_coarse: int | None = None):
    """Norm on the fine grid; stands in for the unobservable ``||Y||_p``.

    When ``m_coarse`` is given the fine grid must nest the coarse one.
    """
    fine_path = np.asarray(fine_path, dtype=float)
    if m_coarse is not None and fine_path.shape[-1] % m_coarse:
        raise ValueError(
            f"oracle grid {fine_path.shape[-1]} is not a multiple of coarse grid {m_coarse}")
    return discrete_norm(fine_path, order)


@dataclass(frozen=True)
class ApproxErrorReport:
    max_abs_error: float
    normalized: float
    n: int
    m: int | None = None
    k: int | None = None


def approximation_error(coarse_norms: Sequence[float], oracle_norms: Sequence[float],
                        u_at_n_over_k: float, m: int | None = None,
                        k: int | None = None) -> ApproxErrorReport:
    """``max_i |X_i - X^_i|`` and its normalisation ``C_n`` by ``U(n/k)``."""
    coarse = np.asarray(coarse_norms, dtype=float)
    oracle = np.asarray(oracle_norms, dtype=float)
    if coarse.shape != oracle.shape or coarse.ndim != 1:
        raise ValueError(f"length mismatch: {coarse.shape} vs {oracle.shape}")
    if coarse.size == 0:
        raise ValueError("no norms supplied")
    if not u_at_n_over_k > 0:
        raise ValueError(f"U(n/k) must be positive, got {u_at_n_over_k}")
    err = float(np.max(np.abs(oracle - coarse)))
    return ApproxErrorReport(err, err / u_at_n_over_k, coarse.size, m, k)


@dataclass(frozen=True)
class RateBound:
    value: float
    scaled: float  # sqrt(k) * value
    threshold: float

    @property
    def negligible(self) -> bool:
        return self.scaled < self.threshold


def error_rate_bound(eta: float, m: int, n: int, k: int, gamma: float, gamma_prime: float,
                     threshold: float = 0.1) -> RateBound:
    """Second-order rate ``(1/m)^eta k^gamma n^(gamma' - gamma)`` for ``C_n``.

    ``negligible`` flags whether ``sqrt(k)`` times the rate is below ``threshold``.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if not gamma > 0 or gamma_prime < gamma:
        raise ValueError(f"need gamma_prime >= gamma > 0, got {gamma_prime}, {gamma}")
    if m < 1 or n < 1 or k < 1:
        raise ValueError("m, n and k must be positive")
    value = (1.0 / m) ** eta * k**gamma * float(n) ** (gamma_prime - gamma)
    return RateBound(value, math.sqrt(k) * value, threshold)


def tradeoff_required_m(n: int, lambda_exp: float, gamma: float, eta: float,
                        eps_prime: float = 0.05) -> float:
    """Grid size ``m*(n) = n^((lambda gamma + eps') / eta)`` for ``k = floor(n^lambda)``.

    For ``m >= m*`` the product ``(1/m)^eta n^(lambda gamma + eps')`` stays
    at most 1.  ``eta`` is the usable Hölder exponent, already reduced by
    the slack (``H - eps'`` for Gaussian drivers).
    """
    if not 0.0 < lambda_exp < 1.0:
        raise ValueError(f"lambda_exp must lie in (0, 1), got {lambda_exp}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if eps_prime < 0:
        raise ValueError(f"eps_prime must be non-negative, got {eps_prime}")
    if not eta > eps_prime:
        raise ValueError(f"eta ({eta}) must exceed eps_prime ({eps_prime})")
    return float(n) ** ((lambda_exp * gamma + eps_prime) / eta)
