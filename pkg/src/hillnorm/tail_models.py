"""Heavy-tailed laws with closed-form tail quantile functions.

Each family exposes ``U(t) = F^{<-}(1 - 1/t)``, the second-order auxiliary
function ``A`` and an inverse-transform sampler ``X = U(1/V)``.

Second-order behaviour per family:

* Pareto, ``U(t) = c t^g``: exact power law, ``A == 0``.
* Burr, ``1 - F(x) = (1 + x^tau)^(-lam)``: ``U(t) = (t^(1/lam) - 1)^(1/tau)``,
  ``g = 1/(tau lam)``, ``rho = -1/lam``, ``A(t) = (-rho/tau) t^rho``.
* Frechet, ``F(x) = exp(-x^(-1/g))``: ``U(t) = (-log(1 - 1/t))^(-g)``.
  With ``s = 1/t``, ``-log(1 - s) = s (1 + s/2 + O(s^2))`` so
  ``U(t) = t^g (1 - g/(2t) + O(t^-2))`` and
  ``U(tx)/U(t) = x^g (1 + (g/(2t)) (1 - 1/x) + O(t^-2))``.
  Matching ``x^g (x^rho - 1)/rho`` gives ``rho = -1``, ``A(t) = g/(2t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .streams import RandomStream


class Family(str, Enum):
    PARETO = "pareto"
    FRECHET = "frechet"
    BURR = "burr"


class AuxUnavailableError(ValueError):
    """Raised when a model has no closed-form second-order function."""


@dataclass(frozen=True)
class TailModel:
    """A heavy-tailed law with known extreme value index.

    Use the :meth:`pareto`, :meth:`frechet` and :meth:`burr` constructors.
    ``rho`` is ``None`` for Pareto, whose second-order term vanishes.
    """

    family: Family
    gamma: float
    rho: float | None = None
    tau: float | None = None
    lambda_shape: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.family is Family.BURR:
            if self.tau is None or self.lambda_shape is None:
                raise ValueError("Burr needs tau and lambda_shape")
            if not (self.tau > 0 and self.lambda_shape > 0):
                raise ValueError("Burr tau and lambda_shape must be positive")
            gamma = 1.0 / (self.tau * self.lambda_shape)
            rho = -1.0 / self.lambda_shape
            if self.gamma is not None and not math.isclose(self.gamma, gamma, rel_tol=1e-12):
                raise ValueError(f"Burr gamma is derived ({gamma}); got inconsistent {self.gamma}")
            if self.rho is not None and not math.isclose(self.rho, rho, rel_tol=1e-12):
                raise ValueError(f"Burr rho is derived ({rho}); got inconsistent {self.rho}")
            object.__setattr__(self, "gamma", gamma)
            object.__setattr__(self, "rho", rho)
        elif self.family is Family.FRECHET:
            if self.rho is not None and self.rho != -1.0:
                raise ValueError("Frechet has rho = -1")
            object.__setattr__(self, "rho", -1.0)
        if self.gamma is None or not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.rho is not None and self.rho > 0:
            raise ValueError(f"rho must be non-positive, got {self.rho}")

    @classmethod
    def pareto(cls, gamma: float, scale: float = 1.0) -> TailModel:
        return cls(Family.PARETO, gamma, scale=scale)

    @classmethod
    def frechet(cls, gamma: float, scale: float = 1.0) -> TailModel:
        return cls(Family.FRECHET, gamma, scale=scale)

    @classmethod
    def burr(cls, tau: float, lambda_shape: float, scale: float = 1.0) -> TailModel:
        return cls(Family.BURR, None, tau=tau, lambda_shape=lambda_shape, scale=scale)

    def to_dict(self) -> dict:
        d = {"family": self.family.value, "gamma": self.gamma, "scale": self.scale}
        if self.family is Family.BURR:
            d.update(tau=self.tau, lambda_shape=self.lambda_shape)
        if self.rho is not None:
            d["rho"] = self.rho
        return d

    # distribution functions -------------------------------------------------

    def sf(self, x):
        """Survival function ``1 - F(x)``."""
        z = np.asarray(x, dtype=float) / self.scale
        with np.errstate(divide="ignore", over="ignore"):
            if self.family is Family.PARETO:
                out = np.where(z >= 1.0, np.power(np.maximum(z, 1.0), -1.0 / self.gamma), 1.0)
            elif self.family is Family.FRECHET:
                pos = np.maximum(z, np.finfo(float).tiny)
                out = np.where(z > 0, -np.expm1(-np.power(pos, -1.0 / self.gamma)), 1.0)
            else:
                pos = np.maximum(z, 0.0)
                out = np.exp(-self.lambda_shape * np.log1p(np.power(pos, self.tau)))
        return out if out.ndim else float(out)

    def cdf(self, x):
        z = np.asarray(x, dtype=float) / self.scale
        with np.errstate(divide="ignore", over="ignore"):
            if self.family is Family.PARETO:
                out = np.where(z >= 1.0, 1.0 - np.power(np.maximum(z, 1.0), -1.0 / self.gamma), 0.0)
            elif self.family is Family.FRECHET:
                pos = np.maximum(z, np.finfo(float).tiny)
                out = np.where(z > 0, np.exp(-np.power(pos, -1.0 / self.gamma)), 0.0)
            else:
                out = 1.0 - self.sf(x)
        return out if np.ndim(out) else float(out)


def tail_quantile(model: TailModel, t):
    """``U(t) = F^{<-}(1 - 1/t)`` for ``t > 1``; vectorised over ``t``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 1.0)):
        raise ValueError("tail_quantile is defined for t > 1")
    if model.family is Family.PARETO:
        out = np.power(t_arr, model.gamma)
    elif model.family is Family.FRECHET:
        out = np.power(-np.log1p(-1.0 / t_arr), -model.gamma)
    else:
        out = np.power(np.expm1(np.log(t_arr) / model.lambda_shape), 1.0 / model.tau)
    out = model.scale * out
    return out if out.ndim else float(out)


def second_order_aux(model: TailModel, t):
    """Auxiliary function ``A(t)`` of the second-order condition."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 1.0)):
        raise ValueError("second_order_aux is defined for t > 1")
    if model.family is Family.PARETO:
        out = np.zeros_like(t_arr)
    elif model.family is Family.FRECHET:
        out = model.gamma / (2.0 * t_arr)
    elif model.family is Family.BURR:
        out = (-model.rho / model.tau) * np.power(t_arr, model.rho)
    else:  # pragma: no cover - enum is closed
        raise AuxUnavailableError(f"A unavailable for family {model.family}")
    return out if out.ndim else float(out)


def lambda_limit(model: TailModel, n: int, k: int) -> float:
    """Finite-n value of ``sqrt(k) A(n/k)``, the bias constant of the Hill CLT."""
    return math.sqrt(k) * second_order_aux(model, n / k)


def quantile_transform(model: TailModel, v):
    """Map uniforms ``v`` in (0, 1) to draws ``U(1/v)``."""
    v_arr = np.asarray(v, dtype=float)
    if np.any((v_arr <= 0.0) | (v_arr >= 1.0)):
        raise ValueError("uniforms must lie in the open interval (0, 1)")
    return tail_quantile(model, 1.0 / v_arr)


def sample(model: TailModel, rng: RandomStream, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return np.atleast_1d(quantile_transform(model, rng.uniforms(count)))
