"""Driver processes on the grid ``{j/m : j = 0..m-1}`` and product paths ``Y = R Z``.

Every row draws from its own substream ``rng.child(row, purpose)``, so a row's
values do not depend on which other rows are generated, in what order, or
in what block size.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator

import numpy as np

from .streams import RandomStream
from .tail_models import TailModel, sample


class DriverKind(str, Enum):
    BROWNIAN = "bm"
    FRACTIONAL = "fbm"
    RAMP = "ramp"
    CONSTANT = "constant"


class CirculantEmbeddingError(RuntimeError):
    """The circulant embedding of the increment covariance is not positive semi-definite."""


@dataclass(frozen=True)
class ProcessSpec:
    """A driver process ``Z`` on [0, 1].

    ``eps_prime`` is the slack subtracted from the Hurst index to obtain a
    usable Hölder exponent for Gaussian kinds.
    """

    kind: DriverKind
    hurst: float | None = None
    value: float = 0.0
    eps_prime: float = 0.05
    method: str = "circulant"

    def __post_init__(self):
        object.__setattr__(self, "kind", DriverKind(self.kind))
        if self.kind is DriverKind.FRACTIONAL:
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise ValueError(f"fBm needs a Hurst index in (0, 1), got {self.hurst}")
        elif self.kind is DriverKind.BROWNIAN:
            if self.hurst not in (None, 0.5):
                raise ValueError("Brownian motion has Hurst index 1/2")
            object.__setattr__(self, "hurst", 0.5)
        if self.method not in ("circulant", "cholesky"):
            raise ValueError(f"unknown synthesis method {self.method!r}")
        if not 0.0 < self.holder_exponent <= 1.0:
            raise ValueError(f"usable Hölder exponent {self.holder_exponent} outside (0, 1]")

    @classmethod
    def brownian(cls, eps_prime: float = 0.05) -> ProcessSpec:
        return cls(DriverKind.BROWNIAN, eps_prime=eps_prime)

    @classmethod
    def fbm(cls, hurst: float, eps_prime: float = 0.05, method: str = "circulant") -> ProcessSpec:
        return cls(DriverKind.FRACTIONAL, hurst=hurst, eps_prime=eps_prime, method=method)

    @classmethod
    def ramp(cls) -> ProcessSpec:
        return cls(DriverKind.RAMP)

    @classmethod
    def constant(cls, value: float) -> ProcessSpec:
        return cls(DriverKind.CONSTANT, value=value)

    @property
    def gaussian(self) -> bool:
        return self.kind in (DriverKind.BROWNIAN, DriverKind.FRACTIONAL)

    @property
    def holder_exponent(self) -> float:
        if self.gaussian:
            return self.hurst - self.eps_prime
        return 1.0

    @property
    def moment_order_bound(self) -> str:
        if self.gaussian:
            return "all orders (Gaussian increments)"
        return "all orders (deterministic)"

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is DriverKind.FRACTIONAL:
            d.update(hurst=self.hurst, method=self.method)
        if self.gaussian:
            d["eps_prime"] = self.eps_prime
        if self.kind is DriverKind.CONSTANT:
            d["value"] = self.value
        return d


@dataclass(frozen=True)
class ProductSpec:
    """``Y(t) = R Z(t)``; a float multiplier forces ``R`` to that value."""

    multiplier: TailModel | float
    driver: ProcessSpec

    def __post_init__(self):
        if self.driver.kind is DriverKind.CONSTANT:
            raise ValueError("constant drivers have Z(0) != 0 and are not usable in products")
        if not isinstance(self.multiplier, TailModel):
            if not float(self.multiplier) > 0:
                raise ValueError("a forced multiplier must be strictly positive")
            object.__setattr__(self, "multiplier", float(self.multiplier))

    def to_dict(self) -> dict:
        mult = (self.multiplier.to_dict() if isinstance(self.multiplier, TailModel)
                else {"value": self.multiplier})
        return {"multiplier": mult, "driver": self.driver.to_dict()}


@dataclass(frozen=True)
class PathMatrix:
    """``values[i, j] = Y_i(j/m)`` on the left-endpoint grid."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("a path matrix is two-dimensional")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.m) / self.m


def _check_grid(m: int, n: int) -> None:
    if int(m) != m or m < 2:
        raise ValueError(f"grid size m must be an integer >= 2, got {m}")
    if int(n) != n or n < 1:
        raise ValueError(f"path count n must be an integer >= 1, got {n}")


# --- fractional Gaussian noise --------------------------------------------

def _fgn_autocov(hurst: float, size: int) -> np.ndarray:
    k = np.arange(size + 1, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k**h2 + np.abs(k - 1) ** h2)


@functools.lru_cache(maxsize=32)
def _circulant_sqrt_eigs(hurst: float, size: int) -> np.ndarray:
    """``sqrt(lambda / L)`` for the size-``L = 2*size`` embedding of unit-step fGn."""
    c = _fgn_autocov(hurst, size)
    row = np.concatenate([c, c[-2:0:-1]])
    eigs = np.fft.fft(row).real
    if eigs.min() < -1e-10 * eigs.max():
        raise CirculantEmbeddingError(
            f"circulant embedding failed for H={hurst}, size={size} "
            f"(min eigenvalue {eigs.min():.3e}); use method='cholesky'")
    return np.sqrt(np.clip(eigs, 0.0, None) / row.size)


@functools.lru_cache(maxsize=8)
def _fbm_cholesky(hurst: float, m: int) -> np.ndarray:
    t = np.arange(1, m) / m
    h2 = 2.0 * hurst
    cov = 0.5 * (t[:, None] ** h2 + t[None, :] ** h2 - np.abs(t[:, None] - t[None, :]) ** h2)
    return np.linalg.cholesky(cov)


def driver_block(spec: ProcessSpec, m: int, rows: range, rng: RandomStream) -> np.ndarray:
    """Rows ``rows`` of the driver matrix, shape ``(len(rows), m)``."""
    out = np.zeros((len(rows), m))
    if spec.kind is DriverKind.RAMP:
        out[:] = np.arange(m) / m
    elif spec.kind is DriverKind.CONSTANT:
        out[:] = spec.value
    elif spec.kind is DriverKind.BROWNIAN:
        for r, i in enumerate(rows):
            rng.child(i, "driver").generator().standard_normal(out=out[r, 1:])
        out *= math.sqrt(1.0 / m)
        np.cumsum(out, axis=1, out=out)
    elif spec.method == "circulant":
        sq = _circulant_sqrt_eigs(float(spec.hurst), m)
        size = sq.size
        noise = np.empty((len(rows), 2, size))
        for r, i in enumerate(rows):
            rng.child(i, "driver").generator().standard_normal(out=noise[r])
        w = np.fft.fft(sq * (noise[:, 0] + 1j * noise[:, 1]), axis=1).real
        out[:, 1:] = w[:, : m - 1] * (1.0 / m) ** spec.hurst
        np.cumsum(out, axis=1, out=out)
    else:
        chol = _fbm_cholesky(float(spec.hurst), m)
        for r, i in enumerate(rows):
            xi = rng.child(i, "driver").generator().standard_normal(m - 1)
            out[r, 1:] = chol @ xi
    return out


def multipliers(spec: ProductSpec, rows: range, rng: RandomStream) -> np.ndarray:
    if not isinstance(spec.multiplier, TailModel):
        return np.full(len(rows), spec.multiplier)
    return np.array([sample(spec.multiplier, rng.child(i, "multiplier"), 1)[0] for i in rows])


def simulate_driver(spec: ProcessSpec, m: int, n: int, rng: RandomStream) -> PathMatrix:
    _check_grid(m, n)
    return PathMatrix(driver_block(spec, m, range(n), rng))


def iter_product_blocks(spec: ProductSpec, m: int, n: int, rng: RandomStream,
                        block_rows: int | None = None
                        ) -> Iterator[tuple[range, np.ndarray, np.ndarray]]:
    """Yield ``(rows, R, Z)`` blocks; ``R * Z[:, j]`` gives the product paths.

    Blocks bound memory for large ``m``; results do not depend on block size.
    """
    _check_grid(m, n)
    if block_rows is None:
        block_rows = max(1, (1 << 21) // m)
    for start in range(0, n, block_rows):
        rows = range(start, min(n, start + block_rows))
        yield rows, multipliers(spec, rows, rng), driver_block(spec.driver, m, rows, rng)


def simulate_product(spec: ProductSpec, m: int, n: int, rng: RandomStream) -> PathMatrix:
    _check_grid(m, n)
    rows = range(n)
    r = multipliers(spec, rows, rng)
    return PathMatrix(r[:, None] * driver_block(spec.driver, m, rows, rng))


def empirical_holder_coefficient(path, eta: float) -> float:
    """Largest ``|Y(t') - Y(t)| / |t' - t|^eta`` over grid pairs; a lower bound for ``V``."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    y = np.asarray(path, dtype=float)
    m = y.size
    if m < 2:
        raise ValueError("need at least two grid points")
    best = 0.0
    for lag in range(1, m):
        inc = np.max(np.abs(y[lag:] - y[:-lag]))
        best = max(best, inc / (lag / m) ** eta)
    return float(best)


# --- CSV ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_path_csv(matrix: PathMatrix, target) -> None:
    """Write ``m,n`` header, the dimensions, then one row per path."""
    own = isinstance(target, (str, Path))
    fh = open(target, "w", newline="") if own else target
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n"])
        w.writerow([matrix.m, matrix.n])
        for row in matrix.values:
            w.writerow([_fmt(v) for v in row])
    finally:
        if own:
            fh.close()


def read_path_csv(source) -> PathMatrix:
    own = isinstance(source, (str, Path))
    fh = open(source, newline="") if own else source
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["m", "n"]:
            raise ValueError(f"line 1: expected header 'm,n', got {header!r}")
        try:
            m, n = (int(x) for x in next(reader))
        except (StopIteration, ValueError) as exc:
            raise ValueError("line 2: expected integer dimensions 'm,n'") from exc
        rows = []
        for lineno, row in enumerate(reader, start=3):
            if len(row) != m:
                raise ValueError(f"line {lineno}: expected {m} values, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
        if len(rows) != n:
            raise ValueError(f"expected {n} path rows, got {len(rows)}")
    finally:
        if own:
            fh.close()
    return PathMatrix(np.array(rows, dtype=float).reshape(n, m))


def path_csv_text(matrix: PathMatrix) -> str:
    buf = io.StringIO()
    write_path_csv(matrix, buf)
    return buf.getvalue()
