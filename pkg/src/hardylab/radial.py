"""Log-uniform grids on (0, inf) and trapezoid quadrature in ``s = log t``.

With ``t = e^s`` every power weight becomes an exponential in ``s`` and the
trapezoid rule on a uniform ``s`` grid is second-order accurate for smooth
integrands, regardless of how singular the weight is at 0 or infinity.
Mass below ``r_min`` and above ``r_max`` is treated as zero.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInputError, NumericError

DEFAULT_R_MIN = 1e-6
DEFAULT_R_MAX = 1e6
DEFAULT_NODES = 2**14


@dataclass(frozen=True)
class RadialGrid:
    r_min: float = DEFAULT_R_MIN
    r_max: float = DEFAULT_R_MAX
    n_nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max or not math.isfinite(self.r_max):
            raise InvalidInputError(f"need 0 < r_min < r_max < inf, got {self.r_min}, {self.r_max}")
        if self.n_nodes < 2:
            raise InvalidInputError("a grid needs at least two nodes")

    @cached_property
    def log_nodes(self) -> np.ndarray:
        return np.linspace(math.log(self.r_min), math.log(self.r_max), self.n_nodes)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.exp(self.log_nodes)
        x[0], x[-1] = self.r_min, self.r_max
        return x

    @property
    def step(self) -> float:
        """Uniform spacing in log r."""
        return (math.log(self.r_max) - math.log(self.r_min)) / (self.n_nodes - 1)

    @property
    def log_length(self) -> float:
        return math.log(self.r_max / self.r_min)

    def scaled(self, factor: float) -> RadialGrid:
        """Grid with every node multiplied by ``factor``."""
        return RadialGrid(self.r_min * factor, self.r_max * factor, self.n_nodes)

    def window(self, start: int, stop: int) -> RadialGrid:
        """Sub-grid made of nodes ``start .. stop-1`` (same log spacing)."""
        return RadialGrid(float(self.nodes[start]), float(self.nodes[stop - 1]), stop - start)

    def describe(self) -> dict:
        return {"r_min": self.r_min, "r_max": self.r_max, "n_nodes": self.n_nodes}


@dataclass(frozen=True)
class RadialFunction:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise InvalidInputError(f"expected {self.grid.n_nodes} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            k = int(np.flatnonzero(~np.isfinite(v))[0])
            raise NumericError(f"non-finite value {v[k]} at node r = {self.grid.nodes[k]:.6g}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: RadialGrid, f: Callable[[np.ndarray], np.ndarray]) -> RadialFunction:
        return cls(grid, np.asarray(f(grid.nodes), dtype=float) * np.ones(grid.n_nodes))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> RadialFunction:
        return cls(grid, np.zeros(grid.n_nodes))

    def times_power(self, s: float) -> RadialFunction:
        return RadialFunction(self.grid, self.values * self.grid.nodes**s)

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))


def _segment_sums(u: RadialFunction) -> np.ndarray:
    g = u.values * u.grid.nodes
    return 0.5 * u.grid.step * (g[1:] + g[:-1])


def cumulative_integral(u: RadialFunction) -> RadialFunction:
    """``F(x) = int_{r_min}^x u(t) dt`` at every node."""
    out = np.zeros(u.grid.n_nodes)
    np.cumsum(_segment_sums(u), out=out[1:])
    return RadialFunction(u.grid, out)


def tail_integral(u: RadialFunction) -> RadialFunction:
    """``F(x) = int_x^{r_max} u(t) dt`` at every node."""
    seg = _segment_sums(u)
    out = np.zeros(u.grid.n_nodes)
    out[:-1] = np.cumsum(seg[::-1])[::-1]
    return RadialFunction(u.grid, out)


def weighted_power_integral(f: RadialFunction, weight_exponent: float, q: float) -> float:
    """``int |f(x)|^q x^w dx`` over the grid, assembled in log space to avoid overflow."""
    x = f.grid.nodes
    a = np.abs(f.values)
    nz = a > 0
    integrand = np.zeros_like(a)
    with np.errstate(over="ignore", invalid="ignore"):
        integrand[nz] = np.exp(q * np.log(a[nz]) + (weight_exponent + 1.0) * f.grid.log_nodes[nz])
        total = f.grid.step * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1]))
    if not math.isfinite(total):
        bad = np.flatnonzero(~np.isfinite(integrand))
        k = int(bad[0]) if bad.size else int(np.argmax(integrand))
        end = "r_min" if k < f.grid.n_nodes // 2 else "r_max"
        raise NumericError(
            f"weighted integral diverges near {end} (node r = {x[k]:.6g}, "
            f"exponent {weight_exponent:g}, power {q:g})")
    return float(total)


def weighted_lq_norm(f: RadialFunction, weight_exponent: float, q: float) -> float:
    """``(int |f(x)|^q x^w dx)^(1/q)`` by log-trapezoid quadrature."""
    if not q >= 1:
        raise InvalidInputError(f"need q >= 1, got {q}")
    return weighted_power_integral(f, weight_exponent, q) ** (1.0 / q)
