"""Built-in radial profiles, random test functions and profile files.

A profile is a vectorised callable ``g(r)`` on ``r > 0``.  For Monte Carlo
routines a profile is lifted to ``u(x) = g(|x|)`` with :func:`radial_evaluator`.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .geometry import GroupSpec, QuasiNormSpec, quasi_norm
from .radial import RadialFunction, RadialGrid

Profile = Callable[[np.ndarray], np.ndarray]


def power(s: float) -> Profile:
    return lambda r: np.asarray(r, dtype=float) ** s


def truncated_power(s: float, eps: float, R: float) -> Profile:
    if not 0 < eps < R:
        raise InvalidInputError(f"need 0 < eps < R, got eps={eps}, R={R}")

    def g(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = (r >= eps) & (r <= R)
        out[inside] = r[inside] ** s
        return out
    return g


def bliss(c: float, a: float, b: float, shift: float = 0.0) -> Profile:
    """``r^shift (1 + c r^a)^(-b)``."""
    if not (c > 0 and a > 0 and b > 0):
        raise InvalidInputError(f"bliss parameters must be positive, got c={c}, a={a}, b={b}")

    def g(r):
        r = np.asarray(r, dtype=float)
        logr = np.log(r)
        return np.exp(shift * logr - b * np.logaddexp(0.0, np.log(c) + a * logr))
    return g


def indicator(lo: float, hi: float) -> Profile:
    return lambda r: ((np.asarray(r) >= lo) & (np.asarray(r) <= hi)).astype(float)


def gaussian(width: float = 1.0) -> Profile:
    return lambda r: np.exp(-(np.asarray(r, dtype=float) / width) ** 2)


def bump(R: float = 1.0) -> Profile:
    """Smooth compactly supported ``exp(-1/(1-(r/R)^2))`` on ``[0, R)``."""
    def g(r):
        t = np.asarray(r, dtype=float) / R
        out = np.zeros_like(t)
        m = t < 1
        out[m] = np.exp(1.0 - 1.0 / (1.0 - t[m] ** 2))
        return out
    return g


BUILTINS: dict[str, Callable[..., Profile]] = {
    "power": power,
    "truncated_power": truncated_power,
    "bliss": bliss,
    "indicator": indicator,
    "gaussian": gaussian,
    "bump": bump,
}


def parse_builtin(spec: str) -> Profile:
    """``"name:arg1,arg2"`` -> profile, e.g. ``"truncated_power:-0.5,1e-3,1"``."""
    name, _, args = spec.partition(":")
    if name not in BUILTINS:
        raise InvalidInputError(f"unknown test function {name!r}; choose from {sorted(BUILTINS)}")
    values = [float(a) for a in args.split(",") if a.strip()] if args else []
    return BUILTINS[name](*values)


@dataclass(frozen=True)
class PiecewisePower:
    """Nonnegative ``sum_k c_k r^{s_k} 1[a_k <= r <= b_k]``."""

    pieces: tuple[tuple[float, float, float, float], ...]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, s, a, b in self.pieces:
            m = (r >= a) & (r <= b)
            out[m] += c * r[m] ** s
        return out


def random_piecewise_power(gen: np.random.Generator, n_pieces: int = 3,
                           lo: float = 1e-4, hi: float = 1e4) -> PiecewisePower:
    pieces = []
    for _ in range(n_pieces):
        a, b = np.sort(np.exp(gen.uniform(np.log(lo), np.log(hi), size=2)))
        pieces.append((float(np.exp(gen.normal())), float(gen.uniform(-2.0, 2.0)), float(a), float(b)))
    return PiecewisePower(tuple(pieces))


@dataclass(frozen=True)
class SmoothProfile:
    """``c r^s`` times a bump supported on ``[0, R)``."""

    c: float
    s: float
    R: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.c * r**self.s * bump(self.R)(r)


def random_smooth_profile(gen: np.random.Generator) -> SmoothProfile:
    return SmoothProfile(c=float(np.exp(gen.normal())),
                         s=float(gen.uniform(-0.5, 2.0)),
                         R=float(np.exp(gen.uniform(np.log(0.1), np.log(10.0)))))


def load_profile(path: str | Path) -> Profile:
    """Two-column ``r value`` text file, linearly interpolated in ``log r``; zero outside."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidInputError(f"{path}: expected two columns (r, value)")
    order = np.argsort(data[:, 0])
    r, v = data[order, 0], data[order, 1]
    if np.any(r <= 0):
        raise InvalidInputError(f"{path}: radii must be positive")
    logr = np.log(r)

    def g(x):
        x = np.asarray(x, dtype=float)
        lx = np.log(x)
        return np.where((lx >= logr[0]) & (lx <= logr[-1]), np.interp(lx, logr, v), 0.0)
    return g


def sample_on_grid(profile: Profile, grid: RadialGrid) -> RadialFunction:
    return RadialFunction.from_callable(grid, profile)


def radial_evaluator(profile: Profile, group: GroupSpec, norm: QuasiNormSpec) -> Callable[[np.ndarray], np.ndarray]:
    def u(x):
        r = quasi_norm(x, norm, group)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = profile(r[pos])
        return out
    return u


def nonradial_evaluator(profile: Profile, group: GroupSpec, norm: QuasiNormSpec,
                        amplitude: float = 0.9) -> Callable[[np.ndarray], np.ndarray]:
    """``g(|x|) (1 + amplitude * x_1 / |x|^v_1)``: nonnegative and genuinely angular.

    For all three quasi-norms ``|x_1| <= |x|^v_1``, so the angular factor
    stays in ``[1 - amplitude, 1 + amplitude]``.
    """
    if not 0 <= amplitude <= 1:
        raise InvalidInputError(f"amplitude must lie in [0, 1], got {amplitude}")
    v1 = group.dilation_exponents[0]

    def u(x):
        x = np.asarray(x, dtype=float)
        r = quasi_norm(x, norm, group)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = profile(r[pos]) * (1 + amplitude * x[pos, 0] / r[pos] ** v1)
        return out
    return u
