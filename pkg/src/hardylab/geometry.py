"""Homogeneous groups, quasi-norms and quasi-ball measures.

Only what the radial theory needs is modelled: the dilation structure
``x -> (l**v_1 x_1, ..., l**v_N x_N)``, three concrete quasi-norms and the
Lebesgue volume of quasi-balls.  Group multiplication never enters.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import rng
from .errors import (
    GeometryConfigError,
    IncompatibleSpecError,
    InvalidInputError,
    NumericError,
)
from .reports import VerificationReport

DEFAULT_SAMPLES = 10**6
MIN_SAMPLES = 10**4


@dataclass(frozen=True)
class GroupSpec:
    dilation_exponents: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        exps = tuple(float(v) for v in self.dilation_exponents)
        if len(exps) < 1:
            raise InvalidInputError("a group needs at least one coordinate")
        if not all(v > 0 and math.isfinite(v) for v in exps):
            raise InvalidInputError(f"dilation exponents must be positive, got {exps}")
        object.__setattr__(self, "dilation_exponents", exps)

    @property
    def N(self) -> int:
        return len(self.dilation_exponents)

    @property
    def Q(self) -> float:
        """Homogeneous dimension, the sum of the dilation exponents."""
        return math.fsum(self.dilation_exponents)

    @property
    def isotropic(self) -> bool:
        return all(v == 1.0 for v in self.dilation_exponents)

    @classmethod
    def euclidean(cls, n: int) -> GroupSpec:
        return cls((1.0,) * n, name="r1" if n == 1 else ("r2" if n == 2 else f"rn:{n}"))

    @classmethod
    def anisotropic(cls, exponents: Sequence[float]) -> GroupSpec:
        return cls(tuple(exponents), name="aniso:" + ",".join(f"{v:g}" for v in exponents))

    @classmethod
    def heisenberg(cls) -> GroupSpec:
        return cls((1.0, 1.0, 2.0), name="heis1")


class NormKind(str, enum.Enum):
    EUCLIDEAN = "euclidean_isotropic"
    SUP = "anisotropic_sup"
    KORANYI = "koranyi_h1"


@dataclass(frozen=True)
class QuasiNormSpec:
    """A named quasi-norm plus the half-width ``b`` of a box containing its unit ball."""

    kind: NormKind
    bounding_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NormKind(self.kind))
        if not self.bounding_radius > 0:
            raise InvalidInputError("bounding_radius must be positive")

    def __call__(self, points, group: GroupSpec) -> np.ndarray:
        return quasi_norm(points, self, group)


EUCLIDEAN = QuasiNormSpec(NormKind.EUCLIDEAN)
SUP = QuasiNormSpec(NormKind.SUP)
KORANYI = QuasiNormSpec(NormKind.KORANYI)


class SphereMethod(str, enum.Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class SphereMeasure:
    """Total mass of the polar measure on the unit quasi-sphere."""

    value: float
    estimate_stderr: float = 0.0
    method: SphereMethod = SphereMethod.ANALYTIC
    seed: int | None = None
    samples: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", SphereMethod(self.method))
        if not self.value > 0:
            raise InvalidInputError(f"sphere measure must be positive, got {self.value}")
        if self.estimate_stderr < 0:
            raise InvalidInputError("estimate_stderr must be non-negative")

    def __float__(self) -> float:
        return float(self.value)


HALF_LINE = SphereMeasure(1.0)
"""The convention under which the group constant collapses to the 1D half-line one."""


def as_sphere(sphere: SphereMeasure | float) -> SphereMeasure:
    if isinstance(sphere, SphereMeasure):
        return sphere
    return SphereMeasure(float(sphere))


class VolumeEstimate(NamedTuple):
    estimate: float
    stderr: float


def check_compatible(norm: QuasiNormSpec, group: GroupSpec) -> None:
    if norm.kind is NormKind.EUCLIDEAN and not group.isotropic:
        raise IncompatibleSpecError(
            "the Euclidean norm is only homogeneous for isotropic dilations, "
            f"got exponents {group.dilation_exponents}")
    if norm.kind is NormKind.KORANYI and group.dilation_exponents != (1.0, 1.0, 2.0):
        raise IncompatibleSpecError(
            "the Koranyi norm needs the first Heisenberg group, exponents (1, 1, 2), "
            f"got {group.dilation_exponents}")


def quasi_norm(points, norm: QuasiNormSpec, group: GroupSpec) -> np.ndarray:
    """Evaluate ``|x|`` for a single point of shape (N,) or a batch (n, N)."""
    check_compatible(norm, group)
    x = np.asarray(points, dtype=float)
    if x.shape[-1:] != (group.N,):
        raise InvalidInputError(f"expected points with last dimension {group.N}, got shape {x.shape}")
    if norm.kind is NormKind.EUCLIDEAN:
        return np.sqrt(np.sum(x * x, axis=-1))
    if norm.kind is NormKind.SUP:
        inv = 1.0 / np.asarray(group.dilation_exponents)
        return np.max(np.abs(x) ** inv, axis=-1)
    horiz = x[..., 0] ** 2 + x[..., 1] ** 2
    return (horiz * horiz + x[..., 2] ** 2) ** 0.25


def dilate(points, lam: float, group: GroupSpec) -> np.ndarray:
    if not lam > 0:
        raise InvalidInputError(f"dilation factor must be positive, got {lam}")
    x = np.asarray(points, dtype=float)
    if x.shape[-1:] != (group.N,):
        raise InvalidInputError(f"expected points with last dimension {group.N}, got shape {x.shape}")
    return x * lam ** np.asarray(group.dilation_exponents)


def box_halfwidths(group: GroupSpec, norm: QuasiNormSpec, radius: float = 1.0) -> np.ndarray:
    """Half-widths of the dilated bounding box containing ``B(0, radius)``."""
    return norm.bounding_radius * radius ** np.asarray(group.dilation_exponents)


def verify_bounding_box(group: GroupSpec, norm: QuasiNormSpec, samples: int = 20_000,
                        seed: int = rng.DEFAULT_SEED, margin: float = 1.5) -> None:
    """Rejection test: no point outside ``[-b, b]^N`` may lie in the unit ball.

    Points are drawn from the shell between the declared box and a box
    ``margin`` times larger.
    """
    check_compatible(norm, group)
    b = norm.bounding_radius
    g = rng.generator(seed, 99)
    x = g.uniform(-margin * b, margin * b, size=(samples, group.N))
    outside = np.any(np.abs(x) > b, axis=1)
    shell = x[outside]
    r = quasi_norm(shell, norm, group)
    bad = shell[r < 1.0]
    if bad.size:
        raise GeometryConfigError(
            f"unit {norm.kind.value} ball leaks outside [-{b:g}, {b:g}]^{group.N}: "
            f"point {bad[0].tolist()} has norm {float(quasi_norm(bad[0], norm, group)):.6g} < 1")


def _unit_ball_volume(group: GroupSpec, norm: QuasiNormSpec, samples: int, seed: int,
                      chunk_size: int) -> VolumeEstimate:
    b = norm.bounding_radius
    box = (2 * b) ** group.N
    hits = 0
    for g, count in rng.chunks(seed, samples, chunk_size):
        x = g.uniform(-b, b, size=(count, group.N))
        hits += int(np.count_nonzero(quasi_norm(x, norm, group) < 1.0))
    frac = hits / samples
    return VolumeEstimate(box * frac, box * math.sqrt(frac * (1 - frac) / samples))


def ball_volume(group: GroupSpec, norm: QuasiNormSpec, R: float = 1.0,
                samples: int = DEFAULT_SAMPLES, seed: int = rng.DEFAULT_SEED,
                chunk_size: int = rng.DEFAULT_CHUNK) -> VolumeEstimate:
    """Monte Carlo Lebesgue measure of ``{|x| < R}``.

    The unit ball is estimated by hit-or-miss sampling in its bounding box
    and rescaled by ``R**Q``; the scaling law is therefore exact by
    construction and only the unit-ball estimate carries noise.
    """
    if not R > 0:
        raise InvalidInputError(f"R must be positive, got {R}")
    if samples < MIN_SAMPLES:
        raise InvalidInputError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    verify_bounding_box(group, norm, seed=seed)
    vol, se = _unit_ball_volume(group, norm, samples, seed, chunk_size)
    scale = R ** group.Q
    return VolumeEstimate(vol * scale, se * scale)


def analytic_sphere_measure(group: GroupSpec, norm: QuasiNormSpec) -> float | None:
    """Closed-form ``|S|`` where one is known, else None."""
    check_compatible(norm, group)
    n = group.N
    if norm.kind is NormKind.EUCLIDEAN:
        if n == 1:
            # two points, each of unit mass
            return 2.0
        return n * math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    if norm.kind is NormKind.SUP:
        # unit ball is the cube [-1, 1]^N
        return group.Q * 2.0**n
    return None


def sphere_measure(group: GroupSpec, norm: QuasiNormSpec, samples: int = DEFAULT_SAMPLES,
                   seed: int = rng.DEFAULT_SEED, chunk_size: int = rng.DEFAULT_CHUNK) -> SphereMeasure:
    """``|S| = Q * vol(B(0, 1))``, analytic when available, otherwise Monte Carlo."""
    exact = analytic_sphere_measure(group, norm)
    if exact is not None:
        return SphereMeasure(exact, 0.0, SphereMethod.ANALYTIC)
    vol, se = ball_volume(group, norm, 1.0, samples, seed, chunk_size)
    return SphereMeasure(group.Q * vol, group.Q * se, SphereMethod.MONTE_CARLO, seed, samples)


def polar_consistency_check(radial_profile: Callable[[np.ndarray], np.ndarray],
                            group: GroupSpec, norm: QuasiNormSpec,
                            support: tuple[float, float],
                            samples: int = DEFAULT_SAMPLES, seed: int = rng.DEFAULT_SEED,
                            sphere: SphereMeasure | None = None,
                            breakpoints: Sequence[float] = (),
                            chunk_size: int = rng.DEFAULT_CHUNK) -> VerificationReport:
    """Compare ``int_G g(|x|) dx`` (N-dim MC) with ``|S| int_0^inf g(r) r^(Q-1) dr``."""
    r_min, r_max = map(float, support)
    if not 0 <= r_min < r_max:
        raise InvalidInputError(f"bad support {support}")
    Q = group.Q
    if sphere is None:
        sphere = sphere_measure(group, norm, seed=seed + 1)
    verify_bounding_box(group, norm, seed=seed)

    half = box_halfwidths(group, norm, r_max)
    box = float(np.prod(2 * half))
    total = 0.0
    total_sq = 0.0
    for g, count in rng.chunks(seed, samples, chunk_size, stream=1):
        x = g.uniform(-half, half, size=(count, group.N))
        r = quasi_norm(x, norm, group)
        inside = (r >= r_min) & (r <= r_max)
        vals = np.zeros(count)
        vals[inside] = radial_profile(r[inside])
        if not np.all(np.isfinite(vals)):
            k = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise NumericError(f"profile is not finite at r = {r[k]:.6g} (value {vals[k]})")
        total += float(vals.sum())
        total_sq += float(np.dot(vals, vals))
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    mc = box * mean
    mc_se = box * math.sqrt(var / samples)

    pts = [p for p in breakpoints if r_min < p < r_max]
    radial, quad_err = integrate.quad(lambda t: float(radial_profile(np.array([t]))[0]) * t ** (Q - 1),
                                      r_min, r_max, points=pts or None, limit=500)
    polar = sphere.value * radial
    polar_se = sphere.estimate_stderr * abs(radial)
    combined = math.hypot(mc_se, polar_se)
    diff = abs(mc - polar)
    passed = diff <= 3 * combined + 1e-12 * max(abs(polar), 1.0) + quad_err
    return VerificationReport(
        check="polar_consistency",
        passed=bool(passed),
        value=mc,
        oracle=polar,
        stderr=combined,
        tolerance=3 * combined,
        seed=seed,
        details={
            "group": group.name or list(group.dilation_exponents),
            "norm": norm.kind.value,
            "relative_discrepancy": diff / abs(polar) if polar else diff,
            "mc_stderr": mc_se,
            "sphere": sphere.value,
            "sphere_method": sphere.method.value,
            "samples": samples,
        },
    )
