"""N-dimensional Monte Carlo versions of the group functionals.

These never use the radial reduction, so on radial inputs they serve as an
independent check of it, and on non-radial inputs they test the inequality
itself.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np

from . import rng
from .constants import HardyParams, require_admissible, sharp_constant_group
from .errors import InvalidInputError, SamplingError
from .geometry import (
    GroupSpec,
    QuasiNormSpec,
    SphereMeasure,
    as_sphere,
    box_halfwidths,
    quasi_norm,
    sphere_measure,
    verify_bounding_box,
)
from .operators import RatioResult
from .reports import VerificationReport

Evaluator = Callable[[np.ndarray], np.ndarray]

STARVATION_RATE = 1e-3
OUTER_BATCH = 2048


HEAVY_TAIL_SHARE = 0.25


class _Accumulator:
    """Running sum / sum of squares of iid terms, plus the largest single square."""

    def __init__(self):
        self.n = 0
        self.s = 0.0
        self.ss = 0.0
        self.max_sq = 0.0

    def add(self, values: np.ndarray) -> None:
        self.n += values.size
        self.s += float(values.sum())
        sq = values * values
        self.ss += float(sq.sum())
        if sq.size:
            self.max_sq = max(self.max_sq, float(sq.max()))

    @property
    def heavy_tailed(self) -> bool:
        """One sample carries a large share of the second moment: the stderr is not trustworthy."""
        return self.ss > 0 and self.max_sq > HEAVY_TAIL_SHARE * self.ss

    @property
    def mean(self) -> float:
        return self.s / self.n

    @property
    def stderr(self) -> float:
        m = self.mean
        return math.sqrt(max(self.ss / self.n - m * m, 0.0) / self.n)


def _box_integral(u: Evaluator, transform: Callable[[np.ndarray, np.ndarray], np.ndarray],
                  half: np.ndarray, samples: int, seed: int, stream: int) -> tuple[float, float, bool]:
    vol = float(np.prod(2 * half))
    acc = _Accumulator()
    for g, count in rng.chunks(seed, samples, stream=stream):
        x = g.uniform(-half, half, size=(count, half.size))
        acc.add(transform(x, np.asarray(u(x), dtype=float)))
    return vol * acc.mean, vol * acc.stderr, acc.heavy_tailed


def variance_is_finite(params: HardyParams, Q: float, s: float) -> bool:
    """Whether both Monte Carlo integrands have finite variance for ``u ~ |x|^s`` at the origin.

    The outer integrand behaves like ``r^(beta + q(Q+s))`` and the right-hand
    one like ``r^(ps + alpha)``; a power ``r^k`` is square integrable near
    the origin iff ``2k + Q > 0``.
    """
    outer = params.beta + params.q * (Q + s)
    rhs = params.p * s + params.alpha
    return Q + s > 0 and 2 * outer + Q > 0 and 2 * rhs + Q > 0


def group_ratio_montecarlo(u: Evaluator, params: HardyParams, group: GroupSpec,
                           norm: QuasiNormSpec, support: Sequence[float],
                           samples: int = 20_000, seed: int = rng.DEFAULT_SEED,
                           sphere: SphereMeasure | float | None = None,
                           inner_samples: int | None = None) -> RatioResult:
    """Nested Monte Carlo estimate of the group Hardy ratio for a general ``u >= 0``.

    ``support`` gives half-widths of a centred box outside which ``u``
    vanishes.  Let ``R`` be the largest quasi-norm on that box.  For
    ``|x| < R`` the ball integral is estimated by rejection sampling inside
    the dilated bounding box of ``B(0, |x|)``.  For ``|x| >= R`` the ball
    integral equals the total mass ``M`` and the outer integral is done in
    closed form: ``M^q |S| R^(beta+Q) / |beta+Q|``.
    """
    require_admissible(params, group.Q)
    p, q, alpha, beta = params.p, params.q, params.alpha, params.beta
    Q = group.Q
    half_u = np.asarray(support, dtype=float)
    if half_u.shape != (group.N,) or np.any(half_u <= 0):
        raise InvalidInputError(f"support must be {group.N} positive half-widths")
    verify_bounding_box(group, norm, seed=seed)
    S = as_sphere(sphere) if sphere is not None else sphere_measure(group, norm, seed=seed + 1)
    m_inner = inner_samples or math.isqrt(samples - 1) + 1

    R = float(quasi_norm(half_u, norm, group))
    outer_half = box_halfwidths(group, norm, R)
    outer_vol = float(np.prod(2 * outer_half))

    # integer q: product of q independent inner estimates is unbiased for I^q
    groups = int(q) if float(q).is_integer() and m_inner >= q else 1
    per_group = m_inner // groups
    acc = _Accumulator()
    accepted = 0
    proposed = 0
    for g, count in rng.chunks(seed, samples, chunk_size=OUTER_BATCH, stream=2):
        x = g.uniform(-outer_half, outer_half, size=(count, group.N))
        r = quasi_norm(x, norm, group)
        live = (r < R) & (r > 0)
        terms = np.zeros(count)
        if np.any(live):
            rl = r[live]
            ball_half = norm.bounding_radius * rl[:, None] ** np.asarray(group.dilation_exponents)
            half = np.minimum(ball_half, half_u)
            vol = np.prod(2 * half, axis=1)
            est = np.ones(rl.size)
            for _ in range(groups):
                y = g.uniform(-1.0, 1.0, size=(rl.size, per_group, group.N)) * half[:, None, :]
                ry = quasi_norm(y, norm, group)
                hit = ry < rl[:, None]
                accepted += int(hit.sum())
                proposed += hit.size
                uy = np.asarray(u(y.reshape(-1, group.N)), dtype=float).reshape(rl.size, per_group)
                est *= vol * np.where(hit, uy, 0.0).mean(axis=1)
            if groups == 1:
                est = np.abs(est) ** q
            terms[live] = est * rl**beta
        acc.add(outer_vol * terms)

    mass, mass_se, _ = _box_integral(u, lambda x, v: v, half_u, samples, seed, stream=3)
    B, B_se, rhs_heavy = _box_integral(
        u, lambda x, v: np.abs(v) ** p * quasi_norm(x, norm, group) ** alpha, half_u, samples, seed, stream=4)

    exponent = beta + Q
    geom = R**exponent / abs(exponent)
    tail = abs(mass) ** q * S.value * geom
    tail_var = ((q * abs(mass) ** (q - 1) * S.value * geom * mass_se) ** 2
                + (abs(mass) ** q * geom * S.estimate_stderr) ** 2)
    A = acc.mean + tail
    A_se = math.sqrt(acc.stderr**2 + tail_var)

    constant = sharp_constant_group(p, q, Q, alpha, S)
    if B <= 0:
        res = RatioResult(0.0, 0.0, 0.0, constant, constant)
        return res
    lhs = A ** (1 / q)
    rhs = B ** (1 / p)
    ratio = lhs / rhs
    rel = math.hypot(A_se / (q * A), B_se / (p * B)) if A > 0 else 0.0
    res = RatioResult(lhs, rhs, ratio, constant, constant - ratio, stderr=ratio * rel,
                      tail_fraction=tail / A if A > 0 else 0.0)
    rate = accepted / proposed if proposed else 1.0
    if rate < STARVATION_RATE:
        res.warnings.append(f"inner-sample starvation: acceptance rate {rate:.2e}")
    if acc.heavy_tailed or rhs_heavy:
        res.warnings.append("heavy-tailed integrand: a single sample dominates the variance, "
                            "stderr is unreliable")
    if groups == 1 and q > 1:
        res.warnings.append("non-integer q: inner estimate raised to power q is biased upward")
    return res


def mc_bound_holds(res: RatioResult) -> bool:
    """Ratio below the constant up to three relative standard errors."""
    rel = res.stderr / res.ratio if res.ratio > 0 else 0.0
    return res.ratio <= res.constant * (1 + 3 * rel)


def holder_sphere_check(u: Evaluator, rho: float, p: float, group: GroupSpec,
                        norm: QuasiNormSpec, sphere: SphereMeasure | float,
                        samples: int = 200_000, seed: int = rng.DEFAULT_SEED,
                        eps: float = 1e-2, expect_equality: bool = False) -> VerificationReport:
    """Compare ``U(rho)^p`` with ``|S|^(p-1) int_S |u(rho s)|^p ds`` on a thin annulus.

    Spherical integrals are obtained as annulus integrals divided by the
    radial measure ``int r^(Q-1) dr`` of the annulus.  The check passes when
    the right side exceeds the left by more than ``-3`` standard errors; with
    ``expect_equality`` it must also not exceed it by more than ``3``.
    """
    if not rho > 0:
        raise InvalidInputError(f"rho must be positive, got {rho}")
    S = as_sphere(sphere)
    Q = group.Q
    lo, hi = rho * (1 - eps), rho * (1 + eps)
    half = box_halfwidths(group, norm, hi)
    vol = float(np.prod(2 * half))
    radial_measure = (hi**Q - lo**Q) / Q

    n = 0
    sums = np.zeros(2)
    cross = np.zeros((2, 2))
    in_annulus = 0
    for g, count in rng.chunks(seed, samples, stream=5):
        x = g.uniform(-half, half, size=(count, group.N))
        r = quasi_norm(x, norm, group)
        inside = (r >= lo) & (r < hi)
        in_annulus += int(inside.sum())
        a = np.zeros(count)
        a[inside] = np.abs(np.asarray(u(x[inside]), dtype=float))
        z = np.stack([a, a**p])
        n += count
        sums += z.sum(axis=1)
        cross += z @ z.T
    if in_annulus == 0:
        raise SamplingError(f"no samples landed in the annulus around rho = {rho}")
    mean = sums / n
    cov = (cross / n - np.outer(mean, mean)) / n
    scale = vol / radial_measure
    U = scale * mean[0]
    W = scale * mean[1]
    lhs = U**p
    rhs = S.value ** (p - 1) * W
    grad = np.array([-p * scale**p * mean[0] ** (p - 1), S.value ** (p - 1) * scale])
    var = float(grad @ cov @ grad) + ((p - 1) * S.value ** (p - 2) * W * S.estimate_stderr) ** 2
    se = math.sqrt(max(var, 0.0))
    margin = rhs - lhs
    passed = margin >= -3 * se
    if expect_equality:
        passed = passed and margin <= 3 * se
    return VerificationReport(
        check="holder_sphere",
        passed=bool(passed),
        value=lhs,
        oracle=rhs,
        stderr=se,
        tolerance=3 * se,
        seed=seed,
        details={"rho": rho, "p": p, "margin": margin, "margin_in_stderr": margin / se if se > 0 else math.inf,
                 "annulus_samples": in_annulus, "expect_equality": expect_equality},
    )
