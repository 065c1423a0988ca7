"""Hardy and conjugate Hardy functionals on radial data.

The 1D ratios evaluate both sides of the half-line inequalities on a
:class:`~hardylab.radial.RadialGrid`.  The group ratio for a radial function
``u(x) = g(|x|)`` uses polar coordinates: the ball integral becomes
``|S| int_0^r g(t) t^(Q-1) dt``, so no N-dimensional integration is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import (
    HardyParams,
    hardy_alpha_from_conjugate,
    require_admissible,
    sharp_constant_1d,
    sharp_constant_group,
)
from .errors import DegenerateInputError
from .geometry import SphereMeasure, as_sphere
from .radial import (
    RadialFunction,
    cumulative_integral,
    tail_integral,
    weighted_lq_norm,
)


@dataclass
class RatioResult:
    lhs: float
    rhs: float
    ratio: float
    constant: float
    margin: float
    stderr: float = 0.0
    tail_fraction: float = 0.0
    signed_input: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def attainment(self) -> float:
        return self.ratio / self.constant

    def within(self, rel_slack: float) -> bool:
        return self.ratio <= self.constant * (1 + rel_slack)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    if lhs == 0:
        return 0.0
    raise DegenerateInputError(f"right-hand side vanishes but left-hand side is {lhs:.6g}")


def _result(lhs: float, rhs: float, constant: float, u: RadialFunction,
            tail: float = 0.0, stderr: float = 0.0) -> RatioResult:
    ratio = _ratio(lhs, rhs)
    res = RatioResult(lhs, rhs, ratio, constant, constant - ratio, stderr=stderr, tail_fraction=tail,
                      signed_input=not u.is_nonnegative)
    if res.signed_input:
        res.warnings.append("signed input: the inequality is verified on nonnegative functions")
    return res


def hardy_ratio_1d(u: RadialFunction, p: float, q: float, alpha: float, beta: float) -> RatioResult:
    """LHS/RHS of ``(int (int_0^x u)^q x^beta)^(1/q) <= D (int u^p x^alpha)^(1/p)``."""
    require_admissible(HardyParams(p, q, alpha, beta), 1.0)
    F = cumulative_integral(u)
    lhs = weighted_lq_norm(F, beta, q)
    rhs = weighted_lq_norm(u, alpha, p)
    # omitted LHS^q mass on (r_max, inf), where F is frozen at F(r_max)
    r = u.grid.r_max
    omitted = abs(F.values[-1]) ** q * r ** (beta + 1) / abs(beta + 1)
    tail = omitted / lhs**q if lhs > 0 else 0.0
    return _result(lhs, rhs, sharp_constant_1d(p, q, alpha), u, tail)


def conjugate_ratio_1d(u: RadialFunction, p: float, q: float, alpha0: float, beta0: float) -> RatioResult:
    """LHS/RHS of the exterior inequality ``(int (int_x^inf u)^q x^beta0)^(1/q) <= D (...)``."""
    require_admissible(HardyParams(p, q, alpha0, beta0), 1.0, conjugate=True)
    F = tail_integral(u)
    lhs = weighted_lq_norm(F, beta0, q)
    rhs = weighted_lq_norm(u, alpha0, p)
    r = u.grid.r_min
    omitted = abs(F.values[0]) ** q * r ** (beta0 + 1) / (beta0 + 1)
    tail = omitted / lhs**q if lhs > 0 else 0.0
    constant = sharp_constant_1d(p, q, hardy_alpha_from_conjugate(p, alpha0))
    return _result(lhs, rhs, constant, u, tail)


def group_ratio_radial(g: RadialFunction, params: HardyParams, Q: float,
                       sphere: SphereMeasure | float) -> RatioResult:
    """Group Hardy ratio for ``u(x) = g(|x|)`` via the exact polar reduction."""
    require_admissible(params, Q)
    S = as_sphere(sphere)
    p, q = params.p, params.q
    h = g.times_power(Q - 1)
    F = cumulative_integral(h)
    lhs = S.value ** (1 / q) * S.value * weighted_lq_norm(F, params.beta + Q - 1, q)
    rhs = S.value ** (1 / p) * weighted_lq_norm(g, params.alpha + Q - 1, p)
    constant = sharp_constant_group(p, q, Q, params.alpha, S)
    b = params.beta + Q - 1
    r = g.grid.r_max
    omitted = abs(F.values[-1]) ** q * r ** (b + 1) / abs(b + 1)
    inner = weighted_lq_norm(F, b, q) ** q
    tail = omitted / inner if inner > 0 else 0.0
    res = _result(lhs, rhs, constant, g, tail)
    # every side carries a power of |S|; the ratio scales like |S|^(1 + 1/q - 1/p)
    res.stderr = res.ratio * (1 + 1 / q - 1 / p) * S.estimate_stderr / S.value
    return res


def mapped_1d_exponents(params: HardyParams, Q: float) -> tuple[float, float]:
    """``(alpha~, beta~)`` such that the group ratio of g equals |S|^k times the 1D ratio of g r^(Q-1)."""
    p = params.p
    return params.alpha - (p - 1) * (Q - 1), params.beta + Q - 1


def sphere_power(params: HardyParams) -> float:
    return 1 + 1 / params.q - 1 / params.p


def radial_scale_factor(params: HardyParams, sphere: SphereMeasure | float) -> float:
    return math.pow(as_sphere(sphere).value, sphere_power(params))
