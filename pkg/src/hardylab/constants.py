"""Closed-form sharp constants and the parameter relations around them.

All Gamma-function blocks are evaluated through ``lgamma`` because the
arguments ``pq/(q-p)`` blow up as ``q -> p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InadmissibleParametersError, InvalidInputError, NumericError
from .geometry import SphereMeasure, as_sphere

P_EQ_Q_SWITCH = 1e-8
ADMISSIBILITY_TOL = 1e-10


def conjugate_exponent(p: float) -> float:
    return p / (p - 1.0)


def _check_pq(p: float, q: float) -> None:
    if not (p > 1 and math.isfinite(p)):
        raise InvalidInputError(f"need 1 < p < inf, got p={p}")
    if not (q >= p and math.isfinite(q)):
        raise InvalidInputError(f"need p <= q < inf, got p={p}, q={q}")


@dataclass(frozen=True)
class HardyParams:
    p: float
    q: float
    alpha: float
    beta: float

    def __post_init__(self):
        _check_pq(self.p, self.q)

    @property
    def p_conj(self) -> float:
        return conjugate_exponent(self.p)

    @classmethod
    def for_group(cls, p: float, q: float, alpha: float, Q: float = 1.0) -> HardyParams:
        """Parameters with ``beta`` solved from the scaling relation."""
        return cls(p, q, alpha, beta_from_alpha(p, q, alpha, Q))


@dataclass(frozen=True)
class ReductionExponents:
    lam: float
    mu: float
    gamma: float
    delta: float
    alpha_1d: float
    beta_1d: float
    alpha_tilde: float
    beta_tilde: float


@dataclass(frozen=True)
class ConjugateParams:
    alpha0: float
    beta0: float


def scaling_defect(p: float, q: float, alpha: float, beta: float, Q: float) -> float:
    """``q(alpha+Q) - p(beta+Q) - pqQ``; zero exactly on the admissible hyperplane."""
    return q * (alpha + Q) - p * (beta + Q) - p * q * Q


def beta_from_alpha(p: float, q: float, alpha: float, Q: float = 1.0) -> float:
    return q * (alpha + Q) / p - q * Q - Q


def admissible_hardy_group(params: HardyParams, Q: float, tol: float = ADMISSIBILITY_TOL) -> bool:
    p, q = params.p, params.q
    if not params.alpha < Q * (p - 1):
        return False
    return abs(scaling_defect(p, q, params.alpha, params.beta, Q)) <= tol * p * q * Q


def admissible_conjugate_group(params: HardyParams, Q: float, tol: float = ADMISSIBILITY_TOL) -> bool:
    p, q = params.p, params.q
    if not params.alpha > Q * (p - 1):
        return False
    return abs(scaling_defect(p, q, params.alpha, params.beta, Q)) <= tol * p * q * Q


def require_admissible(params: HardyParams, Q: float, conjugate: bool = False,
                       tol: float = ADMISSIBILITY_TOL) -> None:
    """Raise naming the first violated condition."""
    p, q, a, b = params.p, params.q, params.alpha, params.beta
    if conjugate and not a > Q * (p - 1):
        raise InadmissibleParametersError(
            f"alpha > Q(p-1) violated: alpha={a:g}, Q(p-1)={Q * (p - 1):g}", "alpha > Q(p-1)")
    if not conjugate and not a < Q * (p - 1):
        raise InadmissibleParametersError(
            f"alpha < Q(p-1) violated: alpha={a:g}, Q(p-1)={Q * (p - 1):g}", "alpha < Q(p-1)")
    defect = scaling_defect(p, q, a, b, Q)
    if abs(defect) > tol * p * q * Q:
        raise InadmissibleParametersError(
            f"q(alpha+Q) - p(beta+Q) = pqQ violated: defect {defect:.3g} "
            f"(beta should be {beta_from_alpha(p, q, a, Q):.12g})",
            "q(alpha+Q) - p(beta+Q) = pqQ")


def log_gamma_block(p: float, q: float) -> float:
    """log of ((q-p)/p) Gamma(pq/(q-p)) / (Gamma(p/(q-p)) Gamma(p(q-1)/(q-p)))."""
    d = q - p
    return (math.log(d / p) + math.lgamma(p * q / d)
            - math.lgamma(p / d) - math.lgamma(p * (q - 1) / d))


def _log_shape_factor(p: float, q: float) -> float:
    """log of (p'/q)^(1/q) * block^(1/p - 1/q): the part independent of alpha and |S|.

    The exponent on p'/q is 1/q: with it the alpha = 0 case is Bliss's
    constant, attained by his explicit extremals.  An exponent of 1/p gives a
    smaller number that those extremals exceed whenever p < q.  Both forms
    agree in the limit q -> p.
    """
    pc = conjugate_exponent(p)
    return math.log(pc / q) / q + (1 / p - 1 / q) * log_gamma_block(p, q)


def sharp_constant_1d(p: float, q: float, alpha: float, switch: float = P_EQ_Q_SWITCH) -> float:
    """Sharp constant D_{p,q,alpha} of the half-line Hardy inequality."""
    _check_pq(p, q)
    if not alpha < p - 1:
        raise InadmissibleParametersError(
            f"alpha < p-1 violated: alpha={alpha:g}, p-1={p - 1:g}", "alpha < p-1")
    if q - p < switch:
        return p / (p - 1 - alpha)
    pc = conjugate_exponent(p)
    return math.exp((1 / pc + 1 / q) * math.log((p - 1) / (p - 1 - alpha))
                    + _log_shape_factor(p, q))


def _group_constant(p: float, q: float, gap: float, sphere: SphereMeasure, switch: float) -> float:
    S = sphere.value
    if q - p < switch:
        return p * S / gap
    pc = conjugate_exponent(p)
    return math.exp((1 + 1 / q - 1 / p) * math.log(S)
                    + (1 / pc + 1 / q) * math.log((p - 1) / gap)
                    + _log_shape_factor(p, q))


def sharp_constant_group(p: float, q: float, Q: float, alpha: float,
                         sphere: SphereMeasure | float, switch: float = P_EQ_Q_SWITCH) -> float:
    """Sharp C(p, q, Q, alpha) for the ball-integral Hardy inequality on a homogeneous group."""
    _check_pq(p, q)
    gap = Q * (p - 1) - alpha
    if not gap > 0:
        raise InadmissibleParametersError(
            f"alpha < Q(p-1) violated: alpha={alpha:g}, Q(p-1)={Q * (p - 1):g}", "alpha < Q(p-1)")
    return _group_constant(p, q, gap, as_sphere(sphere), switch)


def sharp_constant_conjugate_group(p: float, q: float, Q: float, alpha: float,
                                   sphere: SphereMeasure | float,
                                   switch: float = P_EQ_Q_SWITCH) -> float:
    """Sharp constant of the exterior (conjugate) Hardy inequality; needs alpha > Q(p-1)."""
    _check_pq(p, q)
    gap = alpha - Q * (p - 1)
    if not gap > 0:
        raise InadmissibleParametersError(
            f"alpha > Q(p-1) violated: alpha={alpha:g}, Q(p-1)={Q * (p - 1):g}", "alpha > Q(p-1)")
    return _group_constant(p, q, gap, as_sphere(sphere), switch)


def conjugate_params_1d(p: float, alpha: float, q: float) -> ConjugateParams:
    """Map Hardy-side ``alpha`` to the conjugate-side ``(alpha0, beta0)`` with the same constant."""
    if not alpha < p - 1:
        raise InadmissibleParametersError(
            f"alpha < p-1 violated: alpha={alpha:g}, p-1={p - 1:g}", "alpha < p-1")
    alpha0 = -alpha - 2 + 2 * p
    return ConjugateParams(alpha0, beta_from_alpha(p, q, alpha0, 1.0))


def hardy_alpha_from_conjugate(p: float, alpha0: float) -> float:
    # the reflection alpha <-> alpha0 about p-1 is an involution
    return -alpha0 - 2 + 2 * p


def reduction_exponents(params: HardyParams, Q: float) -> ReductionExponents:
    p, q, a, b = params.p, params.q, params.alpha, params.beta
    pc = params.p_conj
    lam = Q * (1 / p - 1 / q)
    mu = a / p
    gamma = mu - (Q - 1) / pc
    delta = lam / Q
    lhs = (Q - 1) / q + lam + mu - Q
    rhs = delta + gamma - 1
    if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs), abs(rhs)):
        raise NumericError(f"exponent identity failed: {lhs!r} != {rhs!r}")
    return ReductionExponents(
        lam=lam, mu=mu, gamma=gamma, delta=delta,
        alpha_1d=a / Q, beta_1d=b / Q,
        alpha_tilde=a - (p - 1) * (Q - 1),
        beta_tilde=b + Q - 1,
    )


def bracket_bounds(p: float, q: float, Q: float, alpha: float, beta: float,
                   sphere: SphereMeasure | float) -> tuple[float, float]:
    """Two-sided (non-sharp) bounds on the Hardy constant known before the sharp value."""
    S = as_sphere(sphere).value
    pc = conjugate_exponent(p)
    base = alpha * (1 - pc) + Q
    if not (base > 0 and beta + Q < 0):
        raise InadmissibleParametersError(
            "bracket needs alpha < Q(p-1) and beta + Q < 0", "alpha < Q(p-1)")
    lower = S ** (1 / q + 1 / pc) / (abs(beta + Q) ** (1 / q) * base ** (1 / pc))
    upper = pc ** (1 / pc) * p ** (1 / q) * lower
    return lower, upper
