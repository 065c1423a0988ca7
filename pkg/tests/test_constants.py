import math

import mpmath as mp
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hardylab.constants import (
    HardyParams,
    admissible_hardy_group,
    beta_from_alpha,
    bracket_bounds,
    conjugate_params_1d,
    reduction_exponents,
    require_admissible,
    scaling_defect,
    sharp_constant_1d,
    sharp_constant_conjugate_group,
    sharp_constant_group,
)
from hardylab.errors import InadmissibleParametersError, InvalidInputError

mp.mp.dps = 40


def mp_constant(p, q, alpha, sphere=1, Q=1):
    """Independent high-precision evaluation of the closed form."""
    p, q, alpha, S, Q = map(mp.mpf, (p, q, alpha, sphere, Q))
    pc = p / (p - 1)
    gap = Q * (p - 1) - alpha
    if q == p:
        return p * S / gap
    d = q - p
    block = (d / p) * mp.gamma(p * q / d) / (mp.gamma(p / d) * mp.gamma(p * (q - 1) / d))
    return (S ** (1 + 1 / q - 1 / p) * ((p - 1) / gap) ** (1 / pc + 1 / q)
            * (pc / q) ** (1 / q) * block ** (1 / p - 1 / q))


TUPLES = [(2, 4, 0), (2, 3, 0.5), (3, 5, -1), (1.5, 2.5, 0.2), (4, 9, 2.5), (2, 2.001, 0), (1.1, 7, -3)]


@pytest.mark.parametrize("p,q,alpha", TUPLES)
def test_1d_constant_matches_high_precision(p, q, alpha):
    assert sharp_constant_1d(p, q, alpha) == pytest.approx(float(mp_constant(p, q, alpha)), rel=1e-12)


@given(p=st.floats(1.05, 6), dq=st.floats(1e-3, 6), a=st.floats(-5, 0.999), Q=st.sampled_from([1, 2, 3, 4, 7]),
       S=st.floats(0.1, 50))
def test_group_constant_matches_high_precision(p, dq, a, Q, S):
    q = p + dq
    alpha = a * Q * (p - 1)
    assume(Q * (p - 1) - alpha > 1e-6)
    got = sharp_constant_group(p, q, Q, alpha, S)
    assert got == pytest.approx(float(mp_constant(p, q, alpha, S, Q)), rel=1e-11)


def test_bliss_extremal_value():
    # u = (1+t)^-2 gives exactly (3/2)^(1/4) at p=2, q=4, alpha=0 and is an extremal
    lhs = mp.quad(lambda t: (t / (1 + t)) ** 4 * t**-3, [0, 1, mp.inf]) ** mp.mpf(0.25)
    rhs = mp.quad(lambda t: (1 + t) ** -4, [0, mp.inf]) ** mp.mpf(0.5)
    assert float(lhs / rhs) == pytest.approx(1.5**0.25, rel=1e-15)
    assert sharp_constant_1d(2, 4, 0) == pytest.approx(1.5**0.25, rel=1e-13)


@pytest.mark.parametrize("p,alpha", [(2, 0), (2, 0.5), (3, 1), (1.5, -2)])
def test_equal_exponents_closed_form(p, alpha):
    assert sharp_constant_1d(p, p, alpha) == pytest.approx(p / (p - 1 - alpha), rel=1e-15)


def test_plane_constant_is_two_pi():
    assert sharp_constant_group(2, 2, 2, 0, 2 * math.pi) == 2 * math.pi


@given(p=st.floats(1.1, 5), dq=st.floats(0, 4), a=st.floats(-3, 0.99))
def test_group_constant_at_q1_s1_is_1d(p, dq, a):
    alpha = a * (p - 1)
    assert sharp_constant_group(p, p + dq, 1, alpha, 1.0) == pytest.approx(sharp_constant_1d(p, p + dq, alpha), rel=1e-12)


@given(p=st.floats(1.1, 5), dq=st.floats(0, 4), a=st.floats(-3, 0.99))
def test_conjugate_constant_is_reflected(p, dq, a):
    alpha = a * (p - 1)
    q = p + dq
    conj = conjugate_params_1d(p, alpha, q)
    assert conj.alpha0 > p - 1
    assert sharp_constant_conjugate_group(p, q, 1, conj.alpha0, 1) == pytest.approx(sharp_constant_1d(p, q, alpha), rel=1e-12)


@given(p=st.floats(1.05, 6), dq=st.floats(0, 6), a=st.floats(-10, 0.999), Q=st.floats(1, 10))
def test_solved_beta_is_admissible_and_negative(p, dq, a, Q):
    q = p + dq
    alpha = a * Q * (p - 1)
    beta = beta_from_alpha(p, q, alpha, Q)
    assert abs(scaling_defect(p, q, alpha, beta, Q)) <= 1e-9 * p * q * Q
    assert admissible_hardy_group(HardyParams(p, q, alpha, beta), Q)
    assert beta + Q < 0


def test_violated_condition_is_named():
    with pytest.raises(InadmissibleParametersError, match=r"alpha < Q\(p-1\) violated"):
        require_admissible(HardyParams(2, 2, 2, -4), 2)
    with pytest.raises(InadmissibleParametersError, match="pqQ violated"):
        require_admissible(HardyParams(2, 2, 0, -3), 2)
    with pytest.raises(InadmissibleParametersError):
        sharp_constant_1d(2, 2, 1)
    with pytest.raises(InvalidInputError):
        sharp_constant_1d(2, 1.5, 0)
    with pytest.raises(InvalidInputError):
        sharp_constant_1d(1, 2, 0)


@given(p=st.floats(1.1, 5), dq=st.floats(0, 5), a=st.floats(-3, 0.99), Q=st.sampled_from([1, 2, 4]))
def test_reduction_exponent_identity(p, dq, a, Q):
    params = HardyParams.for_group(p, p + dq, a * Q * (p - 1), Q)
    e = reduction_exponents(params, Q)
    assert (Q - 1) / params.q + e.lam + e.mu - Q == pytest.approx(e.delta + e.gamma - 1, abs=1e-10)


@given(p=st.floats(1.05, 6), dq=st.floats(0, 6), a=st.floats(-5, 0.999), Q=st.floats(1, 8), S=st.floats(0.5, 40))
def test_constant_inside_older_bracket(p, dq, a, Q, S):
    q = p + dq
    alpha = a * Q * (p - 1)
    lo, hi = bracket_bounds(p, q, Q, alpha, beta_from_alpha(p, q, alpha, Q), S)
    C = sharp_constant_group(p, q, Q, alpha, S)
    assert lo * (1 - 1e-12) <= C <= hi * (1 + 1e-12)


def test_equal_exponents_meet_upper_bracket():
    lo, hi = bracket_bounds(2, 2, 2, 0, -4, 2 * math.pi)
    assert hi == pytest.approx(2 * math.pi, rel=1e-15)
    assert lo == pytest.approx(math.pi, rel=1e-15)


def test_continuity_across_switch():
    for p, alpha in [(2, 0), (3, 1), (1.5, -1)]:
        below = sharp_constant_1d(p, p + 1e-7, alpha)
        assert below == pytest.approx(p / (p - 1 - alpha), rel=1e-5)
