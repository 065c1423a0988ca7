import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.constants import HardyParams, beta_from_alpha
from hardylab.errors import InadmissibleParametersError
from hardylab.operators import (
    conjugate_ratio_1d,
    group_ratio_radial,
    hardy_ratio_1d,
    mapped_1d_exponents,
    radial_scale_factor,
)
from hardylab.radial import RadialFunction, RadialGrid
from hardylab.testfunctions import bump, indicator, random_smooth_profile, truncated_power

GRID = RadialGrid()


def ratio_1d(profile, p=2, q=2, alpha=0.0, grid=GRID):
    u = RadialFunction.from_callable(grid, profile)
    return hardy_ratio_1d(u, p, q, alpha, beta_from_alpha(p, q, alpha))


def test_indicator_closed_form():
    # F = x-1 on [1,2], 1 beyond: LHS^2 = 2 - 2 log 2, RHS = 1
    res = ratio_1d(indicator(1, 2))
    assert res.ratio == pytest.approx(math.sqrt(2 - 2 * math.log(2)), rel=1e-4)
    assert res.constant == 2.0


def test_constant_on_unit_interval():
    # F = x on [0,1] and 1 beyond, so LHS^2 = 1 + 1 = 2: ratio sqrt(2)
    assert ratio_1d(indicator(1e-6, 1)).ratio == pytest.approx(math.sqrt(2), rel=1e-4)


def test_near_critical_truncated_power_against_quadrature():
    s, eps = -0.51, 1e-6
    res = ratio_1d(truncated_power(s, eps, 1.0))
    F = lambda x: (x ** (s + 1) - eps ** (s + 1)) / (s + 1)
    lhs2 = mp.quad(lambda x: F(x) ** 2 / x**2, [eps, 1e-4, 1e-2, 1]) + F(1) ** 2
    rhs2 = (1 - eps ** (2 * s + 1)) / (2 * s + 1)
    assert res.ratio == pytest.approx(float(mp.sqrt(lhs2 / rhs2)), rel=1e-4)
    assert res.ratio == pytest.approx(1.8491, abs=1e-4)


def test_zero_function_has_zero_ratio():
    assert hardy_ratio_1d(RadialFunction.zeros(GRID), 2, 2, 0, -2).ratio == 0.0


def test_signed_input_flagged():
    res = ratio_1d(lambda r: np.sin(np.log(r)) * bump(3)(r))
    assert res.signed_input and res.warnings


def test_inadmissible_raises():
    u = RadialFunction.from_callable(GRID, bump(1))
    with pytest.raises(InadmissibleParametersError):
        hardy_ratio_1d(u, 2, 2, 1.0, -1.0)
    with pytest.raises(InadmissibleParametersError):
        conjugate_ratio_1d(u, 2, 2, 0.0, -2.0)


@given(seed=st.integers(0, 10**6))
def test_mirror_maps_hardy_to_conjugate(seed):
    p, q, alpha = 2.0, 3.0, 0.3
    f = random_smooth_profile(np.random.default_rng(seed))
    hardy = ratio_1d(f, p, q, alpha)
    alpha0 = 2 * p - 2 - alpha
    mirrored = RadialFunction.from_callable(GRID, lambda t: t**-2.0 * f(1 / t))
    conj = conjugate_ratio_1d(mirrored, p, q, alpha0, beta_from_alpha(p, q, alpha0))
    assert conj.ratio == pytest.approx(hardy.ratio, rel=1e-6)
    assert conj.constant == pytest.approx(hardy.constant, rel=1e-12)


@given(seed=st.integers(0, 10**6), Q=st.sampled_from([2.0, 3.0, 4.0]), p=st.floats(1.2, 4),
       dq=st.floats(0, 3), a=st.floats(-2, 0.95), S=st.floats(1, 30))
def test_group_ratio_is_scaled_1d_ratio(seed, Q, p, dq, a, S):
    params = HardyParams.for_group(p, p + dq, a * Q * (p - 1), Q)
    g = RadialFunction.from_callable(GRID, random_smooth_profile(np.random.default_rng(seed)))
    group = group_ratio_radial(g, params, Q, S)
    a1, b1 = mapped_1d_exponents(params, Q)
    one_d = hardy_ratio_1d(g.times_power(Q - 1), params.p, params.q, a1, b1)
    assert group.ratio == pytest.approx(radial_scale_factor(params, S) * one_d.ratio, rel=1e-10)
    assert group.ratio <= group.constant * (1 + 1e-3)


def test_plane_indicator_closed_form():
    # unit disc in R^2, p = q = 2: ratio sqrt(2) pi
    params = HardyParams.for_group(2, 2, 0, 2)
    g = RadialFunction.from_callable(GRID, indicator(1e-6, 1))
    assert group_ratio_radial(g, params, 2, 2 * math.pi).ratio == pytest.approx(math.sqrt(2) * math.pi, rel=1e-4)
