import math

import numpy as np
import pytest

from hardylab.constants import HardyParams
from hardylab.errors import InvalidInputError, SamplingError
from hardylab.geometry import EUCLIDEAN, KORANYI, SUP, GroupSpec, box_halfwidths
from hardylab.montecarlo import group_ratio_montecarlo, holder_sphere_check, mc_bound_holds, variance_is_finite
from hardylab.operators import group_ratio_radial
from hardylab.radial import RadialFunction, RadialGrid
from hardylab.testfunctions import bump, indicator, nonradial_evaluator, radial_evaluator

R2 = GroupSpec.euclidean(2)
HEIS = GroupSpec.heisenberg()
ANISO = GroupSpec.anisotropic([1, 2])
GRID = RadialGrid(n_nodes=2**12)
KORANYI_S = 2 * math.pi**2


@pytest.mark.parametrize("group,norm,S,q,profile", [
    (R2, EUCLIDEAN, 2 * math.pi, 2, indicator(0, 1)),
    (R2, EUCLIDEAN, 2 * math.pi, 3, bump(1.0)),
    (HEIS, KORANYI, KORANYI_S, 2, bump(1.0)),
    (ANISO, SUP, 12.0, 2, bump(1.5)),
])
def test_monte_carlo_agrees_with_polar_reduction(group, norm, S, q, profile):
    params = HardyParams.for_group(2, q, 0.0, group.Q)
    R = 1.5 if group is ANISO else 1.0
    mc = group_ratio_montecarlo(radial_evaluator(profile, group, norm), params, group, norm,
                                box_halfwidths(group, norm, R), samples=20_000, seed=4, sphere=S)
    radial = group_ratio_radial(RadialFunction.from_callable(GRID, profile), params, group.Q, S)
    assert abs(mc.ratio - radial.ratio) <= 4 * mc.stderr + 2e-3 * radial.ratio
    assert mc_bound_holds(mc)


def test_monte_carlo_is_reproducible():
    params = HardyParams.for_group(2, 2, 0.0, 2)
    u = radial_evaluator(bump(1), R2, EUCLIDEAN)
    a = group_ratio_montecarlo(u, params, R2, EUCLIDEAN, [1, 1], samples=5000, seed=8, sphere=2 * math.pi)
    b = group_ratio_montecarlo(u, params, R2, EUCLIDEAN, [1, 1], samples=5000, seed=8, sphere=2 * math.pi)
    c = group_ratio_montecarlo(u, params, R2, EUCLIDEAN, [1, 1], samples=5000, seed=9, sphere=2 * math.pi)
    assert a.ratio == b.ratio and a.ratio != c.ratio


def test_non_radial_input_stays_below_constant():
    params = HardyParams.for_group(2, 2, 0.0, 2)
    u = nonradial_evaluator(bump(1), R2, EUCLIDEAN)
    mc = group_ratio_montecarlo(u, params, R2, EUCLIDEAN, [1, 1], samples=20_000, seed=2, sphere=2 * math.pi)
    assert mc_bound_holds(mc) and mc.ratio < 2 * math.pi


def test_non_integer_q_warns():
    params = HardyParams.for_group(2, 2.5, 0.0, 2)
    mc = group_ratio_montecarlo(radial_evaluator(bump(1), R2, EUCLIDEAN), params, R2, EUCLIDEAN, [1, 1],
                                samples=2000, seed=1, sphere=2 * math.pi)
    assert any("non-integer q" in w for w in mc.warnings)


def test_support_shape_checked():
    params = HardyParams.for_group(2, 2, 0.0, 2)
    with pytest.raises(InvalidInputError):
        group_ratio_montecarlo(lambda x: np.ones(len(x)), params, R2, EUCLIDEAN, [1, 1, 1])


@pytest.mark.parametrize("group,norm,S", [(R2, EUCLIDEAN, 2 * math.pi), (HEIS, KORANYI, KORANYI_S),
                                          (ANISO, SUP, 12.0)])
def test_holder_sphere_radial_equality(group, norm, S):
    u = radial_evaluator(lambda r: np.exp(-r), group, norm)
    assert holder_sphere_check(u, 0.7, 2, group, norm, S, seed=3, expect_equality=True).passed


@pytest.mark.parametrize("group,norm,S", [(R2, EUCLIDEAN, 2 * math.pi), (HEIS, KORANYI, KORANYI_S)])
def test_holder_sphere_strict_for_angular_input(group, norm, S):
    rep = holder_sphere_check(nonradial_evaluator(bump(2), group, norm), 1.0, 2, group, norm, S, seed=3)
    assert rep.passed and rep.details["margin"] > 3 * rep.stderr


def test_empty_annulus():
    with pytest.raises(SamplingError):
        holder_sphere_check(lambda x: np.ones(len(x)), 1.0, 2, R2, EUCLIDEAN, 2 * math.pi,
                            samples=50, eps=1e-9)


def test_variance_predicate():
    mild = HardyParams.for_group(2, 2, 0.0, 2)
    assert variance_is_finite(mild, 2, 0.0)
    harsh = HardyParams.for_group(2, 3, -4.5, 3)
    assert not variance_is_finite(harsh, 3, 0.6)


def test_heavy_tail_is_flagged():
    # alpha = -4.5 on (1,2)-dilations: the rhs integrand r^-4.5 is not square integrable
    params = HardyParams.for_group(2, 3, -4.5, 3)
    mc = group_ratio_montecarlo(radial_evaluator(bump(2), ANISO, SUP), params, ANISO, SUP,
                                box_halfwidths(ANISO, SUP, 2), samples=10_000, seed=1, sphere=12.0)
    assert any("heavy-tailed" in w for w in mc.warnings)
