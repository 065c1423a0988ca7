"""The inequality check battery run by ``hardylab verify``.

Every check is driven by a probe (a radial profile, optionally with a known
support radius).  A probe with finite support gets the full set: radial
bound, reduction identity, Monte Carlo bound, polar consistency and the
sphere Holder equality.  Probes of unbounded support only get the checks
that run on the radial grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .constants import HardyParams, beta_from_alpha, require_admissible, sharp_constant_1d
from .geometry import (
    GroupSpec,
    QuasiNormSpec,
    SphereMeasure,
    box_halfwidths,
    polar_consistency_check,
)
from .montecarlo import group_ratio_montecarlo, holder_sphere_check, mc_bound_holds
from .operators import (
    group_ratio_radial,
    hardy_ratio_1d,
    mapped_1d_exponents,
    radial_scale_factor,
)
from .radial import RadialFunction, RadialGrid
from .reports import VerificationReport
from .testfunctions import (
    Profile,
    nonradial_evaluator,
    radial_evaluator,
    random_smooth_profile,
)

BOUND_SLACK = 1e-3
REDUCTION_TOL = 1e-10


@dataclass(frozen=True)
class Probe:
    name: str
    profile: Profile
    support: float | None = None


def random_probes(n: int, seed: int) -> list[Probe]:
    gen = rng.generator(seed, 7)
    out = []
    for i in range(n):
        f = random_smooth_profile(gen)
        out.append(Probe(f"random[{i}] c={f.c:.4g} s={f.s:.4g} R={f.R:.4g}", f, f.R))
    return out


def _bound_report(check: str, probe: Probe, ratio: float, constant: float, **details) -> VerificationReport:
    passed = ratio <= constant * (1 + BOUND_SLACK)
    return VerificationReport(check=check, passed=bool(passed), value=ratio, oracle=constant,
                              tolerance=BOUND_SLACK, details={"probe": probe.name, **details})


def check_1d(probe: Probe, p: float, q: float, alpha: float, grid: RadialGrid) -> list[VerificationReport]:
    u = RadialFunction.from_callable(grid, probe.profile)
    beta = beta_from_alpha(p, q, alpha, 1.0)
    res = hardy_ratio_1d(u, p, q, alpha, beta)
    return [_bound_report("bound_1d", probe, res.ratio, sharp_constant_1d(p, q, alpha),
                          tail_fraction=res.tail_fraction)]


def check_group(probe: Probe, params: HardyParams, group: GroupSpec, norm: QuasiNormSpec,
                sphere: SphereMeasure, grid: RadialGrid, samples: int, seed: int) -> list[VerificationReport]:
    Q = group.Q
    g = RadialFunction.from_callable(grid, probe.profile)
    radial = group_ratio_radial(g, params, Q, sphere)
    reports = [_bound_report("bound_radial", probe, radial.ratio, radial.constant,
                             tail_fraction=radial.tail_fraction)]

    a1, b1 = mapped_1d_exponents(params, Q)
    one_d = hardy_ratio_1d(g.times_power(Q - 1), params.p, params.q, a1, b1)
    mapped = radial_scale_factor(params, sphere) * one_d.ratio
    gap = abs(mapped - radial.ratio) / radial.ratio if radial.ratio > 0 else abs(mapped)
    reports.append(VerificationReport(
        check="radial_reduction", passed=bool(gap <= REDUCTION_TOL), value=mapped, oracle=radial.ratio,
        tolerance=REDUCTION_TOL, details={"probe": probe.name, "relative_gap": gap,
                                          "alpha_tilde": a1, "beta_tilde": b1}))

    if probe.support is None or samples <= 0:
        return reports
    R = probe.support
    half = box_halfwidths(group, norm, R)
    mc = group_ratio_montecarlo(radial_evaluator(probe.profile, group, norm), params, group, norm,
                                half, samples=samples, seed=seed, sphere=sphere)
    reports.append(VerificationReport(
        check="bound_montecarlo", passed=mc_bound_holds(mc), value=mc.ratio, oracle=mc.constant,
        stderr=mc.stderr, tolerance=3 * mc.stderr, seed=seed,
        details={"probe": probe.name, "radial_ratio": radial.ratio}, warnings=list(mc.warnings)))
    reports.append(polar_consistency_check(probe.profile, group, norm, (0.0, R),
                                           samples=samples * 10, seed=seed, sphere=sphere))
    reports[-1].details["probe"] = probe.name
    holder = holder_sphere_check(radial_evaluator(probe.profile, group, norm), R / 2, params.p, group,
                                 norm, sphere, samples=samples * 10, seed=seed, expect_equality=True)
    holder.check = "holder_sphere_radial"
    holder.details["probe"] = probe.name
    reports.append(holder)
    return reports


def check_nonradial(probe: Probe, p: float, group: GroupSpec, norm: QuasiNormSpec,
                    sphere: SphereMeasure, samples: int, seed: int) -> VerificationReport:
    """Strict Holder inequality on the sphere for the angular modulation of ``probe``."""
    u = nonradial_evaluator(probe.profile, group, norm)
    rep = holder_sphere_check(u, probe.support / 2, p, group, norm, sphere, samples=samples,
                              seed=seed)
    margin = rep.details["margin"]
    rep.passed = bool(rep.passed and margin > 3 * rep.stderr)
    rep.check = "holder_sphere_nonradial"
    rep.details["probe"] = probe.name
    return rep


def run_battery(probes: list[Probe], params: HardyParams, group: GroupSpec | None,
                norm: QuasiNormSpec | None, sphere: SphereMeasure | None, grid: RadialGrid,
                samples: int, seed: int) -> list[VerificationReport]:
    """All checks for all probes; ``group=None`` means the half-line problem."""
    if group is None:
        require_admissible(params, 1.0)
        return [r for pr in probes for r in check_1d(pr, params.p, params.q, params.alpha, grid)]
    require_admissible(params, group.Q)
    reports = []
    for i, pr in enumerate(probes):
        reports += check_group(pr, params, group, norm, sphere, grid, samples, seed + 11 * i)
    finite = [pr for pr in probes if pr.support is not None]
    if finite and samples > 0:
        reports.append(check_nonradial(finite[0], params.p, group, norm, sphere, samples * 10, seed))
    return reports


def summarize(reports: list[VerificationReport]) -> dict:
    failed = [f"{r.check} ({r.details.get('probe', '')})" for r in reports if not r.passed]
    return {"n_checks": len(reports), "n_passed": len(reports) - len(failed), "failed": failed,
            "all_passed": bool(reports) and not failed}


def worst_ratio(reports: list[VerificationReport]) -> float | None:
    """Largest ratio / constant seen over the bound checks."""
    vals = [r.value / r.oracle for r in reports
            if r.check.startswith("bound") and r.oracle and math.isfinite(r.value)]
    return float(np.max(vals)) if vals else None
