"""``hardylab`` command line: constants, verification battery, sharpness searches, sphere measures."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from . import rng
from .battery import Probe, random_probes, run_battery, summarize, worst_ratio
from .constants import (
    HardyParams,
    beta_from_alpha,
    bracket_bounds,
    reduction_exponents,
    require_admissible,
    sharp_constant_1d,
    sharp_constant_group,
)
from .errors import (
    ConvergenceError,
    DegenerateInputError,
    GeometryConfigError,
    HardyLabError,
    IncompatibleSpecError,
    InadmissibleFamilyError,
    InadmissibleParametersError,
    InvalidInputError,
    NumericError,
    SamplingError,
)
from .geometry import (
    EUCLIDEAN,
    HALF_LINE,
    KORANYI,
    SUP,
    GroupSpec,
    QuasiNormSpec,
    SphereMeasure,
    check_compatible,
    sphere_measure,
)
from .radial import DEFAULT_NODES, DEFAULT_R_MAX, DEFAULT_R_MIN, RadialGrid
from .reports import SCHEMA_VERSION, to_jsonable
from .sharpness import (
    DEFAULT_BUDGET,
    FamilyKind,
    SharpnessReport,
    bliss_family,
    extremal_search_1d,
    extremal_search_group,
    operator_norm_oracle,
    truncated_power_family,
)
from .testfunctions import load_profile, parse_builtin

EXIT_OK = 0
EXIT_INADMISSIBLE = 2
EXIT_CHECK_FAILED = 3
EXIT_NUMERIC = 4
EXIT_NOTHING_VERIFIED = 5

# Monte Carlo samples: the hardy ratio for verify, the ball volume for sphere
DEFAULT_SAMPLES = {"constant": 0, "verify": 20_000, "sharpness": 0, "sphere": 10**6}

NORMS = {"euclid": EUCLIDEAN, "sup": SUP, "koranyi": KORANYI}

# flag name -> parser for values read from config files
CONFIG_KEYS = {
    "group": str, "norm": str, "p": float, "q": float, "alpha": float, "beta": float,
    "grid_nodes": int, "grid_min": float, "grid_max": float, "samples": int, "seed": int,
    "format": str, "family": str, "profile": str, "budget": int, "n_functions": int,
    "one_d": None, "oracle": None,
}


@dataclass
class RunConfig:
    command: str
    group: GroupSpec | None
    norm: QuasiNormSpec | None
    p: float
    q: float
    alpha: float
    beta: float | None
    grid: RadialGrid
    samples: int
    seed: int
    out: Path | None
    fmt: str
    families: list[str] = field(default_factory=list)
    profiles: list[str] = field(default_factory=list)
    budget: int = DEFAULT_BUDGET
    n_functions: int = 0
    trace_csv: Path | None = None
    oracle: bool = True

    @property
    def Q(self) -> float:
        return self.group.Q if self.group else 1.0

    def params(self) -> HardyParams:
        beta = beta_from_alpha(self.p, self.q, self.alpha, self.Q) if self.beta is None else self.beta
        return HardyParams(self.p, self.q, self.alpha, beta)

    def header(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "group": self.group.name if self.group else "half_line",
            "norm": self.norm.kind.value if self.norm else None,
            "params": {"p": self.p, "q": self.q, "alpha": self.alpha, "beta": self.params().beta, "Q": self.Q},
            "seed": self.seed,
            "grid": self.grid.describe(),
        }


def parse_group(text: str) -> GroupSpec:
    text = text.strip()
    if text == "r1":
        return GroupSpec.euclidean(1)
    if text == "r2":
        return GroupSpec.euclidean(2)
    if text == "heis1":
        return GroupSpec.heisenberg()
    kind, _, arg = text.partition(":")
    try:
        if kind == "rn" and arg:
            return GroupSpec.euclidean(int(arg))
        if kind == "aniso" and arg:
            return GroupSpec.anisotropic([float(v) for v in arg.split(",")])
    except ValueError as exc:
        raise InvalidInputError(f"bad group {text!r}: {exc}") from None
    raise InvalidInputError(f"unknown group {text!r}; use r1, r2, rn:N, aniso:v1,..,vN or heis1")


def default_norm(group: GroupSpec) -> QuasiNormSpec:
    if group.name == "heis1":
        return KORANYI
    return EUCLIDEAN if group.isotropic else SUP


def read_config(path: Path) -> dict[str, Any]:
    """Flat ``key = value`` file; ``#`` starts a comment, keys may use ``-`` or ``_``."""
    values: dict[str, Any] = {}
    for n, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key == "1d":
            key = "one_d"
        if not sep or key not in CONFIG_KEYS:
            raise InvalidInputError(f"{path}:{n}: expected 'key = value' with a known key, got {raw!r}")
        conv = CONFIG_KEYS[key]
        if conv is None:
            values[key] = val.lower() in ("1", "true", "yes", "on")
        elif key in ("family", "profile"):
            values[key] = [v.strip() for v in val.split(";") if v.strip()]
        else:
            try:
                values[key] = conv(val)
            except ValueError:
                raise InvalidInputError(f"{path}:{n}: bad value for {key}: {val!r}") from None
    return values


def scenario_path(name: str) -> Path:
    ref = resources.files("hardylab") / "scenarios" / f"{name}.conf"
    if not ref.is_file():
        available = sorted(p.name.removesuffix(".conf") for p in (resources.files("hardylab") / "scenarios").iterdir()
                           if p.name.endswith(".conf"))
        raise InvalidInputError(f"unknown scenario {name!r}; available: {', '.join(available)}")
    return Path(str(ref))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value file; flags override it")
    common.add_argument("--scenario", help="name of a shipped scenario file")
    common.add_argument("--group", help="r1, r2, rn:N, aniso:v1,..,vN or heis1 (default r2)")
    common.add_argument("--norm", choices=sorted(NORMS))
    common.add_argument("--1d", dest="one_d", action="store_true", default=None,
                        help="half-line problem instead of a group")
    common.add_argument("--p", type=float)
    common.add_argument("--q", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float, help="must satisfy the scaling relation; solved for if omitted")
    common.add_argument("--grid-nodes", type=int)
    common.add_argument("--grid-min", type=float)
    common.add_argument("--grid-max", type=float)
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, help="write the JSON report here")
    common.add_argument("--format", choices=("json", "csv", "table"))

    parser = argparse.ArgumentParser(prog="hardylab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constant", parents=[common], help="sharp constant, bracket and exponents")
    v = sub.add_parser("verify", parents=[common], help="run the inequality check battery")
    v.add_argument("--family", action="append", help="built-in test function, e.g. bump:2 (repeatable)")
    v.add_argument("--profile", action="append", help="two-column (r, value) file (repeatable)")
    v.add_argument("--n-functions", type=int, help="number of seeded random test functions")
    s = sub.add_parser("sharpness", parents=[common], help="extremal search and operator-norm oracle")
    s.add_argument("--family", choices=[k.value for k in FamilyKind])
    s.add_argument("--budget", type=int)
    s.add_argument("--trace-csv", type=Path, help="write (parameters, ratio) pairs as CSV")
    s.add_argument("--no-oracle", dest="oracle", action="store_false", default=None)
    sub.add_parser("sphere", parents=[common], help="measure of the unit quasi-sphere")
    return parser


def resolve(ns: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if ns.scenario:
        values.update(read_config(scenario_path(ns.scenario)))
    if ns.config:
        values.update(read_config(ns.config))
    for key in CONFIG_KEYS:
        flag = getattr(ns, key, None)
        if flag is not None:
            values[key] = flag

    one_d = bool(values.get("one_d", False))
    group = None if one_d else parse_group(values.get("group", "r2"))
    norm = None
    if group is not None:
        norm = NORMS[values["norm"]] if "norm" in values else default_norm(group)
        check_compatible(norm, group)
    p = float(values.get("p", 2.0))
    q = float(values.get("q", p))
    grid = RadialGrid(values.get("grid_min", DEFAULT_R_MIN), values.get("grid_max", DEFAULT_R_MAX),
                      values.get("grid_nodes", DEFAULT_NODES))
    fam = values.get("family", [])
    return RunConfig(
        command=ns.command, group=group, norm=norm, p=p, q=q,
        alpha=float(values.get("alpha", 0.0)), beta=values.get("beta"),
        grid=grid, samples=int(values.get("samples", DEFAULT_SAMPLES[ns.command])),
        seed=int(values.get("seed", rng.DEFAULT_SEED)),
        out=ns.out, fmt=values.get("format", "table"),
        families=[fam] if isinstance(fam, str) else list(fam),
        profiles=list(values.get("profile", [])),
        budget=int(values.get("budget", DEFAULT_BUDGET)),
        n_functions=int(values.get("n_functions", 0)),
        trace_csv=getattr(ns, "trace_csv", None),
        oracle=values.get("oracle", True) is not False,
    )


def _sphere(cfg: RunConfig) -> SphereMeasure:
    if cfg.group is None:
        return HALF_LINE
    # a Monte Carlo |S| always uses the full default sample count
    return sphere_measure(cfg.group, cfg.norm, seed=cfg.seed)


def _sphere_dict(S: SphereMeasure) -> dict[str, Any]:
    return {"value": S.value, "stderr": S.estimate_stderr, "method": S.method.value,
            "seed": S.seed, "samples": S.samples}


def cmd_constant(cfg: RunConfig) -> tuple[dict, int]:
    params = cfg.params()
    require_admissible(params, cfg.Q)
    S = _sphere(cfg)
    if cfg.group is None:
        value = sharp_constant_1d(cfg.p, cfg.q, cfg.alpha)
    else:
        value = sharp_constant_group(cfg.p, cfg.q, cfg.Q, cfg.alpha, S)
    lower, upper = bracket_bounds(cfg.p, cfg.q, cfg.Q, cfg.alpha, params.beta, S)
    exps = reduction_exponents(params, cfg.Q)
    return {**cfg.header(), "constant": value, "ratio": None, "attainment": None,
            "symbol": "D" if cfg.group is None else "C",
            "bracket": {"lower": lower, "upper": upper},
            "sphere": _sphere_dict(S),
            "exponents": to_jsonable(exps)}, EXIT_OK


def _support_of(spec: str) -> float | None:
    name, _, args = spec.partition(":")
    vals = [float(a) for a in args.split(",") if a.strip()] if args else []
    if name == "indicator" and len(vals) == 2:
        return vals[1]
    if name == "truncated_power" and len(vals) == 3:
        return vals[2]
    if name == "bump":
        return vals[0] if vals else 1.0
    return None


def _profile_support(path: str) -> float:
    import numpy as np
    return float(np.loadtxt(path, comments="#", ndmin=2)[:, 0].max())


def collect_probes(cfg: RunConfig) -> list[Probe]:
    probes = [Probe(spec, parse_builtin(spec), _support_of(spec)) for spec in cfg.families]
    probes += [Probe(f"file:{path}", load_profile(path), _profile_support(path)) for path in cfg.profiles]
    probes += random_probes(cfg.n_functions, cfg.seed)
    return probes


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    params = cfg.params()
    require_admissible(params, cfg.Q)
    probes = collect_probes(cfg)
    S = _sphere(cfg)
    reports = run_battery(probes, params, cfg.group, cfg.norm, S, cfg.grid, cfg.samples, cfg.seed) if probes else []
    summary = summarize(reports)
    constant = (sharp_constant_1d(cfg.p, cfg.q, cfg.alpha) if cfg.group is None
                else sharp_constant_group(cfg.p, cfg.q, cfg.Q, cfg.alpha, S))
    worst = worst_ratio(reports)
    doc = {**cfg.header(), "constant": constant, "ratio": worst and worst * constant, "attainment": worst,
           "sphere": _sphere_dict(S), "summary": summary,
           "checks": [to_jsonable(r) for r in reports]}
    if not reports:
        return doc, EXIT_NOTHING_VERIFIED
    return doc, EXIT_OK if summary["all_passed"] else EXIT_CHECK_FAILED


def cmd_sharpness(cfg: RunConfig) -> tuple[dict, int, SharpnessReport]:
    params = cfg.params()
    require_admissible(params, cfg.Q)
    kind = FamilyKind(cfg.families[0]) if cfg.families else (
        FamilyKind.TRUNCATED_POWER if cfg.p == cfg.q else FamilyKind.BLISS)
    family = (truncated_power_family(cfg.p, cfg.alpha, cfg.grid, Q=cfg.Q) if kind is FamilyKind.TRUNCATED_POWER
              else bliss_family(cfg.p, cfg.alpha, cfg.Q))
    S = _sphere(cfg)
    if cfg.group is None:
        rep = extremal_search_1d(cfg.p, cfg.q, cfg.alpha, family, cfg.grid, cfg.budget)
    else:
        rep = extremal_search_group(params, cfg.group, cfg.norm, family, cfg.budget, cfg.grid, sphere=S)
    # the p = q = 2 group problem is |S| times the half-line one at alpha~ = alpha - (Q-1)
    alpha_1d = cfg.alpha - (cfg.Q - 1)
    if cfg.oracle and cfg.p == 2 and cfg.q == 2 and alpha_1d < 1:
        rep.oracle_value = S.value * operator_norm_oracle(alpha_1d, cfg.grid, seed=cfg.seed)
    doc = {**cfg.header(), "constant": rep.target_constant, "ratio": rep.best_ratio,
           "attainment": rep.attainment, "best_parameters": rep.best_parameters,
           "oracle_value": rep.oracle_value, "family": rep.family, "budget": cfg.budget,
           "evaluations": rep.evaluations, "sphere": _sphere_dict(S)}
    return doc, EXIT_OK, rep


def cmd_sphere(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.group is None:
        S = HALF_LINE
    else:
        S = sphere_measure(cfg.group, cfg.norm, samples=cfg.samples, seed=cfg.seed)
    return {**cfg.header(), "constant": None, "ratio": None, "attainment": None,
            "sphere": _sphere_dict(S), "Q": cfg.Q}, EXIT_OK


def trace_csv(rep: SharpnessReport) -> str:
    buf = io.StringIO()
    names = list(rep.search_trace[0].parameters) if rep.search_trace else []
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["evaluation", *names, "ratio", "best_ratio", "admissible"])
    for i, e in enumerate(rep.search_trace):
        w.writerow([i, *(repr(float(e.parameters[k])) for k in names), repr(float(e.ratio)),
                    repr(float(e.best_ratio)), int(e.admissible)])
    return buf.getvalue()


def _flatten(doc: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(doc, dict):
        return [kv for k, v in doc.items() for kv in _flatten(v, f"{prefix}{k}.")]
    if isinstance(doc, list):
        return [kv for i, v in enumerate(doc) for kv in _flatten(v, f"{prefix}{i}.")]
    return [(prefix[:-1], doc)]


def render_json(doc: dict) -> str:
    return json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n"


def render_table(doc: dict) -> str:
    lines = []
    for key, val in _flatten(to_jsonable({k: v for k, v in doc.items() if k != "checks"})):
        lines.append(f"{key:<32} {val}")
    for chk in doc.get("checks", []):
        mark = "PASS" if chk["passed"] else "FAIL"
        lines.append(f"{mark}  {chk['check']:<26} value={chk['value']!s:<24} oracle={chk['oracle']!s:<24} "
                     f"{chk['details'].get('probe', '')}")
    return "\n".join(lines) + "\n"


def render_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for key, val in _flatten(to_jsonable(doc)):
        w.writerow([key, val])
    return buf.getvalue()


def _error_exit(exc: Exception) -> int:
    if isinstance(exc, (InadmissibleParametersError, InadmissibleFamilyError, InvalidInputError,
                        IncompatibleSpecError, GeometryConfigError)):
        code = EXIT_INADMISSIBLE
    elif isinstance(exc, (NumericError, ConvergenceError, SamplingError, DegenerateInputError)):
        code = EXIT_NUMERIC
    else:
        code = EXIT_CHECK_FAILED
    print(f"hardylab: error: {exc}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = resolve(ns)
        trace = None
        if cfg.command == "constant":
            doc, code = cmd_constant(cfg)
        elif cfg.command == "verify":
            doc, code = cmd_verify(cfg)
        elif cfg.command == "sharpness":
            doc, code, rep = cmd_sharpness(cfg)
            trace = trace_csv(rep)
        else:
            doc, code = cmd_sphere(cfg)
    except HardyLabError as exc:
        return _error_exit(exc)
    except OSError as exc:
        print(f"hardylab: error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE

    if cfg.out:
        cfg.out.write_text(render_json(doc))
    if trace is not None and cfg.trace_csv:
        cfg.trace_csv.write_text(trace)
    if cfg.fmt == "json":
        sys.stdout.write(render_json(doc))
    elif cfg.fmt == "csv":
        sys.stdout.write(trace if trace is not None else render_csv(doc))
    else:
        sys.stdout.write(render_table(doc))
    if code == EXIT_NOTHING_VERIFIED:
        print("hardylab: nothing verified (empty test-function set)", file=sys.stderr)
    elif code == EXIT_CHECK_FAILED:
        print("hardylab: failed checks: " + "; ".join(doc["summary"]["failed"]), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
