import json
import math

import pytest

from hardylab import cli


def run(capsys, *args):
    code = cli.main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *args):
    code, out, err = run(capsys, *args, "--format", "json")
    return code, json.loads(out) if out else None, err


FIXED_FIELDS = {"constant", "ratio", "attainment", "seed", "grid", "group", "norm", "params", "schema_version"}


def test_constant_plane(capsys):
    code, doc, _ = run_json(capsys, "constant", "--group", "r2", "--p", "2", "--q", "2", "--alpha", "0")
    assert code == 0 and FIXED_FIELDS <= doc.keys()
    assert doc["constant"] == 2 * math.pi
    assert doc["bracket"]["lower"] <= doc["constant"] <= doc["bracket"]["upper"] * (1 + 1e-12)
    assert set(doc["exponents"]) >= {"lam", "mu", "gamma", "delta", "alpha_tilde", "beta_tilde"}
    assert doc["sphere"]["method"] == "analytic"


def test_constant_half_line_p_below_q(capsys):
    code, doc, _ = run_json(capsys, "constant", "--1d", "--p", "2", "--q", "4", "--alpha", "0")
    assert code == 0 and doc["symbol"] == "D"
    assert doc["constant"] == pytest.approx(1.5**0.25, rel=1e-13)


def test_inadmissible_alpha(capsys):
    code, out, err = run(capsys, "constant", "--group", "r2", "--p", "2", "--q", "2", "--alpha", "2")
    assert code == cli.EXIT_INADMISSIBLE and "alpha < Q(p-1) violated" in err and not out


def test_inconsistent_beta(capsys):
    code, _, err = run(capsys, "constant", "--group", "r2", "--p", "2", "--q", "2", "--alpha", "0", "--beta", "-3")
    assert code == cli.EXIT_INADMISSIBLE and "pqQ violated" in err


def test_incompatible_norm(capsys):
    code, _, err = run(capsys, "sphere", "--group", "r2", "--norm", "koranyi")
    assert code == cli.EXIT_INADMISSIBLE


def test_sphere_reports(capsys):
    _, doc, _ = run_json(capsys, "sphere", "--group", "r1")
    assert doc["sphere"]["value"] == 2.0
    _, doc, _ = run_json(capsys, "sphere", "--group", "r2")
    assert doc["sphere"]["value"] == pytest.approx(2 * math.pi, rel=1e-15)
    _, doc, _ = run_json(capsys, "sphere", "--group", "heis1", "--seed", "3")
    s = doc["sphere"]
    assert s["method"] == "monte_carlo" and s["seed"] == 3 and s["samples"] == 10**6
    assert abs(s["value"] - 2 * math.pi**2) < 3 * s["stderr"]


@pytest.mark.parametrize("scenario", ["r2-classic", "heisenberg-q4", "anisotropic-sup"])
def test_shipped_scenarios_pass(capsys, scenario):
    code, doc, _ = run_json(capsys, "verify", "--scenario", scenario)
    assert code == 0, doc["summary"]
    assert doc["summary"]["all_passed"] and doc["summary"]["n_checks"] > 10
    checks = {c["check"] for c in doc["checks"]}
    assert {"bound_radial", "radial_reduction", "bound_montecarlo", "polar_consistency",
            "holder_sphere_radial", "holder_sphere_nonradial"} <= checks


def test_seed_change_keeps_verdicts(capsys):
    _, a, _ = run_json(capsys, "verify", "--scenario", "r2-classic", "--n-functions", "0")
    _, b, _ = run_json(capsys, "verify", "--scenario", "r2-classic", "--n-functions", "0", "--seed", "99")
    assert [c["passed"] for c in a["checks"]] == [c["passed"] for c in b["checks"]]
    mc = [c["value"] for c in a["checks"] if c["check"] == "bound_montecarlo"]
    mc_b = [c["value"] for c in b["checks"] if c["check"] == "bound_montecarlo"]
    assert mc != mc_b


def test_reports_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        run(capsys, "verify", "--scenario", "heisenberg-q4", "--n-functions", "1", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_empty_test_set(capsys):
    code, doc, err = run_json(capsys, "verify", "--group", "r2")
    assert code == cli.EXIT_NOTHING_VERIFIED and doc["summary"]["n_checks"] == 0
    assert "nothing verified" in err


def test_half_line_verify(capsys):
    code, doc, _ = run_json(capsys, "verify", "--1d", "--p", "2", "--q", "3", "--alpha", "0.3",
                            "--n-functions", "3", "--family", "gaussian:1")
    assert code == 0 and doc["summary"]["n_checks"] == 4


def test_profile_file(tmp_path, capsys):
    f = tmp_path / "prof.txt"
    f.write_text("# r value\n0.1 1.0\n0.5 0.8\n1.0 0.3\n1.5 0.0\n")
    code, doc, _ = run_json(capsys, "verify", "--group", "r2", "--profile", str(f), "--samples", "5000")
    assert code == 0 and doc["summary"]["all_passed"]


def test_non_finite_profile_is_numeric_failure(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("0.1 1.0\n0.5 nan\n1.0 0.3\n")
    code, _, _ = run(capsys, "verify", "--group", "r2", "--profile", str(f))
    assert code == cli.EXIT_NUMERIC


def test_failed_check_exit_code(capsys, monkeypatch):
    from hardylab import operators
    monkeypatch.setattr(operators, "sharp_constant_group", lambda *a, **k: 1e-3)
    code, _, err = run(capsys, "verify", "--group", "r2", "--family", "bump:1", "--samples", "2000")
    assert code == cli.EXIT_CHECK_FAILED and "bound_radial" in err


def test_sharpness_half_line(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    code, doc, _ = run_json(capsys, "sharpness", "--1d", "--p", "2", "--q", "2", "--alpha", "0",
                            "--trace-csv", str(trace))
    assert code == 0 and doc["attainment"] >= 0.95
    assert doc["oracle_value"] == pytest.approx(2.0, rel=0.01)
    lines = trace.read_text().splitlines()
    assert lines[0] == "evaluation,s,log_eps,log_R,ratio,best_ratio,admissible"
    assert len(lines) == doc["evaluations"] + 1


def test_sharpness_heisenberg(capsys):
    code, doc, _ = run_json(capsys, "sharpness", "--group", "heis1", "--p", "2", "--q", "2", "--alpha", "0")
    assert code == 0 and doc["attainment"] >= 0.95
    assert doc["constant"] == pytest.approx(doc["sphere"]["value"] / 2, rel=1e-14)


def test_sharpness_budget_one(capsys):
    code, doc, _ = run_json(capsys, "sharpness", "--1d", "--budget", "1", "--no-oracle")
    assert code == 0 and doc["evaluations"] == 1 and doc["attainment"] > 0 and doc["oracle_value"] is None


def test_sharpness_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "sharpness", "--1d", "--p", "2", "--q", "4", "--budget", "20", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "evaluation,log_c,a,b,ratio,best_ratio,admissible"


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("group = r2\np = 3\nq = 3\nalpha = 0\n")
    _, doc, _ = run_json(capsys, "constant", "--config", str(cfg))
    assert doc["constant"] == pytest.approx(3 * 2 * math.pi / 4)
    _, doc, _ = run_json(capsys, "constant", "--config", str(cfg), "--p", "2", "--q", "2")
    assert doc["constant"] == 2 * math.pi


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "constant", "--config", str(cfg))
    assert code == cli.EXIT_INADMISSIBLE and "colour" in err


def test_unknown_scenario(capsys):
    code, _, err = run(capsys, "verify", "--scenario", "nope")
    assert code == cli.EXIT_INADMISSIBLE and "r2-classic" in err


def test_table_output(capsys):
    code, out, _ = run(capsys, "constant", "--group", "aniso:1,2", "--p", "2", "--q", "3", "--alpha", "0.5")
    assert code == 0 and "sphere.method" in out and "anisotropic_sup" in out


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "hardylab", "constant", "--1d", "--format", "json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["constant"] == 2.0
