import csv
import io
import json
import math
import os
import pathlib
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "data"
GOLDEN = ROOT / "tests" / "golden"
CLI = os.environ.get("IMPULSE_FLOQUET_CLI", str(ROOT / "build" / "tools" / "impulse-floquet"))


def run(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full_env)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def inline(period, a=0.0, b=1.0, c=1.0, impulses=()):
    seg = lambda v: [{"end": period, "poly": [v]}]
    return json.dumps({
        "period": period,
        "coefficients": {"a": seg(a), "b": seg(b), "c": seg(c)},
        "impulses": [{"tau": t, "alpha": al, "beta": be} for t, al, be in impulses],
    })


def test_analyze_rotation_reports_stable():
    out = run("analyze", "--input", DATA / "rotation.json")
    assert out.returncode == 0, out.stderr
    report = json.loads(out.stdout)
    assert abs(report["monodromy"]["A"]) <= 1e-8
    assert report["verdict"]["category"] == "stable"


def test_analyze_report_fields():
    report = json.loads(run("analyze", "--input", DATA / "rotation.json").stdout)
    assert set(report) == {"monodromy", "verdict", "criteria"}
    assert set(report["monodromy"]) == {"matrix", "A", "B", "det", "multipliers", "error_estimate"}
    assert set(report["verdict"]) == {"category", "A", "B", "multipliers", "diagnostics"}
    assert set(report["criteria"]) == {"criteria", "condition_c", "any_certified"}
    names = [c["criterion"] for c in report["criteria"]["criteria"]]
    assert names == ["krein", "guseinov-kaymakcalan", "guseinov-zafer", "guseinov-zafer-boundary",
                     "wang", "main", "main-boundary"]


def test_impulse_at_zero_is_malformed():
    out = run("analyze", "--input", DATA / "impulse_at_zero.json")
    assert out.returncode == 2
    assert "impulses[0]" in out.stderr


def test_syntax_error_reports_line():
    out = run("analyze", "--input", '{"period": 1,\n "coefficients": }')
    assert out.returncode == 2
    assert "line 2" in out.stderr


def test_unknown_field_is_malformed():
    doc = json.loads(inline(1.0))
    doc["extra"] = 1
    out = run("analyze", "--input", json.dumps(doc))
    assert out.returncode == 2
    assert "extra" in out.stderr


def test_missing_input_is_malformed():
    assert run("analyze").returncode == 2


def test_doubling_verdict():
    report = json.loads(run("analyze", "--input", DATA / "doubling.json").stdout)
    assert report["verdict"]["category"] == "not-stable-B-neq-1"
    assert report["monodromy"]["B"] == pytest.approx(4.0, rel=1e-12)


def test_criteria_subcommand_json():
    out = run("criteria", "--input", DATA / "unit.json")
    assert out.returncode == 0, out.stderr
    summary = json.loads(out.stdout)
    assert summary["any_certified"] is True
    assert len(summary["criteria"]) == 7


def test_human_format_marks():
    out = run("analyze", "--input", DATA / "unit.json", "--format", "human")
    assert out.returncode == 0
    assert "✓" in out.stdout


def test_sweep_beta_nine_rows():
    out = run("sweep", "--input", DATA / "impulsive.json", "--axes", "impulses[0].beta:-2:2:9")
    assert out.returncode == 0, out.stderr
    table = rows(out.stdout)
    assert len(table) == 9
    assert [float(r["impulses[0].beta"]) for r in table] == pytest.approx([-2 + 0.5 * k for k in range(9)])


def test_sweep_two_axes_row_major():
    out = run("sweep", "--input", DATA / "unit.json",
              "--axes", "coefficients.c[0].poly[0]:1:5:5,coefficients.b[0].poly[0]:0.5:2:7")
    assert out.returncode == 0, out.stderr
    table = rows(out.stdout)
    assert len(table) == 35
    first = [float(r["coefficients.c[0].poly[0]"]) for r in table]
    assert first == sorted(first)
    assert [float(r["coefficients.b[0].poly[0]"]) for r in table[:7]] == pytest.approx(
        [0.5 + 0.25 * k for k in range(7)])


def test_sweep_rotation_family_flips_where_a_crosses_two():
    out = run("sweep", "--input", DATA / "unit.json", "--axes", "coefficients.c[0].poly[0]:-4:8:49")
    table = rows(out.stdout)
    assert len(table) == 49
    for r in table:
        c = float(r["coefficients.c[0].poly[0]"])
        expected = 2 * math.cosh(math.sqrt(-c)) if c < 0 else 2 * math.cos(math.sqrt(c))
        assert float(r["A"]) == pytest.approx(expected, abs=1e-8)
        if c < -1e-9:
            assert r["verdict"] == "unstable"
        elif c > 1e-9:
            assert r["verdict"] == "stable"
        else:
            assert r["verdict"] == "conditionally-stable-not-stable"


def test_sweep_rotation_family_at_pi_is_minus_identity():
    c = math.pi ** 2
    out = run("sweep", "--input", DATA / "unit.json", "--axes", f"coefficients.c[0].poly[0]:{c - 1!r}:{c + 1!r}:3")
    table = rows(out.stdout)
    assert float(table[1]["A"]) == pytest.approx(-2.0, abs=1e-8)
    assert [r["verdict"] for r in table] == ["stable"] * 3
    assert table[0]["main"] == "inconclusive"


def test_sweep_deterministic_across_workers():
    args = ("sweep", "--input", DATA / "unit.json", "--axes", "coefficients.c[0].poly[0]:1:30:40")
    assert run(*args, "--workers", 1).stdout == run(*args, "--workers", 4).stdout
    assert run(*args).stdout == run(*args, env={"IMPULSE_FLOQUET_WORKERS": "3"}).stdout


def test_sweep_rejects_bad_axis():
    assert run("sweep", "--input", DATA / "unit.json", "--axes", "impulses:0:1:2").returncode == 2
    assert run("sweep", "--input", DATA / "unit.json", "--axes", "period:1:2:1").returncode == 2
    assert run("sweep", "--input", DATA / "unit.json", "--axes", "nothing:1:2:3").returncode == 2


def test_sweep_failed_point_has_status():
    out = run("sweep", "--input", DATA / "impulsive.json", "--axes", "impulses[0].alpha:-1:1:3")
    assert out.returncode == 0
    table = rows(out.stdout)
    assert len(table) == 3
    assert table[1]["status"].startswith("invalid")
    assert table[0]["status"] == "ok"


@pytest.mark.parametrize("name,axes", [
    ("sweep_1axis_header.csv", "coefficients.c[0].poly[0]:1:2:2"),
    ("sweep_2axis_header.csv", "coefficients.c[0].poly[0]:1:2:2,period:1:2:2"),
])
def test_sweep_header_golden(name, axes):
    out = run("sweep", "--input", DATA / "unit.json", "--axes", axes)
    assert out.stdout.splitlines()[0] + "\n" == (GOLDEN / name).read_text()


def test_simulate_header_golden_and_empty_run():
    out = run("simulate", "--input", DATA / "rotation.json", "--periods", 0)
    assert out.returncode == 0
    assert out.stdout == (GOLDEN / "simulate_header.csv").read_text()


def test_simulate_rotation_bounded():
    out = run("simulate", "--input", DATA / "rotation.json", "--periods", 100)
    table = rows(out.stdout)
    assert len(table) > 100
    assert max(abs(float(r["x"])) for r in table) <= 1 + 1e-6
    assert all(r["status"] == "ok" for r in table)


def test_simulate_unipotent_growth():
    out = run("simulate", "--input", DATA / "unipotent.json", "--periods", 100, "--x0", 1, "--u0", 0)
    table = rows(out.stdout)
    last = table[-1]
    assert float(last["t"]) == pytest.approx(100.0)
    assert abs(float(last["u"])) == pytest.approx(50.0, rel=1e-2)


def test_disconjugacy_unit_interval():
    out = run("disconjugacy", "--input", DATA / "unit.json", "--t1", 0, "--t2", 1)
    assert out.returncode == 0, out.stderr
    res = json.loads(out.stdout)
    assert res["test"]["verdict"] == "disconjugate-certified"
    assert res["test"]["sup"] == pytest.approx(1.0, abs=1e-9)
    assert res["oracle"]["verdict"] == "disconjugate"
    assert res["disagreement"] is False


def test_disconjugacy_sine_half():
    res = json.loads(run("disconjugacy", "--input", DATA / "sine.json", "--t1", 0, "--t2", 0.5).stdout)
    assert res["test"]["verdict"] == "disconjugate-certified"
    assert res["sup"] == pytest.approx(0.25 * math.pi ** 2, abs=1e-6)
    assert res["oracle"]["verdict"] == "disconjugate"


def test_disconjugacy_sine_beyond_zero_spacing():
    out = run("disconjugacy", "--input", DATA / "sine.json", "--t1", 0, "--t2", 1.01)
    assert out.returncode == 0
    res = json.loads(out.stdout)
    assert res["test"]["verdict"] == "inconclusive"
    assert res["oracle"]["verdict"] == "not-disconjugate"


def test_disconjugacy_rejects_reversed_interval():
    assert run("disconjugacy", "--input", DATA / "unit.json", "--t1", 1, "--t2", 0).returncode == 2


def test_selftest_passes():
    out = run("selftest", "--n", 50, "--seed", 7)
    assert out.returncode == 0, out.stdout + out.stderr
    assert json.loads(out.stdout)["passed"] is True


def test_tolerance_flags_accepted():
    out = run("analyze", "--input", DATA / "unit.json", "--tol-abs", 1e-10, "--tol-rel", 1e-9, "--tol-strict", 1e-10)
    assert out.returncode == 0, out.stderr
    assert run("analyze", "--input", DATA / "unit.json", "--tol-abs", -1).returncode == 2
