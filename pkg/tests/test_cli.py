import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "foamcalc.cli"]


def run(args, cwd):
    return subprocess.run(CLI + list(args), cwd=cwd, capture_output=True, text=True)


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "five.foam").write_text("ring Q\ncup_w 1@1\ngate 1 u [5]@1\ncap_e 1@1\n")
    (tmp_path / "zero.json").write_text(json.dumps(
        {"kind": "zero_foam", "points": [{"sign": 1, "rank": 2}, {"sign": -1, "rank": 2}]}))
    return tmp_path


def test_invariant_of_circle(workdir):
    out = run(["invariant", "five.foam"], workdir)
    assert out.returncode == 0
    assert "K1: 5" in out.stdout


def test_invariant_of_zero_foam(workdir):
    out = run(["invariant", "zero.json"], workdir)
    assert out.returncode == 0
    assert "K0: 0" in out.stdout


def test_invariant_json_format_and_matrix(workdir):
    out = run(["invariant", "five.foam", "--format", "json", "--show-matrix"], workdir)
    assert out.returncode == 0
    payload = json.loads(out.stdout)
    assert payload["K1"] == "5"
    assert payload["fB"]["entries"]


def test_parse_failure_is_usage_error(workdir):
    (workdir / "bad.foam").write_text("ring Q\ncup_w 1@1\ncap_e 2@1\n")
    out = run(["invariant", "bad.foam"], workdir)
    assert out.returncode == 2
    assert "slice 1" in out.stderr


def test_random_validate_normalize_check_round_trip(workdir):
    assert run(["random", "--ring", "Fp:7", "--seed", "5", "--out", "r.foam"], workdir).returncode == 0
    assert run(["validate", "r.foam"], workdir).returncode == 0
    out = run(["normalize", "r.foam", "--verify", "--out", "norm"], workdir)
    assert out.returncode == 0, out.stdout + out.stderr
    chk = run(["check", "r.foam", "norm.foam", "norm.cert.json"], workdir)
    assert chk.returncode == 0
    assert "accepted" in chk.stdout

    cert = json.loads((workdir / "norm.cert.json").read_text())
    if cert["steps"]:
        cert["steps"][0]["pos"] += 3
        (workdir / "tampered.json").write_text(json.dumps(cert))
        bad = run(["check", "r.foam", "norm.foam", "tampered.json"], workdir)
        assert bad.returncode == 1
        assert "step 0" in bad.stdout


def test_random_is_seed_deterministic(workdir):
    a = run(["random", "--seed", "9"], workdir)
    b = run(["random", "--seed", "9"], workdir)
    c = run(["random", "--seed", "10"], workdir)
    assert a.stdout == b.stdout
    assert a.stdout != c.stdout


def test_selftest_subset_and_report(workdir):
    out = run(["selftest", "--suite", "gamma", "--suite", "relations",
               "--out", "report.json"], workdir)
    assert out.returncode == 0
    report = json.loads((workdir / "report.json").read_text())
    assert {r["suite"] for r in report} == {"gamma-section", "defining-relations"}
    assert all(r["passed"] for r in report)


def test_selftest_rejects_unknown_suite(workdir):
    out = run(["selftest", "--suite", "nope"], workdir)
    assert out.returncode == 2
