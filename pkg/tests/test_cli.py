"""Command-line behavior: exit codes, config precedence, output formats."""

import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from genfourier.cli import main
from genfourier.suites import CheckReport, DEFAULT_TOLERANCES


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_kernel_suite_passes(capsys):
    code, out, err = run(["verify", "--k", "1", "--n", "1", "--suite", "kernel"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["k"] == 1.0 and doc["config"]["suites"] == ["kernel"]
    assert all(c["status"] == "pass" for c in doc["checks"])
    assert "PASS kernel.initial" in err


def test_verify_algebra_reports_f_tilde_failure(capsys):
    """The f~ triple-agreement check fails, so the algebra suite exits 2."""
    code, out, _ = run(["verify", "--k", "1", "--n", "1", "--suite", "algebra"], capsys)
    assert code == 2
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["algebra.f_tilde"]["status"] == "fail"
    assert all(c["status"] == "pass" for name, c in checks.items() if name != "algebra.f_tilde")


def test_tolerance_override(capsys):
    code, out, _ = run(["verify", "--k", "1", "--n", "1", "--suite", "algebra", "--tol", "algebra.f_tilde=3"], capsys)
    assert code == 0
    assert {c["name"]: c for c in json.loads(out)["checks"]}["algebra.f_tilde"]["tolerance"] == 3.0


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--k", "0", "--n", "1"],
        ["verify", "--k", "1", "--n", "0"],
        ["verify", "--suite", "bogus"],
        ["verify", "--tol", "nope=1"],
        ["verify", "--tol", "kernel.symmetry"],
        ["verify", "--tol", "kernel.symmetry=abc"],
        ["transform", "--s", "-1"],
        ["frobnicate"],
        ["transform", "--n", "two"],
    ],
)
def test_validation_errors_exit_1(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 1


def test_malformed_config_reports_location(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"k": 1,\n  "n": }\n')
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 1
    assert "line 2, column 8" in err


@pytest.mark.parametrize(
    "body,needle",
    [
        ({"k": 1, "n": 1, "colour": 1}, "unknown field"),
        ({"k": 1, "n": 1.5}, "field 'n'"),
        ({"k": "x"}, "field 'k'"),
        ({"grid": {"points": 10, "wat": 1}}, "grid"),
        ({"tolerances": {"kernel.symmetry": -1}}, "nonnegative"),
    ],
)
def test_invalid_config_fields(tmp_path, capsys, body, needle):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(body))
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 1 and needle in err


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"k": 2.0, "n": 2, "suites": ["kernel"], "tolerances": {"kernel.eigen": 0.5}}))
    code, out, _ = run(["verify", "--config", str(cfg), "--k", "1.5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["k"] == 1.5 and doc["config"]["n"] == 2
    eigen = {c["name"]: c for c in doc["checks"]}["kernel.eigen"]
    assert eigen["tolerance"] == 0.5


def test_transform_csv(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, _, err = run(["transform", "--k", "1", "--n", "1", "--s", "0.5", "--format", "csv", "--output", str(path)], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0] == ["x", "re", "im", "abs_error"]
    vals = np.array(rows[1:], dtype=float)
    assert vals[:, 3].max() <= 1e-6
    assert np.abs(vals[:, 0]).max() <= 3
    # full round-trip precision
    assert all(float(repr(float(v))) == float(v) for v in rows[5])
    assert json.loads(err)["max_abs_error_vs_closed_form"] <= 1e-6


def test_kernel_outputs(capsys):
    code, out, _ = run(["kernel", "--k", "0.8", "--n", "2", "--format", "csv"], capsys)
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "x,y,re,im" and len(rows) == 41 * 41 + 1
    code, out, _ = run(["kernel", "--k", "0.8", "--n", "2"], capsys)
    doc = json.loads(out)
    assert doc["c11"]["chosen"] == "nu+1"
    assert doc["m_estimate"] >= 1


def test_report_with_atoms_file(tmp_path, capsys):
    from genfourier import gaussian

    atoms = tmp_path / "a.json"
    atoms.write_text((gaussian(2, 0.5) + gaussian(2, 1.0, parity=1)).to_json())
    code, out, _ = run(["report", "--k", "1", "--n", "2", "--atoms", str(atoms), "--alpha", "1", "--beta", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["entries"]) == 2 * 2 * 2
    code, _, _ = run(["report", "--atoms", str(tmp_path / "missing.json")], capsys)
    assert code == 1


def test_convolve_and_density(capsys):
    code, out, _ = run(["convolve", "--k", "0.8", "--n", "2", "--p", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["young_ratios"]["p=1,r=1,q=1"] == pytest.approx(1.0, rel=1e-8)
    assert doc["bump_support"]["mass_outside"] <= 1e-4
    code, out, _ = run(["density-experiment", "--k", "0.8", "--n", "2", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    gauss = [float(r["error"]) for r in rows if r["input"] == "gaussian"]
    assert all(a > b for a, b in zip(gauss, gauss[1:]))


def test_verify_is_deterministic(tmp_path, monkeypatch):
    paths = []
    for i, threads in enumerate(("1", "3")):
        monkeypatch.setenv("GENFOURIER_THREADS", threads)
        p = tmp_path / f"r{i}.json"
        assert main(["verify", "--k", "1", "--n", "2", "--suite", "kernel,algebra,convolution", "--output", str(p)]) == 2
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "genfourier.cli", "verify", "--k", "0", "--n", "1"], capture_output=True, text=True)
    assert res.returncode == 1
    assert "violates" in res.stderr


@given(res=st.floats(0, 1e3) | st.just(float("inf")) | st.just(float("nan")), name=st.sampled_from(sorted(DEFAULT_TOLERANCES)))
def test_check_status_iff_within_tolerance(res, name):
    r = CheckReport.make(name, res, DEFAULT_TOLERANCES)
    assert (r.status == "pass") == (res <= DEFAULT_TOLERANCES[name])
    json.dumps(r.to_dict(), allow_nan=False)
