import io
import json
import math
import subprocess
import sys

import pytest

from cknlab.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_params_json():
    code, text = run("params", "-a", "0", "-b", "0.5", "-d", "4")
    assert code == 0
    data = json.loads(text)
    assert data["p"] == pytest.approx(8 / 3)
    assert data["n"] == pytest.approx(8)
    assert data["alpha"] == pytest.approx(1 / 3)
    assert data["regions"]["in_dgz"]


def test_params_round_sphere_note():
    code, text = run("params", "-a", "0", "-b", "0", "-d", "3")
    data = json.loads(text)
    assert code == 0 and data["alpha"] == 1
    assert any("round sphere" in note for note in data["notes"])
    assert data["z"] == pytest.approx(2 * math.pi**2)


def test_params_disagreement_reported():
    data = json.loads(run("params", "-a", "-2", "-b", "-1.5", "-d", "4")[1])
    assert data["fs_disagreements"]


def test_params_at_critical_a_fails(capsys):
    assert run("params", "-a", "1", "-b", "1", "-d", "4")[0] == 2
    assert "error" in capsys.readouterr().err


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--d", "3,x"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_regions_csv_and_svg(tmp_path):
    code, text = run("regions", "-d", "4", "--a-min", "-2", "--a-max", "0", "--steps", "3")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "a,b_fs,b_dgz"
    a, b_fs, _ = lines[1].split(",")
    assert float(a) == -2 and float(b_fs) == pytest.approx(math.sqrt(3) - 3, abs=1e-12)
    target = tmp_path / "fig.svg"
    assert run("regions", "-d", "4", "--format", "svg", "-o", str(target))[0] == 0
    assert target.read_text().startswith("<svg")
    assert run("regions", "-d", "4", "--a-min", "0", "--a-max", "-1")[0] == 2


@pytest.mark.parametrize("spec, check", [
    ("extremal", lambda x: abs(x) < 1e-6),
    ("extremal:0.5", lambda x: abs(x) < 1e-6),
    ("constant:2", lambda x: abs(x) < 1e-10),
    ("seeded:3@1", lambda x: x >= -1e-6),
])
def test_deficit_specs(spec, check):
    code, text = run("deficit", "sobolev", spec, "-a", "0", "-b", "0.5", "-d", "4", "--angular", "6")
    assert code == 0
    assert check(json.loads(text)["deficit"])


def test_deficit_witness_outside_is_negative():
    code, text = run("deficit", "poincare", "witness", "-a", "-1", "-b", "-0.5", "-d", "3",
                     "--angular", "6")
    assert code == 0
    data = json.loads(text)
    assert data["deficit"] < -1e-8 and data["verdict"] == "violated"


def test_deficit_bad_spec():
    assert run("deficit", "sobolev", "nonsense", "-a", "0", "-b", "0.5", "-d", "4")[0] == 2
    assert run("deficit", "sobolev", "seeded:x", "-a", "0", "-b", "0.5", "-d", "4")[0] == 2


def test_verify_report_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run("verify", "--suite", "invariant", "--d", "3", "--seed", "5", "-o", str(first))[0] == 0
    assert run("verify", "--suite", "invariant", "--d", "3", "--seed", "5", "-o", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()
    rep = json.loads(first.read_text())
    assert rep["version"] == 1 and rep["seed"] == 5
    assert set(rep["records"][0]) == {"check_id", "params", "residual", "tolerance", "pass",
                                      "paper_ref", "direction"}


def test_verify_gamma_records_expected_negative():
    code, text = run("verify", "--suite", "gamma", "--d", "3")
    assert code == 0
    recs = {r["check_id"]: r for r in json.loads(text)["records"]}
    neg = recs["gamma.cd_fails_outside"]
    assert neg["params"] == [-2.0, -1.5, 4] and neg["direction"] == "negative" and neg["pass"]
    assert recs["gamma.a_constant_mismatch"]["direction"] == "discrepancy"


def test_verify_exit_code_on_failure(monkeypatch):
    from cknlab import verify
    bad = verify.VerificationRecord.make("x", None, 1.0, 0.0, "forced failure")
    monkeypatch.setattr(verify, "run_suite", lambda *a, **k: [bad])
    assert run("verify", "--suite", "params")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cknlab", "params", "-a", "0", "-b", "0", "-d", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 3
