import csv
import io
import json
import subprocess
import sys

import pytest

from afpartial.cli import RunConfig, load_spec, main, run_uhf_suite, write_orbit_csv
from afpartial.errors import AlgebraError
from afpartial.odometer import FactorSeq, Word
from afpartial.tower import TowerSpec, UhfSpec


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_verify_uhf_smallest(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify-uhf", "--factors", "2", "--levels", "1", "--report", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["summary"]["passed"]
    assert "PASS" in capsys.readouterr().out


def test_verify_uhf_report_contents(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify-uhf", "--factors", "2,3", "--levels", "2", "--trials", "5",
                 "--report", str(out)]) == 0
    report = json.loads(out.read_text())
    checks = {(r["check"], r["scope"]) for r in report["records"]}
    for k in range(3):
        for name in ("semi_saturated", "masa", "regular_axioms", "lemma_theta_yx",
                     "theta_odometer", "ideal_identification", "odometer_bijection"):
            assert (name, f"level={k}") in checks
    for hom in ("hom=0->1", "hom=1->2", "hom=0->2"):
        for name in ("covariant", "regular_hom", "shift_restriction"):
            assert (name, hom) in checks
    assert ("cylinder_refinement", "level=1") in checks
    # one record per check and scope
    assert len(checks) == len(report["records"])
    assert report["config"]["source"] == {"type": "uhf", "factors": [2, 3], "levels": 2}


def test_verify_uhf_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["verify-uhf", "--factors", "2,3", "--levels", "2", "--trials", "10",
                     "--seed", "7", "--report", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_different_seed_changes_residuals_not_verdict(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify-uhf", "--factors", "3", "--levels", "2", "--trials", "5", "--seed", "1", "--report", str(a)])
    main(["verify-uhf", "--factors", "3", "--levels", "2", "--trials", "5", "--seed", "2", "--report", str(b)])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ra["summary"] == rb["summary"]


@pytest.mark.parametrize("argv", [
    ["verify-uhf", "--factors", "2,3", "--levels", "2", "--tol", "0"],
    ["verify-uhf", "--factors", "2,3", "--levels", "2", "--trials", "0"],
    ["verify-uhf", "--factors", "2,x", "--levels", "2"],
    ["verify-uhf", "--factors", "1", "--levels", "2"],
    ["verify-uhf", "--factors", "2", "--levels", "0"],
    ["verify-uhf", "--levels", "2"],
])
def test_verify_uhf_config_errors(argv):
    assert main(argv) == 2


def test_verify_uhf_cap(monkeypatch, capsys):
    monkeypatch.setenv("AFPARTIAL_MAX_BLOCK", "8")
    assert main(["verify-uhf", "--factors", "2", "--levels", "4"]) == 2
    assert "p_4 = 16" in capsys.readouterr().err


def test_failing_check_exits_one(monkeypatch, tmp_path):
    import afpartial.regular as reg

    good = reg.lambda_map
    monkeypatch.setattr(reg, "lambda_map", lambda d, x: 2 * good(d, x))
    out = tmp_path / "r.json"
    assert main(["verify-uhf", "--factors", "2", "--levels", "2", "--trials", "3",
                 "--report", str(out)]) == 1
    report = json.loads(out.read_text())
    failed = [r for r in report["records"] if not r["passed"]]
    assert failed and all(r["failure"] is not None for r in failed)
    assert not report["summary"]["passed"]


def test_bratteli_identity_two_levels(tmp_path):
    spec = _write(tmp_path, "t.json", {"type": "bratteli", "shapes": [[2, 3], [2, 3]],
                                       "placements": [[[1], [2]]]})
    assert main(["verify-bratteli", "--spec", spec, "--trials", "5"]) == 0


def test_bratteli_stacking(tmp_path):
    spec = _write(tmp_path, "t.json", {"type": "bratteli", "shapes": [[1, 2], [4]],
                                       "placements": [[[1, 2]]]})
    out = tmp_path / "r.json"
    assert main(["verify-bratteli", "--spec", spec, "--trials", "5", "--report", str(out)]) == 0
    names = {r["check"] for r in json.loads(out.read_text())["records"]}
    assert "theta_odometer" not in names and "covariant" in names


def test_bratteli_overflow_names_block(tmp_path, capsys):
    spec = _write(tmp_path, "t.json", {"type": "bratteli", "shapes": [[2], [3, 2]],
                                       "placements": [[[1], [1, 1]]]})
    assert main(["verify-bratteli", "--spec", spec]) == 2
    assert "target block 2" in capsys.readouterr().err


def test_bratteli_non_injective_warns(tmp_path):
    spec = _write(tmp_path, "t.json", {"type": "bratteli", "shapes": [[1, 2], [2]],
                                       "placements": [[[1, 1]]]})
    out = tmp_path / "r.json"
    assert main(["verify-bratteli", "--spec", spec, "--trials", "3", "--report", str(out)]) == 0
    rec = [r for r in json.loads(out.read_text())["records"] if r["check"] == "injective"][0]
    assert rec["passed"] and "warning" in rec["detail"]
    # unital but not injective: strict mode turns the warning into a failure
    assert main(["verify-bratteli", "--spec", spec, "--trials", "3", "--strict-unital"]) == 1


def test_bratteli_strict_unital_rejects_padding(tmp_path):
    spec = _write(tmp_path, "t.json", {"type": "bratteli", "shapes": [[1, 2], [4]],
                                       "placements": [[[2]]]})
    assert main(["verify-bratteli", "--spec", spec, "--trials", "3"]) == 0
    assert main(["verify-bratteli", "--spec", spec, "--strict-unital"]) == 2


@pytest.mark.parametrize("payload", [
    {"type": "bratteli", "shapes": [[2], [4]], "placements": []},
    {"type": "bratteli", "shapes": [[2], [4]]},
    {"type": "spiral"},
    [1, 2],
])
def test_bratteli_malformed(tmp_path, payload):
    assert main(["verify-bratteli", "--spec", _write(tmp_path, "t.json", payload)]) == 2


def test_bratteli_missing_file(tmp_path):
    assert main(["verify-bratteli", "--spec", str(tmp_path / "nope.json")]) == 2


def test_spec_file_uhf_type(tmp_path):
    spec = _write(tmp_path, "u.json", {"type": "uhf", "factors": [2, 2], "levels": 2})
    assert isinstance(load_spec(spec), UhfSpec)
    assert main(["verify-bratteli", "--spec", spec, "--trials", "3"]) == 0


def test_load_spec_one_based(tmp_path):
    spec = _write(tmp_path, "t.json", {"type": "bratteli", "shapes": [[1, 2], [4]],
                                       "placements": [[[2, 1]]]})
    t = load_spec(spec)
    assert isinstance(t, TowerSpec)
    assert t.homs[0].placement == ((1, 0),)


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_orbit_rows(capsys):
    assert main(["orbit", "--factors", "2,2", "--level", "2", "--start", "0,0", "--steps", "3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["step", "index", "digits"]
    assert [r[1] for r in rows[1:]] == ["0", "1", "2", "3"]
    assert rows[2] == ["1", "1", "1.0"]


def test_orbit_truncates_with_marker(capsys):
    assert main(["orbit", "--factors", "2,2", "--level", "2", "--start", "0,1", "--steps", "5"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [r[1] for r in rows[1:-1]] == ["2", "3"]
    assert rows[-1][2] == "out-of-domain"


def test_orbit_from_beta_max(capsys):
    assert main(["orbit", "--factors", "2,3", "--level", "2", "--start", "1,2", "--steps", "4"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 2 and rows[1][2] == "out-of-domain"


def test_orbit_zero_steps(capsys):
    assert main(["orbit", "--factors", "2,3", "--level", "2", "--start", "1,1", "--steps", "0"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows == [["step", "index", "digits"], ["0", "3", "1.1"]]


def test_orbit_to_file(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["orbit", "--factors", "2,2,2", "--level", "3", "--start", "0,0,0",
                 "--steps", "7", "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    assert len(rows) == 9 and rows[-1] == ["7", "7", "1.1.1"]


@pytest.mark.parametrize("argv", [
    ["orbit", "--factors", "2,2", "--level", "2", "--start", "2,0", "--steps", "1"],
    ["orbit", "--factors", "2,2", "--level", "2", "--start", "0", "--steps", "1"],
    ["orbit", "--factors", "2,2", "--level", "2", "--start", "0,0", "--steps", "-1"],
])
def test_orbit_invalid(argv):
    assert main(argv) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "afpartial", "orbit", "--factors", "3", "--level", "1", "--steps", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "2,2,2"


def test_run_uhf_suite_api():
    rep = run_uhf_suite(UhfSpec((2,), 2), RunConfig(trials=3))
    assert rep.passed
    assert rep.to_json() == run_uhf_suite(UhfSpec((2,), 2), RunConfig(trials=3)).to_json()
