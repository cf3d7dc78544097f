import json
import subprocess
import sys

import pytest

from twopoint.cli import main
from twopoint.expansions import validate_json


def _spec(tmp_path, name="spec.json", space1=("sphere", 2), space2=("real_projective", 3),
          finite=None, families=None, truncation=(40, 40)):
    data = {
        "space1": {"family": space1[0], "d": space1[1]},
        "space2": {"family": space2[0], "d": space2[1]},
        "finite": finite or [],
        "families": families if families is not None else [
            {"kind": "grid", "start": [0, 0], "steps": [1, 1], "C": 1.0, "rho": 0.5}],
        "truncation": list(truncation),
    }
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def _run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_ts(tmp_path, capsys):
    code, out, _ = _run(capsys, "eval", "--spec", _spec(tmp_path), "--ts", "1,1", "--ts", "0.2,-0.4")
    assert code == 0
    data = json.loads(out)
    # sum of 2^-k P_k(1): 2 on S^2, (1 - 1/2)^(-3/2) on P^3(R)
    assert data["values"][0]["value"] == pytest.approx(2 * 2 ** 1.5, rel=1e-9)
    assert data["tail_bound"] > 0 and data["truncation"] == [40, 40]


def test_eval_grid_csv(tmp_path, capsys):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"ts": [[0.0, 0.0], [-1.0, 1.0]]}))
    code, out, _ = _run(capsys, "eval", "--spec", _spec(tmp_path), "--grid", str(grid), "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "t,s,value,tail_bound" and len(lines) == 3


def test_eval_points(tmp_path, capsys):
    pts = tmp_path / "pts.json"
    x, w = [1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]
    pts.write_text(json.dumps({"pairs": [[[x, w], [x, w]]]}))
    code, out, _ = _run(capsys, "eval", "--spec", _spec(tmp_path), "--points", str(pts))
    assert code == 0
    assert json.loads(out)["values"][0]["value"] == pytest.approx(2 * 2 ** 1.5, rel=1e-9)


def test_eval_outside_domain(tmp_path, capsys):
    code, _, err = _run(capsys, "eval", "--spec", _spec(tmp_path), "--ts", "1.5,0")
    assert code == 1 and json.loads(err)["exit"] == 1


def test_classify(tmp_path, capsys):
    code, out, _ = _run(capsys, "classify", "--spec", _spec(tmp_path, space1=("complex_projective", 4),
                                                            space2=("quaternion_projective", 8)))
    assert code == 0
    data = json.loads(out)
    validate_json(data, "classification")
    assert (data["pd"], data["dc_spd"], data["spd"], data["theorem"]) == ("yes", "yes", "yes", "spdnec")


def test_classify_circle_unsupported_verdict(tmp_path, capsys):
    code, out, _ = _run(capsys, "classify", "--spec", _spec(tmp_path, space1=("sphere", 1)))
    assert code == 0
    assert json.loads(out)["dc_spd"] == "unsupported"


def test_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"space1": {"family": "sphere", "d": 2}}')
    assert _run(capsys, "classify", "--spec", str(bad))[0] == 1
    bad.write_text("{not json")
    assert _run(capsys, "classify", "--spec", str(bad))[0] == 1
    assert _run(capsys, "classify", "--spec", str(tmp_path / "missing.json"))[0] == 1
    assert _run(capsys, "classify")[0] == 1
    code, _, err = _run(capsys, "gram", "--spec", _spec(tmp_path), "--mode", "lattice")
    assert code == 1 and json.loads(err)["error"] == "UsageError"
    wrong_dim = _spec(tmp_path, space2=("complex_projective", 3))
    assert _run(capsys, "classify", "--spec", wrong_dim)[0] == 1


def test_gram_byte_identical(tmp_path, capsys):
    spec = _spec(tmp_path)
    args = ("gram", "--spec", spec, "--n", "12", "--seed", "5", "--repeat", "3", "--mode", "dc")
    code1, out1, _ = _run(capsys, *args)
    code2, out2, _ = _run(capsys, *args, "--workers", "3")
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.strip().split("\n")
    assert len(lines) == 4 and lines[1].startswith("exp0000,sphere,2,real_projective,3,12,5,dc,")


def test_gram_json_and_out(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = _run(capsys, "gram", "--spec", _spec(tmp_path), "--n", "6", "--format", "json",
                        "--timing", "--out", str(target))
    assert code == 0 and out == ""
    rows = json.loads(target.read_text())
    assert rows[0]["n"] == 6 and rows[0]["elapsed_s"] >= 0


def test_gram_unsupported_family(tmp_path, capsys):
    code, _, err = _run(capsys, "gram", "--spec", _spec(tmp_path, space1=("cayley_plane", 16)))
    assert code == 2 and json.loads(err)["exit"] == 2


def test_coeffs_function_round_trip(tmp_path, capsys):
    code, out, _ = _run(capsys, "coeffs", "--function", "affine", "--space1", "sphere:2",
                        "--space2", "complex_projective:4", "--kmax", "4")
    assert code == 0
    data = json.loads(out)
    validate_json(data, "kernel_spec")
    spec_path = tmp_path / "recovered.json"
    spec_path.write_text(out)
    code, out, _ = _run(capsys, "eval", "--spec", str(spec_path), "--ts", "0.3,-0.2")
    assert code == 0
    assert json.loads(out)["values"][0]["value"] == pytest.approx(1.3 * 0.8 / 4, rel=1e-9)


def test_coeffs_from_spec(tmp_path, capsys):
    spec = _spec(tmp_path, finite=[{"k": 2, "l": 1, "a": 0.75}], families=[], truncation=(4, 4))
    code, out, _ = _run(capsys, "coeffs", "--spec", spec)
    assert code == 0
    entries = json.loads(out)["finite"]
    assert len(entries) == 1
    assert (entries[0]["k"], entries[0]["l"]) == (2, 1)
    assert entries[0]["a"] == pytest.approx(0.75, rel=1e-9)


def test_coeffs_bad_space(capsys):
    assert _run(capsys, "coeffs", "--function", "exp", "--space1", "sphere", "--space2", "sphere:2")[0] == 1
    assert _run(capsys, "coeffs", "--function", "exp")[0] == 1


def test_null_config_and_reverify(tmp_path, capsys):
    spec = _spec(tmp_path, families=[{"kind": "grid", "start": [0, 0], "steps": [2, 1], "C": 1.0, "rho": 0.5}])
    code, out, _ = _run(capsys, "null-config", "--spec", spec)
    assert code == 0
    cert = json.loads(out)
    validate_json(cert, "null_certificate")
    assert cert["construction"] == "parity-even"
    assert cert["reason"] == "missing-odd-diagonal"
    path = tmp_path / "cert.json"
    path.write_text(out)
    code, out, _ = _run(capsys, "null-config", "--certificate", str(path))
    assert code == 0 and json.loads(out)["holds"] is True
    cert["c"] = [1.0, 1.0]
    path.write_text(json.dumps(cert))
    assert _run(capsys, "null-config", "--certificate", str(path))[0] == 3


def test_null_config_no_construction(tmp_path, capsys):
    spec = _spec(tmp_path, space1=("real_projective", 3), space2=("complex_projective", 4),
                 families=[{"kind": "ray", "start": [0, 0], "step": [1, 0], "C": 1.0, "rho": 0.5}])
    code, out, _ = _run(capsys, "null-config", "--spec", spec)
    assert code == 2 and json.loads(out)["construction"] is None


def test_poisson_check(capsys):
    code, out, _ = _run(capsys, "poisson-check")
    assert code == 0 and json.loads(out)["passed"]


def test_poisson_check_impossible_tolerance(capsys):
    code, out, _ = _run(capsys, "poisson-check", "--tol", "1e-30")
    assert code == 3 and not json.loads(out)["passed"]


def test_module_entry_point_selftest():
    proc = subprocess.run([sys.executable, "-m", "twopoint", "selftest"], capture_output=True, text=True,
                          timeout=300)
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["passed"]
    assert {c["name"] for c in report["checks"]} >= {"orthogonality", "poisson", "f21-derivative"}


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "twopoint" in capsys.readouterr().out
