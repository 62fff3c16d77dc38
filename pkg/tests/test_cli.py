import json
import subprocess
import sys

import pytest

from shadowcover.cli import run


def _invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def bodies(tmp_path):
    square = tmp_path / "square.json"
    square.write_text(json.dumps({"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1], [1, 1]]}))
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"dim": 2, "vertices": [[0, 0], [2, 0], [0, 2], [2, 2]]}))
    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"dim": 2, "vertices": [[0, 0], [3, 0], [0, 3]]}))
    return {"square": str(square), "big": str(big), "tri": str(tri)}


def test_fit_command(bodies, capsys):
    code, rep = _invoke(capsys, "fit", bodies["square"], bodies["big"])
    assert code == 0
    assert rep["result"]["fits"] is True
    assert rep["result"]["sigma"] == pytest.approx(2.0, abs=1e-7)
    assert rep["command"] == "fit"
    assert rep["tolerances"]["tol_feas"] == 1e-9
    assert "timestamp" in rep


def test_fit_failure_direction(bodies, capsys):
    code, rep = _invoke(capsys, "fit", bodies["big"], bodies["square"])
    assert code == 0
    assert rep["result"]["fits"] is False


def test_scale_fit_command(bodies, capsys):
    code, rep = _invoke(capsys, "scale-fit", bodies["tri"], bodies["square"])
    assert code == 0
    assert rep["result"]["sigma"] == pytest.approx(1.0 / 3.0, abs=1e-7)


def test_witness_command(bodies, capsys):
    code, rep = _invoke(capsys, "witness", bodies["big"], bodies["square"], "--k", "3")
    assert code == 0
    assert rep["result"]["witness"] is not None
    assert rep["result"]["witness_sigma"] < 1.0
    code, rep = _invoke(capsys, "witness", bodies["square"], bodies["big"], "--k", "3")
    assert rep["result"]["all_subsets_fit"] is True


def test_shadow_sweep_command(bodies, capsys):
    code, rep = _invoke(capsys, "shadow-sweep", bodies["square"], bodies["big"],
                        "--d", "1", "--samples", "64")
    assert code == 0
    assert rep["result"]["verdict"] == "covers"
    assert len(rep["result"]["sigmas"]) == 64


def test_edge_criterion_command(bodies, tmp_path, capsys):
    seg = tmp_path / "seg.json"
    seg.write_text(json.dumps({"dim": 2, "vertices": [[0, 0], [1.0, 0]]}))
    code, rep = _invoke(capsys, "edge-criterion", str(seg), bodies["tri"])
    assert code == 0
    assert rep["result"]["agrees"] is True


def test_tetra_quad_then_counterexample(tmp_path, capsys):
    prefix = str(tmp_path / "tq")
    code, rep = _invoke(capsys, "tetra-quad", "--save", prefix, "--samples", "1000")
    assert code == 0
    assert rep["result"]["touching"] is True
    assert rep["result"]["epsilon"] > 1.001
    code, rep = _invoke(capsys, "counterexample", prefix + "_quad.json",
                        "--d", "2", "--samples", "300", "--seed", "5")
    assert code == 0
    assert rep["result"]["epsilon"] > 1.0
    assert rep["result"]["contains_translate"] is False
    assert all(rep["result"]["replay"].values())


def test_counterexample_full_dim(tmp_path, capsys):
    tetra = tmp_path / "tetra.json"
    tetra.write_text(json.dumps({"dim": 3, "vertices":
                                 [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]}))
    code, rep = _invoke(capsys, "counterexample", str(tetra), "--samples", "300")
    assert code == 0
    assert rep["result"]["epsilon"] > 1.0
    assert rep["result"]["checks"]["translate_excluded"]


def test_meanwidth_command(tmp_path, capsys):
    cube = tmp_path / "cube.json"
    cube.write_text(json.dumps({"dim": 3, "vertices":
                                [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]}))
    code, rep = _invoke(capsys, "meanwidth", str(cube), "--exact", "--samples", "2000")
    assert code == 0
    assert rep["result"]["exact"] == pytest.approx(1.5, abs=1e-12)
    est = rep["result"]["mc"]
    assert abs(est["value"] - 1.5) <= 4 * est["stderr"]


def test_kubota_command(tmp_path, capsys):
    cube = tmp_path / "cube.json"
    cube.write_text(json.dumps({"dim": 3, "vertices":
                                [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]}))
    code, rep = _invoke(capsys, "kubota", str(cube), "--samples", "300")
    assert code == 0
    assert rep["result"]["rel_error"] <= 0.03


def test_oblique_command(tmp_path, capsys):
    k = tmp_path / "k.json"
    k.write_text(json.dumps({"dim": 3, "vertices":
                             [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]}))
    l = tmp_path / "l.json"
    l.write_text(json.dumps({"dim": 3, "vertices":
                             [[-1, -1, -1], [2, 0, 0], [0, 2, 0], [0, 0, 2], [2, 2, 2]]}))
    code, rep = _invoke(capsys, "oblique", str(k), str(l), "--seed", "11")
    assert code == 0
    assert rep["result"]["agrees"] is True


def test_verify_suite_command(capsys):
    code, rep = _invoke(capsys, "verify-suite", "--n", "2", "--trials", "8",
                        "--samples", "50", "--seed", "7")
    assert code == 0
    assert rep["result"]["disagreements"] == 0
    assert "borderline" in rep["result"]


def test_malformed_json_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "vertices": [[0,0],')
    code = run(["fit", str(bad), str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert "line" in err and "column" in err


def test_ragged_body_exit_code(tmp_path, capsys):
    bad = tmp_path / "ragged.json"
    bad.write_text(json.dumps({"dim": 2, "vertices": [[0, 0], [1]]}))
    code = run(["fit", str(bad), str(bad)])
    assert code == 2


def test_unknown_flag_exit_code():
    proc = subprocess.run([sys.executable, "-m", "shadowcover.cli", "fit", "a", "b",
                           "--nope"], capture_output=True)
    assert proc.returncode == 2


def test_output_file_written(bodies, tmp_path, capsys):
    out = tmp_path / "report.json"
    code, rep = _invoke(capsys, "fit", bodies["square"], bodies["big"], "-o", str(out))
    assert code == 0
    on_disk = json.loads(out.read_text())
    assert on_disk["result"] == rep["result"]


def test_determinism_modulo_timestamp(capsys):
    argv = ["verify-suite", "--n", "2", "--trials", "6", "--samples", "40", "--seed", "7"]
    code1, rep1 = _invoke(capsys, *argv)
    code2, rep2 = _invoke(capsys, *argv)
    assert code1 == code2 == 0
    rep1.pop("timestamp")
    rep2.pop("timestamp")
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)
