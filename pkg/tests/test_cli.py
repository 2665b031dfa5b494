import csv
import json
import math

import pytest

from apgabor import cli
from apgabor.apcore import APSequence, TrigPolynomial


def run_cli(tmp_path, argv, name="r.json"):
    out = tmp_path / name
    code = cli.main(argv + ["--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_frame_bounds_report_schema(tmp_path):
    code, rep = run_cli(tmp_path, ["frame-bounds", "--window", "gaussian:sigma=1", "--alpha", "1",
                                   "--beta", "1", "--grid", "32", "--K", "5"])
    assert code == 0
    assert set(rep) == {"command", "config", "results", "certificates", "violations", "timestamp"}
    assert set(rep["certificates"]) >= {"tails", "slack"}
    assert rep["results"]["A"] > 0
    rows = list(csv.reader((tmp_path / "r.csv").open()))
    assert rows[0] == ["lambda", "eig_min", "eig_max"]
    assert len(rows) == 33
    # 17 significant digits round-trip exactly
    assert min(float(r[1]) for r in rows[1:]) == rep["results"]["A"]


def test_deterministic_reports(tmp_path):
    argv = ["sandwich", "--window", "gaussian:sigma=1", "--grid", "16", "--K", "5",
            "--trials", "5", "--seed", "7"]
    _, a = run_cli(tmp_path, argv, "a.json")
    _, b = run_cli(tmp_path, argv, "b.json")
    a.pop("timestamp"), b.pop("timestamp")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sandwich_violation_exit_code(tmp_path):
    code, rep = run_cli(tmp_path, ["sandwich", "--window", "gaussian:sigma=1", "--alpha", "1",
                                   "--beta", str(8 * math.pi), "--grid", "16", "--K", "5",
                                   "--trials", "3"])
    assert code == 2
    assert rep["violations"]
    assert "inequality" in rep["violations"][0]


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"window": "triangle", "grid": 8, "K": 3, "beta": 2.0}))
    code, rep = run_cli(tmp_path, ["frame-bounds", "--config", str(cfg), "--K", "4"])
    assert code == 0
    assert rep["config"]["window"] == "triangle"
    assert rep["config"]["K"] == 4
    assert rep["config"]["beta"] == 2.0


@pytest.mark.parametrize("argv", [
    ["frame-bounds", "--window", "hann"],
    ["frame-bounds", "--alpha", "-1"],
    ["frame-bounds", "--K", "0"],
    ["nonsense"],
    ["synthesize"],
])
def test_usage_errors_exit_one(tmp_path, argv, capsys):
    assert cli.main(argv + ["--out", str(tmp_path / "x.json")]) == 1
    assert capsys.readouterr().err


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert cli.main(["bessel", "--config", str(cfg)]) == 1
    assert "colour" in capsys.readouterr().err


def test_oracle_check(tmp_path):
    code, rep = run_cli(tmp_path, ["oracle-check", "--window", "gaussian:sigma=1", "--alpha", "1",
                                   "--T", "200"])
    assert code == 0
    assert rep["results"]["checks"][0]["rel_error"] < 1e-2


def test_bessel(tmp_path):
    code, rep = run_cli(tmp_path, ["bessel", "--window", "rect:a=0,b=1", "--grid", "16",
                                   "--P", "1000"])
    assert code == 0
    assert rep["results"]["bessel_condition_sup"] == pytest.approx(1.0, abs=1e-2)
    assert rep["results"]["wiener_norm"] == pytest.approx(1.0)


def test_analyze_then_synthesize(tmp_path):
    poly = tmp_path / "f.json"
    poly.write_text(json.dumps(TrigPolynomial([0.3, 1.1], [1.0, 0.5j]).to_dict()))
    code, rep = run_cli(tmp_path, ["analyze", "--window", "gaussian:sigma=1", "--input", str(poly),
                                   "--tol", "1e-10"])
    assert code == 0
    fam = rep["results"]["families"][0]
    assert fam["bessel_total"] > 0
    fam_path = tmp_path / "fam.json"
    fam_path.write_text(json.dumps(fam["family"]))
    code, syn = run_cli(tmp_path, ["synthesize", "--window", "gaussian:sigma=1", "--input",
                                   str(fam_path), "--P", "3"], "s.json")
    assert code == 0
    assert syn["results"]["mode"] == "gabor"


def test_synthesize_sequence(tmp_path):
    seq = tmp_path / "a.json"
    seq.write_text(json.dumps(APSequence([0.5], [1.0]).to_dict()))
    code, rep = run_cli(tmp_path, ["synthesize", "--window", "gaussian:sigma=1", "--alpha", "2",
                                   "--input", str(seq), "--P", "2"])
    assert code == 0
    assert rep["results"]["alpha_factor"] == 0.5
    assert len(rep["results"]["polynomial"]["terms"]) == 5


def test_subspace(tmp_path):
    mu = ",".join(str(j + 0.5) for j in range(10))
    code, rep = run_cli(tmp_path, ["subspace", "--window", "gaussian:sigma=1", "--mu", mu])
    assert code == 0
    assert rep["results"]["A"] > 0
    assert rep["results"]["case"] == "b"


def test_subspace_collision_is_usage_error(tmp_path):
    mu = f"0.5,{0.5 + 2 * math.pi}"
    assert cli.main(["subspace", "--mu", mu, "--out", str(tmp_path / "x.json")]) == 1


def test_stdout_when_no_out(capsys):
    assert cli.main(["bessel", "--window", "triangle", "--grid", "4", "--P", "10"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "bessel"
