import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from cartanlab.cli import DEFAULT_PARAMS, ScenarioConfig, main
from cartanlab.report import RunReport, Check, dumps
from cartanlab.scenarios import ConfigError


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    comments = [l[2:] for l in lines if l.startswith("# ")]
    rows = list(csv.reader([l for l in lines if not l.startswith("#")]))
    return comments, rows[0], np.array(rows[1:], float)


@pytest.fixture(scope="module")
def s3_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("s3")
    code = main(["s3", "--out", str(out), "--param", "n_points=12", "--param", "R_values=[4,8,16]"])
    return code, out


def test_exit_codes(tmp_path, capsys):
    assert main(["anharmonic", "--out", str(tmp_path / "a")]) == 0
    # the printed relativistic gauge is a genuine failed check
    assert main(["relativistic", "--out", str(tmp_path / "r"), "--param", "n_points=10"]) == 1
    assert main(["nonsense"]) == 2
    assert main(["anharmonic", "--param", "bogus=1", "--out", str(tmp_path / "x")]) == 2
    assert main(["anharmonic", "--halving", "0", "--out", str(tmp_path / "x")]) == 2
    assert main(["lift", "--observable", "nope", "--out", str(tmp_path / "x")]) == 2
    assert main(["relativistic", "--format", "xml", "--out", str(tmp_path / "x")]) == 2
    out = capsys.readouterr()
    assert "[PASS]" in out.out and "config error" in out.err


def test_json_is_byte_reproducible(tmp_path):
    args = ["bracket-table", "--param", "n_points=12"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b"), "--jobs", "2"])
    a = (tmp_path / "a" / "report.json").read_bytes()
    b = (tmp_path / "b" / "report.json").read_bytes()
    assert a == b
    assert "run_seconds" in json.loads((tmp_path / "a" / "timing.json").read_text())
    assert b"run_seconds" not in a


def test_env_overrides_out(tmp_path, monkeypatch):
    monkeypatch.setenv("CARTANLAB_OUT", str(tmp_path / "env"))
    assert main(["lift", "--model", "free", "--observable", "P", "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "env" / "report.json").exists()
    assert not (tmp_path / "flag").exists()


def test_precedence_flags_over_file_over_defaults(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 5, "params": {"lambda": 2e-3, "halving": 2}}))
    main(["anharmonic", "--config", str(cfg), "--halving", "4", "--out", str(tmp_path / "o")])
    echo = json.loads((tmp_path / "o" / "report.json").read_text())["config"]
    assert echo["seed"] == 5
    assert echo["params"]["lambda"] == 2e-3
    assert echo["params"]["halving"] == 4
    assert echo["params"]["t"] == DEFAULT_PARAMS["anharmonic"]["t"]


def test_unknown_config_keys_rejected(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sed": 5}))
    assert main(["anharmonic", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"scenario": "s3", "speed": 1})
    with pytest.raises(ConfigError):
        ScenarioConfig("s3", {"n_points": 3})
    cfg.write_text("[1, 2]")
    assert main(["anharmonic", "--config", str(cfg)]) == 2


def test_numbers_have_17_digits():
    r = RunReport("x", {}, [Check("c", 0.1, 1e-3, True)])
    assert '"value": 0.10000000000000001' in r.to_json()
    assert dumps(float("nan")) == '"nan"'


def test_free_drift_columns_constant(tmp_path):
    main(["relativistic", "--out", str(tmp_path), "--param", "n_points=10"])
    comments, header, data = read_csv(tmp_path / "free_invariant_drift.csv")
    for name in ("Q", "P"):
        col = data[:, header.index(name)]
        assert np.ptp(col) < 1e-12
    assert np.ptp(data[:, header.index("q")]) > 0.1


def test_s3_outputs(s3_run):
    code, out = s3_run
    assert code == 1  # th-th contraction slope fails honestly
    for fam in ("eps_th_sym", "eps_th_anti", "rho_th", "th_th", "Z_norm"):
        comments, header, data = read_csv(out / f"contraction_{fam}.csv")
        assert comments[0].startswith("fitted slope")
        slope = float(comments[0].split()[-1])
        fit = np.polyfit(data[:, 0], data[:, 1], 1)[0]
        assert slope == pytest.approx(fit, abs=1e-9)
    comments, header, data = read_csv(out / "s3_geodesic.csv")
    eps = data[:, 1:4]
    assert np.max(np.linalg.norm(eps, axis=1)) < 2.0
    assert np.ptp(data[:, header.index("H")]) < 1e-9


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "cartanlab.cli", "lift", "--model", "relativistic",
                        "--observable", "K", "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "all checks passed" in r.stdout
