import json
import math

import pytest
import yaml

from sdebye.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_NO_CONTRACTION, main, validate, ConfigError
from sdebye.io import read_csv


def write(tmp_path, cfg, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


SIM = {
    "seed": 1,
    "grid": {"n": 1, "M": 16},
    "model": {"K": 0.5, "eps": 1, "alpha": 2},
    "initial": {"profile": "zero", "params": {"v_level": 1.0}},
    "numerics": {"dt": 0.01, "T": 0.2, "save_every": 5},
}


def test_simulate_zero_data(tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--config", write(tmp_path, SIM), "--out", str(out)]) == 0
    header, rows = read_csv(out / "trajectory.csv")
    assert header[:4] == ["t", "u_l2", "u_h1", "v_l2"]
    for r in rows:
        assert float(r[3]) == pytest.approx(math.exp(-float(r[0]) / 0.5), rel=1e-12)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok" and "trajectory.csv" in manifest["outputs"]
    assert len(manifest["config_sha256"]) == 64


def test_runs_are_byte_identical(tmp_path):
    cfg = dict(SIM, initial={"profile": "random_bandlimited", "params": {"band": 3}})
    path = write(tmp_path, cfg)
    for d in ("a", "b"):
        assert main(["simulate", "--config", path, "--out", str(tmp_path / d)]) == 0
    for name in ("trajectory.csv", "balance.csv", "u_final.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert main(["simulate", "--config", path, "--out", str(tmp_path / "c"), "--seed", "99"]) == 0
    assert (tmp_path / "a" / "u_final.csv").read_bytes() != (tmp_path / "c" / "u_final.csv").read_bytes()


def test_malformed_config_lists_fields(tmp_path, capsys):
    cfg = {"grid": {"n": 1, "M": 33}, "model": {"K": 1, "eps": 2, "alpha": 2}, "initial": {"profile": "zero"},
           "numerics": {"dt": 0.1, "T": 1.0}}
    out = tmp_path / "out"
    assert main(["simulate", "--config", write(tmp_path, cfg), "--out", str(out)]) == EXIT_CONFIG
    report = json.loads((out / "error.json").read_text())
    fields = {p.split(":")[0] for p in report["problems"]}
    assert fields == {"grid.M", "model.eps", "numerics.save_every"}
    assert "grid.M" in capsys.readouterr().err


def test_missing_seed(tmp_path):
    cfg = {k: v for k, v in SIM.items() if k != "seed"}
    assert main(["simulate", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["simulate", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o"), "--seed", "3"]) == 0


def test_validate_mode_mismatch():
    with pytest.raises(ConfigError) as exc:
        validate("classify", {"mode": "xsb", "classify": {"n": [1], "alpha": [2], "s": [0]}})
    assert exc.value.problems[0].startswith("mode:")


def test_blow_up_exit_code(tmp_path):
    cfg = dict(SIM, initial={"profile": "single_mode", "params": {"xi": 0, "amplitude": 1e9}})
    out = tmp_path / "out"
    assert main(["simulate", "--config", write(tmp_path, cfg), "--out", str(out)]) == EXIT_BLOWUP
    assert json.loads((out / "error.json").read_text())["error"] == "blow-up"


def test_no_contraction_exit_code(tmp_path):
    cfg = {
        "seed": 0,
        "grid": {"n": 1, "M": 16},
        "model": {"K": 1.0, "eps": 1, "alpha": 2},
        "initial": {"profile": "gaussian_bump", "params": {"width": 0.15, "amplitude": 10}},
        "numerics": {"window_length": 4.0, "samples": 512, "delta": 0.2, "tol": 1e-10, "kmax": 30, "s": 1.0},
    }
    out = tmp_path / "out"
    assert main(["picard", "--config", write(tmp_path, cfg), "--out", str(out)]) == EXIT_NO_CONTRACTION
    assert (out / "picard_history.csv").exists()
    cfg["initial"]["params"]["amplitude"] = 1
    assert main(["picard", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "ok")]) == 0
    assert json.loads((tmp_path / "ok" / "picard_summary.json").read_text())["converged"]


def test_strichartz_sweep(tmp_path):
    cfg = {"seed": 0, "strichartz": {"N_values": [8, 16, 24, 32], "count_budget": 64}}
    out = tmp_path / "out"
    assert main(["strichartz", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    report = json.loads((out / "growth_fit.json").read_text())
    assert report["max_counts"][0] == 18 and report["fit"]["c"] > 0
    header, rows = read_csv(out / "counts_N8.csv")
    assert header == ["n", "j", "count"] and sum(int(r[2]) for r in rows) == 17**3
    cfg["strichartz"]["count_budget"] = 16
    assert main(["strichartz", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "x")]) == EXIT_CONFIG


def test_xsb_and_classify(tmp_path):
    cfg = {
        "seed": 0,
        "grid": {"n": 1, "M": 8},
        "window": {"window_length": 4.0, "samples": 256, "delta": 0.25},
        "sweep": {"s": 0, "b": 0.25, "b_prime": 0.0, "T_values": [0.5, 0.25]},
        "input": {"atoms": [[1, 1.0, 1.0]]},
    }
    assert main(["xsb", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "x")]) == 0
    _, rows = read_csv(tmp_path / "x" / "norm_sweep.csv")
    assert rows[0][3] == "xsb" and float(rows[0][4]) == pytest.approx(1.0)
    cfg = {"seed": 0, "classify": {"n": [1, 3], "alpha": [2, 2.5], "s": [0, 1]}}
    assert main(["classify", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "c")]) == 0
    header, rows = read_csv(tmp_path / "c" / "verdicts.csv")
    assert header == ["n", "alpha", "s", "verdict", "theorem_tag"] and len(rows) == 8


def test_initial_data_from_files(tmp_path):
    out = tmp_path / "first"
    assert main(["simulate", "--config", write(tmp_path, SIM), "--out", str(out)]) == 0
    cfg = dict(SIM, initial={"u_file": str(out / "u_final.csv"), "v_file": str(out / "v_final.csv")})
    assert main(["simulate", "--config", write(tmp_path, cfg, "b.yaml"), "--out", str(tmp_path / "second")]) == 0
    _, rows = read_csv(tmp_path / "second" / "trajectory.csv")
    assert float(rows[0][3]) == pytest.approx(math.exp(-0.2 / 0.5))
    bad = dict(SIM, grid={"n": 1, "M": 32}, initial=cfg["initial"])
    assert main(["simulate", "--config", write(tmp_path, bad, "c.yaml"), "--out", str(tmp_path / "third")]) == EXIT_CONFIG


def test_unreadable_config(tmp_path):
    assert main(["classify", "--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)]) == EXIT_CONFIG
