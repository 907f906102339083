import csv
import io
import json

import numpy as np
import pytest

from conftest import admissible_pairs
from uvlab.cli import main
from uvlab.errors import ConfigError
from uvlab.experiments import (
    COLUMNS,
    ExperimentConfig,
    example21_path,
    parse_regime,
    run_longmem,
    run_verify,
    summarize,
)


def _run(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


def test_verify_example(tmp_path):
    code, data = _run(["verify", "--kernel", "variance", "--dist", "normal", "--sizes", "10,100",
                       "--reps", "100"], tmp_path)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert tuple(rows[0]) == COLUMNS
    res = [float(r["residual"]) for r in rows if r["residual"]]
    assert max(res) <= 1e-6


def test_cvm_linear_parts_zero():
    t = run_verify(ExperimentConfig("verify", kernel="cvm", dist="uniform", sizes=(50,), reps=100))
    lin = [r for r in t.rows if r["stat"] in ("linear_forward", "linear_ibp")]
    assert all(abs(r[k]) <= 1e-12 for r in lin for k in ("mean", "q05", "q95"))


def test_unknown_kernel_is_config_error(tmp_path, capsys):
    code, _ = _run(["verify", "--kernel", "nope"], tmp_path)
    assert code == 3
    assert "gini" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        ExperimentConfig("verify", sizes=(10, 5))
    with pytest.raises(ConfigError):
        ExperimentConfig("verify", reps=0)
    with pytest.raises(ConfigError):
        ExperimentConfig("verify", dist="cauchy")


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_identical_reruns(tmp_path, fmt):
    args = ["weak-limit", "--kernel", "gini", "--dist", "normal", "--sizes", "50,100", "--reps", "40",
            "--limit-samples", "500", "--format", fmt, "--seed", "9"]
    _, a = _run(args, tmp_path, "a." + fmt)
    _, b = _run(args, tmp_path, "b." + fmt)
    assert a == b and a


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("kernel: gini\ndist: normal\nsizes: [20]\nreps: 5\nseed: 1\n")
    _, a = _run(["verify", "--config", str(cfg)], tmp_path, "a.csv")
    _, b = _run(["verify", "--config", str(cfg), "--kernel", "variance"], tmp_path, "b.csv")
    assert b"verify,gini" in a and b"verify,variance" in b
    j = tmp_path / "cfg.json"
    j.write_text(json.dumps({"kernel": "gini", "sizes": [20], "reps": 5, "seed": 1}))
    _, c = _run(["verify", "--config", str(j)], tmp_path, "c.csv")
    assert c == a
    bad = tmp_path / "bad.yaml"
    bad.write_text("colour: red\n")
    assert main(["verify", "--config", str(bad)]) == 3


def test_json_envelope(tmp_path):
    _, data = _run(["example21", "--sizes", "100,400", "--reps", "50", "--format", "json"], tmp_path, "e.json")
    doc = json.loads(data)
    assert set(doc) == {"metadata", "rows"}
    assert "wall_time" not in json.dumps(doc["metadata"])
    assert doc["metadata"]["config"]["experiment"] == "example21"
    assert all(tuple(r) == tuple(sorted(COLUMNS)) for r in doc["rows"])


def test_rows_have_monotone_quantiles_and_finite_diagnostics(tmp_path):
    _, data = _run(["weak-limit", "--kernel", "cvm", "--dist", "uniform", "--sizes", "100", "--reps", "60",
                    "--limit-samples", "600"], tmp_path)
    for r in csv.DictReader(io.StringIO(data.decode())):
        q = [float(r[k]) for k in ("q05", "q25", "q50", "q75", "q95")]
        assert q == sorted(q)
        for k in ("ks", "residual"):
            if r[k]:
                assert np.isfinite(float(r[k]))
        assert r["scaling_p"] in ("1", "2")


def test_simulate_limit_dump(tmp_path):
    code, data = _run(["simulate-limit", "--kernel", "variance", "--dist", "normal", "--reps", "2000"], tmp_path)
    assert code == 0
    vals = np.array(data.decode().split()[1:], dtype=float)
    assert vals.size == 2000
    assert vals.var() == pytest.approx(2.0, rel=0.1)
    code, _ = _run(["simulate-limit", "--kernel", "variance", "--regime", "longmem(0.7)", "--reps", "500"],
                   tmp_path, "lm.csv")
    assert code == 0


def test_regimes():
    assert parse_regime("ar1(0.3)") == ("ar1", 0.3)
    assert parse_regime("longmem") == ("longmem", 0.7)
    assert parse_regime("iid") == ("iid", None)
    with pytest.raises(ConfigError):
        parse_regime("ar1(2)")
    with pytest.raises(ConfigError):
        ExperimentConfig("weak-limit", regime="longmem")


def test_weak_limit_ar1_runs():
    from uvlab.experiments import run_weak_limit

    t = run_weak_limit(ExperimentConfig("weak-limit", kernel="variance", regime="ar1(0.5)", sizes=(400,),
                                        reps=200, limit_samples=4000))
    assert t.rows[0]["ks"] < 0.2


def test_classification_mismatch_exit(tmp_path):
    code, _ = _run(["longmem", "--kernel", "variance", "--regime", "longmem(0.7)", "--pqr", "3,1,2",
                    "--sizes", "100", "--reps", "3"], tmp_path)
    assert code == 2


def test_longmem_rows_echo_scaling():
    t = run_longmem(ExperimentConfig("longmem", kernel="artificial", regime="longmem(0.7)", sizes=(200, 400),
                                     reps=10, limit_samples=200))
    assert {r["scaling_p"] for r in t.rows if r["stat"].startswith("scaled")} == {1, 2, 3}


def test_example21_construction():
    X, Z, xi = example21_path(1000, np.random.default_rng(4))
    assert np.array_equal(np.unique(np.round(X, 12)), np.round([-np.sqrt(2), -1, 0, 1, np.sqrt(2)], 12))
    assert np.max(np.abs(X * X - 1 - Z)) <= 1e-15
    assert xi.size == 1001


def test_summarize_empty_and_single():
    assert summarize([])["mean"] is None
    assert summarize([2.0])["sd"] == 0.0


def test_verify_sweep_full_catalogue():
    worst = 0.0
    for kernel, dist in admissible_pairs():
        t = run_verify(ExperimentConfig("verify", kernel=kernel, dist=dist, sizes=(5, 60), reps=5))
        worst = max(worst, t.checks["residual"]["max_residual"])
    assert worst <= 1e-5
