"""CLI harness tests: schema validation, exit codes, deterministic outputs,
and the documented pipelines end to end."""

import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from palab.cli import OUTPUT_SCHEMAS, main


def run_cli(args):
    return main(list(args))


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def bernoulli_model(tmp_path):
    rng = np.random.default_rng(1)
    p = (rng.random((8, 2)) * 0.15).round(6)
    return write_json(
        tmp_path / "bern.json",
        {"schema_version": 1, "n": 8, "d": 2, "p": p.tolist(), "m": 0},
    )


@pytest.fixture
def gibbs_model(tmp_path):
    return write_json(
        tmp_path / "gibbs.json",
        {
            "schema_version": 1,
            "beta": 2.0,
            "theta": 0.5,
            "rho": 0.1,
            "window": {"lows": [0.0, 0.0], "highs": [1.0, 1.0]},
            "u": {
                "kind": "indicator_empty",
                "region_a": {"lows": [0.0, 0.0], "highs": [0.5, 1.0]},
                "region_b": {"lows": [0.5, 0.0], "highs": [1.0, 1.0]},
            },
        },
    )


def test_bernoulli_bound_deterministic_output(tmp_path, bernoulli_model):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert run_cli(["bernoulli-bound", "--model", bernoulli_model, "--out", str(out1)]) == 0
    assert run_cli(["bernoulli-bound", "--model", bernoulli_model, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    jsonschema.validate(payload, OUTPUT_SCHEMAS["bernoulli-bound"])
    assert payload["bound"] == payload["corollary_bound"]  # m = 0
    assert (tmp_path / "a.json.meta.json").exists()


def test_bernoulli_verify_exact_pipeline(tmp_path, bernoulli_model):
    out = tmp_path / "verify.json"
    code = run_cli(["bernoulli-verify", "--model", bernoulli_model, "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    jsonschema.validate(payload, OUTPUT_SCHEMAS["bernoulli-verify"])
    assert payload["verdict"] == "PASS"
    assert payload["mode"] == "exact"
    assert payload["distance"] <= payload["bound"] + payload["truncation_error"] + 1e-8


def test_bernoulli_verify_empirical_mdep(tmp_path):
    rng = np.random.default_rng(5)
    p = (rng.random((20, 2)) * 0.03).round(6)
    model = write_json(
        tmp_path / "mdep.json",
        {"schema_version": 1, "n": 20, "d": 2, "p": p.tolist(), "m": 1},
    )
    out = tmp_path / "verify.json"
    code = run_cli([
        "bernoulli-verify", "--model", model, "--out", str(out),
        "--reps", "20000", "--seed", "9",
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["mode"] == "empirical"
    assert payload["verdict"] == "PASS"


def test_stein_check_csv(tmp_path):
    out = tmp_path / "stein.csv"
    code = run_cli([
        "stein-check", "--lambda-grid", "0.5:4:4", "--g", "random:10",
        "--range", "80", "--out", str(out), "--format", "csv", "--seed", "3",
    ])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "lambda,g_id,sup_abs,sup_delta,residual"
    assert len(lines) == 1 + 4 * 10
    for line in lines[1:]:
        _, _, sup_abs, sup_delta, residual = line.split(",")
        assert float(sup_abs) <= 1 + 1e-12
        assert float(sup_delta) <= 1 + 1e-12
        assert float(residual) <= 1e-10


def test_dpi_two_point_dirac_exactly_two(tmp_path):
    model = write_json(
        tmp_path / "dpi.json",
        {
            "schema_version": 1,
            "xi": {"type": "dirac_labels", "space": ["a", "b"], "points": ["a"]},
            "eta": {"type": "dirac_labels", "space": ["a", "b"], "points": ["b"]},
            "partitions": [[{"labels": ["a"]}, {"labels": ["b"]}]],
        },
    )
    out = tmp_path / "dpi.json.out"
    assert run_cli(["dpi-estimate", "--model", model, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    jsonschema.validate(payload, OUTPUT_SCHEMAS["dpi-estimate"])
    assert payload["estimate"] == 2.0


def test_dpi_bound_violation_exits_2(tmp_path):
    model = write_json(
        tmp_path / "dpi.json",
        {
            "schema_version": 1,
            "xi": {"type": "dirac_labels", "space": ["a", "b"], "points": ["a"]},
            "eta": {"type": "dirac_labels", "space": ["a", "b"], "points": ["b"]},
            "partitions": [[{"labels": ["a"]}, {"labels": ["b"]}]],
            "bound": 0.5,
        },
    )
    assert run_cli(["dpi-estimate", "--model", model, "--out", str(tmp_path / "o.json")]) == 2


def test_unknown_keys_rejected(tmp_path):
    model = write_json(
        tmp_path / "bad.json",
        {"schema_version": 1, "n": 2, "d": 1, "p": [[0.1], [0.1]], "m": 0, "bogus": 1},
    )
    assert run_cli(["bernoulli-bound", "--model", model]) == 1


def test_failed_marker_written(tmp_path):
    # valid schema, invalid semantics: row sums > 1 explode inside the pipeline
    model = write_json(
        tmp_path / "bad.json",
        {"schema_version": 1, "n": 1, "d": 2, "p": [[0.8, 0.7]], "m": 0},
    )
    out = tmp_path / "out.json"
    assert run_cli(["bernoulli-bound", "--model", model, "--out", str(out)]) == 1
    payload = json.loads(out.read_text())
    assert payload["failed"] is True


def test_gnz_check_cli(tmp_path, gibbs_model):
    out = tmp_path / "gnz.json"
    code = run_cli([
        "gnz-check", "--model", gibbs_model, "--reps", "3000", "--seed", "4",
        "--grid", "16", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    jsonschema.validate(payload, OUTPUT_SCHEMAS["gnz-check"])
    assert abs(payload["z_score"]) <= 4


def test_papangelou_bound_cli(tmp_path, gibbs_model):
    out = tmp_path / "pap.json"
    code = run_cli([
        "papangelou-bound", "--model", gibbs_model, "--reps", "2000", "--seed", "4",
        "--grid", "24", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    jsonschema.validate(payload, OUTPUT_SCHEMAS["papangelou-bound"])
    assert payload["estimate"] > 0


def test_ustat_bound_cli(tmp_path):
    model = write_json(
        tmp_path / "ustat.json",
        {"schema_version": 1, "family": "interval_pair", "rate": 1.0, "delta": 1.0},
    )
    out = tmp_path / "u.json"
    assert run_cli(["ustat-bound", "--model", model, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["R"] == pytest.approx(1.0, rel=1e-9)
    assert payload["bound"] == pytest.approx(4.0, rel=1e-9)


def test_wasserstein_cli_with_flow(tmp_path):
    from palab.measures import LatticePmf

    p = LatticePmf(2, {(2, 3): 1.0})
    q = LatticePmf(2, {(4, 1): 1.0})
    p_path = tmp_path / "p.json"
    q_path = tmp_path / "q.json"
    p_path.write_text(p.to_json())
    q_path.write_text(q.to_json())
    out = tmp_path / "w.json"
    flow = tmp_path / "flow.csv"
    code = run_cli([
        "wasserstein", "--p", str(p_path), "--q", str(q_path),
        "--out", str(out), "--flow-csv", str(flow),
    ])
    assert code == 0
    assert json.loads(out.read_text())["value"] == 4.0
    lines = flow.read_text().strip().splitlines()
    assert lines[0] == "x,y,mass"
    assert len(lines) == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "palab.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "stein-check" in proc.stdout


def test_pal_threads_env_fallback(tmp_path, gibbs_model, monkeypatch):
    out1 = tmp_path / "t1.json"
    out2 = tmp_path / "t2.json"
    monkeypatch.setenv("PAL_THREADS", "3")
    assert run_cli([
        "gnz-check", "--model", gibbs_model, "--reps", "600", "--seed", "2",
        "--grid", "8", "--out", str(out1),
    ]) == 0
    monkeypatch.delenv("PAL_THREADS")
    assert run_cli([
        "gnz-check", "--model", gibbs_model, "--reps", "600", "--seed", "2",
        "--grid", "8", "--out", str(out2), "--threads", "1",
    ]) == 0
    # fixed chunk layout: identical results for any worker count
    assert out1.read_bytes() == out2.read_bytes()
