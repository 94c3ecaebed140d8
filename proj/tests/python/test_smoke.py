import csv
import json
import math
from pathlib import Path

import jsonschema
import pytest

mendel = pytest.importorskip("mendel")

SCHEMAS = Path(__file__).resolve().parents[2] / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def test_closed_forms_match_oracle():
    p = mendel.ModelParams(eta=0.02)
    n = [0.3, 1.2, 4.0, 0.5, 0.7, 2.5]
    b = mendel.birth_rates(n, p)
    o = mendel.birth_rates_oracle(n, p)
    assert max(abs(x - y) for x, y in zip(b, o)) < 1e-12
    assert math.isclose(sum(b), p.f * sum(n), rel_tol=1e-12)


def test_bad_parameters_raise_value_error():
    with pytest.raises(ValueError):
        mendel.ModelParams(eta=2.0)
    with pytest.raises(mendel.ConfigError):
        mendel.ModelParams(compat="sometimes")


def test_fixed_points_and_spectrum():
    p = mendel.ModelParams(eta=0.02)
    fps = {fp["label"]: fp for fp in mendel.fixed_points(p)}
    assert max(fp["residual"] for fp in fps.values()) < 1e-12
    s = mendel.spectrum("p_A", fps["p_A"]["n"], p)
    re = sorted(e["re"] for e in s["eigenvalues"])
    assert re[-1] == pytest.approx(0.1, abs=1e-8)


def test_integrate_and_phases():
    p = mendel.ModelParams(eta=0.02)
    n0 = mendel.second_mutation_state(p, 0.01)
    times, states = mendel.integrate(p, n0, 50.0)
    assert times[0] == 0.0 and times[-1] == 50.0
    assert len(states) == len(times) and all(len(s) == 6 for s in states)
    report = mendel.phases(p, eps=0.01)
    t = report["times"]
    assert t["T1"] < t["T_eq"] < t["T2"] < t["T3"] < t["T_entry"]


def test_simulate_is_reproducible():
    p = mendel.ModelParams(eta=0.02, K=200)
    init = [10, 20, 800, 0, 5, 0]
    a = mendel.simulate(p, init, 2.0, seed=7, sample_dt=0.5)
    b = mendel.simulate(p, init, 2.0, seed=7, sample_dt=0.5)
    assert a == b
    times, samples, summary = a
    assert times == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert summary["events"] > 0


def test_manifold_verdicts():
    assert mendel.center_manifold(mendel.ModelParams(f=200, eta=0.02))["verdict"]["verdict"] == "attracting"
    assert mendel.center_manifold(mendel.ModelParams(f=200, eta=0.6))["verdict"]["verdict"] == "repelling"
    assert mendel.r_max() == pytest.approx(0.593644, abs=1e-5)


def test_run_writes_valid_outputs(tmp_path):
    code, directory, report, _ = mendel.run("ode-run", {"eta": 0.02, "t-end": 20.0, "sample-dt": 1.0}, tmp_path / "ode")
    assert code == 0
    directory = Path(directory)
    with open(directory / "trajectory.csv") as fh:
        rows = list(csv.reader(fh))
    assert ",".join(rows[0]) == mendel.CSV_HEADER == "t,aa,aA,AA,aB,AB,BB"
    assert len(rows) == 22
    jsonschema.validate(json.loads((directory / "report.json").read_text()), schema("ode_run"))
    manifest = json.loads((directory / "manifest.json").read_text())
    jsonschema.validate(manifest, schema("manifest"))
    assert {f["path"] for f in manifest["files"]} >= {"trajectory.csv", "report.json", "config.txt"}


def test_run_config_error(tmp_path):
    with pytest.raises(mendel.ConfigError):
        mendel.run("sweep", {"eps-grid": ""}, tmp_path / "bad")
