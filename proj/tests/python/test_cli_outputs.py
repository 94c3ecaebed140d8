"""Drives the `mendel` executable (path in MENDEL_BIN) and validates its files."""

import hashlib
import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

SCHEMAS = Path(__file__).resolve().parents[2] / "schemas"
BIN = os.environ.get("MENDEL_BIN")

pytestmark = pytest.mark.skipif(not BIN, reason="MENDEL_BIN not set")


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(tmp_path, *args, expect=0):
    env = dict(os.environ, MENDEL_OUTPUT_ROOT=str(tmp_path / "root"))
    proc = subprocess.run([BIN, *args], capture_output=True, text=True, env=env, timeout=600)
    assert proc.returncode == expect, proc.stderr
    return proc


def check_manifest(directory):
    manifest = json.loads((directory / "manifest.json").read_text())
    jsonschema.validate(manifest, schema("manifest"))
    for entry in manifest["files"]:
        data = (directory / entry["path"]).read_bytes()
        assert len(data) == entry["bytes"]
        assert hashlib.sha256(data).hexdigest() == entry["sha256"]
    return manifest


CASES = [
    ("ode_run", ["ode-run", "--eta", "0.02"]),
    ("phases", ["phases", "--eta", "0.1"]),
    ("ssa_run", ["ssa-run", "--K", "300", "--t-end", "3", "--log-events"]),
    ("sweep", ["sweep", "--eta", "0.02", "--eps-grid", "0.01,0.006,0.004,0.003"]),
    ("sweep", ["sweep", "--over", "seed", "--K", "200", "--seeds", "3", "--t-end", "5", "--founders", "5"]),
    ("analyze", ["analyze", "all", "--eta", "0.02"]),
    ("manifold", ["manifold", "--f", "200", "--eta", "0.02", "--flip"]),
]


@pytest.mark.parametrize("kind,args", CASES, ids=[" ".join(a[:3]) for _, a in CASES])
def test_outputs_validate(tmp_path, kind, args):
    out = tmp_path / "run"
    run(tmp_path, *args, "--out", str(out))
    jsonschema.validate(json.loads((out / "report.json").read_text()), schema(kind))
    manifest = check_manifest(out)
    for csv_file in out.rglob("*.csv"):
        if csv_file.name in ("trajectory.csv",) or csv_file.parent.name == "members":
            assert csv_file.read_text().splitlines()[0] == "t,aa,aA,AA,aB,AB,BB"
    assert manifest["exit_code"] == 0


def test_output_root_override(tmp_path):
    proc = run(tmp_path, "analyze", "threshold", "--name", "thr")
    target = tmp_path / "root" / "thr"
    assert (target / "manifest.json").exists()
    assert str(target) in proc.stdout


def test_floats_have_seventeen_digits(tmp_path):
    out = tmp_path / "run"
    run(tmp_path, "analyze", "threshold", "--out", str(out))
    report = json.loads((out / "report.json").read_text())
    text = (out / "report.json").read_text()
    assert repr(report["threshold"]["r_max"]) in text or f"{report['threshold']['r_max']:.17g}" in text


@pytest.mark.parametrize(
    "args,code",
    [
        (["sweep", "--eps-grid", ""], 2),
        (["ode-run", "--eta", "5"], 2),
        (["ode-run", "--no-such-flag"], 2),
        (["manifold", "--strict"], 3),
    ],
)
def test_exit_codes(tmp_path, args, code):
    run(tmp_path, *args, "--out", str(tmp_path / "x"), expect=code)


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    run(tmp_path, "analyze", "--out", str(blocker / "sub"), expect=4)


def test_config_file_round_trip(tmp_path):
    first = tmp_path / "a"
    run(tmp_path, "ode-run", "--eta", "0.02", "--t-end", "30", "--out", str(first))
    cfg = first / "config.txt"
    second = tmp_path / "b"
    run(tmp_path, "ode-run", "--config", str(cfg), "--out", str(second))
    assert (first / "trajectory.csv").read_bytes() == (second / "trajectory.csv").read_bytes()
