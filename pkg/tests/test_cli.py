import io
import json

import numpy as np
import pandas as pd
import pytest
from typer.testing import CliRunner

from spherebits.cli import app
from spherebits.pointset_io import read_pointset, write_pointset
from spherebits.sampling import random_set

runner = CliRunner()


def _json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_gen_writes_csv_to_stdout():
    result = runner.invoke(app, ["gen", "--method", "jittered", "-d", "2", "-N", "16", "--seed", "1"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "2,16"
    assert len(lines) == 17


def test_gen_to_file_and_disc(tmp_path):
    out = tmp_path / "z.csv"
    summary = _json(runner.invoke(app, ["gen", "-d", "2", "-N", "32", "--seed", "2", "-o", str(out)]))
    assert summary["N"] == 32 and summary["method"] == "jittered"
    assert read_pointset(out).N == 32

    report = _json(runner.invoke(app, ["disc", str(out), "--family", "wedge", "--mode", "exact"]))
    assert report["mode"] == "exact_stolarsky"
    assert report["value"] >= 0.0

    cap = _json(runner.invoke(app, ["disc", str(out), "--family", "cap", "--mode", "mc", "-M", "20000"]))
    assert cap["mode"] == "monte_carlo" and cap["stderr"] > 0


def test_disc_on_basis(tmp_path):
    path = tmp_path / "basis.csv"
    path.write_text("2,3\n1,0,0\n0,1,0\n0,0,1\n")
    report = _json(runner.invoke(app, ["disc", str(path)]))
    assert report["value"] == pytest.approx(2.0 / np.pi ** 2 - 1.0 / 6.0, abs=1e-10)


def test_disc_sup_mode(tmp_path):
    path = tmp_path / "north.csv"
    path.write_text("2,1\n0,0,1\n")
    report = _json(runner.invoke(app, ["disc", str(path), "--mode", "sup", "--budget", "5000"]))
    assert report["mode"] == "sup_lower"
    assert report["value"] >= 0.9
    assert report["witness"] is not None


def test_invalid_parameters_exit_2(tmp_path):
    assert runner.invoke(app, ["gen", "-d", "2", "-N", "0"]).exit_code == 2
    assert runner.invoke(app, ["gen", "--method", "minimized", "-d", "2", "-N", "4"]).exit_code == 2
    assert runner.invoke(app, ["bounds", "-d", "1"]).exit_code == 2
    assert runner.invoke(app, ["bounds", "-d", "2", "--delta", "1.5"]).exit_code == 2

    path = tmp_path / "z.csv"
    path.write_text("2,1\n0,0,1\n")
    assert runner.invoke(app, ["disc", str(path), "--family", "cap", "--mode", "sup"]).exit_code == 2
    assert runner.invoke(app, ["disc", str(path), "--family", "slice"]).exit_code == 2


def test_file_errors_exit_3(tmp_path):
    assert runner.invoke(app, ["disc", str(tmp_path / "missing.csv")]).exit_code == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("2,2\n0,0,1\n")
    assert runner.invoke(app, ["disc", str(bad)]).exit_code == 3


def test_bounds_command():
    payload = _json(runner.invoke(app, ["bounds", "-d", "2", "--delta", "0.1"]))
    assert payload["K_d"] == pytest.approx(16.0)
    assert payload["N_upper"]["check"] is True
    assert payload["N_upper"]["N"] >= 200


def test_stolarsky_verify_command(tmp_path):
    out = tmp_path / "verify.csv"
    result = runner.invoke(app, ["stolarsky-verify", "-N", "1", "-N", "4", "--seeds", "2",
                                 "-M", "50000", "-o", str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert list(frame.columns) == ["N", "seed", "exact", "mc", "stderr", "zscore"]
    assert len(frame) == 4
    assert out.read_text() == result.stdout


def test_scaling_command():
    result = runner.invoke(app, ["scaling", "-N", "16", "-N", "32", "-N", "64", "--seeds", "4", "--method", "random"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert list(frame["N"]) == [16, 32, 64]


def test_sup_command_with_upper_bound(tmp_path):
    path = tmp_path / "north.csv"
    path.write_text("2,1\n0,0,1\n")
    payload = _json(runner.invoke(app, ["sup", str(path), "--budget", "2000", "--epsilon", "0.4",
                                        "--delta", "0.5"]))
    assert payload["upper"]["value"] >= payload["lower"]["value"]
    assert payload["rip_check"]["passes"] is False


def test_minimize_command(tmp_path):
    start = tmp_path / "start.csv"
    out = tmp_path / "min.csv"
    trace = tmp_path / "trace.csv"
    write_pointset(random_set(2, 10, seed=3), start)
    payload = _json(runner.invoke(app, ["minimize", str(start), "--steps", "50", "-o", str(out),
                                        "--trace", str(trace)]))
    assert payload["final_energy"] <= payload["initial_energy"]
    assert read_pointset(out).N == 10
    assert trace.read_text().startswith("step,energy,grad_norm,step_size")


def test_partition_inspect_command():
    payload = _json(runner.invoke(app, ["partition-inspect", "-d", "2", "-N", "64"]))
    assert sum(band[2] for band in payload["bands"]) == 64
    assert len(payload["analytic_diameters"]) == 64
    assert payload["max_analytic_diameter"] <= payload["diameter_bound"]


def test_minimize_rejects_circle_before_writing(tmp_path):
    out = tmp_path / "min.csv"
    trace = tmp_path / "trace.csv"
    result = runner.invoke(app, ["minimize", "-d", "1", "-N", "4", "--steps", "3", "-o", str(out),
                                 "--trace", str(trace)])
    assert result.exit_code == 2
    assert not out.exists() and not trace.exists()

    circle = tmp_path / "circle.csv"
    circle.write_text("1,2\n1,0\n0,1\n")
    result = runner.invoke(app, ["minimize", str(circle), "-o", str(out), "--trace", str(trace)])
    assert result.exit_code == 2
    assert not out.exists() and not trace.exists()


def test_malformed_json_header_exits_3(tmp_path):
    path = tmp_path / "z.json"
    path.write_text('{"d": 2, "N": "abc", "points": [[0, 0, 1]]}')
    assert runner.invoke(app, ["disc", str(path)]).exit_code == 3
