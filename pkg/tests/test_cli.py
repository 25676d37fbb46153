import csv
import hashlib
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from stawave.cli import DEFAULTS, main

FAST = {
    "check": {},
    "spectrum": {"kappa_list": [-1, 1], "n_r_max": 1},
    "planewave": {"points": 7},
    "interfere": {"n_phase": 16},
    "regions": {"n_phase": 16, "family_size": 10},
    "gauge": {"points": 5, "spacings": [0.1, 0.05]},
}


def run(tmp_path, command, config=None, name="out", seed=0, extra=()):
    args = [command, "--out", str(tmp_path / name), "--seed", str(seed), *extra]
    if config is not None:
        cfg = tmp_path / f"{name}.json"
        cfg.write_text(json.dumps(config))
        args += ["--config", str(cfg)]
    return main(args), tmp_path / name


def read_tree(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


@pytest.mark.parametrize("command", sorted(FAST))
def test_commands_succeed_and_are_deterministic(tmp_path, command, capsys):
    code1, out1 = run(tmp_path, command, FAST[command], "a", seed=5)
    code2, out2 = run(tmp_path, command, FAST[command], "b", seed=5)
    assert code1 == code2 == 0
    assert read_tree(out1) == read_tree(out2)


@pytest.mark.parametrize("command", sorted(FAST))
def test_manifest_lists_every_output(tmp_path, command):
    _, out = run(tmp_path, command, FAST[command])
    manifest = json.loads((out / "manifest.json").read_text())
    listed = {o["file"]: o["sha256"] for o in manifest["outputs"]}
    on_disk = {p.name for p in out.iterdir()} - {"manifest.json"}
    assert set(listed) == on_disk
    for name, digest in listed.items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    assert manifest["command"] == command and manifest["exit_code"] == 0


def test_show_defaults(capsys):
    assert main(["--show-defaults"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["commands"] == DEFAULTS
    assert main(["spectrum", "--show-defaults"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert list(doc["commands"]) == ["spectrum"]


def test_config_errors(tmp_path, capsys):
    assert run(tmp_path, "spectrum", {"bogus": 1})[0] == 2
    assert run(tmp_path, "spectrum", {"Z": "one"})[0] == 2
    assert run(tmp_path, "planewave", {"axis": 5})[0] == 2
    assert run(tmp_path, "regions", {"plane_a": "e01"})[0] == 2
    assert run(tmp_path, "interfere", {"r1": "3 +"})[0] == 2
    assert main([]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert main(["check", "--seed", "-1", "--out", str(tmp_path / "x")]) == 2


def test_corrupted_table_fails_check(tmp_path, capsys):
    code, out = run(tmp_path, "check", {"corrupt_table": True})
    assert code == 1
    report = (out / "check_report.txt").read_text()
    assert "FAIL" in report and "anticommutation" in report


def test_supercritical_coupling_is_precondition_error(tmp_path, capsys):
    code, out = run(tmp_path, "spectrum", {"Z": 140})
    assert code == 3
    assert json.loads((out / "manifest.json").read_text())["exit_code"] == 3


def test_non_versor_is_precondition_error(tmp_path, capsys):
    assert run(tmp_path, "interfere", {"r1": "2"})[0] == 3


def test_spectrum_output(tmp_path, capsys):
    code, out = run(tmp_path, "spectrum", {"kappa_list": [-1, 1], "n_r_max": 1, "write_radial": True})
    assert code == 0
    doc = json.loads((out / "spectrum.json").read_text())
    status = {(r["kappa"], r["n_r"]): r["status"] for r in doc["records"]}
    assert status == {(-1, 0): "ok", (-1, 1): "ok", (1, 0): "no_bound_state", (1, 1): "ok"}
    assert doc["max_relative_deviation_corrected"] < 1e-8
    assert doc["max_relative_deviation_printed"] > 1e-8
    assert (out / "radial_kappa-1_nr0.csv").read_text().startswith("r,G,F\n")
    assert not (out / "radial_kappa+1_nr0.csv").exists()


def test_interfere_matches_cosine_law_rowwise(tmp_path, capsys):
    cfg = {"rho1": 2.0, "rho2": 0.5, "n_phase": 32}
    code, out = run(tmp_path, "interfere", cfg)
    assert code == 0
    with open(out / "pattern.csv") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        phi = float(row["phase"])
        want = 2.5 + 2 * math.sqrt(1.0) * math.cos(phi)
        assert abs(float(row["intensity_exact"]) - want) < 1e-12
    summary = json.loads((out / "interfere.json").read_text())
    assert "factor 2" in summary["note"]


def test_interfere_mixed_rotors(tmp_path, capsys):
    cfg = {"r1": "0.8253356149096783 + 0.5646424733950354 e012", "r2": "1", "n_phase": 8}
    code, out = run(tmp_path, "interfere", cfg)
    assert code == 0
    summary = json.loads((out / "interfere.json").read_text())
    assert summary["max_split_residual"] < 1e-12


def test_regions_same_plane_identical_files(tmp_path, capsys):
    cfg = {"plane_a": "e31", "plane_b": "e31", "n_phase": 16}
    code, out = run(tmp_path, "regions", cfg)
    assert code == 0
    assert (out / "pattern_ab.csv").read_bytes() == (out / "pattern_ba.csv").read_bytes()
    doc = json.loads((out / "regions.json").read_text())
    assert doc["max_pattern_difference"] == 0.0
    code, out = run(tmp_path, "regions", {"n_phase": 16}, "diff")
    doc = json.loads((out / "regions.json").read_text())
    assert doc["max_pattern_difference"] > 1e-3 and doc["max_prediction_error"] < 1e-12
    assert [e["order"] for e in doc["experiments"]] == [["a", "b"], ["b", "a"]]


def test_gauge_output(tmp_path, capsys):
    code, out = run(tmp_path, "gauge", {"points": 5, "spacings": [0.1, 0.05], "write_fields": True})
    assert code == 0
    doc = json.loads((out / "gauge.json").read_text())
    assert doc["constant_rotor_omega_residual"] <= 1e-10
    assert doc["constant_rotor_curvature_residual"] <= 1e-10
    assert (out / "psi.bin").exists() and (out / "omega.json").exists()


def test_planewave_output(tmp_path, capsys):
    code, out = run(tmp_path, "planewave", {})
    doc = json.loads((out / "planewave.json").read_text())
    assert code == 0
    assert all(1.9 <= o <= 2.1 for o in doc["orders"])
    assert doc["offshell_ratio"] >= 100
    assert np.isclose(doc["mass_shell"], 0.0, atol=1e-12)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "stawave", "check", "--out", str(tmp_path / "m")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
