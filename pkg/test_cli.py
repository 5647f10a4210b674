#!/usr/bin/env python3
"""
test_cli.py

Exit codes and artifacts of the hillband command line.
"""

import csv
import json

import numpy as np
import pytest
from PIL import Image

from config_manager import load_config
from hillband import EXIT_COMPUTATION, EXIT_CONFIG, EXIT_OK, main


def write_config(tmp_path, **sections):
    config = {"paths": {"output_dir": str(tmp_path / "out"), "log_dir": str(tmp_path / "logs")},
              "solver": {"grid_size": 64},
              "run": {"n_gaps": 3, "m": 2}}
    for key, value in sections.items():
        if key == "potential":
            config[key] = value
        else:
            config.setdefault(key, {}).update(value)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    return str(path)


def test_unknown_subcommand_is_a_config_error(tmp_path):
    assert main(["fly", "--config", write_config(tmp_path)]) == EXIT_CONFIG


def test_malformed_json_is_a_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    assert main(["bands", "--config", str(path)]) == EXIT_CONFIG


def test_unknown_potential_type_is_a_config_error(tmp_path):
    config = write_config(tmp_path, potential={"type": "wavelet"})
    assert main(["bands", "--config", config]) == EXIT_CONFIG


def test_bad_fourier_coefficients_are_a_config_error(tmp_path):
    config = write_config(tmp_path, potential={"type": "fourier", "cos": ["a"], "sin": []})
    assert main(["bands", "--config", config]) == EXIT_CONFIG


def test_distrib_verify_needs_a_distribution(tmp_path):
    assert main(["distrib-verify", "--config", write_config(tmp_path)]) == EXIT_CONFIG


def test_dump_kappa_writes_the_hierarchy(tmp_path, capsys):
    assert main(["dump-kappa", "--config", write_config(tmp_path)]) == EXIT_OK
    text = (tmp_path / "out" / "kappa.txt").read_text()
    assert text.splitlines() == ["k1 = +1*u0", "k2 = -1*u1"]
    assert "k2 = -1*u1" in capsys.readouterr().out


def test_out_flag_overrides_output_dir(tmp_path):
    elsewhere = tmp_path / "elsewhere"
    assert main(["dump-kappa", "--config", write_config(tmp_path), "--out", str(elsewhere)]) == EXIT_OK
    assert (elsewhere / "kappa.txt").exists()
    assert load_config(str(elsewhere / "config_used.yaml")).output_dir == str(elsewhere)


def test_run_records_the_configuration_it_used(tmp_path):
    assert main(["dump-kappa", "--config", write_config(tmp_path)]) == EXIT_OK
    used = load_config(str(tmp_path / "out" / "config_used.yaml"))
    assert used.m == 2
    assert used.n_gaps == 3
    assert used.solver["grid_size"] == 64


def test_discriminant_of_free_operator(tmp_path):
    config = write_config(tmp_path, potential={"type": "fourier", "cos": [0.0], "sin": []},
                          z_samples={"paths": [{"from": [0.0, 0.0], "to": [6.0, 0.0], "n": 13},
                                               {"from": [1.0, 0.5], "to": [5.0, 0.5], "n": 5}]})
    assert main(["discriminant", "--config", config]) == EXIT_OK
    out = tmp_path / "out"
    with open(out / "discriminant.csv") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 18
    for row in rows:
        z = complex(float(row["re_z"]), float(row["im_z"]))
        assert complex(float(row["re_delta"]), float(row["im_delta"])) == pytest.approx(np.cos(z), abs=1e-9)
    assert Image.open(out / "lyapunov_0.png").size[0] > 0
    assert not (out / "lyapunov_1.png").exists()


def test_malformed_path_is_a_config_error(tmp_path):
    config = write_config(tmp_path, z_samples={"paths": [{"from": [0.0, 0.0]}]})
    assert main(["discriminant", "--config", config]) == EXIT_CONFIG


def test_riccati_failure_is_a_computation_error(tmp_path, monkeypatch):
    import hillband
    from distrib import RiccatiConvergenceError

    def fail(p):
        raise RiccatiConvergenceError("no convergence", 1.0)

    monkeypatch.setattr(hillband, "riccati_solve", fail)
    config = write_config(tmp_path, potential={"type": "distribution", "p_cos": [0.0, 0.5]})
    assert main(["distrib-verify", "--config", config]) == EXIT_COMPUTATION


@pytest.mark.slow
def test_bands_of_free_operator(tmp_path):
    config = write_config(tmp_path, potential={"type": "fourier", "cos": [0.0], "sin": []})
    assert main(["bands", "--config", config]) == EXIT_OK
    out = tmp_path / "out"
    with open(out / "bands.csv") as f:
        rows = list(csv.DictReader(f))
    assert [int(r["n"]) for r in rows] == [1, 2, 3]
    for r in rows:
        assert float(r["e_max"]) == pytest.approx(np.pi * int(r["n"]), abs=1e-8)
        assert float(r["h_n"]) == 0.0
    assert (out / "comb.png").exists()
    assert (out / "gap_v.png").exists()


@pytest.mark.slow
def test_verify_passes_on_free_operator(tmp_path):
    config = write_config(tmp_path, potential={"type": "fourier", "cos": [0.0], "sin": []},
                          solver={"grid_size": 256}, run={"n_gaps": 20, "m": 1})
    assert main(["verify", "--config", config]) == EXIT_OK
    assert not (tmp_path / "out" / "failure_manifest.json").exists()


@pytest.mark.slow
def test_distrib_verify_passes_on_zero_primitive(tmp_path):
    config = write_config(tmp_path, potential={"type": "distribution", "p_cos": [0.0]})
    assert main(["distrib-verify", "--config", config]) == EXIT_OK
    report = json.loads((tmp_path / "out" / "thm41_report.json").read_text())
    assert report["passed"]
