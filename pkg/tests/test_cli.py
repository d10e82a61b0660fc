import csv
import json

import numpy as np
import pytest

from fecollocation.cli import ConfigError, build_config, main, parse_sweep


def read_table(path):
    # deliberately independent of fecollocation.io
    with open(path) as fh:
        first = fh.readline().strip()
        rows = list(csv.DictReader(fh))
    return first, rows


def test_parse_sweep():
    assert parse_sweep("10:5:50") == [10, 15, 20, 25, 30, 35, 40, 45, 50]
    assert parse_sweep("10,20") == [10, 20]
    assert parse_sweep("7") == [7]
    with pytest.raises(ConfigError):
        parse_sweep("10:5")
    with pytest.raises(ConfigError):
        parse_sweep("10:0:20")


@pytest.mark.parametrize("flags", [
    {"command": "solve", "N": "10", "preset": None},
    {"command": "solve", "N": "20,10", "preset": "example1"},
    {"command": "solve", "N": "70", "preset": "example1"},
    {"command": "approx", "N": "10", "function": "f4"},
    {"command": "approx", "N": "10", "function": "f9", "domain": "pentagon"},
    {"command": "nodes", "N": "10", "domain": "hexagon"},
    {"command": "solve", "N": "10", "preset": "example1", "boundary": "cubic:3"},
    {"command": "solve", "N": "10", "preset": "example1", "T": 0.5},
])
def test_invalid_configs(flags):
    with pytest.raises(ConfigError):
        build_config(flags)


def test_config_file_overrides_flags(tmp_path):
    cfg = build_config({"command": "solve", "N": "10", "preset": "example1", "gamma": 4.0},
                       {"gamma": 5.0, "N": [12]})
    assert cfg.gamma == 5.0 and cfg.N == [12]


def test_solve_row_count(tmp_path):
    out = tmp_path / "ex1"
    assert main(["solve", "--preset", "example1", "--N", "10:5:50", "--boundary", "linear:5",
                 "--out", str(out)]) == 0
    first, rows = read_table(out / "errors.csv")
    assert first == "# format_version=1"
    assert len(rows) == 9
    assert [int(r["N"]) for r in rows] == list(range(10, 51, 5))
    assert all(np.isfinite(float(r["max_error"])) for r in rows)
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["format_version"] == 1
    assert [r["N"] for r in meta["records"]] == list(range(10, 51, 5))
    for r in meta["records"]:
        assert {"N", "N_Lambda", "N_B_policy", "counts", "max_error", "cond", "rank_eps", "runtime_ms"} <= set(r)
        assert r["counts"]["N_B"] == 5 * r["N"]


def test_nodes_diamond(tmp_path):
    assert main(["nodes", "--domain", "diamond", "--N", "10", "--gamma", "4", "--out", str(tmp_path)]) == 0
    first, rows = read_table(tmp_path / "nodes_N10.csv")
    assert first == "# format_version=1"
    interior = [r for r in rows if r["kind"] == "interior"]
    assert abs(len(interior) - 180) <= 3
    pts = np.array([[float(r["x"]), float(r["y"])] for r in interior])
    assert np.all(np.abs(pts[:, 0]) + np.abs(pts[:, 1]) < 1)
    meta = json.loads((tmp_path / "metadata.json").read_text())
    rec = meta["records"][0]
    assert (rec["M_x"], rec["M_y"], rec["gamma"], rec["T"], rec["seed"]) == (40, 40, 4.0, 2.0, 0)


def test_nodes_with_boundary_and_random(tmp_path):
    assert main(["nodes", "--preset", "example7", "--N", "10", "--seed", "3", "--out", str(tmp_path)]) == 0
    _, rows = read_table(tmp_path / "nodes_N10.csv")
    kinds = [r["kind"] for r in rows]
    assert kinds.count("interior") == 200 and kinds.count("boundary") == 40
    rec = json.loads((tmp_path / "metadata.json").read_text())["records"][0]
    assert rec["counts"]["seed"] == 3 and rec["counts"]["generator"]


def test_round_trip_bit_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["approx", "--domain", "triangle", "--function", "f3", "--N", "12,16", "--spectra",
                 "--coefficients", "--out", str(a)]) == 0
    assert main(["run", "--config", str(a / "metadata.json"), "--out", str(b)]) == 0
    for name in ("errors.csv", "spectrum_N12.csv", "spectrum_N16.csv", "coefficients_N16.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_spectrum_and_coefficients_schema(tmp_path):
    assert main(["approx", "--domain", "pentagon", "--function", "f4", "--N", "8", "--spectra",
                 "--coefficients", "--out", str(tmp_path)]) == 0
    _, spec = read_table(tmp_path / "spectrum_N8.csv")
    s = np.array([float(r["sigma_raw"]) for r in spec])
    sn = np.array([float(r["sigma_normalized"]) for r in spec])
    assert len(s) == 64 and np.all(np.diff(s) <= 0)
    assert np.allclose(sn, s / s[0], rtol=1e-15)
    _, coef = read_table(tmp_path / "coefficients_N8.csv")
    assert len(coef) == 64
    assert {int(r["l1"]) for r in coef} == set(range(-4, 4))


def test_config_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gamma": "lots"}))
    assert main(["solve", "--preset", "example1", "--N", "10", "--config", str(bad), "--out", str(tmp_path)]) == 2
    bad.write_text(json.dumps({"colour": "red"}))
    assert main(["solve", "--preset", "example1", "--N", "10", "--config", str(bad)]) == 2
    assert "colour" in capsys.readouterr().err
    assert main(["solve", "--preset", "example1", "--N", "80", "--out", str(tmp_path)]) == 2


def test_numerical_failure_names_N(tmp_path, capsys):
    # 97 grid nodes inside the triangle at N=10 cannot oversample 100 modes
    rc = main(["approx", "--domain", "triangle", "--function", "f2", "--N", "8,10", "--out", str(tmp_path)])
    assert rc == 3
    assert "N=10" in capsys.readouterr().err
    _, rows = read_table(tmp_path / "errors.csv")
    assert [r["N"] for r in rows] == ["8"]
