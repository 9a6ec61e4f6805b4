import json

import numpy as np
import pytest

from swlattice import cli
from swlattice.checks import random_configuration
from swlattice.fields import Configuration
from swlattice.lattice import Lattice
from swlattice.report import ConfigError, dumps, load_config, parse_config
from swlattice.snapshot import (
    SnapshotChecksumError,
    SnapshotShapeError,
    SnapshotVersionError,
    load_snapshot,
    read_manifest,
    save_snapshot,
)


@pytest.fixture
def snap(tmp_path, rng):
    c = random_configuration(Lattice(2, 0.37), rng, 0.9, (0, 1, -2, 0, 0, 3))
    return c, save_snapshot(c, tmp_path / "snap")


def test_round_trip_is_bitwise(snap):
    c, path = snap
    back = load_snapshot(path)
    assert back.lattice == c.lattice
    assert back.bundle.flux == c.bundle.flux
    for x, y in [(back.a, c.a), (back.phi, c.phi), (back.bundle.kg, c.bundle.kg)]:
        assert x.tobytes() == y.tobytes()


def test_corrupted_payload_refused(snap):
    _, path = snap
    blob = bytearray((path / "phi.bin").read_bytes())
    blob[17] ^= 0x40
    (path / "phi.bin").write_bytes(bytes(blob))
    with pytest.raises(SnapshotChecksumError):
        load_snapshot(path)


def test_shape_mismatch_refused(tmp_path, rng):
    big = save_snapshot(Configuration.zero(Lattice(3, 1.0)), tmp_path / "big")
    text = (big / "manifest.txt").read_text().replace("n_per_axis = 3", "n_per_axis = 2")
    (big / "manifest.txt").write_text(text)
    with pytest.raises(SnapshotShapeError):
        load_snapshot(big)


def test_unknown_version_refused(snap):
    _, path = snap
    text = (path / "manifest.txt").read_text().replace("format_version = 1", "format_version = 2")
    (path / "manifest.txt").write_text(text)
    with pytest.raises(SnapshotVersionError):
        load_snapshot(path)


def test_manifest_records_exact_spacing(snap):
    c, path = snap
    assert float.fromhex(read_manifest(path)["spacing"]) == c.lattice.h


# -- configs and reports -----------------------------------------------------


def test_strict_config_keys():
    with pytest.raises(ConfigError):
        parse_config({"lattice": {"n": 2, "size": 3}}, "eval")
    with pytest.raises(ConfigError):
        parse_config({"params": {"tolerance": 1}}, "grad-check")
    with pytest.raises(ConfigError):
        parse_config({"bundle": {"flux": [1, 2]}}, "eval")
    cfg = parse_config({"lattice": {"n": 3, "h": 0.5}, "params": {"samples": 2}}, "grad-check")
    assert (cfg.n, cfg.h, cfg.params["samples"], cfg.params["tol"]) == (3, 0.5, 2, 1e-6)


def test_load_config_file(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"lattice": {"n": 2}, "bundle": {"kg": -1.0}, "seed": 4}))
    cfg = load_config(p, "index")
    assert cfg.kg == -1.0 and cfg.seed == 4
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p, "index")


def test_dumps_float_format():
    text = dumps({"x": 0.1, "y": [1, 2.0], "z": None, "ok": True})
    assert '"x": 0.10000000000000001' in text
    assert "[1, 2.0]" in text
    assert json.loads(text)["ok"] is True


# -- CLI ---------------------------------------------------------------------


def _run(args, out):
    return cli.main(args + ["--out", str(out)])


def test_cli_eval_zero_snapshot(tmp_path, capsys):
    save_snapshot(Configuration.zero(Lattice(2, 1.0)), tmp_path / "zero")
    assert _run(["eval", "--snapshot", str(tmp_path / "zero")], tmp_path / "o") == 0
    doc = json.loads((tmp_path / "o" / "eval.json").read_text())
    assert doc["results"]["energy"]["total"] == 0.0
    assert doc["schema"] == "swlattice.report/1"
    assert "total" in capsys.readouterr().out


def test_cli_index(tmp_path):
    assert _run(["index", "--n", "2", "--kg", "-1"], tmp_path) == 0
    doc = json.loads((tmp_path / "index.json").read_text())
    assert doc["results"]["morse_index"] == 4


def test_cli_grad_check_seed_42(tmp_path):
    assert _run(["grad-check", "--n", "2", "--seed", "42"], tmp_path) == 0
    doc = json.loads((tmp_path / "grad-check.json").read_text())
    assert doc["results"]["max_relative_error"] <= 1e-6 and doc["passed"]


def test_cli_reports_are_deterministic(tmp_path):
    for out in ("a", "b"):
        assert _run(["hessian-check", "--n", "2", "--seed", "7", "--set", "samples=2", "--set", "pairs=10"], tmp_path / out) == 0
    assert (tmp_path / "a" / "hessian-check.json").read_bytes() == (tmp_path / "b" / "hessian-check.json").read_bytes()


def test_cli_usage_errors(tmp_path, capsys):
    assert _run(["eval", "--set", "bogus=1"], tmp_path) == 2
    assert _run(["eval", "--snapshot", str(tmp_path / "missing")], tmp_path) == 2
    assert _run(["spectrum", "--set", "operator=\"curl\""], tmp_path) == 2
    assert "error" in capsys.readouterr().err


def test_cli_kg_payload(tmp_path):
    kg = np.full(16, -1.0, dtype="<f8")
    kg.tofile(tmp_path / "kg.bin")
    assert _run(["index", "--kg", str(tmp_path / "kg.bin")], tmp_path) == 0
    assert json.loads((tmp_path / "index.json").read_text())["results"]["morse_index"] == 4
    np.zeros(5).tofile(tmp_path / "short.bin")
    assert _run(["index", "--kg", str(tmp_path / "short.bin")], tmp_path) == 2


def test_cli_flow_writes_terminal_snapshot(tmp_path):
    rc = _run(["flow", "--n", "2", "--kg", "1", "--set", "amplitude=0.1", "--set", "max_iters=3000"], tmp_path)
    assert rc == 0
    doc = json.loads((tmp_path / "flow.json").read_text())
    assert doc["results"]["classification"] == "reducible_morse_bott"
    assert load_snapshot(tmp_path / "flow_terminal").lattice.n == 2


def test_cli_output_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SWLATTICE_OUTPUT_DIR", str(tmp_path / "env"))
    assert cli.main(["hodge", "--n", "2"]) == 0
    assert (tmp_path / "env" / "hodge.json").exists()
