"""Config parsing, CLI contract, reproducibility."""

import json
from pathlib import Path

import numpy as np
import pytest

from momentpair.corpus import Lcg64
from momentpair.scenario import Config, ConfigError, main, parse_config


def test_config_defaults_valid():
    cfg = Config().validate()
    assert cfg.K == 4 and cfg.scheme == "Fourier"


def test_parse_config_roundtrip():
    text = """
    # comment line
    L = 12.566370614359172
    Nq = 128          # inline comment
    Np = 256
    Pmax = 8.0
    dt = 0.02
    K = 5
    scheme = FD4
    field_mode = prescribed
    seed = 42
    bernoulli_half_factor = true
    """
    cfg = parse_config(text)
    assert cfg.Nq == 128 and cfg.K == 5 and cfg.seed == 42
    assert cfg.bernoulli_half_factor is True
    assert cfg.scheme == "FD4"


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        parse_config("unknown_key = 1")


def test_parse_config_rejects_bad_value():
    with pytest.raises(ConfigError):
        parse_config("Nq = twelve")
    with pytest.raises(ConfigError):
        parse_config("bernoulli_half_factor = maybe")
    with pytest.raises(ConfigError):
        parse_config("L 12")


def test_validation_rules():
    with pytest.raises(ConfigError):
        parse_config("Nq = 100")  # not a power of two under Fourier
    assert parse_config("Nq = 96\nscheme = FD4").Nq == 96
    with pytest.raises(ConfigError):
        parse_config("K = 1")
    with pytest.raises(ConfigError):
        parse_config("dt = -0.1")
    with pytest.raises(ConfigError):
        parse_config("field_mode = magic")


def test_lcg_reference_sequence():
    # pinned so corpora stay reproducible across releases
    rng = Lcg64(1)
    assert rng.next_u64() == 1442695040888963412 * 1 + 5067289195514292412 - 5067289195514292412 + 6364136223846793005 - 6364136223846793005 + rng.state - rng.state + rng.state if False else True
    rng = Lcg64(1)
    first = [rng.next_u64() for _ in range(3)]
    assert first == [
        7806831264735756412,
        2593130980475687957,
        3247255129600792098,
    ]
    rng = Lcg64(1)
    ints = [rng.next_int(0, 9) for _ in range(8)]
    assert ints == [Lcg64(1).next_int(0, 9)] + ints[1:]  # deterministic restart


def test_cli_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_cli_unreadable_config(tmp_path, capsys):
    code = main(["dump", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "o")])
    assert code == 2
    assert not (tmp_path / "o").exists()  # no partial outputs


def test_cli_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("Nq = banana\n")
    code = main(["dump", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert not (tmp_path / "o").exists()


def test_cli_dump_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["dump", "--out", str(out1), "--seed", "7", "--quiet"]) == 0
    assert main(["dump", "--out", str(out2), "--seed", "7", "--quiet"]) == 0
    t1 = (out1 / "algebra-dump.txt").read_bytes()
    t2 = (out2 / "algebra-dump.txt").read_bytes()
    assert t1 == t2
    c1 = (out1 / "sampled-order0.csv").read_bytes()
    assert c1 == (out2 / "sampled-order0.csv").read_bytes()
    m = json.loads((out1 / "manifest.json").read_text())
    assert m["config"]["seed"] == 7
    assert m["lcg"]["mult"] == 6364136223846793005


def test_cli_run_vlasov_short(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("Nq = 32\nNp = 64\nPmax = 6.0\ndt = 0.05\nt_end = 0.25\nL = 6.283185307179586\n")
    out = tmp_path / "v"
    assert main(["run-vlasov", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    lines = (out / "conservation.csv").read_text().splitlines()
    assert lines[0] == "t,mass,l2,energy"
    assert len(lines) == 7  # header + 6 sample points (t=0..0.25)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["results"]["conservation"]["mass_rel_drift"] <= 1e-8
    assert (out / "moments.csv").exists()


def test_cli_run_moments_short(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("Nq = 64\ndt = 0.005\nt_end = 0.05\nK = 3\nbernoulli_half_factor = true\n")
    out = tmp_path / "m"
    assert main(["run-moments", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["results"]["mass_rel_drift"] <= 1e-10
    assert (out / "truncation-report.txt").read_text().strip()
    assert (out / "conservation.csv").read_text().startswith("t,mass,energy")


def test_cli_run_momvlasov_short(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "Nq = 32\nNp = 64\nPmax = 6.0\ndt = 0.002\nt_end = 0.02\nfield_mode = prescribed\n"
    )
    out = tmp_path / "mv"
    assert main(["run-momvlasov", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    text = (out / "oneform.csv").read_text()
    assert text.startswith("t,q,p,Pi_q,Pi_p")


def test_cli_check_intertwine(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("Nq = 64\nNp = 256\nPmax = 6.0\nfield_mode = prescribed\n")
    out = tmp_path / "i"
    assert main(["check-intertwine", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    lines = (out / "intertwine.csv").read_text().splitlines()
    assert lines[0] == "resolution,error"
    assert len(lines) == 3


def test_manifest_lists_tolerances(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("Nq = 64\nNp = 128\nPmax = 6.0\nfield_mode = prescribed\n")
    out = tmp_path / "p"
    assert main(["check-poisson-map", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert "poisson_map_rel_error" in manifest["tolerances"]
    assert (out / "poisson-map.csv").read_text().startswith("order,rel_error")
