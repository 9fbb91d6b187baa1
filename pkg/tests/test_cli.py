from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from bundles import bundle_bytes
from dzp import cli, pipeline
from dzp.errors import ConsistencyError

STAGES = ["snapshot", "landmarks", "zigzag", "zpi", "delta", "adapt"]


def write_config(tmp_path, raw) -> str:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return str(path)


@pytest.mark.parametrize("raw", [{}, {"window": "expanding"}, {"backend": "vr", "window": 3}])
def test_staged_run_matches_pipeline(tmp_path, raw):
    cfg = write_config(tmp_path, raw)
    full, staged = tmp_path / "full", tmp_path / "staged"
    assert cli.main(["pipeline", "--config", cfg, "--out", str(full)]) == 0
    for stage in STAGES:
        assert cli.main([stage, "--config", cfg, "--out", str(staged)]) == 0, stage
    skip = {"manifest.json", "config.json"}
    assert bundle_bytes(staged, skip) == bundle_bytes(full, skip)


def test_noise_subcommand(tmp_path):
    cfg = write_config(tmp_path, {"noise": {"mode": "poisoning", "ratio": 0.5, "seed": 2}})
    out = tmp_path / "o"
    assert cli.main(["snapshot", "--config", cfg, "--out", str(out)]) == 0
    assert cli.main(["noise", "--config", cfg, "--out", str(out)]) == 0
    noisy = out / "snapshots_noisy.csv"
    assert noisy.read_bytes() != (out / "snapshots.csv").read_bytes()
    # the noisy file feeds the next stage and reproduces the noisy pipeline
    assert cli.main(["zigzag", "--config", cfg, "--out", str(out), "--snapshots", str(noisy)]) == 0
    assert cli.main(["pipeline", "--config", cfg, "--out", str(tmp_path / "p")]) == 0
    rel = "windows/t0006/diagram.csv"
    assert (out / rel).read_bytes() == (tmp_path / "p" / rel).read_bytes()


def test_noise_without_section_fails(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert cli.main(["snapshot", "--out", out]) == 0
    assert cli.main(["noise", "--out", out]) == 1
    assert "no 'noise' section" in capsys.readouterr().err


def test_bottleneck_output(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("dim,birth_x2,death_x2,open\n0,2,6,0\n1,3,5,0\n")
    b.write_text("dim,birth_x2,death_x2,open\n0,2,8,0\n")
    assert cli.main(["bottleneck", str(a), str(b)]) == 0
    lines = capsys.readouterr().out.splitlines()
    # dim 0: (1, 3) vs (1, 4); dim 1: (1.5, 2.5) against the diagonal
    assert lines == ["dim 0: 1.0", "dim 1: 0.5", "max: 1.0"]
    assert cli.main(["bottleneck", str(a), str(b), "--dim", "1"]) == 0
    assert capsys.readouterr().out.splitlines() == ["dim 1: 0.5", "max: 0.5"]


def test_exit_one_on_bad_config(tmp_path, capsys):
    assert cli.main(["pipeline", "--config", write_config(tmp_path, {"eps": 0}), "--out", str(tmp_path)]) == 1
    assert "eps: must be >= 1" in capsys.readouterr().err
    assert cli.main(["pipeline", "--config", write_config(tmp_path, {"windoww": 5})]) == 1
    assert cli.main(["pipeline", "--config", str(tmp_path / "missing.json")]) == 1


def test_exit_one_on_bad_input(tmp_path, capsys):
    edges = tmp_path / "edges.csv"
    edges.write_text("src,dst,timestamp\na,b,zero\n")
    cfg = write_config(tmp_path, {"input_path": "edges.csv"})
    assert cli.main(["pipeline", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "stage 'ingest'" in err and "line 2" in err


def test_exit_one_when_prior_stage_missing(tmp_path, capsys):
    assert cli.main(["zpi", "--out", str(tmp_path)]) == 1
    assert "run 'dzp zigzag' first" in capsys.readouterr().err
    assert cli.main(["zigzag", "--out", str(tmp_path)]) == 1


def test_exit_two_on_consistency_failure(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise ConsistencyError("complex at position 3 is not a subcomplex")

    monkeypatch.setattr(pipeline, "compute_zigzag_diagram", broken)
    assert cli.main(["pipeline", "--out", str(tmp_path)]) == 2
    assert "stage 'zigzag', snapshot 6" in capsys.readouterr().err


def test_output_dir_from_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write_config(tmp_path, {"output_dir": "bundle"})
    assert cli.main(["snapshot", "--config", cfg]) == 0
    assert (tmp_path / "bundle" / "snapshots.csv").is_file()


@pytest.mark.skipif(shutil.which("dzp") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["dzp", "pipeline", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "manifest.json").is_file()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "dzp.cli", "bottleneck", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "--dim" in proc.stdout
