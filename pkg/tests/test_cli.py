"""Command-line behavior: exit codes, artifacts, determinism."""

import json

import pytest

from absorblab.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from absorblab.io import parse_csv


def test_conditions_end_to_end(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["conditions", "--out", str(out)]) == EXIT_OK
    assert "all" in capsys.readouterr().out
    doc = json.loads((out / "manifest.json").read_text())
    assert doc["status"] == "pass"
    assert doc["scenario"] == "conditions"
    for name in doc["files"]:
        header, rows = parse_csv(out / name)
        assert header and rows


def test_alpha2_is_deterministic_across_runs(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert main(["alpha2", "--out", str(out)]) == EXIT_OK
        outs.append(b"".join(sorted(
            p.read_bytes() for p in out.iterdir() if p.is_file()
        )))
    assert outs[0] == outs[1]


def test_determinism_across_worker_counts(tmp_path, monkeypatch):
    # non-uniqueness drives both evolution schemes, which are the only code
    # paths that fan work out to threads
    blobs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("ABSORBLAB_THREADS", threads)
        out = tmp_path / f"w{threads}"
        assert main(["non-uniqueness", "--out", str(out)]) == EXIT_OK
        blobs.append(b"".join(sorted(
            p.read_bytes() for p in out.iterdir() if p.is_file()
        )))
    assert blobs[0] == blobs[1]


def test_flat_ode_power_family_reports_closed_form(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("family = power\np = 2.0\na_list = 0.5, 1, 10\n")
    out = tmp_path / "run"
    assert main(["flat-ode", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "manifest.json").read_text())
    assert doc["checks"]["closed_form_match"] is True


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("warp_speed = 9\n")
    out = tmp_path / "run"
    code = main(["conditions", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert not (out / "manifest.json").exists()


def test_missing_config_file_exits_2(tmp_path, capsys):
    code = main(["conditions", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path / "run")])
    assert code == EXIT_CONFIG
    assert "cannot read" in capsys.readouterr().err


def test_bad_tolerance_scale_exits_2(tmp_path, capsys):
    code = main(["conditions", "--tolerance-scale", "-1",
                 "--out", str(tmp_path / "run")])
    assert code == EXIT_CONFIG
    assert "tolerance-scale" in capsys.readouterr().err


def test_bad_thread_count_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ABSORBLAB_THREADS", "many")
    assert main(["conditions", "--out", str(tmp_path / "r")]) == EXIT_CONFIG
    assert "ABSORBLAB_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("ABSORBLAB_THREADS", "0")
    assert main(["conditions", "--out", str(tmp_path / "r2")]) == EXIT_CONFIG


def test_unknown_scenario_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["orbit"])
    assert exc.value.code == EXIT_CONFIG


def test_failed_check_exits_3_and_writes_artifacts(tmp_path, capsys):
    # an impossibly tight tolerance scale forces an honest check failure
    # without touching the physics: the closed-form comparison carries real
    # discretization error around 1e-12, far above 1e-8 * 1e-30
    cfg = tmp_path / "p.cfg"
    cfg.write_text("family = power\np = 2.0\n")
    out = tmp_path / "run"
    code = main(["flat-ode", "--config", str(cfg),
                 "--tolerance-scale", "1e-30", "--out", str(out)])
    assert code == EXIT_NUMERICAL
    assert "check(s) failed" in capsys.readouterr().err
    doc = json.loads((out / "manifest.json").read_text())
    assert doc["status"] == "fail"
    assert doc["tolerance_scale"] == 1e-30


def test_tolerance_scale_recorded_on_success(tmp_path):
    out = tmp_path / "run"
    assert main(["conditions", "--tolerance-scale", "2.5", "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "manifest.json").read_text())
    assert doc["tolerance_scale"] == 2.5


def test_manifest_echoes_resolved_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("alpha = 1.25\n")
    out = tmp_path / "run"
    assert main(["conditions", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "manifest.json").read_text())
    assert doc["config"]["alpha"] == 1.25
