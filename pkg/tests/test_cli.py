"""Command-line interface: exit codes, file artifacts, determinism."""

import json

import pytest

from choquard_lab.cli import main
from choquard_lab.grid import read_field


def write_config(path, **overrides):
    config = {
        "params": {"N": 2, "alpha": 1.0, "p": 2.0, "q": 2.0, "tau": 1.0, "eta": 1.0},
        "grid": {"L": 12.0, "n": 32},
        "solve": {"max_iters": 800, "tol_residual": 1e-9, "seed": 1},
        "verify": {"region_resolution": 16},
    }
    for section, body in overrides.items():
        if body is None:
            config.pop(section, None)
        else:
            config.setdefault(section, {}).update(body)
    path.write_text(json.dumps(config))
    return path


def test_params_benchmark_config(tmp_path, capsys):
    cfg = write_config(tmp_path / "config.json")
    assert main(["params", str(cfg)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["h1"]["ok"] and payload["h2"]["ok"]
    assert payload["thetas"]["theta1"] == pytest.approx(4.0 / 3.0)


def test_params_require_h2_failure(tmp_path):
    cfg = write_config(tmp_path / "config.json", params={"p": 1.5})
    assert main(["params", str(cfg), "--require", "h2"]) == 1
    assert main(["params", str(cfg), "--require", "h1"]) == 0


def test_params_missing_field(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"params": {"N": 2, "p": 2.0, "q": 2.0}}))
    assert main(["params", str(path)]) == 2
    assert "alpha" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "params": {"N": 2, "alpha": 1.0, "p": 2.0, "q": 2.0, "alhpa": 3},
    }))
    assert main(["params", str(path)]) == 2
    assert "alhpa" in capsys.readouterr().err


def test_malformed_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    assert main(["params", str(path)]) == 2


def test_solve_scalar_writes_artifacts(tmp_path):
    cfg = write_config(tmp_path / "config.json")
    out = tmp_path / "out"
    assert main(["solve", str(cfg), "--mode", "scalar", "--out", str(out)]) == 0
    assert (out / "w.chqf").exists()
    assert (out / "solve_report.json").exists()
    assert (out / "energy_report.json").exists()
    assert (out / "run_meta.json").exists()
    report = json.loads((out / "solve_report.json").read_text())
    assert report["converged"] is True
    field = read_field(out / "w.chqf")
    assert field.grid.n == 32 and field.grid.L == 12.0


def test_solve_system_writes_pair(tmp_path):
    cfg = write_config(tmp_path / "config.json", grid={"L": 15.0, "n": 64})
    out = tmp_path / "out"
    assert main(["solve", str(cfg), "--mode", "system", "--out", str(out)]) == 0
    assert (out / "u.chqf").exists() and (out / "v.chqf").exists()


def test_solve_nonconvergence_exit_code(tmp_path):
    cfg = write_config(tmp_path / "config.json", solve={"max_iters": 1})
    out = tmp_path / "out"
    assert main(["solve", str(cfg), "--mode", "scalar", "--out", str(out)]) == 1
    report = json.loads((out / "solve_report.json").read_text())
    assert report["converged"] is False


def test_solve_small_box_warns(tmp_path, capsys):
    cfg = write_config(tmp_path / "config.json", grid={"L": 6.0, "n": 32})
    out = tmp_path / "out"
    main(["solve", str(cfg), "--mode", "scalar", "--out", str(out)])
    assert "boundary" in capsys.readouterr().err


def test_solve_reports_deterministic(tmp_path):
    cfg = write_config(tmp_path / "config.json")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["solve", str(cfg), "--mode", "scalar", "--out", str(out1)]) == 0
    assert main(["solve", str(cfg), "--mode", "scalar", "--out", str(out2)]) == 0
    for name in ("solve_report.json", "energy_report.json", "w.chqf"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_verify_benchmark_small(tmp_path):
    cfg = write_config(
        tmp_path / "config.json",
        grid={"L": 20.0, "n": 128},
        solve={"max_iters": 2000, "tol_residual": 1e-10},
    )
    out = tmp_path / "verify"
    assert main(["verify", str(cfg), "--out", str(out)]) == 0
    payload = json.loads((out / "verify_report.json").read_text())
    assert payload["all_passed"] is True
    assert (out / "region.csv").exists()
    assert (out / "scalar" / "w.chqf").exists()
    assert (out / "system" / "u.chqf").exists()
    assert (out / "picard" / "v.chqf").exists()
    lines = (out / "region.csv").read_text().strip().split("\n")
    assert lines[0] == "p,q,admissible"


def test_verify_unachievable_tolerance_fails(tmp_path):
    cfg = write_config(
        tmp_path / "config.json",
        grid={"L": 15.0, "n": 64},
        solve={"max_iters": 50, "tol_residual": 1e-16},
    )
    out = tmp_path / "verify"
    assert main(["verify", str(cfg), "--out", str(out)]) == 1
    payload = json.loads((out / "verify_report.json").read_text())
    assert payload["all_passed"] is False


def test_region_subcommand(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "params": {"N": 3, "alpha": 1.9, "p": 2.0, "q": 2.0},
        "verify": {"region_resolution": 20},
    }))
    out = tmp_path / "region.csv"
    assert main(["region", str(path), "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "p,q,admissible"
    assert len(lines) == 1 + 20 * 20


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("CHOQUARD_LAB_THREADS", "not-a-number")
    cfg = write_config(tmp_path / "config.json")
    assert main(["params", str(cfg)]) == 2
    monkeypatch.setenv("CHOQUARD_LAB_THREADS", "2")
    assert main(["params", str(cfg)]) == 0
