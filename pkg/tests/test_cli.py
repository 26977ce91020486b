import csv
import json

import pytest

from opa_steer.cli import main
from opa_steer.radiation import steering_to_array_angles


def write_config(tmp_path, doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc) if isinstance(doc, dict) else doc)
    return path


def run(tmp_path, mode, doc, *extra):
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "out"
    code = main([mode, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def test_cut_mode(tmp_path, capsys):
    code, out = run(tmp_path, "cut", {"theta_s": 10, "N": 31, "resolution": 0.1})
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["main_angle"] == pytest.approx(10.0, abs=0.1)
    assert (out / "cut.csv").read_text().startswith("theta_s_deg,intensity\n")
    assert json.loads((out / "report.json").read_text())["spr"] == summary["spr"]


def test_analyze_mode_with_phase_map(tmp_path):
    code, out = run(tmp_path, "analyze", {"theta_s": 5, "N": 21, "resolution": 0.1,
                                          "export_phase_map": True})
    assert code == 0
    assert (out / "report.json").exists()
    assert (out / "phase_map.csv").exists()
    assert not (out / "cut.csv").exists()


def test_pattern3d_peak_at_mapped_direction(tmp_path, capsys):
    doc = {"theta_s": 10, "phi_s": 0, "N": 31, "circular": False, "sigma": None,
           "theta_resolution": 0.5, "phi_resolution": 0.5}
    code, out = run(tmp_path, "pattern3d", doc)
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    t, f = steering_to_array_angles(10.0, 0.0)
    assert abs(summary["peak_theta"] - t) <= 0.5
    assert abs(summary["peak_phi"] - f) <= 0.5
    assert (out / "pattern3d.json").exists()


def test_sweep_mode(tmp_path, capsys):
    doc = {"N": 21, "resolution": 0.1,
           "axes": {"theta_s": [5.0, 10.0, 90.0], "psi_max": [270, 360]},
           "export_archive": True, "export_cut": True}
    code, out = run(tmp_path, "sweep", doc, "--workers", "2")
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["scenarios"] == 6
    with open(out / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["scenario_id"] for r in rows] == [f"s000{k}" for k in range(6)]
    assert {"psi_max", "theta_s", "spr", "status"} <= set(rows[0])
    with open(out / "avg_spr.csv") as fh:
        agg = list(csv.DictReader(fh))
    assert [a["psi_max"] for a in agg] == ["270", "360"]
    assert len(json.loads((out / "reports.json").read_text())) == 6
    assert len(list((out / "cuts").glob("*.csv"))) == sum(r["status"] == "ok" for r in rows)


def test_validation_error_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "cut", {"theta_s": 10, "psi_max": 400})
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError"
    assert err["field"] == "psi_max"


def test_syntax_error_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "cut", '{"theta_s": 10,,}')
    assert code == 2
    assert json.loads(capsys.readouterr().err)["line"] == 1


def test_missing_config(tmp_path, capsys):
    assert main(["cut", "--config", str(tmp_path / "nope.json")]) == 2
    assert "nope.json" in json.loads(capsys.readouterr().err)["message"]


def test_runtime_error_exit_code(tmp_path, capsys):
    # infeasible ripple is a domain failure, not a config error
    code, _ = run(tmp_path, "cut", {"theta_s": 10, "N": 21, "var": 1.5, "resolution": 0.1})
    assert code == 1
    assert json.loads(capsys.readouterr().err)["error"] == "InfeasiblePerturbationError"


def test_bad_mode_rejected(tmp_path):
    cfg = write_config(tmp_path, {"theta_s": 1})
    with pytest.raises(SystemExit):
        main(["plot", "--config", str(cfg)])
