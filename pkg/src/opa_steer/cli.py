"""opa-steer command line entry point."""

import argparse
import json
import sys
from pathlib import Path

from . import io
from .config import MODES, parse_config, scenario_from_config
from .errors import ConfigError, OpaError
from .radiation import compute_3d
from .sweep import aggregate_avg_spr, analyze, build_grid, expand_plan, run_sweep


def _parser():
    ap = argparse.ArgumentParser(
        prog="opa-steer",
        description="Optical phased-array beam steering: far-field cuts, 3D patterns, "
                    "lobe reports and parameter sweeps.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    return ap


def _summary(**kw):
    print(json.dumps(kw))


def run_single(cfg, out):
    scn = scenario_from_config(cfg)
    if cfg.mode == "pattern3d":
        grid = build_grid(scn)
        p3d = compute_3d(grid, scn.element, cfg.theta_resolution, cfg.phi_resolution)
        files = io.emit_pattern3d(p3d, out / "pattern3d.csv", scn.steering, cfg.export_projections)
        if cfg.export_phase_map:
            files.append(io.emit_phase_map(grid, out / "phase_map.csv"))
        theta, phi, peak = p3d.peak()
        _summary(mode="pattern3d", peak_theta=theta, peak_phi=phi, peak_intensity=peak,
                 files=[str(f) for f in files])
        return

    grid, cut, report = analyze(scn)
    files = []
    if cfg.mode == "cut" or cfg.export_cut:
        files.append(io.emit_cut_csv(cut, out / "cut.csv"))
    if cfg.mode == "analyze" or cfg.export_report:
        files.append(io.emit_report_json(report, out / "report.json"))
    if cfg.export_phase_map:
        files.append(io.emit_phase_map(grid, out / "phase_map.csv"))
    _summary(mode=cfg.mode, spr=report.spr, main_angle=report.main.angle,
             main_fwhm=report.main_lobe_fwhm, files=[str(f) for f in files])


def run_plan(cfg, out, workers):
    base = {k: v for k, v in cfg.scenario_params().items() if k not in cfg.axes}
    plan = expand_plan(cfg.axes, base)
    if cfg.export_cut:
        from dataclasses import replace

        plan = [replace(s, keep_cut=True) for s in plan]
    results = run_sweep(plan, workers)
    files = [io.emit_sweep_csv(results, out / "sweep.csv")]
    group_by = cfg.group_by
    if group_by is None:
        group_by = [n for n in sorted(cfg.axes) if n != "theta_s"]
    ok = [r for r in results if r.report is not None]
    if group_by and ok:
        rows = aggregate_avg_spr(results, group_by)
        files.append(io.emit_aggregate_csv(rows, group_by, out / "avg_spr.csv"))
    if cfg.export_archive:
        files.append(io.emit_sweep_archive(results, out / "reports.json"))
    if cfg.export_cut:
        for r in results:
            if r.cut is not None:
                files.append(io.emit_cut_csv(r.cut, out / "cuts" / f"{r.id}.csv"))
    counts = {}
    for r in results:
        counts[r.status] = counts.get(r.status, 0) + 1
    _summary(mode="sweep", scenarios=len(results), statuses=counts,
             files=[str(f) for f in files[:4]])


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"{args.config}: {exc.strerror or exc}", field="config") from exc
        cfg = parse_config(text, mode=args.mode)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", field="workers")
        if cfg.mode == "sweep":
            run_plan(cfg, args.out, args.workers)
        else:
            run_single(cfg, args.out)
    except ConfigError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except OpaError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
