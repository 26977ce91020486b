"""
CSV/JSON writers and readers for cuts, reports, phase maps, 3D patterns and
sweep tables.

Floats are written with 17 significant digits so that re-reading recovers
every value bit for bit.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import OpaError
from .radiation import PatternCut, _decimals


class OutputError(OpaError, OSError):
    """Writing or reading an output file failed."""


def fmt_float(x):
    """17 significant digits, compact exponent: 1.0000000000000000e0."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    mant, exp = f"{x:.16e}".split("e")
    return f"{mant}e{int(exp)}"


def _fmt_angle(x, decimals):
    return f"{x:.{decimals}f}"


def _open(path, mode="w"):
    path = Path(path)
    try:
        if "w" in mode:
            path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, mode, newline="" if "b" not in mode else None)
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror or exc}") from exc


def emit_cut_csv(cut, path):
    decimals = max(_decimals(cut.resolution), _decimals(float(cut.angles[0])))
    with _open(path) as fh:
        fh.write("theta_s_deg,intensity\n")
        for a, v in zip(cut.angles, cut.intensity):
            fh.write(f"{_fmt_angle(a, decimals)},{fmt_float(v)}\n")
    return Path(path)


def read_cut_csv(path, phi_s=0.0):
    with _open(path, "r") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["theta_s_deg", "intensity"]:
            raise OutputError(f"{path}: unexpected header {header!r}")
        rows = [(float(a), float(v)) for a, v in reader]
    angles = np.array([r[0] for r in rows])
    intensity = np.array([r[1] for r in rows])
    resolution = float(np.round(angles[1] - angles[0], 12)) if angles.size > 1 else 1.0
    return PatternCut(phi_s, angles, intensity, resolution)


def emit_report_json(report, path):
    with _open(path) as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    return Path(path)


def emit_phase_map(grid, path):
    spec = grid.spec
    with _open(path) as fh:
        fh.write("p,q,amplitude,phase_deg\n")
        ps = range(-spec.half_extent_x, spec.half_extent_x + 1)
        qs = range(-spec.half_extent_z, spec.half_extent_z + 1)
        deg = np.degrees(grid.phase)
        for i, p in enumerate(ps):
            for j, q in enumerate(qs):
                fh.write(f"{p},{q},{fmt_float(grid.amplitude[i, j])},{fmt_float(deg[i, j])}\n")
    return Path(path)


def emit_pattern3d(p3d, path, steering=None, projections=False):
    """Long-format CSV plus a ``.json`` sidecar describing the grid."""
    path = Path(path)
    with _open(path) as fh:
        fh.write("theta_deg,phi_deg,intensity\n")
        td = _decimals(p3d.theta_resolution)
        pd = _decimals(p3d.phi_resolution)
        for i, t in enumerate(p3d.theta):
            for j, f in enumerate(p3d.phi):
                fh.write(f"{t:.{td}f},{f:.{pd}f},{fmt_float(p3d.intensity[i, j])}\n")
    peak = p3d.peak()
    header = {
        "theta_resolution": p3d.theta_resolution,
        "phi_resolution": p3d.phi_resolution,
        "theta_count": int(p3d.theta.size),
        "phi_count": int(p3d.phi.size),
        "normalization": p3d.norm,
        "peak": {"theta": peak[0], "phi": peak[1], "intensity": peak[2]},
        "steering": None if steering is None else
        {"theta_s": steering.theta_s, "phi_s": steering.phi_s},
        "frame": "theta polar from z, phi azimuth from x; array in xz-plane, y normal",
    }
    sidecar = path.with_suffix(".json")
    with _open(sidecar) as fh:
        json.dump(header, fh, indent=2)
        fh.write("\n")
    written = [path, sidecar]
    if projections:
        proj_path = path.with_name(path.stem + "_projections.csv")
        proj = p3d.projections()
        with _open(proj_path) as fh:
            fh.write("plane,a,b\n")
            for plane, pts in proj.items():
                for a, b in pts:
                    fh.write(f"{plane},{fmt_float(a)},{fmt_float(b)}\n")
        written.append(proj_path)
    return written


def read_pattern3d(path):
    from .radiation import Pattern3D

    path = Path(path)
    with _open(path.with_suffix(".json"), "r") as fh:
        header = json.load(fh)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    nt, nf = header["theta_count"], header["phi_count"]
    theta = data[::nf, 0]
    phi = data[:nf, 1]
    return Pattern3D(theta, phi, data[:, 2].reshape(nt, nf), header["theta_resolution"],
                     header["phi_resolution"], header["normalization"])


def _axis_value(v):
    return fmt_float(v) if isinstance(v, float) else str(getattr(v, "value", v))


def emit_sweep_csv(results, path):
    """One row per scenario: axis columns, spr, main-lobe numbers, status."""
    names = []
    for r in results:
        for n, _ in r.axes:
            if n not in names:
                names.append(n)
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario_id", *names, "spr", "main_angle", "main_angle_error",
                    "main_fwhm", "status", "elapsed_s", "message"])
        for r in results:
            axes = dict(r.axes)
            rep = r.report
            w.writerow([
                r.id,
                *(_axis_value(axes[n]) if n in axes else "" for n in names),
                fmt_float(rep.spr) if rep else "",
                fmt_float(rep.main.angle) if rep else "",
                fmt_float(rep.main_lobe_angle_error) if rep else "",
                fmt_float(rep.main_lobe_fwhm) if rep else "",
                r.status,
                f"{r.elapsed:.3f}",
                r.message,
            ])
    return Path(path)


def emit_sweep_archive(results, path):
    doc = []
    for r in results:
        doc.append({
            "scenario_id": r.id,
            "axes": {n: getattr(v, "value", v) for n, v in r.axes},
            "status": r.status,
            "message": r.message,
            "report": r.report.to_dict() if r.report else None,
        })
    with _open(path) as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return Path(path)


def emit_aggregate_csv(rows, group_by, path):
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*group_by, "avg_spr", "count", "excluded"])
        for row in rows:
            w.writerow([*(_axis_value(k) for k in row.key), fmt_float(row.avg_spr),
                        row.count, row.excluded])
    return Path(path)
