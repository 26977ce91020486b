"""
Lobe detection, classification and sidelobe-to-peak ratios on pattern cuts.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arraymodel import grating_lobe_directions, long_period_info, lpgl_max_order
from .errors import DegenerateSteeringError, EmptyCutError, MissteerError

DEFAULT_FLOOR = 1e-8
DEFAULT_TOLERANCE = 0.1
EXCLUSION_FWHMS = 3.0


class LobeKind(str, enum.Enum):
    MAIN = "main"
    SIDE = "side"
    GRATING = "grating"
    LPGL = "lpgl"


@dataclass(frozen=True)
class Lobe:
    angle: float
    intensity: float
    kind: LobeKind = LobeKind.SIDE
    order: Optional[int] = None
    prediction_error: Optional[float] = None

    def to_dict(self):
        return {
            "angle": self.angle,
            "intensity": self.intensity,
            "kind": self.kind.value,
            "order": self.order,
            "prediction_error": self.prediction_error,
        }


@dataclass(frozen=True)
class LobeReport:
    steering: object
    main: Lobe
    lobes: list
    spr: float
    main_lobe_angle_error: float
    main_lobe_fwhm: float
    excluded_scenarios: int = 0

    @property
    def secondary(self):
        return [lb for lb in self.lobes if lb.kind is not LobeKind.MAIN]

    def count_above(self, floor):
        """Number of non-main lobes at or above ``floor`` times the main intensity."""
        return sum(1 for lb in self.secondary if lb.intensity >= floor * self.main.intensity)

    def to_dict(self):
        return {
            "steering": {"theta_s": self.steering.theta_s, "phi_s": self.steering.phi_s},
            "spr": self.spr,
            "main": {
                "angle": self.main.angle,
                "intensity": self.main.intensity,
                "fwhm": self.main_lobe_fwhm,
                "angle_error": self.main_lobe_angle_error,
            },
            "lobes": [lb.to_dict() for lb in self.lobes],
            "excluded_scenarios": self.excluded_scenarios,
        }


def _peak_indices(y):
    return np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]))[0] + 1


def _refine(angles, y, i, step):
    """Vertex of the parabola through samples i-1, i, i+1."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(angles[i])
    delta = 0.5 * (y0 - y2) / denom
    return float(angles[i] + delta * step)


def detect_lobes(cut, prominence_floor=DEFAULT_FLOOR):
    """Interior local maxima of a cut as [(angle, intensity)].

    Angles are refined by 3-point parabolic interpolation; intensities are the
    sampled maxima. Peaks below ``prominence_floor`` times the global maximum
    are dropped.
    """
    y = np.asarray(cut.intensity, dtype=float)
    if y.size < 3:
        raise EmptyCutError(f"lobe detection needs at least 3 samples, got {y.size}")
    floor = prominence_floor * float(y.max())
    idx = _peak_indices(y)
    idx = idx[y[idx] >= floor]
    return [(_refine(cut.angles, y, i, cut.resolution), float(y[i])) for i in idx]


def fwhm(cut, index):
    """Full width at half maximum around sample ``index``, linearly interpolated."""
    a, y = cut.angles, cut.intensity
    half = 0.5 * y[index]
    i = index
    while i > 0 and y[i - 1] >= half:
        i -= 1
    left = a[0] if i == 0 else a[i - 1] + (half - y[i - 1]) * (a[i] - a[i - 1]) / (y[i] - y[i - 1])
    j = index
    while j < y.size - 1 and y[j + 1] >= half:
        j += 1
    right = a[-1] if j == y.size - 1 else a[j] + (y[j] - half) * (a[j + 1] - a[j]) / (y[j] - y[j + 1])
    return float(right - left)


def main_lobe_fwhm(cut):
    return fwhm(cut, int(np.argmax(cut.intensity)))


def default_exclusion(reference_cut):
    """Main-lobe window halfwidth: three reference-beam widths."""
    return EXCLUSION_FWHMS * main_lobe_fwhm(reference_cut)


def _predictions(steering, pitch, alpha):
    preds = []
    if pitch is not None:
        preds += [(LobeKind.GRATING, m, math.sin(math.radians(ang)))
                  for m, ang in grating_lobe_directions(steering, pitch)]
    if alpha is not None and steering.theta_s != 0.0:
        s = steering.sin_theta
        l_max = lpgl_max_order(steering, alpha)
        preds += [(LobeKind.LPGL, l, max(-1.0, min(1.0, l / alpha * s)))
                  for l in range(-l_max, l_max + 1) if l != alpha]
    return preds


def classify_lobes(peaks, steering, pitch=None, alpha=None, tolerance=DEFAULT_TOLERANCE,
                   main_index=None):
    """Tag each (angle, intensity) peak as main, grating(m), LPGL(l) or side.

    ``alpha`` defaults to the steering's long-period rationalization when a
    pitch is given; the highest peak is the main lobe unless ``main_index``
    says otherwise.
    """
    if not peaks:
        return []
    if main_index is None:
        main_index = max(range(len(peaks)), key=lambda k: peaks[k][1])
    if alpha is None and pitch is not None:
        try:
            alpha = long_period_info(steering, pitch).alpha
        except DegenerateSteeringError:
            alpha = None
    preds = _predictions(steering, pitch, alpha)
    if preds:
        kinds = [p[0] for p in preds]
        orders = [p[1] for p in preds]
        pred_deg = np.degrees(np.arcsin([p[2] for p in preds]))
    out = []
    for k, (angle, inten) in enumerate(peaks):
        if k == main_index:
            err = angle - steering.theta_s
            out.append(Lobe(angle, inten, LobeKind.MAIN, None, err))
            continue
        if preds:
            diffs = np.abs(pred_deg - angle)
            j = int(np.argmin(diffs))
            if diffs[j] <= tolerance:
                out.append(Lobe(angle, inten, kinds[j], orders[j], float(angle - pred_deg[j])))
                continue
        out.append(Lobe(angle, inten, LobeKind.SIDE))
    return out


def sidelobe_to_peak(cut, steering, main_exclusion_halfwidth, prominence_floor=DEFAULT_FLOOR,
                     pitch=None, alpha=None, tolerance=DEFAULT_TOLERANCE, fov=None):
    """Main lobe, classified secondary lobes and the sidelobe-to-peak ratio.

    The main lobe is the global maximum, which must lie within
    ``main_exclusion_halfwidth`` of the steering angle. When ``fov`` is given
    only secondary lobes with |angle| <= fov enter the ratio.
    """
    y = cut.intensity
    if y.size < 3:
        raise EmptyCutError(f"lobe analysis needs at least 3 samples, got {y.size}")
    # equal maxima (e.g. full grating lobes): take the one nearest the target
    ties = np.nonzero(y >= y.max() * (1.0 - 1e-12))[0]
    g = int(ties[np.argmin(np.abs(cut.angles[ties] - steering.theta_s))])
    peak_angle = float(cut.angles[g])
    if abs(peak_angle - steering.theta_s) > main_exclusion_halfwidth:
        raise MissteerError(
            f"global maximum at {peak_angle:.4f} deg lies outside "
            f"{steering.theta_s:.4f} +/- {main_exclusion_halfwidth:.4f} deg",
            peak_angle, float(y[g]), steering.theta_s)

    peaks = detect_lobes(cut, prominence_floor)
    idx = [i for i in _peak_indices(y) if y[i] >= prominence_floor * y[g]]
    if g in idx:
        main_index = idx.index(g)
    else:
        # global maximum on the horizon: keep it as a truncated main lobe
        peaks.append((peak_angle, float(y[g])))
        main_index = len(peaks) - 1
    lobes = classify_lobes(peaks, steering, pitch, alpha, tolerance, main_index)
    main = lobes[main_index]
    lobes.sort(key=lambda lb: lb.angle)

    others = [lb.intensity for lb in lobes
              if lb.kind is not LobeKind.MAIN and (fov is None or abs(lb.angle) <= fov)]
    spr = max(others) / main.intensity if others else 0.0
    return LobeReport(
        steering=steering,
        main=main,
        lobes=lobes,
        spr=float(spr),
        main_lobe_angle_error=float(main.angle - steering.theta_s),
        main_lobe_fwhm=fwhm(cut, g),
    )


@dataclass(frozen=True)
class SprAverage:
    mean: float
    count: int
    excluded: int
    flagged: list = field(default_factory=list)


def average_spr(outcomes):
    """Arithmetic mean of spr over LobeReports; failures are excluded and counted.

    ``outcomes`` yields either LobeReport instances or exceptions raised while
    evaluating a scenario (e.g. MissteerError).
    """
    sprs, flagged = [], []
    for k, item in enumerate(outcomes):
        if isinstance(item, LobeReport):
            sprs.append(item.spr)
        else:
            flagged.append(k)
    if not sprs:
        raise ValueError("no scenario produced a lobe report")
    return SprAverage(math.fsum(sprs) / len(sprs), len(sprs), len(flagged), flagged)
