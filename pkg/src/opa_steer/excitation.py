"""
Per-pixel complex excitation synthesis.

Pipeline order is fixed: ideal sawtooth phase, amplitude perturbation keyed
to the ideal phase, phase-limit compensation, then windowing.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .arraymodel import ArraySpec
from .errors import DomainError, InfeasiblePerturbationError

TWO_PI = 2.0 * math.pi
# fractional phases this close to a full cycle are treated as a wrap to zero
_WRAP_SNAP = 1e-9


def _frac_cycles(x):
    f = x - np.floor(x)
    f[f > 1.0 - _WRAP_SNAP] = 0.0
    f[f < _WRAP_SNAP] = 0.0
    return f


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PixelGrid:
    """Amplitude and phase (radians, [0, 2pi)) for every pixel, indexed [p, q].

    ``steering_cycles`` holds the unwrapped ideal steering phase in cycles when
    the grid descends from :func:`ideal_phase_profile`; the skip strategy and
    the amplitude perturbation are keyed to it.
    """

    spec: ArraySpec
    amplitude: np.ndarray
    phase: np.ndarray
    steering_cycles: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        amp = _readonly(self.amplitude)
        ph = _readonly(self.phase)
        if amp.shape != self.spec.shape or ph.shape != self.spec.shape:
            raise DomainError(
                f"grid arrays must have shape {self.spec.shape}, got {amp.shape} and {ph.shape}")
        if not np.all(np.isfinite(amp)) or np.any(amp < 0):
            raise DomainError("amplitudes must be finite and non-negative")
        if np.any(ph < 0) or np.any(ph >= TWO_PI):
            raise DomainError("phases must lie in [0, 2pi)")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "phase", ph)
        if self.steering_cycles is not None:
            object.__setattr__(self, "steering_cycles", _readonly(self.steering_cycles))

    @property
    def field(self):
        """Complex excitation E(p, q)."""
        return self.amplitude * np.exp(1j * self.phase)

    @property
    def ideal_phase(self):
        """Wrapped ideal steering phase in [0, 2pi)."""
        if self.steering_cycles is None:
            raise DomainError("grid carries no ideal steering phase")
        return TWO_PI * _frac_cycles(self.steering_cycles)

    def with_(self, **changes):
        return replace(self, **changes)


class Strategy(str, enum.Enum):
    REPLACE_PSI_MAX = "replace_psi_max"
    REPLACE_2PI = "replace_2pi"
    HALF_HALF = "half_half"
    SKIP = "skip"


@dataclass(frozen=True)
class PhaseLimitSpec:
    psi_max: float = 360.0
    strategy: Strategy = Strategy.HALF_HALF

    def __post_init__(self):
        if not 0.0 < self.psi_max <= 360.0:
            raise DomainError(f"psi_max must lie in (0, 360] degrees, got {self.psi_max!r}")
        object.__setattr__(self, "strategy", Strategy(self.strategy))


@dataclass(frozen=True)
class PerturbationSpec:
    """Amplitude ripple 1 + A + B*sin(P_d * psi) over each long-period."""

    P_d: float
    A: float
    B: float

    def __post_init__(self):
        if not self.P_d > 0:
            raise DomainError(f"P_d must be positive, got {self.P_d!r}")
        if self.B < 0:
            raise DomainError(f"B must be non-negative, got {self.B!r}")

    def profile(self, psi):
        """Perturbed amplitude |E~| at wrapped phase psi (radians)."""
        return 1.0 + self.A + self.B * np.sin(self.P_d * np.asarray(psi, dtype=float))

    def extrema(self):
        """(min, max) of the perturbed amplitude over one long-period."""
        lo, hi = _sin_extrema(TWO_PI * self.P_d)
        return 1.0 + self.A + self.B * lo, 1.0 + self.A + self.B * hi

    def variation(self):
        lo, hi = self.extrema()
        return (hi - lo) / (hi + lo)


@dataclass(frozen=True)
class WindowSpec:
    circular: bool = False
    gaussian_sigma: Optional[float] = None
    anisotropic: bool = False

    def __post_init__(self):
        if self.gaussian_sigma is not None and not self.gaussian_sigma > 0:
            raise DomainError(f"gaussian_sigma must be positive, got {self.gaussian_sigma!r}")


def ideal_phase_profile(spec, steering):
    """Unit-amplitude grid with the mod-2pi sawtooth steering toward ``steering``."""
    p, q = spec.indices()
    phi = math.radians(steering.phi_s)
    s = steering.sin_theta
    cycles = s * (p * (spec.pitch_x * math.cos(phi)) + q * (spec.pitch_z * math.sin(phi)))
    cycles = np.broadcast_to(cycles, spec.shape).astype(float)
    phase = TWO_PI * _frac_cycles(cycles)
    return PixelGrid(spec, np.ones(spec.shape), phase, cycles)


def apply_phase_limit(grid, limit):
    """Rewrite phases the pixel cannot reach according to ``limit.strategy``."""
    if limit.psi_max >= 360.0:
        return grid
    psi_max = math.radians(limit.psi_max)
    if limit.strategy is Strategy.SKIP:
        if grid.steering_cycles is None:
            raise DomainError("skip strategy needs the grid's ideal steering phase")
        phase = psi_max * _frac_cycles(grid.steering_cycles * (TWO_PI / psi_max))
        return grid.with_(phase=phase)

    phase = np.array(grid.phase)
    missing = phase > psi_max
    if limit.strategy is Strategy.REPLACE_PSI_MAX:
        phase[missing] = psi_max
    elif limit.strategy is Strategy.REPLACE_2PI:
        phase[missing] = 0.0
    else:
        upper = missing & (TWO_PI - phase < phase - psi_max)
        phase[missing] = psi_max
        phase[upper] = 0.0
    return grid.with_(phase=phase)


def _sin_extrema(span):
    """Infimum and supremum of sin(t) for t in [0, span]."""
    hi = 1.0 if span >= math.pi / 2 else math.sin(span)
    if span >= 1.5 * math.pi:
        lo = -1.0
    elif span > math.pi:
        lo = math.sin(span)
    else:
        lo = 0.0
    return lo, hi


def solve_perturbation_params(P_d, target_var):
    """Offset A and amplitude B giving a ripple of strength ``target_var``.

    The ripple is centred so that (max + min) / 2 == 1 over one long-period,
    which makes the variation equal B * (smax - smin) / 2 with smax, smin the
    extrema of sin over [0, 2*pi*P_d].
    """
    if not P_d > 0:
        raise DomainError(f"P_d must be positive, got {P_d!r}")
    if not target_var >= 0:
        raise DomainError(f"target variation must be non-negative, got {target_var!r}")
    if target_var >= 1:
        raise InfeasiblePerturbationError(
            f"variation {target_var!r} needs a non-positive minimum amplitude")
    lo, hi = _sin_extrema(TWO_PI * P_d)
    B = 2.0 * target_var / (hi - lo)
    A = -0.5 * B * (hi + lo)
    return PerturbationSpec(P_d=float(P_d), A=A, B=B)


def apply_amplitude_perturbation(grid, pert):
    """Scale amplitudes by 1 + f_p evaluated at each pixel's ideal phase."""
    factor = pert.profile(grid.ideal_phase)
    if np.any(factor < 0):
        raise InfeasiblePerturbationError("perturbation drives some pixel amplitudes negative")
    return grid.with_(amplitude=grid.amplitude * factor)


def window_weights(spec, window):
    p, q = spec.indices()
    w = np.ones(spec.shape)
    n_x = spec.half_extent_x
    if window.circular:
        w = w * (p * p + q * q <= n_x * n_x)
    if window.gaussian_sigma is not None:
        sx = window.gaussian_sigma * n_x
        sz = window.gaussian_sigma * (spec.half_extent_z if window.anisotropic else n_x)
        if sx == 0 or sz == 0:
            # single-pixel axis: the taper collapses onto the center pixel
            gx = np.where(p == 0, 1.0, 0.0) if sx == 0 else np.exp(-(p / sx) ** 2)
            gz = np.where(q == 0, 1.0, 0.0) if sz == 0 else np.exp(-(q / sz) ** 2)
            w = w * gx * gz
        else:
            w = w * np.exp(-((p / sx) ** 2 + (q / sz) ** 2))
    return w


def apply_windows(grid, window):
    if not window.circular and window.gaussian_sigma is None:
        return grid
    return grid.with_(amplitude=grid.amplitude * window_weights(grid.spec, window))


def total_amplitude(grid):
    return float(np.sum(grid.amplitude))


def amplitude_variation(amplitude):
    """(max - min) / (max + min) of a set of amplitudes."""
    a = np.asarray(amplitude, dtype=float)
    hi, lo = float(a.max()), float(a.min())
    return (hi - lo) / (hi + lo)


def synthesize(spec, steering, phase_limit=None, perturbation=None, window=None):
    """Run the full excitation pipeline and return the final grid."""
    grid = ideal_phase_profile(spec, steering)
    if perturbation is not None:
        grid = apply_amplitude_perturbation(grid, perturbation)
    if phase_limit is not None:
        grid = apply_phase_limit(grid, phase_limit)
    if window is not None:
        grid = apply_windows(grid, window)
    return grid
