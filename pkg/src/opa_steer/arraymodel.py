"""
Analytic relations for a rectangular phased array.

All lengths are in units of the wavelength in the emission medium, so the
wavenumber is 2*pi. Public angles are degrees.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteeringError, DomainError

ALPHA_CAP = 1000
RATIONAL_TOL = 1e-6
# slack when an analytic quotient lands on an integer up to rounding
_INT_SLACK = 1e-9


@dataclass(frozen=True)
class ArraySpec:
    """Pixel lattice spanning indices -N_x..N_x and -N_z..N_z."""

    half_extent_x: int
    half_extent_z: int
    pitch_x: float = 0.5
    pitch_z: float = 0.5

    def __post_init__(self):
        for name in ("half_extent_x", "half_extent_z"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("pitch_x", "pitch_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def square(cls, n, pitch=0.5):
        """Square array of n x n pixels (n odd)."""
        if n < 1 or n % 2 == 0:
            raise DomainError(f"square array size must be a positive odd integer, got {n!r}")
        return cls((n - 1) // 2, (n - 1) // 2, pitch, pitch)

    @property
    def shape(self):
        return (2 * self.half_extent_x + 1, 2 * self.half_extent_z + 1)

    @property
    def pixel_count(self):
        nx, nz = self.shape
        return nx * nz

    def indices(self):
        """Integer pixel coordinates (p, q) as two broadcastable arrays."""
        p = np.arange(-self.half_extent_x, self.half_extent_x + 1)
        q = np.arange(-self.half_extent_z, self.half_extent_z + 1)
        return p[:, None], q[None, :]


@dataclass(frozen=True)
class SteeringSpec:
    theta_s: float
    phi_s: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta_s) and abs(self.theta_s) <= 90.0):
            raise DomainError(f"theta_s must lie in [-90, 90] degrees, got {self.theta_s!r}")
        if not (math.isfinite(self.phi_s) and 0.0 <= self.phi_s < 180.0):
            raise DomainError(f"phi_s must lie in [0, 180) degrees, got {self.phi_s!r}")
        object.__setattr__(self, "theta_s", float(self.theta_s))
        object.__setattr__(self, "phi_s", float(self.phi_s))

    @property
    def sin_theta(self):
        return math.sin(math.radians(self.theta_s))

    def direction(self):
        """Unit vector (x, y, z) of the steering direction in array coordinates."""
        t, f = math.radians(self.theta_s), math.radians(self.phi_s)
        return (math.sin(t) * math.cos(f), math.cos(t), math.sin(t) * math.sin(f))

    def pitch_along(self, spec):
        """Lattice pitch projected on the steering plane's in-array axis."""
        f = math.radians(self.phi_s)
        return math.hypot(spec.pitch_x * math.cos(f), spec.pitch_z * math.sin(f))


@dataclass(frozen=True)
class LongPeriodInfo:
    M: float
    d: float
    alpha: int
    delta_psi: float
    quasi_periodic: bool = False

    @property
    def delta_psi_deg(self):
        return math.degrees(self.delta_psi)


def steering_from_M(M, pitch):
    """Steering angle (degrees) of a sawtooth with M pixels per period."""
    if M <= 1:
        raise DomainError(f"M must exceed 1, got {M!r}")
    x = pitch * M
    if x < 1.0:
        raise DomainError(f"pitch*M = {x!r} < 1 gives no real steering angle")
    return math.degrees(math.asin(1.0 / x))


def rationalize(M, cap=ALPHA_CAP, tol=RATIONAL_TOL):
    """Smallest q <= cap with q*M integral to within tol*q.

    Returns (q, exact) where exact is False when no such q exists and the
    cap was returned instead.
    """
    q = np.arange(1, cap + 1)
    qm = q * M
    hits = np.nonzero(np.abs(qm - np.round(qm)) < tol * q)[0]
    if hits.size:
        return int(q[hits[0]]), True
    return cap, False


def long_period_info(steering, pitch, alpha_cap=ALPHA_CAP, tol=RATIONAL_TOL):
    s = abs(steering.sin_theta)
    if steering.theta_s == 0.0 or s == 0.0:
        raise DegenerateSteeringError("broadside steering has an infinite long-period")
    d = 1.0 / s
    M = d / pitch
    alpha, exact = rationalize(M, alpha_cap, tol)
    return LongPeriodInfo(M=M, d=d, alpha=alpha, delta_psi=2 * math.pi / M,
                          quasi_periodic=not exact)


def max_pitch(theta_s_max):
    """Largest pitch keeping grating lobes out of a +/-theta_s_max field of view."""
    if not 0.0 < theta_s_max <= 90.0:
        raise DomainError(f"theta_s_max must lie in (0, 90], got {theta_s_max!r}")
    return 1.0 / (2.0 * abs(math.sin(math.radians(theta_s_max))))


def _asin_deg(s):
    return math.degrees(math.asin(max(-1.0, min(1.0, s))))


def grating_lobe_directions(steering, pitch):
    """Visible grating orders as [(m, angle_deg)], sorted by angle."""
    if pitch <= 0:
        raise DomainError(f"pitch must be positive, got {pitch!r}")
    s = steering.sin_theta
    m_lo = math.ceil((-1.0 - s) * pitch - _INT_SLACK)
    m_hi = math.floor((1.0 - s) * pitch + _INT_SLACK)
    out = []
    for m in range(m_lo, m_hi + 1):
        if m == 0:
            continue
        sm = s + m / pitch
        if abs(sm) <= 1.0 + 1e-12:
            out.append((m, _asin_deg(sm)))
    out.sort(key=lambda item: item[1])
    return out


def lpgl_directions(steering, alpha=1):
    """Long-period lobe orders as [(l, angle_deg, is_main)], l = -l_max..l_max.

    Order l sits at sin(theta) = (l / alpha) * sin(theta_s); l == alpha is the
    main lobe. l = 0 (broadside) is included as an ordinary entry.
    """
    if alpha < 1 or int(alpha) != alpha:
        raise DomainError(f"alpha must be a positive integer, got {alpha!r}")
    s = steering.sin_theta
    if steering.theta_s == 0.0 or s == 0.0:
        raise DegenerateSteeringError("long-period lobes are undefined at broadside")
    l_max = lpgl_max_order(steering, alpha)
    return [(l, _asin_deg(l / alpha * s), l == alpha) for l in range(-l_max, l_max + 1)]


def lpgl_max_order(steering, alpha=1):
    s = abs(steering.sin_theta)
    if s == 0.0:
        raise DegenerateSteeringError("long-period lobes are undefined at broadside")
    return int(math.floor(alpha / s + _INT_SLACK))


def min_phase_range_for_ideal(M):
    """Phase range (degrees) above which an integer-M sawtooth is unaffected."""
    if M < 1 or int(M) != M:
        raise DomainError(f"M must be a positive integer, got {M!r}")
    return 360.0 * M / (M + 1)
