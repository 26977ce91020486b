"""
Far-field power patterns |U|^2 = |A|^2 |F|^2 of a pixel grid.

Directions are handled internally as direction cosines (x, y, z) in the
array frame: the array lies in the xz-plane and y is the array normal.
Every intensity is normalized by the squared sum of the pixel amplitudes.

Each direction's array factor is reduced with numpy's pairwise summation
along a contiguous axis, so a direction's value does not depend on how the
directions are chunked or which worker evaluates them.
"""

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi
_CHUNK = 256
_GENERAL_CHUNK = 16


class ElementKind(str, enum.Enum):
    ISOTROPIC = "isotropic"
    DIPOLE_Z = "dipole_z"
    DIPOLE_XZ = "dipole_xz"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class ElementPattern:
    """Single-pixel field pattern F.

    ``orientation`` is the dipole axis angle from z (degrees, in the
    xz-plane). A tabulated pattern holds field gains on a (theta, phi) grid
    in array coordinates, interpolated linearly.
    """

    kind: ElementKind = ElementKind.DIPOLE_Z
    orientation: float = 0.0
    theta_grid: Optional[np.ndarray] = None
    phi_grid: Optional[np.ndarray] = None
    gains: Optional[np.ndarray] = None
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", ElementKind(self.kind))
        if self.kind is ElementKind.TABULATED:
            from scipy.interpolate import RegularGridInterpolator

            gains = np.asarray(self.gains, dtype=float)
            if gains.ndim != 2 or not np.all(np.isfinite(gains)) or np.any(gains < 0):
                raise DomainError("tabulated gains must be a finite non-negative 2D table")
            interp = RegularGridInterpolator(
                (np.asarray(self.theta_grid, float), np.asarray(self.phi_grid, float)), gains)
            object.__setattr__(self, "_interp", interp)

    @classmethod
    def isotropic(cls):
        return cls(ElementKind.ISOTROPIC)

    @classmethod
    def dipole_z(cls):
        return cls(ElementKind.DIPOLE_Z)

    @classmethod
    def dipole_xz(cls, orientation):
        return cls(ElementKind.DIPOLE_XZ, orientation=float(orientation))

    @classmethod
    def tabulated(cls, theta_grid, phi_grid, gains):
        return cls(ElementKind.TABULATED, theta_grid=theta_grid, phi_grid=phi_grid, gains=gains)

    def evaluate(self, x, y, z):
        """Field gain at direction cosines (x, y, z)."""
        x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
        if self.kind is ElementKind.ISOTROPIC:
            return np.ones(x.shape)
        if self.kind is ElementKind.DIPOLE_Z:
            return dipole_gain(z)
        if self.kind is ElementKind.DIPOLE_XZ:
            b = math.radians(self.orientation)
            return dipole_gain(x * math.sin(b) + z * math.cos(b))
        theta = np.degrees(np.arccos(np.clip(z, -1.0, 1.0)))
        phi = np.degrees(np.arctan2(y, x)) % 360.0
        tg, pg = self._interp.grid
        pts = np.stack([np.clip(theta, tg[0], tg[-1]), np.clip(phi, pg[0], pg[-1])], axis=-1)
        return self._interp(pts.reshape(-1, 2)).reshape(x.shape)


def dipole_gain(cos_gamma):
    """cos(pi/2 cos g) / sin g, with the axial limit 0."""
    c = np.clip(np.asarray(cos_gamma, dtype=float), -1.0, 1.0)
    s = np.sqrt(np.maximum(0.0, 1.0 - c * c))
    out = np.zeros(c.shape)
    ok = s > 1e-15
    out[ok] = np.cos(0.5 * math.pi * c[ok]) / s[ok]
    return out


def element_factor(pattern, theta, phi):
    """F at an array-frame direction (theta from z, phi from x; degrees)."""
    t, f = np.radians(theta), np.radians(phi)
    return pattern.evaluate(np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t))


def steering_to_cosines(theta_s, phi_s):
    """Direction cosines (x, y, z) of steering-frame angles (degrees)."""
    t = np.radians(np.asarray(theta_s, dtype=float))
    f = math.radians(phi_s) if np.isscalar(phi_s) else np.radians(phi_s)
    s = np.sin(t)
    return s * np.cos(f), np.cos(t), s * np.sin(f)


def array_factor_cosines(grid, u, w):
    """Array factor at direction cosines u (x) and w (z), vectorized.

    When every direction shares the same w (or u) the transverse sum is done
    once per lattice line, turning the double sum into a single one.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    u, w = np.broadcast_arrays(u, w)
    shape = u.shape
    u, w = u.ravel(), w.ravel()
    E = grid.field
    spec = grid.spec
    p = np.arange(-spec.half_extent_x, spec.half_extent_x + 1) * spec.pitch_x
    q = np.arange(-spec.half_extent_z, spec.half_extent_z + 1) * spec.pitch_z
    out = np.empty(u.size, dtype=complex)
    if u.size == 0:
        return out.reshape(shape)

    if np.all(w == w[0]):
        line = np.sum(E * np.exp(-1j * TWO_PI * q * w[0])[None, :], axis=1)
        _line_sum(line, p, u, out)
    elif np.all(u == u[0]):
        line = np.sum(E.T * np.exp(-1j * TWO_PI * p * u[0])[None, :], axis=1)
        _line_sum(line, q, w, out)
    else:
        for lo in range(0, u.size, _GENERAL_CHUNK):
            hi = min(lo + _GENERAL_CHUNK, u.size)
            ez = np.exp(-1j * TWO_PI * np.multiply.outer(w[lo:hi], q))
            inner = np.sum(E[None, :, :] * ez[:, None, :], axis=2)
            ex = np.exp(-1j * TWO_PI * np.multiply.outer(u[lo:hi], p))
            out[lo:hi] = np.sum(inner * ex, axis=1)
    return out.reshape(shape)


def _line_sum(line, pos, c, out):
    for lo in range(0, c.size, _CHUNK):
        hi = min(lo + _CHUNK, c.size)
        ph = np.exp(-1j * TWO_PI * np.multiply.outer(c[lo:hi], pos))
        out[lo:hi] = np.sum(ph * line[None, :], axis=1)


def array_factor(grid, theta, phi):
    """Array factor toward array-frame direction (theta, phi) in degrees."""
    t, f = np.radians(theta), np.radians(phi)
    A = array_factor_cosines(grid, np.sin(t) * np.cos(f), np.cos(t))
    return complex(A[0]) if np.ndim(theta) == 0 and np.ndim(phi) == 0 else A


def array_factor_direct(grid, u, w):
    """Brute-force reference: exact double sum per direction, no factoring."""
    E = grid.field
    spec = grid.spec
    nx, nz = spec.half_extent_x, spec.half_extent_z
    out = []
    for uu, ww in zip(np.ravel(u), np.ravel(w)):
        re, im = [], []
        for i, p in enumerate(range(-nx, nx + 1)):
            for j, q in enumerate(range(-nz, nz + 1)):
                t = E[i, j] * cmath.exp(-1j * TWO_PI * (p * spec.pitch_x * uu + q * spec.pitch_z * ww))
                re.append(t.real)
                im.append(t.imag)
        out.append(complex(math.fsum(re), math.fsum(im)))
    return np.array(out).reshape(np.shape(u))


def normalization(grid):
    total = float(np.sum(grid.amplitude))
    if total <= 0:
        raise DomainError("grid radiates no power (all amplitudes zero)")
    return total * total


def intensity_cosines(grid, element, x, y, z):
    A = array_factor_cosines(grid, x, z)
    F = element.evaluate(x, y, z)
    return (np.abs(A) ** 2) * (F * F) / normalization(grid)


def _decimals(step):
    for d in range(13):
        if abs(step * 10 ** d - round(step * 10 ** d)) < 1e-9 * max(1.0, step * 10 ** d):
            return d
    return 12


def sample_angles(lo, hi, resolution):
    """Uniform angle samples lo, lo+res, ..., hi rounded to the step's decimals."""
    if not resolution > 0:
        raise DomainError(f"resolution must be positive, got {resolution!r}")
    if hi < lo:
        raise DomainError(f"empty angular span [{lo}, {hi}]")
    n = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
    return np.round(lo + resolution * np.arange(n), max(_decimals(resolution), _decimals(lo)))


@dataclass(frozen=True, eq=False)
class PatternCut:
    """Normalized intensity along theta_s in the steering plane phi_s."""

    phi_s: float
    angles: np.ndarray
    intensity: np.ndarray
    resolution: float
    norm: float = 1.0

    def __post_init__(self):
        if self.angles.shape != self.intensity.shape:
            raise DomainError("angles and intensity must have the same length")

    def __len__(self):
        return self.angles.size

    def scaled(self, c):
        return PatternCut(self.phi_s, self.angles, self.intensity * c, self.resolution, self.norm)


def compute_cut(grid, element=None, phi_s=0.0, resolution=0.01, span=(-90.0, 90.0)):
    element = element or ElementPattern.dipole_z()
    angles = sample_angles(span[0], span[1], resolution)
    x, y, z = steering_to_cosines(angles, phi_s)
    if phi_s == 0.0:
        z = np.zeros_like(x)
    elif phi_s == 90.0:
        x = np.zeros_like(z)
    I = intensity_cosines(grid, element, x, y, z)
    return PatternCut(float(phi_s), angles, I, float(resolution), normalization(grid))


@dataclass(frozen=True, eq=False)
class Pattern3D:
    """Forward-hemisphere (y >= 0) intensity on an array-frame (theta, phi) grid.

    theta is the polar angle from z, phi the azimuth from x; both in degrees,
    with phi spanning [0, 180] so that y = sin(theta) sin(phi) >= 0.
    """

    theta: np.ndarray
    phi: np.ndarray
    intensity: np.ndarray  # shape (theta.size, phi.size)
    theta_resolution: float
    phi_resolution: float
    norm: float = 1.0

    def cosines(self):
        t = np.radians(self.theta)[:, None]
        f = np.radians(self.phi)[None, :]
        return np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t) * np.ones_like(f)

    def peak(self):
        """(theta, phi, intensity) at the global maximum."""
        i, j = np.unravel_index(np.argmax(self.intensity), self.intensity.shape)
        return float(self.theta[i]), float(self.phi[j]), float(self.intensity[i, j])

    def projections(self):
        """Beam surface r = intensity projected on the xy, xz and yz planes."""
        x, y, z = self.cosines()
        r = self.intensity
        X, Y, Z = (r * x).ravel(), (r * y).ravel(), (r * z).ravel()
        return {
            "xy": np.column_stack([X, Y]),
            "xz": np.column_stack([X, Z]),
            "yz": np.column_stack([Y, Z]),
        }


def compute_3d(grid, element=None, theta_resolution=1.0, phi_resolution=1.0):
    element = element or ElementPattern.dipole_z()
    theta = sample_angles(0.0, 180.0, theta_resolution)
    phi = sample_angles(0.0, 180.0, phi_resolution)
    t = np.radians(theta)[:, None]
    f = np.radians(phi)[None, :]
    x = np.sin(t) * np.cos(f)
    y = np.sin(t) * np.sin(f)
    z = np.broadcast_to(np.cos(t), x.shape)
    I = intensity_cosines(grid, element, x, y, z)
    return Pattern3D(theta, phi, I, float(theta_resolution), float(phi_resolution),
                     normalization(grid))


def steering_to_array_angles(theta_s, phi_s):
    """Array-frame (theta, phi) in degrees of a steering-frame direction."""
    x, y, z = steering_to_cosines(theta_s, phi_s)
    return float(np.degrees(np.arccos(np.clip(z, -1, 1)))), float(np.degrees(np.arctan2(y, x)))
