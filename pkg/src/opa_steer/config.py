"""
Run configuration files.

Configs are JSON objects. Scenario parameters sit at the top level; a sweep
adds an ``axes`` object mapping parameter names to value lists. Unknown keys
are rejected. Angles are degrees throughout.

Defaults: N=201, pitch=0.5 (wavelengths), circular window plus Gaussian
taper with sigma=0.5, z-oriented dipole elements, phi_s=0, psi_max=360,
half-half compensation, no amplitude ripple, 0.01 deg cut resolution over
[-90, 90].
"""

import json
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .arraymodel import ArraySpec, SteeringSpec, steering_from_M
from .errors import ConfigError, OpaError
from .excitation import PhaseLimitSpec, Strategy, WindowSpec
from .radiation import ElementPattern

MODES = ("cut", "pattern3d", "analyze", "sweep")


class ElementTable(BaseModel):
    model_config = ConfigDict(extra="forbid")

    theta: List[float]
    phi: List[float]
    gains: List[List[float]]


class ScenarioParams(BaseModel):
    """Flat parameter set describing one scenario."""

    model_config = ConfigDict(extra="forbid")

    N: int = Field(201, ge=1)
    N_x: Optional[int] = Field(None, ge=0)
    N_z: Optional[int] = Field(None, ge=0)
    pitch: float = Field(0.5, gt=0)
    pitch_x: Optional[float] = Field(None, gt=0)
    pitch_z: Optional[float] = Field(None, gt=0)

    theta_s: Optional[float] = Field(None, ge=-90, le=90)
    M: Optional[float] = Field(None, gt=1)
    phi_s: float = Field(0.0, ge=0, lt=180)

    circular: bool = True
    sigma: Optional[float] = Field(0.5, gt=0)
    anisotropic: bool = False

    psi_max: float = Field(360.0, gt=0, le=360)
    strategy: Strategy = Strategy.HALF_HALF

    P_d: float = Field(0.01, gt=0)
    var: float = Field(0.0, ge=0)

    element: Literal["dipole_z", "isotropic", "dipole_xz", "tabulated"] = "dipole_z"
    dipole_angle: float = 0.0
    element_table: Optional[ElementTable] = None

    resolution: float = Field(0.01, gt=0)
    span: List[float] = Field(default_factory=lambda: [-90.0, 90.0])
    fov: Optional[float] = Field(None, gt=0, le=90)
    floor: float = Field(1e-8, gt=0)
    tolerance: float = Field(0.1, gt=0)
    exclusion: Optional[float] = Field(None, gt=0)

    @field_validator("N")
    @classmethod
    def _odd(cls, v):
        if v % 2 == 0:
            raise ValueError("N must be odd (array spans -N_x..N_x)")
        return v

    @field_validator("span")
    @classmethod
    def _span(cls, v):
        if len(v) != 2 or not -90 <= v[0] < v[1] <= 90:
            raise ValueError("span must be [lo, hi] with -90 <= lo < hi <= 90")
        return v

    @model_validator(mode="after")
    def _element(self):
        if self.element == "tabulated" and self.element_table is None:
            raise ValueError("element 'tabulated' needs element_table")
        return self


class RunConfig(ScenarioParams):
    mode: Literal["cut", "pattern3d", "analyze", "sweep"]
    axes: Optional[Dict[str, list]] = None
    group_by: Optional[List[str]] = None
    theta_resolution: float = Field(1.0, gt=0)
    phi_resolution: float = Field(1.0, gt=0)
    export_cut: bool = False
    export_phase_map: bool = False
    export_report: bool = True
    export_archive: bool = False
    export_projections: bool = False

    @model_validator(mode="after")
    def _mode_fields(self):
        if self.mode == "sweep":
            if not self.axes:
                raise ValueError("sweep mode needs a non-empty 'axes' object")
            unknown = set(self.axes) - set(ScenarioParams.model_fields)
            if unknown:
                raise ValueError(f"unknown sweep axis {sorted(unknown)[0]!r}")
        else:
            if self.axes is not None:
                raise ValueError(f"'axes' is only valid in sweep mode, not {self.mode!r}")
            if self.theta_s is None and self.M is None:
                raise ValueError("set theta_s or M")
        if self.theta_s is not None and self.M is not None:
            raise ValueError("set only one of theta_s and M")
        return self

    def scenario_params(self):
        """The scenario-level fields as a plain dict."""
        data = self.model_dump(mode="json")
        return {k: data[k] for k in ScenarioParams.model_fields}


def _format_loc(loc):
    return ".".join(str(p) for p in loc)


def _raise_validation(exc):
    err = exc.errors()[0]
    loc = _format_loc(err["loc"])
    msg = err["msg"]
    raise ConfigError(f"{loc}: {msg}" if loc else msg, field=loc or None) from exc


def parse_config(text, mode=None):
    """Parse and validate JSON config text into a RunConfig.

    ``mode`` (from the command line) fills in a missing ``mode`` key and must
    agree with it when both are present.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if mode is not None:
        if "mode" in data and data["mode"] != mode:
            raise ConfigError(f"config mode {data['mode']!r} conflicts with command {mode!r}",
                              field="mode")
        data = {**data, "mode": mode}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        _raise_validation(exc)


def emit_config(cfg):
    return json.dumps(cfg.model_dump(mode="json"), indent=2)


def scenario_from_params(params):
    """Validate a flat parameter dict and build a Scenario from it."""
    from .sweep import Scenario

    try:
        p = ScenarioParams.model_validate(params)
    except ValidationError as exc:
        _raise_validation(exc)
    if p.theta_s is not None and p.M is not None:
        raise ConfigError("set only one of theta_s and M", field="M")
    try:
        n_half = (p.N - 1) // 2
        pitch_x = p.pitch_x if p.pitch_x is not None else p.pitch
        pitch_z = p.pitch_z if p.pitch_z is not None else p.pitch
        array = ArraySpec(p.N_x if p.N_x is not None else n_half,
                          p.N_z if p.N_z is not None else n_half, pitch_x, pitch_z)
        if p.theta_s is not None:
            theta_s = p.theta_s
        elif p.M is not None:
            theta_s = steering_from_M(p.M, pitch_x if p.phi_s == 0 else p.pitch)
        else:
            raise ConfigError("set theta_s or M", field="theta_s")
        steering = SteeringSpec(theta_s, p.phi_s)
        if p.element == "tabulated":
            t = p.element_table
            element = ElementPattern.tabulated(t.theta, t.phi, t.gains)
        elif p.element == "dipole_xz":
            element = ElementPattern.dipole_xz(p.dipole_angle)
        else:
            element = ElementPattern(p.element)
        return Scenario(
            array=array,
            steering=steering,
            window=WindowSpec(p.circular, p.sigma, p.anisotropic),
            phase_limit=PhaseLimitSpec(p.psi_max, p.strategy),
            perturbation=(p.P_d, p.var) if p.var > 0 else None,
            element=element,
            resolution=p.resolution,
            span=tuple(p.span),
            fov=p.fov,
            floor=p.floor,
            tolerance=p.tolerance,
            exclusion=p.exclusion,
        )
    except ConfigError:
        raise
    except (OpaError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def scenario_from_config(cfg):
    return scenario_from_params(cfg.scenario_params())
