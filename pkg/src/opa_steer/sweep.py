"""
Scenario pipeline and parameter sweeps.

A scenario is one fully specified simulation: grid synthesis, a pattern cut
and its lobe report. Sweeps expand a Cartesian product of scenario
parameters and evaluate the scenarios independently, optionally in worker
processes. Each scenario is evaluated start to finish by one worker, so the
result does not depend on how many workers there are.
"""

import functools
import itertools
import math
import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .arraymodel import ArraySpec, SteeringSpec, long_period_info
from .errors import (
    ConfigError,
    DegenerateSteeringError,
    InfeasiblePerturbationError,
    MissteerError,
)
from .excitation import (
    PhaseLimitSpec,
    WindowSpec,
    apply_amplitude_perturbation,
    apply_phase_limit,
    apply_windows,
    ideal_phase_profile,
    solve_perturbation_params,
)
from .lobes import (
    DEFAULT_FLOOR,
    DEFAULT_TOLERANCE,
    average_spr,
    default_exclusion,
    sidelobe_to_peak,
)
from .radiation import ElementKind, ElementPattern, compute_cut

STATUS_OK = "ok"
STATUS_MISSTEER = "missteer"
STATUS_INFEASIBLE = "infeasible"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class Scenario:
    array: ArraySpec
    steering: SteeringSpec
    window: WindowSpec = WindowSpec(True, 0.5)
    phase_limit: PhaseLimitSpec = PhaseLimitSpec()
    perturbation: Optional[tuple] = None  # (P_d, target_var)
    element: ElementPattern = field(default_factory=ElementPattern.dipole_z)
    resolution: float = 0.01
    span: tuple = (-90.0, 90.0)
    fov: Optional[float] = None
    floor: float = DEFAULT_FLOOR
    tolerance: float = DEFAULT_TOLERANCE
    exclusion: Optional[float] = None
    id: str = "s0"
    axes: tuple = ()  # ((name, value), ...) as expanded
    keep_cut: bool = False

    @property
    def pitch(self):
        return self.steering.pitch_along(self.array)


@dataclass
class SweepResult:
    id: str
    axes: tuple
    status: str
    report: object = None
    elapsed: float = 0.0
    message: str = ""
    cut: object = None
    peak_angle: Optional[float] = None

    @property
    def spr(self):
        return self.report.spr if self.report is not None else None


def build_grid(scn):
    """Final excitation grid of a scenario."""
    grid = ideal_phase_profile(scn.array, scn.steering)
    if scn.perturbation is not None:
        P_d, var = scn.perturbation
        if var > 0:
            grid = apply_amplitude_perturbation(grid, solve_perturbation_params(P_d, var))
    grid = apply_phase_limit(grid, scn.phase_limit)
    return apply_windows(grid, scn.window)


def _element_key(element):
    if element.kind is ElementKind.TABULATED:
        return None
    return (element.kind.value, element.orientation)


@functools.lru_cache(maxsize=256)
def _cached_exclusion(array, steering, window, element_key, resolution, span):
    element = ElementPattern(ElementKind(element_key[0]), orientation=element_key[1])
    return _reference_exclusion(array, steering, window, element, resolution, span)


def _reference_exclusion(array, steering, window, element, resolution, span):
    ref = apply_windows(ideal_phase_profile(array, steering), window)
    cut = compute_cut(ref, element, steering.phi_s, resolution, span)
    return default_exclusion(cut)


def reference_exclusion(scn):
    """Main-lobe window halfwidth from the unperturbed, unlimited reference beam."""
    if scn.exclusion is not None:
        return scn.exclusion
    key = _element_key(scn.element)
    if key is None:
        return _reference_exclusion(scn.array, scn.steering, scn.window, scn.element,
                                    scn.resolution, tuple(scn.span))
    return _cached_exclusion(scn.array, scn.steering, scn.window, key,
                             scn.resolution, tuple(scn.span))


def _alpha(scn):
    try:
        return long_period_info(scn.steering, scn.pitch).alpha
    except DegenerateSteeringError:
        return None


def analyze(scn):
    """Evaluate a scenario, returning (grid, cut, report). Raises on failure."""
    grid = build_grid(scn)
    cut = compute_cut(grid, scn.element, scn.steering.phi_s, scn.resolution, tuple(scn.span))
    report = sidelobe_to_peak(cut, scn.steering, reference_exclusion(scn), scn.floor,
                              pitch=scn.pitch, alpha=_alpha(scn), tolerance=scn.tolerance,
                              fov=scn.fov)
    return grid, cut, report


def evaluate_scenario(scn):
    """Run one scenario and capture its outcome as a SweepResult."""
    t0 = time.perf_counter()
    res = SweepResult(scn.id, scn.axes, STATUS_OK)
    try:
        _, cut, report = analyze(scn)
        res.report = report
        if scn.keep_cut:
            res.cut = cut
    except MissteerError as exc:
        res.status, res.message, res.peak_angle = STATUS_MISSTEER, str(exc), exc.peak_angle
    except InfeasiblePerturbationError as exc:
        res.status, res.message = STATUS_INFEASIBLE, str(exc)
    except Exception as exc:  # isolate unexpected failures to their scenario
        res.status, res.message = STATUS_FAILED, f"{type(exc).__name__}: {exc}"
    res.elapsed = time.perf_counter() - t0
    return res


def expand_plan(axes, base=None, build=None):
    """Cartesian product of ``axes`` over a base parameter set.

    Axes are iterated in sorted name order with the last name varying
    fastest, so ids are stable for a given plan. ``build`` turns a flat
    parameter dict into a Scenario (defaults to the config-file builder).
    """
    if not axes:
        raise ConfigError("sweep plan needs at least one axis", field="axes")
    if build is None:
        from .config import scenario_from_params as build
    names = sorted(axes)
    for name in names:
        values = axes[name]
        if not isinstance(values, (list, tuple)) or len(values) == 0:
            raise ConfigError(f"axis {name!r} needs a non-empty list of values", field=f"axes.{name}")
    combos = list(itertools.product(*(axes[n] for n in names)))
    width = max(4, len(str(len(combos) - 1)))
    plan = []
    for k, combo in enumerate(combos):
        params = dict(base or {})
        params.update(zip(names, combo))
        try:
            scn = build(params)
        except ConfigError as exc:
            bad = exc.field if exc.field in names else None
            where = f"axis {bad!r}" if bad else "plan"
            raise ConfigError(f"{where}: {exc}", field=f"axes.{bad}" if bad else exc.field) from exc
        plan.append(_with_id(scn, f"s{k:0{width}d}", tuple(zip(names, combo))))
    return plan


def _with_id(scn, sid, axes):
    from dataclasses import replace

    return replace(scn, id=sid, axes=axes)


def run_sweep(plan, worker_count=1):
    """Evaluate every scenario; results come back in plan order."""
    if worker_count < 1:
        raise ValueError(f"worker_count must be >= 1, got {worker_count!r}")
    plan = list(plan)
    if not plan:
        return []
    if worker_count == 1 or len(plan) == 1:
        return [evaluate_scenario(s) for s in plan]
    chunk = max(1, len(plan) // (4 * worker_count))
    with ProcessPoolExecutor(max_workers=worker_count) as pool:
        return list(pool.map(evaluate_scenario, plan, chunksize=chunk))


@dataclass(frozen=True)
class AggregateRow:
    key: tuple
    avg_spr: float
    count: int
    excluded: int


def aggregate_avg_spr(results, group_by):
    """Mean spr per group of axis values, in first-appearance order.

    Scenarios that did not produce a report are excluded from the mean and
    counted. A group without any report raises ValueError.
    """
    results = list(results)
    if not results:
        raise ValueError("cannot aggregate an empty result set")
    groups = OrderedDict()
    for r in results:
        axes = dict(r.axes)
        missing = [g for g in group_by if g not in axes]
        if missing:
            raise ValueError(f"result {r.id} has no axis {missing[0]!r}")
        key = tuple(axes[g] for g in group_by)
        groups.setdefault(key, []).append(r)
    rows = []
    for key, members in groups.items():
        try:
            avg = average_spr([m.report if m.report is not None else RuntimeError(m.status)
                               for m in members])
        except ValueError as exc:
            raise ValueError(f"group {dict(zip(group_by, key))} has no successful scenario") from exc
        rows.append(AggregateRow(key, avg.mean, avg.count, avg.excluded))
    return rows


def average_spr_for(scenarios, worker_count=1):
    """Average spr over scenarios evaluated with :func:`run_sweep`."""
    results = run_sweep(scenarios, worker_count)
    return average_spr([r.report if r.report is not None else RuntimeError(r.status)
                        for r in results])


def combine_rows(rows):
    """Pool several aggregate rows of one group into a single weighted row."""
    count = sum(r.count for r in rows)
    avg = math.fsum(r.avg_spr * r.count for r in rows) / count
    return AggregateRow(rows[0].key, avg, count, sum(r.excluded for r in rows))
