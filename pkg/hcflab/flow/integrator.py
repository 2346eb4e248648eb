"""RK4 time stepping of the flow with step halving and monitors."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from ..curvature_ops import evolution_rhs, metric_product
from ..exceptions import DegenerateMetricError, FlowBlowupError, StructuralError
from ..geometry import (DEGENERACY_FLOOR, bianchi_residuals, compute_frame, compute_frame_jets, curvature_velocity,
                        flow_rhs_jet, torsion_norm)
from ..metrics import JetField, MetricField
from ..positivity import griffiths_value, min_griffiths
from ..utils.functional_utils import add_arrays, linear_combination, scale_by, subtract_arrays
from ..utils.model_utils import Backend
from .ansatz import get_family, state_field
from .grid import GridMetricField, grid_curvature, grid_rhs, hermitize, lattice_points
from .state import FlowMonitorRecord, FlowState

logger = logging.getLogger(__name__)

DROP_FRACTION = 0.5
MAX_HALVINGS = 20
TIME_EPS = 1e-12


def min_metric_eigenvalue(state: FlowState) -> float:
    if state.backend == Backend.GRID:
        return float(np.min(np.linalg.eigvalsh(hermitize(state.samples))))
    return get_family(state.family).min_metric_eigenvalue(state.coefficients, state.n)


def state_metric(state: FlowState) -> MetricField:
    if state.backend == Backend.GRID:
        return GridMetricField(state.samples)
    return state_field(state)


def evaluate_rhs(state: FlowState, variant: str = 'hcf', floor: float = DEGENERACY_FLOOR) -> List[np.ndarray]:
    """Time derivative of the state values."""
    if state.backend == Backend.GRID:
        return [grid_rhs(state.samples, variant)]
    return [get_family(state.family).velocity(state.coefficients, state.n, variant, floor)]


def _admissible(state: FlowState, floor: float, reference: FlowState) -> FlowState:
    values = state.values()[0]
    if not np.all(np.isfinite(values)):
        raise FlowBlowupError("Non-finite metric at t={:.6g}".format(state.t), reference)
    smallest = min_metric_eigenvalue(state)
    if smallest <= floor:
        raise FlowBlowupError("Metric minimum eigenvalue {:.3e} below floor at t={:.6g}".format(smallest, state.t),
                              reference)
    return state


def _rk4_step(state: FlowState, dt: float, variant: str = 'hcf', floor: float = DEGENERACY_FLOOR) -> FlowState:
    """One classical RK4 step of signed size dt.

    :raises FlowBlowupError: if a stage leaves the admissible metrics; the
        error carries `state` as last valid state
    """
    values = state.values()

    def rhs(stage: FlowState):
        try:
            return evaluate_rhs(stage, variant, floor)
        except DegenerateMetricError as error:
            raise FlowBlowupError(str(error), state)

    k1 = rhs(state)
    stage = _admissible(state.with_values(state.t + dt / 2, add_arrays(values, scale_by(k1, dt / 2))), floor, state)
    k2 = rhs(stage)
    stage = _admissible(state.with_values(state.t + dt / 2, add_arrays(values, scale_by(k2, dt / 2))), floor, state)
    k3 = rhs(stage)
    stage = _admissible(state.with_values(state.t + dt, add_arrays(values, scale_by(k3, dt))), floor, state)
    k4 = rhs(stage)
    update = linear_combination([1.0, dt / 6, dt / 3, dt / 3, dt / 6], [values, k1, k2, k3, k4])
    return _admissible(state.with_values(state.t + dt, update), floor, state)


def flow_step(state: FlowState, dt: float, variant: str = 'hcf', floor: float = DEGENERACY_FLOOR) -> FlowState:
    """Advance a state by one RK4 step of size dt > 0."""
    if not dt > 0:
        raise StructuralError("Time step must be positive, got {}".format(dt))
    return _rk4_step(state, dt, variant, floor)


class FlowMonitor(object):
    """Computes monitor records of flow states.

    Grid states are monitored on `sample_count` lattice points drawn once per
    lattice shape; ansatz states on their anchor.
    """

    def __init__(self, sample_count: int = 8, method: str = 'alternating', restarts: int = 8,
                 resolution: int = 32, seed: int = 0, floor: float = DEGENERACY_FLOOR):
        self.sample_count = sample_count
        self.method = method
        self.restarts = restarts
        self.resolution = resolution
        self.seed = seed
        self.floor = floor
        self._indices = {}

    def points(self, state: FlowState) -> List[np.ndarray]:
        if state.backend == Backend.ANSATZ:
            return [get_family(state.family).anchor(state.n)]
        dims = state.dims
        if dims not in self._indices:
            rng = np.random.default_rng(self.seed)
            total = int(np.prod(dims))
            self._indices[dims] = rng.choice(total, size=min(self.sample_count, total), replace=False)
        flat = lattice_points(dims).reshape(-1, state.n)
        return [flat[k] for k in self._indices[dims]]

    def record(self, state: FlowState, step_accepted: bool = True) -> FlowMonitorRecord:
        metric = state_metric(state)
        rng = np.random.default_rng(self.seed)
        griffiths, bianchi, torsion = np.inf, 0.0, 0.0
        for x in self.points(state):
            geometry = compute_frame(metric, x, 1, self.floor)
            report = min_griffiths(geometry.omega, geometry.g, self.method, self.restarts, self.resolution, rng=rng)
            griffiths = min(griffiths, report.min_value)
            bianchi = max(bianchi, max(bianchi_residuals(geometry).values()))
            torsion = max(torsion, torsion_norm(geometry))
        return FlowMonitorRecord(state.t, griffiths, bianchi, min_metric_eigenvalue(state), torsion, step_accepted)


@dataclass
class FlowRun(object):
    records: List[FlowMonitorRecord]
    snapshots: List[FlowState]
    final_state: FlowState
    steps: int = 0
    halvings: int = 0
    error: Optional[FlowBlowupError] = None

    @property
    def halted(self) -> bool:
        return self.error is not None


def integrate(state: FlowState, dt: float, t_end: float, variant: str = 'hcf', cadence: int = 1,
              monitor: Optional[FlowMonitor] = None, floor: float = DEGENERACY_FLOOR, progress: bool = False
              ) -> FlowRun:
    """Integrate from state.t to t_end, recording every `cadence` nominal steps.

    A step that lowers the minimum metric eigenvalue by more than half, or
    leaves the admissible metrics, is retried at half the size; the reduced size
    is kept afterwards. Records after such a retry carry step_accepted=False.
    Below dt / 2^20 the run halts and returns what it has, with `error` set.
    """
    if not dt > 0:
        raise StructuralError("Time step must be positive, got {}".format(dt))
    if t_end < state.t:
        raise StructuralError("End time {} precedes the start time {}".format(t_end, state.t))
    if cadence < 1:
        raise StructuralError("Monitor cadence must be at least 1")
    monitor = FlowMonitor() if monitor is None else monitor
    _admissible(state, floor, state)
    start = state.t
    interval = cadence * dt
    records, snapshots = [monitor.record(state)], [state]
    run = FlowRun(records, snapshots, state)
    size, clean = dt, True
    next_record = start + interval
    with tqdm(total=t_end - start, disable=not progress, unit='t') as bar:
        while state.t < t_end - TIME_EPS:
            target = min(next_record, t_end)
            step = min(size, target - state.t)
            try:
                candidate = _rk4_step(state, step, variant, floor)
                if min_metric_eigenvalue(candidate) < DROP_FRACTION * min_metric_eigenvalue(state):
                    raise FlowBlowupError("Metric eigenvalue drops by more than half", state)
            except FlowBlowupError as error:
                size /= 2
                run.halvings += 1
                clean = False
                logger.info("Halving time step to %.3e at t=%.6g: %s", size, state.t, error)
                if size < dt / 2 ** MAX_HALVINGS:
                    logger.warning("Flow halted at t=%.6g: %s", state.t, error)
                    run.error = FlowBlowupError(str(error), state)
                    break
                continue
            bar.update(candidate.t - state.t)
            state = candidate
            run.steps += 1
            if state.t >= target - TIME_EPS:
                records.append(monitor.record(state, clean))
                snapshots.append(state)
                clean = True
                next_record += interval
    run.final_state = state
    logger.info("Flow reached t=%.6g after %d steps (%d halvings)", state.t, run.steps, run.halvings)
    return run


def solution_error(run_coarse: FlowRun, run_fine: FlowRun) -> float:
    return float(np.max(np.abs(subtract_arrays(run_coarse.final_state.values(), run_fine.final_state.values())[0])))


def convergence_ratio(state: FlowState, dt: float, t_end: float, variant: str = 'hcf') -> float:
    """Error ratio of runs at dt and dt/2 against dt/4; about 16 for RK4."""
    monitor = _NullMonitor()
    runs = [integrate(state, dt / 2 ** k, t_end, variant, cadence=2 ** 30, monitor=monitor) for k in range(3)]
    return solution_error(runs[0], runs[2]) / solution_error(runs[1], runs[2])


class _NullMonitor(FlowMonitor):
    def record(self, state, step_accepted=True):
        return FlowMonitorRecord(state.t, np.nan, np.nan, min_metric_eigenvalue(state), np.nan, step_accepted)


@dataclass
class ConsistencyReport(object):
    """Finite-difference check of the curvature evolution formula at a point."""
    dt: float
    residual: float
    scale: float
    velocity_residual: float
    pairs: int = 0
    values: List[float] = field(default_factory=list)

    @property
    def relative_residual(self) -> float:
        return self.residual / max(self.scale, 1e-300)


def _random_pairs(n: int, count: int, rng: np.random.Generator):
    for _ in range(count):
        xi = rng.normal(size=n) + 1j * rng.normal(size=n)
        eta = rng.normal(size=n) + 1j * rng.normal(size=n)
        yield xi / np.linalg.norm(xi), eta / np.linalg.norm(eta)


def _curvature_quotient(target, x, dt: float, variant: str, floor: float):
    """(central difference of Ω in time, metric field at the base time)."""
    if isinstance(target, FlowState):
        forward = _rk4_step(target, dt, variant, floor)
        backward = _rk4_step(target, -dt, variant, floor)
        plus = compute_frame(state_metric(forward), x, 0, floor).omega
        minus = compute_frame(state_metric(backward), x, 0, floor).omega
        return (plus - minus) / (2 * dt), state_metric(target)
    jets = compute_frame_jets(target, x, 2, floor)
    g = jets.g.truncate(2)
    velocity = flow_rhs_jet(jets, variant)
    plus = compute_frame(JetField(g + dt * velocity, target.chart), x, 0, floor).omega
    minus = compute_frame(JetField(g - dt * velocity, target.chart), x, 0, floor).omega
    return (plus - minus) / (2 * dt), target


def evolution_consistency_check(target, dt: float = 1e-3, x=None, pairs: int = 16, seed: int = 0,
                                floor: float = DEGENERACY_FLOOR) -> ConsistencyReport:
    """Compare Griffiths values of the time derivative of Ω under the flow with
    the closed-form evolution right-hand side.

    :param target: FlowState (stepped by RK4 in both time directions) or a
        MetricField (metric jet moved along the flow velocity)
    :param x: point; defaults to the anchor of an ansatz state
    """
    if x is None:
        if not (isinstance(target, FlowState) and target.backend == Backend.ANSATZ):
            raise StructuralError("A point is required unless the target is an ansatz state")
        x = get_family(target.family).anchor(target.n)
    x = np.asarray(x, dtype=complex)
    quotient, metric = _curvature_quotient(target, x, dt, 'hcf', floor)
    closed = evolution_rhs(metric, x)
    jets = compute_frame_jets(metric, x, 2, floor)
    linearized = curvature_velocity(jets, flow_rhs_jet(jets, 'hcf'))
    rng = np.random.default_rng(seed)
    residual, scale, velocity_residual, values = 0.0, 0.0, 0.0, []
    for xi, eta in _random_pairs(metric.n, pairs, rng):
        expected = griffiths_value(closed, xi, eta)
        residual = max(residual, abs(griffiths_value(quotient, xi, eta) - expected))
        velocity_residual = max(velocity_residual, abs(griffiths_value(linearized, xi, eta) - expected))
        scale = max(scale, abs(expected))
        values.append(expected)
    return ConsistencyReport(dt, residual, scale, velocity_residual, pairs, values)


def _barrier_samples(state: FlowState, stride: int, floor: float):
    """(g, Ω) pairs: every `stride`-th lattice point per axis of a grid state,
    the anchor orbit of an ansatz state."""
    if state.backend == Backend.GRID:
        if stride < 1:
            raise StructuralError("Lattice stride must be positive, got {}".format(stride))
        _, omega, _ = grid_curvature(state.samples)
        index = tuple(slice(None, None, stride) for _ in state.dims)
        n = state.n
        return zip(hermitize(state.samples[index]).reshape(-1, n, n), omega[index].reshape((-1,) + (n,) * 4))
    metric = state_metric(state)
    frames = [compute_frame(metric, x, 0, floor) for x in get_family(state.family).orbit(state.n)]
    return [(geometry.g, geometry.omega) for geometry in frames]


def barrier_probe(state: FlowState, eps0: float = 0.1, growth: float = 0.0, monitor: Optional[FlowMonitor] = None,
                  stride: int = 1) -> float:
    """min Griffiths of Ω + ε(t) g⊗g with ε(t) = eps0 e^{growth t}.

    Grid states are scanned on the whole lattice, or on its sub-lattice of
    every `stride`-th point per axis; ansatz states on the anchor orbit of
    their family. The monitor supplies the minimizer settings.
    """
    monitor = FlowMonitor() if monitor is None else monitor
    epsilon = eps0 * np.exp(growth * state.t)
    rng = np.random.default_rng(monitor.seed)
    smallest = np.inf
    for g, omega in _barrier_samples(state, stride, monitor.floor):
        report = min_griffiths(omega + epsilon * metric_product(g), g, monitor.method, monitor.restarts,
                               monitor.resolution, rng=rng)
        smallest = min(smallest, report.min_value)
    return float(smallest)
