"""Torsion-twisted parallel transport of vector pairs along curves.

Along a curve x(s) with holomorphic velocity v = dx/ds the pair (ξ, η) solves

    dξ^p/ds = -Γ^p_{ij} v^i ξ^j + T^p_{ij} v^i ξ^j
    dη^p/ds = -Γ^p_{ij} v^i η^j - g^{p s̄} conj(T_{i s j̄}) conj(v^i) η^j

so that g(ξ, η̄) is constant. Dropping the torsion term of either equation gives
plain Chern transport of that vector. The metric is a single time slice.
"""
import csv
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import DegenerateMetricError, DomainError, PreconditionError, StructuralError, TransportError
from .expressions import Constant, Cos, Exp, Expression, Sin, z
from .geometry import DEGENERACY_FLOOR, compute_connection, compute_frame
from .jets import get_space
from .metrics import MetricField
from .positivity import ZERO_TOLERANCE, griffiths_value, is_zero_pair

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 512

_parameter = z(0)


@dataclass(frozen=True)
class Curve(object):
    """Closed-form path s -> x(s), one expression per coordinate in the real
    parameter s (written as the coordinate z1 of a one-dimensional chart)."""
    name: str
    components: Tuple[Expression, ...]
    start: float = 0.0
    end: float = 1.0

    @property
    def n(self) -> int:
        return len(self.components)

    def point(self, s: float) -> np.ndarray:
        at = np.array([s], dtype=complex)
        return np.array([c.evaluate(at) for c in self.components], dtype=complex)

    def velocity(self, s: float) -> np.ndarray:
        """dx/ds; for a real parameter the derivative is ∂_s + ∂_s̄."""
        space = get_space(1, 1)
        cache = {}
        jets = [c.jet(space, [s], cache) for c in self.components]
        return np.array([jet.coeffs[1] + jet.coeffs[2] for jet in jets], dtype=complex)


def _phase(frequency: float) -> Expression:
    return Exp(Constant(2j * np.pi * frequency) * _parameter)


def line(start: Sequence[complex], end: Sequence[complex]) -> Curve:
    start, end = np.asarray(start, dtype=complex), np.asarray(end, dtype=complex)
    return Curve('line', tuple(Constant(a) + Constant(b - a) * _parameter for a, b in zip(start, end)))


def circle(center: Sequence[complex], radius: float, coordinate: int = 0, turns: int = 1) -> Curve:
    """Circle of `radius` in one coordinate line through `center`."""
    center = np.asarray(center, dtype=complex)
    if not 0 <= coordinate < len(center):
        raise StructuralError("Coordinate {} outside dimension {}".format(coordinate, len(center)))
    components = [Constant(c) for c in center]
    components[coordinate] = Constant(center[coordinate]) + Constant(radius) * _phase(turns)
    return Curve('circle', tuple(components))


def hopf_circle(point: Sequence[complex], turns: int = 1) -> Curve:
    """The loop s -> e^{2πi s} p through p."""
    return Curve('hopf_circle', tuple(Constant(p) * _phase(turns) for p in np.asarray(point, dtype=complex)))


def lissajous(center: Sequence[complex], amplitudes: Sequence[float], frequencies: Sequence[Tuple[int, int]]
              ) -> Curve:
    """x_k(s) = c_k + A_k (cos 2π a_k s + i sin 2π b_k s); closed for integer
    frequencies."""
    components = []
    for c, amplitude, (a, b) in zip(np.asarray(center, dtype=complex), amplitudes, frequencies):
        wave = Cos(Constant(2 * np.pi * a) * _parameter) + Constant(1j) * Sin(Constant(2 * np.pi * b) * _parameter)
        components.append(Constant(c) + Constant(amplitude) * wave)
    return Curve('lissajous', tuple(components))


CURVES = {'line': line, 'circle': circle, 'hopf_circle': hopf_circle, 'lissajous': lissajous}


def get_curve(name: str, **params) -> Curve:
    if name not in CURVES:
        raise StructuralError("Choose from one of the curves: {}".format(', '.join(CURVES)))
    return CURVES[name](**params)


@dataclass(frozen=True)
class TransportState(object):
    s: float
    x: np.ndarray
    xi: np.ndarray
    eta: np.ndarray


@dataclass
class Trajectory(object):
    curve: Curve
    twisted_xi: bool
    twisted_eta: bool
    states: List[TransportState] = field(default_factory=list)
    pairings: List[complex] = field(default_factory=list)
    griffiths: List[float] = field(default_factory=list)

    @property
    def endpoint(self) -> TransportState:
        return self.states[-1]


def pairing(g: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> complex:
    """g(ξ, η̄) = g_{a b̄} ξ^a conj(η^b)"""
    return complex(np.einsum('ab,a,b->', g, xi, np.conj(eta)))


def transport_rhs(m: MetricField, x: np.ndarray, v: np.ndarray, xi: np.ndarray, eta: np.ndarray,
                  twisted_xi: bool = True, twisted_eta: bool = True, floor: float = DEGENERACY_FLOOR):
    f = compute_connection(m, x, floor)
    d_xi = -np.einsum('pij,i,j->p', f.gamma, v, xi)
    d_eta = -np.einsum('pij,i,j->p', f.gamma, v, eta)
    if twisted_xi:
        d_xi = d_xi + np.einsum('pij,i,j->p', f.torsion_up, v, xi)
    if twisted_eta:
        d_eta = d_eta - np.einsum('ps,isj,i,j->p', f.g_inv, np.conj(f.torsion_low), np.conj(v), eta)
    return d_xi, d_eta, f.g


def transport_pair(m: MetricField, curve: Curve, init: Tuple[Sequence[complex], Sequence[complex]],
                   steps: int = DEFAULT_STEPS, twisted_xi: bool = True, twisted_eta: bool = True,
                   with_curvature: bool = False, floor: float = DEGENERACY_FLOOR) -> Trajectory:
    """RK4 transport of (ξ, η) along `curve`, sampled after every step.

    :param twisted_xi: move ξ by the torsion-twisted connection, else by Chern
    :param twisted_eta: likewise for η
    :param with_curvature: also record Ω(ξ, ξ̄, η, η̄) along the curve
    :raises TransportError: if the metric fails along the curve; the error
        carries the trajectory up to the failure
    """
    if curve.n != m.n:
        raise StructuralError("Curve in dimension {} for a metric of dimension {}".format(curve.n, m.n))
    if steps < 1:
        raise StructuralError("Transport needs at least one step")
    xi = np.asarray(init[0], dtype=complex)
    eta = np.asarray(init[1], dtype=complex)
    trajectory = Trajectory(curve, twisted_xi, twisted_eta)
    h = (curve.end - curve.start) / steps

    def rhs(s, xi_s, eta_s):
        return transport_rhs(m, curve.point(s), curve.velocity(s), xi_s, eta_s, twisted_xi, twisted_eta, floor)

    def sample(s, xi_s, eta_s, g):
        x = curve.point(s)
        trajectory.states.append(TransportState(s, x, xi_s, eta_s))
        trajectory.pairings.append(pairing(g, xi_s, eta_s))
        if with_curvature:
            omega = compute_frame(m, x, 0, floor).omega
            trajectory.griffiths.append(griffiths_value(omega, xi_s, eta_s))

    s = curve.start
    try:
        k1 = rhs(s, xi, eta)
        sample(s, xi, eta, k1[2])
        for step in range(steps):
            k2 = rhs(s + h / 2, xi + h / 2 * k1[0], eta + h / 2 * k1[1])
            k3 = rhs(s + h / 2, xi + h / 2 * k2[0], eta + h / 2 * k2[1])
            k4 = rhs(s + h, xi + h * k3[0], eta + h * k3[1])
            xi = xi + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            eta = eta + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            s = curve.start + (step + 1) * h
            if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(eta))):
                raise TransportError("Non-finite transported pair at s={:.6g}".format(s), trajectory)
            k1 = rhs(s, xi, eta)
            sample(s, xi, eta, k1[2])
    except (DegenerateMetricError, DomainError) as error:
        raise TransportError("Transport failed at s={:.6g}: {}".format(s, error), trajectory)
    logger.debug("Transported along %s in %d steps", curve.name, steps)
    return trajectory


def pairing_invariance_check(trajectory: Trajectory) -> float:
    """max_s |g(ξ(s), η̄(s)) - g(ξ0, η̄0)|"""
    initial = trajectory.pairings[0]
    return float(max(abs(p - initial) for p in trajectory.pairings))


def zero_set_invariance_check(m: MetricField, curve: Curve, zero_pair: Tuple[Sequence[complex], Sequence[complex]],
                              steps: int = DEFAULT_STEPS, twisted: bool = True, tolerance: float = ZERO_TOLERANCE,
                              floor: float = DEGENERACY_FLOOR) -> float:
    """Largest |Ω(ξ, ξ̄, η, η̄)| along the transport of a zero pair.

    :param twisted: torsion-twisted transport of both vectors, else plain Chern
    :raises PreconditionError: if the pair is not a zero of Ω at the curve start
    """
    xi, eta = (np.asarray(v, dtype=complex) for v in zero_pair)
    omega = compute_frame(m, curve.point(curve.start), 0, floor).omega
    if not is_zero_pair(omega, xi, eta, tolerance):
        raise PreconditionError("Pair is not a zero of the curvature at the curve start (value {:.3e})"
                                .format(griffiths_value(omega, xi, eta)))
    trajectory = transport_pair(m, curve, (xi, eta), steps, twisted, twisted, with_curvature=True, floor=floor)
    return float(max(abs(value) for value in trajectory.griffiths))


def endpoint_convergence_ratio(m: MetricField, curve: Curve, init, steps: int = 64, **kwargs) -> float:
    """Endpoint error ratio at `steps` and 2 `steps` against 4 `steps`; about
    16 for RK4."""
    ends = [transport_pair(m, curve, init, steps * 2 ** k, **kwargs).endpoint for k in range(3)]

    def error(state):
        return np.linalg.norm(np.concatenate([state.xi - ends[2].xi, state.eta - ends[2].eta]))

    return float(error(ends[0]) / error(ends[1]))


def trajectory_rows(trajectory: Trajectory) -> Tuple[List[str], List[List[str]]]:
    n = trajectory.curve.n
    header = ['s']
    for name in ('x', 'xi', 'eta'):
        for k in range(n):
            header += ['{}{}_re'.format(name, k + 1), '{}{}_im'.format(name, k + 1)]
    header += ['pairing_re', 'pairing_im', 'griffiths']
    rows = []
    for k, state in enumerate(trajectory.states):
        values = [state.s]
        for vector in (state.x, state.xi, state.eta):
            for entry in vector:
                values += [entry.real, entry.imag]
        values += [trajectory.pairings[k].real, trajectory.pairings[k].imag]
        values.append(trajectory.griffiths[k] if k < len(trajectory.griffiths) else float('nan'))
        rows.append(['%.17g' % value for value in values])
    return header, rows


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    header, rows = trajectory_rows(trajectory)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
