"""Finite-dimensional invariant families the flow preserves.

A family fixes an anchor point and a real basis of Hermitian matrices such that
the metric at the anchor is sum_k c_k basis_k. The flow velocity at the anchor
is projected on that basis; by invariance the anchor determines the metric
everywhere.
"""
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

import numpy as np

from ..exceptions import AnsatzEscapeError, ConfigError
from ..expressions import Constant
from ..geometry import DEGENERACY_FLOOR, compute_frame, flow_rhs_pointwise
from ..metrics import (ExpressionField, MetricField, affine_chart, annulus_chart, fubini_study_entries,
                       hopf_entries, metric_spec, product_chart, torus_chart)
from .state import FlowState

logger = logging.getLogger(__name__)

ESCAPE_TOLERANCE = 1e-8


class AnsatzFamily(ABC):
    _name = 'base'
    coefficient_names = ()

    @classmethod
    def get_family(cls, name: str) -> 'AnsatzFamily':
        try:
            return next(cl for cl in cls.__subclasses__() if cl._name == name)()
        except StopIteration:
            raise ConfigError("Unknown ansatz family {}; choose from {}".format(name, ', '.join(family_names())))

    def check_dimension(self, n: int):
        if n not in (1, 2, 3, 4):
            raise ConfigError("Dimension n={} not supported by the {} ansatz".format(n, self._name))

    @abstractmethod
    def field(self, coefficients, n: int) -> MetricField:
        pass

    @abstractmethod
    def anchor(self, n: int) -> np.ndarray:
        pass

    @abstractmethod
    def basis(self, n: int) -> List[np.ndarray]:
        pass

    def orbit(self, n: int) -> List[np.ndarray]:
        """Images of the anchor under symmetries of the family."""
        return [self.anchor(n)]

    def anchor_metric(self, coefficients, n: int) -> np.ndarray:
        return sum(c * b for c, b in zip(coefficients, self.basis(n)))

    def min_metric_eigenvalue(self, coefficients, n: int) -> float:
        return float(np.min(np.linalg.eigvalsh(self.anchor_metric(coefficients, n))))

    def project(self, velocity: np.ndarray, n: int) -> np.ndarray:
        """Real coefficient rates of a velocity at the anchor.

        :raises AnsatzEscapeError: if the velocity leaves the family
        """
        basis = self.basis(n)
        columns = np.stack([b.reshape(-1) for b in basis], axis=1)
        system = np.concatenate([columns.real, columns.imag])
        target = np.concatenate([velocity.reshape(-1).real, velocity.reshape(-1).imag])
        rates, _, _, _ = np.linalg.lstsq(system, target, rcond=None)
        residual = float(np.linalg.norm(system.dot(rates) - target))
        scale = float(np.linalg.norm(target))
        if residual > ESCAPE_TOLERANCE * max(scale, 1.0):
            raise AnsatzEscapeError("Flow velocity leaves the {} family (residual {:.3e}, scale {:.3e})"
                                    .format(self._name, residual, scale), residual)
        return rates

    def velocity(self, coefficients, n: int, variant: str = 'hcf', floor: float = DEGENERACY_FLOOR) -> np.ndarray:
        geometry = compute_frame(self.field(coefficients, n), self.anchor(n), 0, floor)
        return self.project(flow_rhs_pointwise(geometry, variant), n)

    def state(self, coefficients, n: int, t: float = 0.0) -> FlowState:
        self.check_dimension(n)
        return FlowState.ansatz(t, self._name, n, coefficients)


class HopfAnsatz(AnsatzFamily):
    """(a δ + b z̄z/|z|^2)/|z|^2, anchored at e_1."""
    _name = 'hopf'
    coefficient_names = ('a', 'b')

    def check_dimension(self, n):
        if n not in (2, 3, 4):
            raise ConfigError("The hopf ansatz needs n in 2..4, got {}".format(n))

    def field(self, coefficients, n):
        a, b = coefficients
        return ExpressionField(hopf_entries(n, float(a), float(b)), annulus_chart(n), 'hopf_ansatz')

    def anchor(self, n):
        point = np.zeros(n, dtype=complex)
        point[0] = 1.0
        return point

    def basis(self, n):
        corner = np.zeros((n, n), dtype=complex)
        corner[0, 0] = 1.0
        return [np.eye(n, dtype=complex), corner]

    def orbit(self, n):
        rotated = np.zeros(n, dtype=complex)
        rotated[-1] = 1.5 * np.exp(1j * np.pi / 3)
        mixed = np.zeros(n, dtype=complex)
        mixed[:2] = 0.8 * np.array([1.0, 1j]) / np.sqrt(2)
        return [self.anchor(n), rotated, mixed]


class FubiniStudyAnsatz(AnsatzFamily):
    """λ g_FS in the affine chart, anchored at the origin."""
    _name = 'fubini_study'
    coefficient_names = ('scale',)

    def field(self, coefficients, n):
        (scale,) = coefficients
        entries = [[Constant(float(scale)) * entry for entry in row] for row in fubini_study_entries(n)]
        return ExpressionField(entries, affine_chart(n), 'fubini_study_ansatz')

    def anchor(self, n):
        return np.zeros(n, dtype=complex)

    def basis(self, n):
        return [np.eye(n, dtype=complex)]

    def orbit(self, n):
        shifted = np.zeros(n, dtype=complex)
        shifted[0] = 0.4 * np.exp(1j * np.pi / 4)
        return [self.anchor(n), shifted, np.full(n, 0.2j)]


class FlatFubiniStudyAnsatz(AnsatzFamily):
    """α (flat torus, one dimension) x β g_FS (n - 1 dimensions)."""
    _name = 'flat_fs_product'
    coefficient_names = ('flat_scale', 'fs_scale')

    def check_dimension(self, n):
        if n not in (2, 3, 4):
            raise ConfigError("The flat_fs_product ansatz needs n in 2..4, got {}".format(n))

    def field(self, coefficients, n):
        flat, fs = coefficients
        entries = [[Constant(0.0) for _ in range(n)] for _ in range(n)]
        entries[0][0] = Constant(float(flat))
        block = fubini_study_entries(n - 1, offset=1)
        for i in range(n - 1):
            for j in range(n - 1):
                entries[i + 1][j + 1] = Constant(float(fs)) * block[i][j]
        return ExpressionField(entries, product_chart(torus_chart(1), affine_chart(n - 1)), 'flat_fs_ansatz')

    def anchor(self, n):
        return np.zeros(n, dtype=complex)

    def basis(self, n):
        flat = np.zeros((n, n), dtype=complex)
        flat[0, 0] = 1.0
        return [flat, np.eye(n, dtype=complex) - flat]

    def orbit(self, n):
        shifted = np.zeros(n, dtype=complex)
        shifted[0] = 0.3 + 0.6j
        shifted[1] = -0.4j
        return [self.anchor(n), shifted]


def family_names() -> List[str]:
    return [cl._name for cl in AnsatzFamily.__subclasses__()]


def get_family(name: str) -> AnsatzFamily:
    return AnsatzFamily.get_family(name)


def initial_state(metric: str, params: Optional[Dict[str, Any]] = None) -> FlowState:
    """Ansatz state matching a catalog metric.

    :raises ConfigError: if the metric lies in no registered family
    """
    spec = metric_spec(metric, params)
    p = spec.parameters
    if metric == 'hopf_round':
        return HopfAnsatz().state([1.0, 0.0], spec.dimension)
    if metric == 'hopf_family':
        return HopfAnsatz().state([p['a'], p['b']], spec.dimension)
    if metric == 'fubini_study_local':
        return FubiniStudyAnsatz().state([1.0], spec.dimension)
    if (metric == 'product' and p['first'] == 'flat_torus' and p['second'] == 'fubini_study_local'
            and p['first_params'].get('n') == 1):
        return FlatFubiniStudyAnsatz().state(list(p['scales']), spec.dimension)
    raise ConfigError("Metric {} lies in none of the ansatz families {}".format(metric, ', '.join(family_names())))


def state_field(state: FlowState) -> MetricField:
    return get_family(state.family).field(state.coefficients, state.n)
