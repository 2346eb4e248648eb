"""Charts, metric fields and the catalog of closed-form example metrics."""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import ConfigError, DegenerateMetricError, DomainError, StructuralError
from .expressions import (Constant, Cos, Expression, Power, Sin, real_part, imag_part, squared_norm,
                          z, zbar)
from .jets import ComplexJet, get_space

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
PD_FLOOR = 1e-8

ExpressionMatrix = List[List[Expression]]


@dataclass(frozen=True)
class Chart(object):
    """Coordinate domain of a metric field.

    kind is one of 'torus' (periodic unit lattice per coordinate), 'annulus'
    (inner < |z| < outer), 'affine' (all of C^n, sampled in the ball of radius
    `outer`) or 'product' (coordinates split between `parts`).
    """
    kind: str
    n: int
    inner: float = 0.0
    outer: float = 1.0
    parts: Tuple['Chart', ...] = ()

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=complex).reshape(-1)
        if x.shape != (self.n,) or not np.all(np.isfinite(x)):
            return False
        if self.kind == 'annulus':
            radius = np.linalg.norm(x)
            return bool(self.inner < radius < self.outer)
        if self.kind == 'product':
            offset = 0
            for part in self.parts:
                if not part.contains(x[offset:offset + part.n]):
                    return False
                offset += part.n
        return True

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """`count` points of the domain, shape (count, n)."""
        if self.kind == 'torus':
            return rng.random((count, self.n)) + 1j * rng.random((count, self.n))
        if self.kind == 'product':
            return np.concatenate([part.sample(rng, count) for part in self.parts], axis=1)
        directions = rng.normal(size=(count, self.n)) + 1j * rng.normal(size=(count, self.n))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        if self.kind == 'annulus':
            margin = 0.05 * (self.outer - self.inner)
            radii = rng.uniform(self.inner + margin, self.outer - margin, size=count)
        else:
            radii = self.outer * rng.random(count) ** (1.0 / (2 * self.n))
        return directions * radii[:, None]

    def describe(self) -> Dict[str, Any]:
        description = {'kind': self.kind, 'n': self.n}
        if self.kind == 'annulus':
            description.update(inner=self.inner, outer=self.outer)
        if self.kind == 'affine':
            description.update(sample_radius=self.outer)
        if self.kind == 'product':
            description['parts'] = [part.describe() for part in self.parts]
        return description


def torus_chart(n: int) -> Chart:
    return Chart('torus', n)


def annulus_chart(n: int, inner: float = 0.5, outer: float = 2.0) -> Chart:
    return Chart('annulus', n, inner=inner, outer=outer)


def affine_chart(n: int, radius: float = 1.0) -> Chart:
    return Chart('affine', n, outer=radius)


def product_chart(*parts: Chart) -> Chart:
    return Chart('product', sum(part.n for part in parts), parts=tuple(parts))


class MetricField(ABC):
    """A chart plus an evaluator (point, order) -> (n, n) jet of g_{i j̄}."""

    def __init__(self, n: int, chart: Chart, name: str = 'metric'):
        if chart.n != n:
            raise StructuralError("Chart of dimension {} for a metric of dimension {}".format(chart.n, n))
        self.n = n
        self.chart = chart
        self.name = name

    @abstractmethod
    def _metric_jet(self, x: np.ndarray, order: int) -> ComplexJet:
        pass

    def metric_jet(self, x, order: int) -> ComplexJet:
        x = np.asarray(x, dtype=complex).reshape(-1)
        if not self.chart.contains(x):
            raise DomainError("Point {} outside the {} chart of {}".format(x, self.chart.kind, self.name))
        return self._metric_jet(x, order)

    def metric(self, x) -> np.ndarray:
        return self.metric_jet(x, 0).value

    def __repr__(self):
        return "{}(name={!r}, n={})".format(type(self).__name__, self.name, self.n)


class ExpressionField(MetricField):
    """Metric (or perturbation) whose entries are expression trees."""

    def __init__(self, entries: ExpressionMatrix, chart: Chart, name: str = 'metric'):
        super(ExpressionField, self).__init__(len(entries), chart, name)
        if any(len(row) != self.n for row in entries):
            raise StructuralError("Metric entries must form a square matrix")
        self.entries = entries

    def _metric_jet(self, x, order):
        space = get_space(self.n, order)
        cache = {}
        coeffs = np.empty((self.n, self.n, space.size), dtype=complex)
        for i in range(self.n):
            for j in range(self.n):
                coeffs[i, j] = self.entries[i][j].jet(space, x, cache).coeffs
        return ComplexJet(space, coeffs, x)

    def evaluate(self, points) -> np.ndarray:
        """Metric matrices on an array of points, shape (..., n, n)."""
        points = np.asarray(points, dtype=complex)
        rows = [np.stack([entry.evaluate(points) for entry in row], axis=-1) for row in self.entries]
        return np.stack(rows, axis=-2)


class CombinedField(MetricField):
    """Linear combination sum_k c_k field_k of fields sharing the first chart."""

    def __init__(self, fields: Sequence[MetricField], weights: Sequence[float], name: str = 'combination'):
        super(CombinedField, self).__init__(fields[0].n, fields[0].chart, name)
        self.fields = list(fields)
        self.weights = [complex(w) for w in weights]

    def _metric_jet(self, x, order):
        result = None
        for weight, metric_field in zip(self.weights, self.fields):
            term = metric_field._metric_jet(x, order) * weight
            result = term if result is None else result + term
        return result

    def evaluate(self, points) -> np.ndarray:
        return sum(w * f.evaluate(points) for w, f in zip(self.weights, self.fields))


class HermitianField(ExpressionField):
    """Hermitian perturbation field k (no positivity requirement)."""

    @classmethod
    def constant(cls, matrix, chart: Chart, name: str = 'perturbation') -> 'HermitianField':
        matrix = np.asarray(matrix, dtype=complex)
        if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > 1e-12:
            raise StructuralError("Perturbation matrix is not Hermitian")
        entries = [[Constant(matrix[i, j]) for j in range(matrix.shape[1])] for i in range(matrix.shape[0])]
        return cls(entries, chart, name)

    @classmethod
    def scalar(cls, expression: Expression, n: int, chart: Chart, name: str = 'perturbation') -> 'HermitianField':
        """expression * identity"""
        entries = [[expression if i == j else Constant(0.0) for j in range(n)] for i in range(n)]
        return cls(entries, chart, name)


class JetField(MetricField):
    """A fixed jet exposed as a field at its own center only."""

    def __init__(self, jet: ComplexJet, chart: Chart, name: str = 'jet'):
        super(JetField, self).__init__(jet.n, chart, name)
        self.jet = jet

    def _metric_jet(self, x, order):
        if not np.allclose(x, self.jet.center, rtol=0.0, atol=1e-15):
            raise DomainError("JetField is only defined at its center {}".format(self.jet.center))
        return self.jet.truncate(order)


def hermitian_matrix(upper: Dict[Tuple[int, int], Expression], n: int, diagonal_default=1.0) -> ExpressionMatrix:
    """Square expression matrix from diagonal and upper entries; the lower
    triangle is filled with conjugates."""
    entries = [[Constant(0.0) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        entries[i][i] = upper.get((i, i), Constant(diagonal_default))
    for (i, j), expression in upper.items():
        if i < j:
            entries[i][j] = expression
            entries[j][i] = expression.conjugate()
    return entries


@dataclass
class MetricSpec(object):
    name: str
    dimension: int
    parameters: Dict[str, Any]
    entries: ExpressionMatrix
    chart: Chart
    kahler: bool
    expected_griffiths_nonneg: Optional[bool] = None
    description: str = ''

    def build(self) -> ExpressionField:
        return ExpressionField(self.entries, self.chart, self.name)

    def validate(self, rng: Optional[np.random.Generator] = None, count: int = 100, floor: float = PD_FLOOR):
        """Spot-check Hermitian positive definiteness on random domain points."""
        rng = np.random.default_rng(0) if rng is None else rng
        values = self.build().evaluate(self.chart.sample(rng, count))
        hermitian_residual = np.max(np.abs(values - np.conj(np.swapaxes(values, -1, -2))))
        if hermitian_residual > 1e-12 * max(1.0, np.max(np.abs(values))):
            raise StructuralError("Metric {} is not Hermitian (residual {:.3e})".format(self.name, hermitian_residual))
        smallest = float(np.min(np.linalg.eigvalsh(values)))
        if smallest <= floor:
            raise DegenerateMetricError("Metric {} is not positive definite (min eigenvalue {:.3e})"
                                        .format(self.name, smallest), smallest)
        return self


class CatalogEntry(ABC):
    _name = 'base'
    description = ''
    schema: Dict[str, Tuple[str, Any, str]] = {}

    @classmethod
    def get_entry(cls, name: str) -> 'CatalogEntry':
        try:
            return next(cl for cl in cls.__subclasses__() if cl._name == name)()
        except StopIteration:
            raise ConfigError("Unknown metric {}; choose from {}".format(name, ', '.join(metric_names())))

    def resolve(self, params: Optional[Dict[str, Any]]) -> Dict[str, Any]:
        params = dict(params or {})
        unknown = set(params) - set(self.schema)
        if unknown:
            raise ConfigError("Unknown parameters for {}: {}".format(self._name, sorted(unknown)))
        return {key: params.get(key, default) for key, (_, default, _) in self.schema.items()}

    @abstractmethod
    def spec(self, **params) -> MetricSpec:
        pass


def _check_dimension(n, allowed=(1, 2, 3, 4)):
    if n not in allowed:
        raise ConfigError("Dimension n={} not supported, choose from {}".format(n, allowed))


def _check_epsilon(eps, bound=0.3):
    if not abs(eps) < bound:
        raise ConfigError("Perturbation size |eps|={} must be below {}".format(abs(eps), bound))


class FlatTorus(CatalogEntry):
    _name = 'flat_torus'
    description = 'g = identity on the square torus'
    schema = {'n': ('int', 2, 'complex dimension')}

    def spec(self, n=2):
        _check_dimension(n)
        return MetricSpec(self._name, n, {'n': n}, hermitian_matrix({}, n), torus_chart(n),
                          kahler=True, expected_griffiths_nonneg=True, description=self.description)


class PerturbedTorus(CatalogEntry):
    _name = 'perturbed_torus'
    description = 'identity plus a periodic trigonometric Hermitian perturbation'
    schema = {'n': ('int', 2, 'complex dimension'),
              'eps': ('float', 0.1, 'perturbation size, |eps| < 0.3'),
              'mode': ('str', 'full', "'diagonal' or 'full' (off-diagonal terms, needs n >= 2)")}

    def spec(self, n=2, eps=0.1, mode='full'):
        _check_dimension(n)
        _check_epsilon(eps)
        if mode not in ('diagonal', 'full'):
            raise ConfigError("Choose from one of the modes: diagonal, full")
        upper = {}
        for i in range(n):
            phase = TWO_PI * (real_part((i + 1) % n) + imag_part(i))
            upper[(i, i)] = Constant(1.0) + Constant(eps) * Cos(phase)
        if mode == 'full':
            for i in range(n):
                for j in range(i + 1, n):
                    upper[(i, j)] = Constant(eps / 2) * (Cos(TWO_PI * real_part(i))
                                                         + Constant(1j) * Sin(TWO_PI * imag_part(j)))
        return MetricSpec(self._name, n, {'n': n, 'eps': eps, 'mode': mode}, hermitian_matrix(upper, n),
                          torus_chart(n), kahler=(n == 1), description=self.description)


class KahlerTorus(CatalogEntry):
    _name = 'kahler_torus'
    description = 'i∂∂̄ of |z|^2 + periodic potential; Kähler and periodic'
    schema = {'n': ('int', 2, 'complex dimension'),
              'eps': ('float', 0.1, 'potential size, |eps| < 0.3')}

    def spec(self, n=2, eps=0.1):
        _check_dimension(n)
        _check_epsilon(eps)
        upper = {}
        coupling = Cos(TWO_PI * sum((real_part(i) for i in range(n)), Constant(0.0)))
        for i in range(n):
            for j in range(i, n):
                entry = Constant(0.0)
                if i == j:
                    entry = Constant(1.0) - Constant(eps / 2) * Cos(TWO_PI * real_part(i))
                if n > 1:
                    entry = entry - Constant(eps / 2) * coupling
                upper[(i, j)] = entry
        return MetricSpec(self._name, n, {'n': n, 'eps': eps}, hermitian_matrix(upper, n), torus_chart(n),
                          kahler=True, description=self.description)


def fubini_study_entries(n: int, offset: int = 0) -> ExpressionMatrix:
    r = squared_norm(n, offset)
    denominator = Power(Constant(1.0) + r, -2)
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            numerator = zbar(i + offset) * z(j + offset) * Constant(-1.0)
            if i == j:
                numerator = (Constant(1.0) + r) + numerator
            row.append(numerator * denominator)
        entries.append(row)
    return entries


class FubiniStudyLocal(CatalogEntry):
    _name = 'fubini_study_local'
    description = 'Fubini-Study metric of CP^n in the affine chart around 0'
    schema = {'n': ('int', 1, 'complex dimension'),
              'radius': ('float', 1.0, 'sampling radius of the affine chart')}

    def spec(self, n=1, radius=1.0):
        _check_dimension(n)
        if radius <= 0:
            raise ConfigError("Sampling radius must be positive")
        return MetricSpec(self._name, n, {'n': n, 'radius': radius}, fubini_study_entries(n),
                          affine_chart(n, radius), kahler=True, expected_griffiths_nonneg=True,
                          description=self.description)


def hopf_entries(n: int, a: float, b: float) -> ExpressionMatrix:
    r = squared_norm(n)
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = Constant(b) * zbar(i) * z(j) * Power(r, -2)
            if i == j:
                entry = Constant(a) * Power(r, -1) + entry
            row.append(entry)
        entries.append(row)
    return entries


class HopfRound(CatalogEntry):
    _name = 'hopf_round'
    description = 'round metric δ/|z|^2 of the Hopf manifold on the annulus 0.5 < |z| < 2'
    schema = {'n': ('int', 2, 'complex dimension')}

    def spec(self, n=2):
        _check_dimension(n)
        return MetricSpec(self._name, n, {'n': n}, hopf_entries(n, 1.0, 0.0), annulus_chart(n),
                          kahler=(n == 1), expected_griffiths_nonneg=True, description=self.description)


class HopfFamily(CatalogEntry):
    _name = 'hopf_family'
    description = 'a δ/|z|^2 + b z̄_i z_j/|z|^4, U(n) and dilation invariant'
    schema = {'n': ('int', 2, 'complex dimension'),
              'a': ('float', 1.0, 'coefficient of δ/|z|^2, > 0'),
              'b': ('float', 0.0, 'coefficient of z̄z/|z|^4, a + b > 0')}

    def spec(self, n=2, a=1.0, b=0.0):
        _check_dimension(n)
        if a <= 0 or a + b <= 0:
            raise ConfigError("Hopf family needs a > 0 and a + b > 0, got a={}, b={}".format(a, b))
        return MetricSpec(self._name, n, {'n': n, 'a': a, 'b': b}, hopf_entries(n, a, b), annulus_chart(n),
                          kahler=(n == 1), description=self.description)


class ProductMetric(CatalogEntry):
    _name = 'product'
    description = 'block-diagonal product of two catalog metrics in separate coordinates'
    schema = {'first': ('str', 'flat_torus', 'first factor'),
              'second': ('str', 'fubini_study_local', 'second factor'),
              'first_params': ('dict', {'n': 1}, 'parameters of the first factor'),
              'second_params': ('dict', {'n': 1}, 'parameters of the second factor'),
              'scales': ('list', [1.0, 1.0], 'positive scale of each factor')}

    def spec(self, first='flat_torus', second='fubini_study_local', first_params=None, second_params=None,
             scales=(1.0, 1.0)):
        if 'product' in (first, second):
            raise ConfigError("Nested products are not supported")
        if len(scales) != 2 or min(scales) <= 0:
            raise ConfigError("Product scales must be two positive numbers")
        left = metric_spec(first, first_params if first_params is not None else {'n': 1})
        right = metric_spec(second, second_params if second_params is not None else {'n': 1})
        n = left.dimension + right.dimension
        _check_dimension(n)
        entries = [[Constant(0.0) for _ in range(n)] for _ in range(n)]
        for i in range(left.dimension):
            for j in range(left.dimension):
                entries[i][j] = Constant(scales[0]) * left.entries[i][j]
        offset = left.dimension
        for i in range(right.dimension):
            for j in range(right.dimension):
                entries[offset + i][offset + j] = Constant(scales[1]) * right.entries[i][j].shift(offset)
        nonneg = None
        if left.expected_griffiths_nonneg and right.expected_griffiths_nonneg:
            nonneg = True
        params = {'first': first, 'second': second, 'first_params': dict(left.parameters),
                  'second_params': dict(right.parameters), 'scales': list(scales)}
        return MetricSpec(self._name, n, params, entries, product_chart(left.chart, right.chart),
                          kahler=left.kahler and right.kahler, expected_griffiths_nonneg=nonneg,
                          description='{} x {}'.format(first, second))


def metric_names() -> List[str]:
    return [cl._name for cl in CatalogEntry.__subclasses__()]


def metric_spec(name: str, params: Optional[Dict[str, Any]] = None) -> MetricSpec:
    entry = CatalogEntry.get_entry(name)
    return entry.spec(**entry.resolve(params))


def metric_catalog(name: str, params: Optional[Dict[str, Any]] = None, validate: bool = True) -> ExpressionField:
    """Build a catalog metric field by name.

    :param name: catalog entry, see `list_metrics`
    :param params: entry parameters; missing ones take their defaults
    :param validate: spot-check Hermitian positive definiteness on 100 points
    :return: ExpressionField with `spec` attached
    """
    spec = metric_spec(name, params)
    if validate:
        spec.validate()
    metric_field = spec.build()
    metric_field.spec = spec
    logger.debug("Built metric %s with parameters %s", name, spec.parameters)
    return metric_field


def list_metrics() -> List[Dict[str, Any]]:
    listing = []
    for cl in CatalogEntry.__subclasses__():
        listing.append({'name': cl._name,
                        'description': cl.description,
                        'parameters': {key: {'type': kind, 'default': default, 'help': text}
                                       for key, (kind, default, text) in cl.schema.items()}})
    return listing
