"""Spectral grid backend: metrics sampled on a periodic lattice.

Lattice axes are the real coordinates in the order (x1, y1, x2, y2, ...), each
covering [0, 1) with a power-of-two number of points. Wirtinger derivatives are
Fourier multipliers; the derivative in z_k drops the Nyquist modes of the x_k and
y_k axes.

The Chern-Ricci part of the velocity is ∂∂̄ log det g taken spectrally, so every
velocity the lattice produces for Kähler samples is Kähler mode by mode and the
Kähler condition survives the RK4 stages at any resolution.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import StructuralError
from ..geometry import curvature, first_ricci, inverse_metric, lowered_torsion, second_ricci, torsion_quadratic
from ..jets import ComplexJet, get_space
from ..metrics import MetricField, torus_chart

logger = logging.getLogger(__name__)

MIN_POINTS = 4
DEFAULT_POINTS = {1: 32, 2: 16}


def validate_dims(dims: Sequence[int], n: int = None) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(dims) == 0 or len(dims) % 2:
        raise StructuralError("Grid needs two lattice axes per complex dimension, got {}".format(dims))
    if n is not None and len(dims) != 2 * n:
        raise StructuralError("Grid {} does not match complex dimension {}".format(dims, n))
    for d in dims:
        if d < MIN_POINTS or d & (d - 1):
            raise StructuralError("Grid sizes must be powers of two >= {}, got {}".format(MIN_POINTS, dims))
    return dims


def _axes(dims) -> Tuple[int, ...]:
    return tuple(range(len(dims)))


def lattice_points(dims: Sequence[int]) -> np.ndarray:
    """Lattice points z_k = x_k + i y_k, shape dims + (n,)."""
    dims = validate_dims(dims)
    grids = np.meshgrid(*[np.arange(d) / d for d in dims], indexing='ij')
    return np.stack([grids[2 * k] + 1j * grids[2 * k + 1] for k in range(len(dims) // 2)], axis=-1)


def frequencies(dims: Sequence[int]):
    """Integer frequencies per lattice axis, broadcast to the lattice shape."""
    return np.meshgrid(*[np.fft.fftfreq(d, 1.0 / d) for d in dims], indexing='ij')


def default_dims(n: int) -> Tuple[int, ...]:
    """32 points per real axis for n = 1, 16 beyond."""
    return (DEFAULT_POINTS.get(n, 16),) * (2 * n)


def nyquist_mask(dims: Sequence[int], axes: Optional[Sequence[int]] = None) -> np.ndarray:
    """False on modes at the Nyquist frequency of one of `axes` (all axes if omitted)."""
    freq = frequencies(dims)
    axes = range(len(dims)) if axes is None else axes
    mask = np.ones(tuple(dims), dtype=bool)
    for axis in axes:
        mask &= np.abs(freq[axis]) != dims[axis] // 2
    return mask


def wirtinger_symbols(dims: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Fourier multipliers of ∂_{z_k} and ∂_{z̄_k}, each of shape (n,) + dims.

    On e^{2πi(p x + q y)}, ∂_z acts as π(ip + q) and ∂_z̄ as π(ip - q).
    """
    dims = validate_dims(dims)
    freq = frequencies(dims)
    n = len(dims) // 2
    masks = [nyquist_mask(dims, (2 * k, 2 * k + 1)) for k in range(n)]
    holomorphic = np.stack([np.pi * (1j * freq[2 * k] + freq[2 * k + 1]) * masks[k] for k in range(n)])
    antiholomorphic = np.stack([np.pi * (1j * freq[2 * k] - freq[2 * k + 1]) * masks[k] for k in range(n)])
    return holomorphic, antiholomorphic


def sample_metric(metric: MetricField, dims: Sequence[int]) -> np.ndarray:
    """Metric matrices on the lattice, shape dims + (n, n)."""
    dims = validate_dims(dims, metric.n)
    points = lattice_points(dims)
    if hasattr(metric, 'evaluate'):
        return np.asarray(metric.evaluate(points), dtype=complex)
    flat = points.reshape(-1, metric.n)
    return np.stack([metric.metric(x) for x in flat]).reshape(dims + (metric.n, metric.n))


def spectral_derivatives(samples: np.ndarray):
    """(∂g, ∂̄g, ∂∂̄g) on the lattice, laid out as [..., m, i, j] and
    [..., a, b, c, d] with the lattice on the leading axes."""
    dims = samples.shape[:-2]
    axes = _axes(dims)
    n = samples.shape[-1]
    spectrum = np.fft.fftn(samples, axes=axes)
    holomorphic, antiholomorphic = wirtinger_symbols(dims)

    def apply(symbol):
        return np.fft.ifftn(symbol[..., None, None] * spectrum, axes=axes)

    dg = np.stack([apply(holomorphic[m]) for m in range(n)], axis=-3)
    dbg = np.stack([apply(antiholomorphic[m]) for m in range(n)], axis=-3)
    ddg = np.stack([np.stack([apply(holomorphic[a] * antiholomorphic[b]) for b in range(n)], axis=-3)
                    for a in range(n)], axis=-4)
    return dg, dbg, ddg


def hermitize(values: np.ndarray) -> np.ndarray:
    return 0.5 * (values + np.conj(np.swapaxes(values, -1, -2)))


def grid_curvature(samples: np.ndarray):
    """Inverse metric, Ω and lowered torsion on every lattice point."""
    dg, dbg, ddg = spectral_derivatives(samples)
    g_inv = inverse_metric(samples)
    return g_inv, curvature(g_inv, dg, dbg, ddg), lowered_torsion(dg)


def log_volume(samples: np.ndarray) -> np.ndarray:
    return np.linalg.slogdet(hermitize(samples))[1]


def chern_ricci_velocity(samples: np.ndarray) -> np.ndarray:
    """-Ric¹ = ∂_i ∂_j̄ log det g on every lattice point, from the spectrum of log det g."""
    dims = samples.shape[:-2]
    axes = _axes(dims)
    n = samples.shape[-1]
    spectrum = np.fft.fftn(log_volume(samples), axes=axes)
    holomorphic, antiholomorphic = wirtinger_symbols(dims)
    rows = [np.stack([np.fft.ifftn(holomorphic[i] * antiholomorphic[j] * spectrum, axes=axes) for j in range(n)],
                     axis=-1) for i in range(n)]
    return np.stack(rows, axis=-2)


def grid_rhs(samples: np.ndarray, variant: str = 'hcf') -> np.ndarray:
    """Flow velocity on every lattice point, Hermitian by construction.

    hcf is -Ric¹ + (Ric¹ - S - Q); the bracket is evaluated pointwise and
    vanishes on Kähler samples.
    """
    if variant not in ('hcf', 'chern_ricci'):
        raise StructuralError("Choose from one of the variants: hcf, chern_ricci")
    result = chern_ricci_velocity(samples)
    if variant == 'hcf':
        g_inv, omega, torsion_low = grid_curvature(samples)
        result = (result + first_ricci(g_inv, omega) - second_ricci(g_inv, omega)
                  - torsion_quadratic(g_inv, torsion_low))
    return hermitize(result)


class GridMetricField(MetricField):
    """Trigonometric interpolant of lattice samples, usable as a metric field
    anywhere on the torus."""

    def __init__(self, samples: np.ndarray, name: str = 'grid'):
        samples = np.asarray(samples, dtype=complex)
        n = samples.shape[-1]
        self.dims = validate_dims(samples.shape[:-2], n)
        super(GridMetricField, self).__init__(n, torus_chart(n), name)
        self.samples = samples
        self.size = int(np.prod(self.dims))
        self.spectrum = np.fft.fftn(samples, axes=_axes(self.dims)).reshape(self.size, n * n)
        self.frequencies = np.stack([f.reshape(-1) for f in frequencies(self.dims)])
        holomorphic, antiholomorphic = wirtinger_symbols(self.dims)
        self.symbols = np.concatenate([holomorphic.reshape(n, -1), antiholomorphic.reshape(n, -1)])

    def _metric_jet(self, x, order):
        space = get_space(self.n, order)
        real = np.empty(2 * self.n)
        real[0::2], real[1::2] = x.real, x.imag
        phase = np.exp(2j * np.pi * real.dot(self.frequencies)) / self.size
        rows = np.prod(self.symbols[None, :, :] ** space.exponents[:, :, None], axis=1)
        rows *= phase / space.factorials[:, None]
        coeffs = rows.dot(self.spectrum).T.reshape(self.n, self.n, space.size)
        return ComplexJet(space, coeffs, x)

