import numpy as np
import pytest

from hcflab.exceptions import StructuralError
from hcflab.flow.grid import (GridMetricField, chern_ricci_velocity, default_dims, grid_rhs, lattice_points,
                              log_volume, sample_metric, spectral_derivatives, validate_dims, wirtinger_symbols)
from hcflab.flow.integrator import FlowMonitor, flow_step, integrate
from hcflab.flow.state import FlowState
from hcflab.geometry import compute_frame, flow_rhs_pointwise, lowered_torsion
from hcflab.metrics import metric_catalog


@pytest.mark.parametrize('dims', [(8,), (8, 6), (8, 8, 8), (2, 2)])
def test_invalid_dims(dims):
    with pytest.raises(StructuralError):
        validate_dims(dims)


def test_dims_must_match_dimension():
    with pytest.raises(StructuralError):
        validate_dims((8, 8), n=2)


def test_default_dims():
    assert default_dims(1) == (32, 32)
    assert default_dims(2) == (16, 16, 16, 16)


def test_lattice_points():
    points = lattice_points((4, 8))
    assert points.shape == (4, 8, 1)
    assert points[1, 2, 0] == 0.25 + 0.25j


def test_wirtinger_symbols_on_modes():
    holomorphic, antiholomorphic = wirtinger_symbols((8, 8))
    # e^{2πi x}: ∂_z = πi, ∂_z̄ = πi; e^{2πi y}: ∂_z = π, ∂_z̄ = -π
    assert holomorphic[0, 1, 0] == pytest.approx(np.pi * 1j)
    assert antiholomorphic[0, 1, 0] == pytest.approx(np.pi * 1j)
    assert holomorphic[0, 0, 1] == pytest.approx(np.pi)
    assert antiholomorphic[0, 0, 1] == pytest.approx(-np.pi)
    assert holomorphic[0, 4, 0] == 0


def test_wirtinger_symbols_mask_own_axes():
    holomorphic, antiholomorphic = wirtinger_symbols((8, 8, 8, 8))
    # Nyquist along x_2 leaves ∂_{z_1} of the mixed mode intact
    assert holomorphic[0, 1, 0, 4, 0] == pytest.approx(np.pi * 1j)
    assert antiholomorphic[0, 0, 1, 0, 4] == pytest.approx(-np.pi)
    assert holomorphic[1, 1, 0, 4, 0] == 0
    assert antiholomorphic[1, 0, 0, 0, 4] == 0


def test_spectral_derivatives_of_cosine():
    x = lattice_points((8, 8))[..., 0].real
    samples = (2 + np.cos(2 * np.pi * x))[..., None, None].astype(complex)
    dg, dbg, ddg = spectral_derivatives(samples)
    assert np.allclose(dg[..., 0, 0, 0], -np.pi * np.sin(2 * np.pi * x), atol=1e-12)
    assert np.allclose(dbg[..., 0, 0, 0], -np.pi * np.sin(2 * np.pi * x), atol=1e-12)
    assert np.allclose(ddg[..., 0, 0, 0, 0], -np.pi ** 2 * np.cos(2 * np.pi * x), atol=1e-11)


def test_chern_ricci_velocity_is_log_volume_hessian():
    x = lattice_points((32, 32))[..., 0].real
    volume = 1 + 0.3 * np.cos(2 * np.pi * x)
    samples = volume[..., None, None].astype(complex)
    assert np.allclose(log_volume(samples), np.log(volume), atol=1e-14)
    # ∂∂̄ = Δ/4 on functions of x alone
    expected = np.pi ** 2 * (0.3 * np.cos(2 * np.pi * x) + 0.09) / volume ** 2
    assert np.allclose(chern_ricci_velocity(samples)[..., 0, 0], -expected, atol=1e-10)


def test_flat_grid_is_stationary(flat_torus):
    samples = sample_metric(flat_torus, (4, 4, 4, 4))
    assert samples.shape == (4, 4, 4, 4, 2, 2)
    assert np.allclose(grid_rhs(samples), 0, atol=1e-14)


@pytest.mark.parametrize('n, eps, points, tolerance', [(1, 0.2, 32, 1e-10), (2, 0.05, 16, 1e-7)])
def test_grid_rhs_matches_pointwise(n, eps, points, tolerance, rng):
    metric = metric_catalog('perturbed_torus', {'n': n, 'eps': eps})
    dims = (points,) * (2 * n)
    rhs = grid_rhs(sample_metric(metric, dims)).reshape(-1, n, n)
    lattice = lattice_points(dims).reshape(-1, n)
    for k in rng.choice(len(lattice), size=5, replace=False):
        expected = flow_rhs_pointwise(compute_frame(metric, lattice[k], 0))
        assert np.allclose(rhs[k], expected, atol=tolerance)


def test_unknown_variant():
    with pytest.raises(StructuralError):
        grid_rhs(np.ones((4, 4, 1, 1), dtype=complex), 'ricci')


def test_kahler_step_matches_chern_ricci():
    metric = metric_catalog('kahler_torus', {'n': 2, 'eps': 0.1})
    state = FlowState.grid(0.0, sample_metric(metric, (8, 8, 8, 8)))
    hcf = flow_step(state, 0.01)
    chern_ricci = flow_step(state, 0.01, 'chern_ricci')
    assert np.max(np.abs(hcf.samples - chern_ricci.samples)) < 1e-10
    dg = spectral_derivatives(hcf.samples)[0]
    assert np.max(np.abs(lowered_torsion(dg))) < 1e-10


def test_kahler_grid_stays_kahler():
    metric = metric_catalog('kahler_torus', {'n': 2, 'eps': 0.1})
    state = FlowState.grid(0.0, sample_metric(metric, (8, 8, 8, 8)))
    run = integrate(state, 0.01, 0.05, monitor=FlowMonitor(sample_count=2, restarts=2))
    assert not run.halted
    assert len(run.records) == 6
    assert all(record.torsion_norm < 1e-10 for record in run.records)


@pytest.mark.parametrize('dims, shift', [((8, 8), (1, 3)), ((4, 4, 4, 4), (1, 0, 2, 3))])
def test_step_commutes_with_lattice_translation(dims, shift):
    n = len(dims) // 2
    samples = sample_metric(metric_catalog('perturbed_torus', {'n': n, 'eps': 0.2}), dims)
    axes = tuple(range(len(dims)))
    stepped = flow_step(FlowState.grid(0.0, samples), 0.01)
    moved = flow_step(FlowState.grid(0.0, np.roll(samples, shift, axis=axes)), 0.01)
    assert np.max(np.abs(moved.samples - np.roll(stepped.samples, shift, axis=axes))) < 1e-13


def test_grid_field_interpolates(rng):
    metric = metric_catalog('perturbed_torus', {'n': 2})
    field = GridMetricField(sample_metric(metric, (8, 8, 8, 8)))
    for x in metric.chart.sample(rng, 3):
        assert np.allclose(field.metric(x), metric.metric(x), atol=1e-12)
        assert np.allclose(compute_frame(field, x, 0).omega, compute_frame(metric, x, 0).omega, atol=1e-10)


def test_grid_field_shape_check():
    with pytest.raises(StructuralError):
        GridMetricField(np.ones((8, 8, 2, 2)))
