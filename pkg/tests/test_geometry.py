import numpy as np
import pytest

from hcflab.exceptions import DegenerateMetricError, DomainError, StructuralError
from hcflab.expressions import squared_norm
from hcflab.geometry import (bianchi_residuals, chern_ricci_first, compute_connection, compute_frame,
                             compute_frame_jets, curvature_via_christoffel, flow_rhs_jet, flow_rhs_pointwise,
                             second_ricci_form, torsion_norm, torsion_quadratic_form, variation_check)
from hcflab.metrics import HermitianField, metric_catalog, torus_chart

E1 = np.array([1.0, 0.0], dtype=complex)


def test_flat_frame_vanishes(flat_torus):
    f = compute_frame(flat_torus, [0.3 + 0.1j, 0.6 + 0.9j], 2)
    for tensor in (f.gamma, f.torsion_up, f.torsion_low, f.omega, f.nabla_omega, f.nabla2_omega):
        assert np.all(tensor == 0)
    assert all(value == 0 for value in bianchi_residuals(f).values())
    assert np.all(flow_rhs_pointwise(f) == 0)


def test_fubini_study_curvature_at_origin(fubini_study):
    f = compute_frame(fubini_study, [0.0], 0)
    assert f.omega[0, 0, 0, 0] == pytest.approx(2.0)


def test_fubini_study_constant_holomorphic_sectional(fubini_study_2):
    f = compute_frame(fubini_study_2, [0.0, 0.0], 0)
    eye = np.eye(2)
    expected = np.einsum('ab,cd->abcd', eye, eye) + np.einsum('ad,cb->abcd', eye, eye)
    assert np.allclose(f.omega, expected, atol=1e-12)
    assert np.allclose(flow_rhs_pointwise(f), -3 * eye, atol=1e-12)


@pytest.mark.parametrize('name', ['kahler_torus', 'fubini_study_local'])
def test_kahler_metrics_are_torsion_free(name, rng):
    metric = metric_catalog(name, {'n': 2})
    for x in metric.chart.sample(rng, 10):
        f = compute_frame(metric, x, 0)
        assert torsion_norm(f) < 1e-12
        assert np.max(np.abs(torsion_quadratic_form(f))) < 1e-12
        assert np.allclose(flow_rhs_pointwise(f), -second_ricci_form(f), atol=1e-12)


def test_catalog_bianchi_identities(catalog_metric, rng):
    for x in catalog_metric.chart.sample(rng, 10):
        residuals = bianchi_residuals(compute_frame(catalog_metric, x, 1))
        assert set(residuals) == {'first_1', 'first_2', 'second_1', 'second_2'}
        assert max(residuals.values()) < 1e-9


def test_hopf_bianchi_identities(hopf_round, rng):
    for x in hopf_round.chart.sample(rng, 25):
        assert max(bianchi_residuals(compute_frame(hopf_round, x, 1)).values()) < 1e-10


def test_hopf_curvature_closed_form(hopf_round, rng):
    # g = δ/r is conformally flat: Ω_{a b̄ c d̄} = (δ_ab / r - z̄_a z_b / r^2) δ_cd / r
    for x in hopf_round.chart.sample(rng, 5):
        r = np.vdot(x, x).real
        block = np.eye(2) / r - np.outer(np.conj(x), x) / r ** 2
        expected = np.einsum('ab,cd->abcd', block, np.eye(2)) / r
        assert np.allclose(compute_frame(hopf_round, x, 0).omega, expected, atol=1e-12)


def test_hopf_velocity_at_unit_point(hopf_round):
    f = compute_frame(hopf_round, E1, 0)
    corner = np.diag([1.0, 0.0])
    assert np.allclose(second_ricci_form(f), np.eye(2), atol=1e-12)
    assert np.allclose(torsion_quadratic_form(f), np.eye(2) - corner, atol=1e-12)
    assert np.allclose(flow_rhs_pointwise(f), -2 * np.eye(2) + corner, atol=1e-12)
    assert np.allclose(flow_rhs_pointwise(f, 'chern_ricci'), -2 * (np.eye(2) - corner), atol=1e-12)
    assert np.allclose(chern_ricci_first(f), 2 * (np.eye(2) - corner), atol=1e-12)
    assert torsion_norm(f) == pytest.approx(np.sqrt(2.0))


def test_velocity_is_hermitian(catalog_metric, rng):
    for x in catalog_metric.chart.sample(rng, 5):
        rhs = flow_rhs_pointwise(compute_frame(catalog_metric, x, 0))
        assert np.allclose(rhs, rhs.conj().T, atol=1e-12)


def test_curvature_two_paths(catalog_metric, rng):
    for x in catalog_metric.chart.sample(rng, 5):
        jets = compute_frame_jets(catalog_metric, x, 0)
        assert np.allclose(curvature_via_christoffel(jets), jets.omega.value, atol=1e-10)


def test_flow_rhs_jet_value(hopf_round, rng):
    x = hopf_round.chart.sample(rng, 1)[0]
    jets = compute_frame_jets(hopf_round, x, 1)
    assert np.allclose(flow_rhs_jet(jets).value, flow_rhs_pointwise(compute_frame(hopf_round, x, 0)))


def test_connection_only(hopf_round):
    f = compute_connection(hopf_round, E1)
    assert f.omega is None
    assert f.depth == -1
    # Γ^k_{ij} = ∂_i log(1/r) δ_jk = -z̄_i δ_jk at e1
    expected = -np.einsum('i,jk->kij', np.conj(E1), np.eye(2))
    assert np.allclose(f.gamma, expected, atol=1e-12)
    with pytest.raises(StructuralError):
        bianchi_residuals(f)


def test_invalid_depth(flat_torus):
    with pytest.raises(StructuralError):
        compute_frame(flat_torus, [0.1, 0.1], 3)


def test_frame_outside_chart(hopf_round):
    with pytest.raises(DomainError):
        compute_frame(hopf_round, [5.0, 0.0], 0)


def test_degenerate_floor():
    metric = metric_catalog('hopf_family', {'a': 1.0, 'b': 0.0})
    with pytest.raises(DegenerateMetricError):
        compute_frame(metric, E1, 0, floor=2.0)


def test_variation_flat_radial_perturbation(flat_torus):
    # k = z z̄ δ on a flat background: δΩ = -∂∂̄ k, entry -1 on the diagonal blocks
    k = HermitianField.scalar(squared_norm(2), 2, torus_chart(2))
    report = variation_check(flat_torus, k, [0.0, 0.0])
    assert report.max_error < 1e-8


def test_variation_flat_constant_direction(flat_torus):
    k = HermitianField.constant(np.eye(2), torus_chart(2))
    report = variation_check(flat_torus, k, [0.2, 0.4])
    assert report.max_error == 0


def test_variation_second_order(fubini_study_2, rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    k = HermitianField.constant(0.5 * (a + a.conj().T), fubini_study_2.chart)
    x = np.array([0.2 + 0.1j, -0.1 + 0.3j])
    report = variation_check(fubini_study_2, k, x, eps=1e-3)
    assert report.max_error < 1e-5
    for key, ratio in report.ratios.items():
        if report.errors[key] > 1e-10:
            assert 3.5 < ratio < 4.5


def test_variation_hopf_radial(hopf_round, rng):
    k = HermitianField.scalar(squared_norm(2), 2, hopf_round.chart)
    x = hopf_round.chart.sample(rng, 1)[0]
    assert variation_check(hopf_round, k, x).max_error < 1e-6
