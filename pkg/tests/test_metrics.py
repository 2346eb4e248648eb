import numpy as np
import pytest

from hcflab.exceptions import ConfigError, DegenerateMetricError, DomainError, StructuralError
from hcflab.metrics import (CombinedField, HermitianField, JetField, affine_chart, annulus_chart, list_metrics,
                            metric_catalog, metric_names, metric_spec, product_chart, torus_chart)


def test_catalog_names():
    names = metric_names()
    for name in ('flat_torus', 'perturbed_torus', 'kahler_torus', 'fubini_study_local', 'hopf_round',
                 'hopf_family', 'product'):
        assert name in names


def test_list_metrics_schemas():
    listing = {entry['name']: entry for entry in list_metrics()}
    assert listing['hopf_family']['parameters']['a']['default'] == 1.0
    assert 'description' in listing['product']


def test_catalog_metric_is_hermitian_positive(catalog_metric, rng):
    for x in catalog_metric.chart.sample(rng, 10):
        g = catalog_metric.metric(x)
        assert np.allclose(g, g.conj().T, atol=1e-14)
        assert np.min(np.linalg.eigvalsh(g)) > 0


def test_unknown_metric():
    with pytest.raises(ConfigError):
        metric_catalog('klein_bottle')


def test_unknown_parameter():
    with pytest.raises(ConfigError):
        metric_spec('flat_torus', {'radius': 2})


@pytest.mark.parametrize('name, params', [('flat_torus', {'n': 7}),
                                          ('perturbed_torus', {'eps': 0.5}),
                                          ('hopf_family', {'a': 1.0, 'b': -2.0}),
                                          ('product', {'first': 'product'})])
def test_invalid_parameters(name, params):
    with pytest.raises(ConfigError):
        metric_spec(name, params)


def test_flat_torus_is_identity(flat_torus):
    jet = flat_torus.metric_jet([0.2 + 0.3j, 0.7 + 0.1j], 3)
    assert np.allclose(jet.value, np.eye(2))
    assert np.all(jet.coeffs[..., 1:] == 0)


def test_fubini_study_at_origin(fubini_study):
    jet = fubini_study.metric_jet([0.0], 2)
    assert jet.value[0, 0] == pytest.approx(1.0)
    assert jet.extract((1,), (1,))[0, 0] == pytest.approx(-2.0)


def test_hopf_round_value(hopf_round):
    x = np.array([0.6 + 0.3j, -0.4j])
    assert np.allclose(hopf_round.metric(x), np.eye(2) / np.vdot(x, x).real)


def test_hopf_outside_annulus(hopf_round):
    with pytest.raises(DomainError):
        hopf_round.metric([0.1, 0.0])


def test_product_blocks(flat_fs_product):
    g = flat_fs_product.metric([0.3 + 0.2j, 0.5j])
    assert g[0, 0] == pytest.approx(1.0)
    assert g[0, 1] == 0 and g[1, 0] == 0
    assert g[1, 1] == pytest.approx(1.0 / (1 + 0.25) ** 2)


def test_product_params_resolved():
    spec = metric_spec('product', {'scales': [2.0, 0.5]})
    assert spec.dimension == 2
    assert spec.kahler
    assert spec.parameters['first_params'] == {'n': 1}


def test_evaluate_matches_pointwise(catalog_metric, rng):
    points = catalog_metric.chart.sample(rng, 6)
    batch = catalog_metric.evaluate(points)
    for k, x in enumerate(points):
        assert np.allclose(batch[k], catalog_metric.metric(x))


def test_chart_sampling_stays_inside(rng):
    for chart in (torus_chart(2), annulus_chart(2), affine_chart(2, 0.5),
                  product_chart(torus_chart(1), affine_chart(1))):
        for x in chart.sample(rng, 50):
            assert chart.contains(x)
    assert not annulus_chart(2).contains([3.0, 0.0])


def test_degenerate_spec():
    spec = metric_spec('hopf_family', {'a': 1.0, 'b': -0.5})
    spec.entries[0][0] = spec.entries[0][0] * 0.0
    with pytest.raises(DegenerateMetricError):
        spec.validate()


def test_hermitian_perturbation(rng):
    with pytest.raises(StructuralError):
        HermitianField.constant([[1.0, 1.0], [0.0, 1.0]], torus_chart(2))
    k = HermitianField.constant([[1.0, 1j], [-1j, 2.0]], torus_chart(2))
    combined = CombinedField([k, k], [1.0, 2.0])
    assert np.allclose(combined.metric([0.1, 0.2]), 3 * np.array([[1.0, 1j], [-1j, 2.0]]))


def test_jet_field_only_at_center(flat_torus):
    jet = flat_torus.metric_jet([0.1, 0.2], 2)
    field = JetField(jet, torus_chart(2))
    assert np.allclose(field.metric([0.1, 0.2]), np.eye(2))
    with pytest.raises(DomainError):
        field.metric([0.3, 0.2])
