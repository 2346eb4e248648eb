import numpy as np
import pytest

from hcflab.metrics import metric_catalog

CATALOG = [('flat_torus', {'n': 2}),
           ('perturbed_torus', {'n': 2, 'eps': 0.1, 'mode': 'full'}),
           ('kahler_torus', {'n': 2, 'eps': 0.1}),
           ('fubini_study_local', {'n': 2}),
           ('hopf_round', {'n': 2}),
           ('hopf_family', {'n': 2, 'a': 1.0, 'b': 0.5}),
           ('product', {})]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope='session')
def flat_torus():
    return metric_catalog('flat_torus', {'n': 2})


@pytest.fixture(scope='session')
def hopf_round():
    return metric_catalog('hopf_round', {'n': 2})


@pytest.fixture(scope='session')
def fubini_study():
    return metric_catalog('fubini_study_local', {'n': 1})


@pytest.fixture(scope='session')
def fubini_study_2():
    return metric_catalog('fubini_study_local', {'n': 2})


@pytest.fixture(scope='session')
def kahler_torus():
    return metric_catalog('kahler_torus', {'n': 2, 'eps': 0.1})


@pytest.fixture(scope='session')
def flat_fs_product():
    return metric_catalog('product', {})


@pytest.fixture(scope='session', params=CATALOG, ids=[name for name, _ in CATALOG])
def catalog_metric(request):
    name, params = request.param
    return metric_catalog(name, params)
