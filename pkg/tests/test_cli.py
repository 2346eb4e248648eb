import json
import os
from unittest.mock import patch

import numpy as np
import pytest

from hcflab.cli import EXIT_BLOWUP, EXIT_FAILURE, EXIT_PASS, EXIT_USAGE, chart_center, main
from hcflab.exceptions import AnsatzEscapeError, DegenerateMetricError
from hcflab.flow.state import read_monitor_csv, read_snapshot
from hcflab.metrics import affine_chart, annulus_chart, product_chart, torus_chart


def write_config(tmp_path, text):
    path = tmp_path / 'run.yaml'
    path.write_text(text)
    return str(path)


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


def test_list_metrics(capsys):
    assert main(['list-metrics', '--quiet']) == EXIT_PASS
    listing = json.loads(capsys.readouterr().out)
    assert {entry['name'] for entry in listing} == {'flat_torus', 'perturbed_torus', 'kahler_torus',
                                                    'fubini_study_local', 'hopf_round', 'hopf_family', 'product'}


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(['simulate'])
    assert info.value.code == 2


def test_verify_flat_torus(tmp_path):
    out = str(tmp_path / 'out')
    config = write_config(tmp_path, 'sample_points: 5\n')
    assert main(['verify', '--config', config, '--metric', 'flat_torus', '--seed', '1', '--out', out,
                 '--quiet']) == EXIT_PASS
    report = read_json(os.path.join(out, 'verify.json'))
    assert report['pass']
    assert report['sample_points'] == 5
    assert set(report['residuals']) == {'curvature_type', 'bianchi', 'curvature_paths', 'variation', 'evolution',
                                        'kahler'}
    manifest = read_json(os.path.join(out, 'manifest.json'))
    assert manifest['command'] == 'verify'
    assert manifest['seed'] == 1
    assert manifest['artifacts'] == [os.path.join(out, 'verify.json')]


def test_verify_zero_tolerance_fails(tmp_path):
    config = write_config(tmp_path, 'sample_points: 3\n')
    assert main(['verify', '--config', config, '--metric', 'hopf_round', '--tol', '0', '--out',
                 str(tmp_path), '--quiet']) == EXIT_FAILURE
    report = read_json(str(tmp_path / 'verify.json'))
    assert not report['pass']
    assert 'kahler' not in report['residuals']


@pytest.mark.parametrize('text', ['colour: blue\n', 'metric: klein_bottle\n', 'command: flow\ndt: -1\n'])
def test_bad_config(tmp_path, text):
    assert main(['flow', '--config', write_config(tmp_path, text), '--out', str(tmp_path), '--quiet']) == EXIT_USAGE


def test_missing_config_file(tmp_path):
    assert main(['verify', '--config', str(tmp_path / 'missing.yaml'), '--quiet']) == EXIT_USAGE


def test_flow_with_checkpoints(tmp_path):
    config = write_config(tmp_path, 'metric: hopf_round\nvariant: chern_ricci\ndt: 0.05\nt_end: 0.1\ncadence: 1\n'
                                    'restarts: 2\ncheckpoints: true\n')
    out = tmp_path / 'flow'
    assert main(['flow', '--config', config, '--out', str(out), '--quiet']) == EXIT_PASS
    records = read_monitor_csv(out / 'monitor.csv')
    assert [record.t for record in records] == pytest.approx([0.0, 0.05, 0.1])
    final = read_snapshot(out / 'snapshots' / 'snapshot_000002.hcf1')
    assert np.allclose(final.coefficients, [0.8, 0.2])
    assert (out / 'run.h5').exists()
    assert len(read_json(out / 'manifest.json')['artifacts']) == 5


def test_flow_blowup(tmp_path):
    config = write_config(tmp_path, 'metric: fubini_study_local\nmetric_params:\n  n: 2\ndt: 0.05\nt_end: 0.5\n'
                                    'restarts: 2\n')
    assert main(['flow', '--config', config, '--out', str(tmp_path), '--quiet']) == EXIT_BLOWUP
    assert (tmp_path / 'monitor.csv').exists()


@pytest.mark.parametrize('tensor, verdict', [('metric_product', 'positive'), ('omega', 'nonnegative')])
def test_certify_hopf(tmp_path, tensor, verdict):
    config = write_config(tmp_path, 'metric: hopf_round\nsample_points: 4\nrestarts: 4\ntensor: {}\n'.format(tensor))
    assert main(['certify', '--config', config, '--out', str(tmp_path), '--quiet']) == EXIT_PASS
    result = read_json(str(tmp_path / 'certify.json'))
    assert result['verdict'] == verdict
    assert result['expected_nonnegative'] is True
    assert len(result['argmin']['argmin_xi']) == 2


def test_transport_hopf_circle(tmp_path):
    config = write_config(tmp_path, 'command: transport\nmetric: hopf_round\n')
    assert main(['transport', '--config', config, '--out', str(tmp_path), '--quiet']) == EXIT_PASS
    result = read_json(str(tmp_path / 'transport.json'))
    assert result['pass']
    assert result['pairing_drift'] < 1e-8
    with open(tmp_path / 'trajectory.csv') as handle:
        assert len(handle.read().splitlines()) == 514


def test_transport_leaving_chart(tmp_path):
    config = write_config(tmp_path, 'metric: hopf_round\ncurve: line\ncurve_params:\n  start: [1, 0]\n'
                                    '  end: [3, 0]\nsteps: 16\n')
    assert main(['transport', '--config', config, '--out', str(tmp_path), '--quiet']) == EXIT_BLOWUP
    assert (tmp_path / 'trajectory.csv').exists()


def test_numerical_failure_exit_code(tmp_path):
    with patch('hcflab.cli.cmd_verify', side_effect=DegenerateMetricError('collapsed', 0.0)):
        assert main(['verify', '--out', str(tmp_path), '--quiet']) == EXIT_BLOWUP


def test_chart_center():
    assert np.allclose(chart_center(torus_chart(2)), [0.5 + 0.5j, 0.5 + 0.5j])
    assert np.allclose(chart_center(annulus_chart(2)), [1.25, 0.0])
    assert np.allclose(chart_center(product_chart(torus_chart(1), affine_chart(1))), [0.5 + 0.5j, 0.0])


def test_ansatz_escape_exit_code(tmp_path):
    with patch('hcflab.cli.cmd_flow', side_effect=AnsatzEscapeError('left the family', 1.0)):
        assert main(['flow', '--config', write_config(tmp_path, 'metric: hopf_round\n'), '--out', str(tmp_path),
                     '--quiet']) == EXIT_FAILURE
