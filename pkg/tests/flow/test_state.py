import numpy as np
import pytest

from hcflab.exceptions import StructuralError
from hcflab.flow.state import (FlowMonitorRecord, FlowState, decode_snapshot, encode_snapshot, read_monitor_csv,
                               read_snapshot, write_monitor_csv, write_snapshot)
from hcflab.utils.model_utils import Backend


def test_monitor_csv(tmp_path):
    records = [FlowMonitorRecord(0.0, 0.5, 1e-12, 1.0, 1.4142135623730951),
               FlowMonitorRecord(0.1, 0.25, 2e-12, 0.9, 1.3, step_accepted=False)]
    path = tmp_path / 'monitor.csv'
    write_monitor_csv(records, path)
    lines = path.read_text().splitlines()
    assert lines[0] == 't,min_griffiths,bianchi_max,min_metric_eig,torsion_norm,step_accepted'
    assert lines[1] == '0,0.5,9.9999999999999998e-13,1,1.4142135623730951,true'
    assert lines[2].endswith(',false')
    assert read_monitor_csv(path) == records


def test_monitor_csv_header(tmp_path):
    path = tmp_path / 'other.csv'
    path.write_text('t,value\n0,1\n')
    with pytest.raises(StructuralError):
        read_monitor_csv(path)


def test_ansatz_snapshot(tmp_path):
    state = FlowState.ansatz(0.125, 'hopf', 3, [1.5, -0.25])
    payload = encode_snapshot(state)
    assert payload[:4] == b'HCF1'
    write_snapshot(state, tmp_path / 'state.hcf1')
    restored = read_snapshot(tmp_path / 'state.hcf1')
    assert restored.backend == Backend.ANSATZ
    assert (restored.t, restored.family, restored.n) == (0.125, 'hopf', 3)
    assert np.array_equal(restored.coefficients, state.coefficients)


def test_grid_snapshot(rng):
    samples = rng.normal(size=(4, 4, 1, 1)) + 1j * rng.normal(size=(4, 4, 1, 1))
    restored = decode_snapshot(encode_snapshot(FlowState.grid(2.0, samples)))
    assert restored.dims == (4, 4)
    assert restored.t == 2.0
    assert np.array_equal(restored.samples, samples)


def test_snapshot_magic():
    with pytest.raises(StructuralError):
        decode_snapshot(b'HCF2' + bytes(32))


def test_with_values():
    state = FlowState.ansatz(0.0, 'fubini_study', 2, [1.0])
    moved = state.with_values(0.5, [np.array([0.25 + 0j])])
    assert moved.t == 0.5
    assert moved.coefficients.dtype == float
    assert moved.coefficients.tolist() == [0.25]
    assert state.coefficients.tolist() == [1.0]


def test_hermitian_residual():
    samples = np.zeros((4, 4, 1, 1), dtype=complex)
    samples[..., 0, 0] = 1 + 0.5j
    assert FlowState.grid(0.0, samples).hermitian_residual() == pytest.approx(1.0)
    assert FlowState.ansatz(0.0, 'hopf', 2, [1.0, 0.0]).hermitian_residual() == 0.0
