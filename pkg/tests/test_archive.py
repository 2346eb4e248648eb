import numpy as np
import pytest

from hcflab.archive import load_run, save_run
from hcflab.exceptions import StructuralError
from hcflab.flow.ansatz import initial_state
from hcflab.flow.integrator import FlowMonitor, integrate


@pytest.fixture(scope='module')
def fs_run():
    return integrate(initial_state('fubini_study_local'), 0.05, 0.1, monitor=FlowMonitor(restarts=2))


def test_save_and_load(fs_run, tmp_path):
    path = str(tmp_path / 'run.h5')
    save_run(fs_run, path, config={'metric': 'fubini_study_local', 'dt': 0.05})
    run, config = load_run(path)
    assert config == {'metric': 'fubini_study_local', 'dt': 0.05}
    assert run.records == fs_run.records
    assert run.steps == fs_run.steps
    assert not run.halted
    assert run.final_state.family == 'fubini_study'
    assert np.allclose(run.final_state.coefficients, fs_run.final_state.coefficients)
    assert [s.t for s in run.snapshots] == [s.t for s in fs_run.snapshots]


def test_no_overwrite(fs_run, tmp_path):
    path = str(tmp_path / 'run.h5')
    save_run(fs_run, path)
    with pytest.raises(StructuralError):
        save_run(fs_run, path)
    save_run(fs_run, path, overwrite=True)
