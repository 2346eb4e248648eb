"""h5py archives of whole flow runs."""
import json
import logging
import os
from typing import Any, Dict, Optional, Tuple

import h5py
import numpy as np

from .exceptions import FlowBlowupError, StructuralError
from .flow.integrator import FlowRun
from .flow.state import FlowMonitorRecord, FlowState
from .utils.model_utils import ReportEncoder
from .utils.serialization import dict_to_state, state_to_dict

logger = logging.getLogger(__name__)


def _write_state(group: h5py.Group, state: FlowState):
    for key, value in state_to_dict(state).items():
        if isinstance(value, np.ndarray):
            group.create_dataset(key, data=value)
        else:
            group.attrs[key] = value


def _read_state(group: h5py.Group) -> FlowState:
    _dict = {key: group.attrs[key] for key in group.attrs}
    _dict.update({key: group[key][()] for key in group})
    if isinstance(_dict['backend'], bytes):
        _dict['backend'] = _dict['backend'].decode('utf-8')
    return dict_to_state(_dict)


def save_run(run: FlowRun, file_name: str, config: Optional[Dict[str, Any]] = None, overwrite: bool = False):
    """
    Save a flow run with its monitor records, snapshots and configuration.

    :param run: FlowRun returned by the integrator
    :param file_name: String, name or full path of the archive
    :param config: run configuration stored as JSON in the file attributes
    :param overwrite: Boolean, toggles between overwriting or raising error if
        file already exists, default is False
    """
    if os.path.exists(file_name) and not overwrite:
        raise StructuralError("Archive {} exists and overwrite is off".format(file_name))
    with h5py.File(file_name, mode='w') as f:
        f.attrs['run_config'] = json.dumps({'class_name': type(run).__name__, 'config': config or {}},
                                           cls=ReportEncoder).encode('utf8')
        f.attrs['steps'] = run.steps
        f.attrs['halvings'] = run.halvings
        f.attrs['error'] = '' if run.error is None else str(run.error)
        records = np.array([[r.t, r.min_griffiths, r.bianchi_max, r.min_metric_eigenvalue, r.torsion_norm,
                             float(r.step_accepted)] for r in run.records], dtype=float).reshape(-1, 6)
        f.create_dataset('records', data=records)
        _write_state(f.create_group('final_state'), run.final_state)
        snapshots = f.create_group('snapshots')
        for k, state in enumerate(run.snapshots):
            _write_state(snapshots.create_group('{:06d}'.format(k)), state)
    logger.info("Saved run with %d records to %s", len(run.records), file_name)


def load_run(file_name: str) -> Tuple[FlowRun, Dict[str, Any]]:
    """
    Load a flow run saved by `save_run`.

    :param file_name: String, name or full path of the archive
    :return: the FlowRun and the stored configuration
    """
    with h5py.File(file_name, mode='r') as f:
        stored = json.loads(f.attrs.get('run_config'))
        records = [FlowMonitorRecord(*[float(v) for v in row[:5]], step_accepted=bool(row[5]))
                   for row in f['records'][()]]
        final_state = _read_state(f['final_state'])
        snapshots = [_read_state(f['snapshots'][key]) for key in sorted(f['snapshots'])]
        error = f.attrs['error']
        if isinstance(error, bytes):
            error = error.decode('utf-8')
        run = FlowRun(records, snapshots, final_state, steps=int(f.attrs['steps']),
                      halvings=int(f.attrs['halvings']),
                      error=FlowBlowupError(error, final_state) if error else None)
    return run, stored.get('config', {})
