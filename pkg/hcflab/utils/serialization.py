from typing import Any, Dict

import numpy as np

from ..flow.state import FlowState
from .model_utils import Backend


def state_to_dict(state: FlowState) -> Dict[str, Any]:
    """Turns a flow state into a Python dictionary of plain values and arrays

    :param state: FlowState instance
    :return: dictionary with time, backend and the state values
    """
    _dict = dict(t=state.t, backend=state.backend.name.lower(), n=state.n)
    if state.backend == Backend.GRID:
        _dict['samples'] = np.asarray(state.samples)
    else:
        _dict.update(family=state.family, coefficients=np.asarray(state.coefficients))
    return _dict


def dict_to_state(_dict: Dict[str, Any]) -> FlowState:
    """Turns a Python dictionary written by `state_to_dict` back into a flow state

    :param _dict: dictionary with `t`, `backend` and the backend's value keys
    :return: FlowState instance
    """
    if _dict['backend'] == 'grid':
        return FlowState.grid(float(_dict['t']), np.asarray(_dict['samples'], dtype=complex))
    family = _dict['family']
    if isinstance(family, bytes):
        family = family.decode('utf-8')
    return FlowState.ansatz(float(_dict['t']), family, int(_dict['n']), np.asarray(_dict['coefficients']))
