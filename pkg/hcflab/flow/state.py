"""Flow states, monitor records and their on-disk formats."""
import csv
import struct
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import StructuralError
from ..utils.model_utils import Backend

SNAPSHOT_MAGIC = b'HCF1'
SNAPSHOT_VERSION = 1
MONITOR_COLUMNS = ('t', 'min_griffiths', 'bianchi_max', 'min_metric_eig', 'torsion_norm', 'step_accepted')


@dataclass(frozen=True)
class FlowState(object):
    """Time-stamped metric configuration.

    Grid states hold metric samples of shape dims + (n, n) on the periodic
    lattice, one lattice axis per real coordinate (x1, y1, x2, y2, ...). Ansatz
    states hold the real coefficient vector of a named family.
    """
    t: float
    backend: Backend
    n: int
    samples: Optional[np.ndarray] = None
    family: Optional[str] = None
    coefficients: Optional[np.ndarray] = None

    @classmethod
    def grid(cls, t: float, samples: np.ndarray) -> 'FlowState':
        samples = np.asarray(samples, dtype=complex)
        return cls(t, Backend.GRID, samples.shape[-1], samples=samples)

    @classmethod
    def ansatz(cls, t: float, family: str, n: int, coefficients) -> 'FlowState':
        return cls(t, Backend.ANSATZ, n, family=family, coefficients=np.asarray(coefficients, dtype=float))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.samples.shape[:-2]) if self.backend == Backend.GRID else ()

    def values(self) -> List[np.ndarray]:
        return [self.samples] if self.backend == Backend.GRID else [self.coefficients]

    def with_values(self, t: float, values: Sequence[np.ndarray]) -> 'FlowState':
        if self.backend == Backend.GRID:
            return replace(self, t=t, samples=np.asarray(values[0], dtype=complex))
        return replace(self, t=t, coefficients=np.real(np.asarray(values[0])).astype(float))

    def hermitian_residual(self) -> float:
        if self.backend != Backend.GRID:
            return 0.0
        return float(np.max(np.abs(self.samples - np.conj(np.swapaxes(self.samples, -1, -2)))))


@dataclass(frozen=True)
class FlowMonitorRecord(object):
    t: float
    min_griffiths: float
    bianchi_max: float
    min_metric_eigenvalue: float
    torsion_norm: float
    step_accepted: bool = True

    def row(self) -> List[str]:
        floats = [self.t, self.min_griffiths, self.bianchi_max, self.min_metric_eigenvalue, self.torsion_norm]
        return ['%.17g' % value for value in floats] + ['true' if self.step_accepted else 'false']

    @classmethod
    def from_row(cls, row: Sequence[str]) -> 'FlowMonitorRecord':
        return cls(*[float(value) for value in row[:5]], step_accepted=row[5] == 'true')


def write_monitor_csv(records: Sequence[FlowMonitorRecord], path) -> None:
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(MONITOR_COLUMNS)
        for record in records:
            writer.writerow(record.row())


def read_monitor_csv(path) -> List[FlowMonitorRecord]:
    with open(path, newline='') as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != MONITOR_COLUMNS:
            raise StructuralError("Unexpected monitor columns {}".format(header))
        return [FlowMonitorRecord.from_row(row) for row in reader]


def encode_snapshot(state: FlowState) -> bytes:
    """Little-endian HCF1 snapshot of a state."""
    dims = state.dims
    header = SNAPSHOT_MAGIC + struct.pack('<IBII', SNAPSHOT_VERSION, state.backend.value, state.n, len(dims))
    header += struct.pack('<{}I'.format(len(dims)), *dims) + struct.pack('<d', state.t)
    if state.backend == Backend.GRID:
        return header + np.ascontiguousarray(state.samples, dtype='<c16').tobytes()
    name = state.family.encode('utf-8')
    coefficients = np.ascontiguousarray(state.coefficients, dtype='<f8')
    return (header + struct.pack('<I', len(name)) + name + struct.pack('<I', coefficients.size)
            + coefficients.tobytes())


def decode_snapshot(payload: bytes) -> FlowState:
    if payload[:4] != SNAPSHOT_MAGIC:
        raise StructuralError("Not an HCF1 snapshot")
    version, backend, n, ndims = struct.unpack_from('<IBII', payload, 4)
    if version != SNAPSHOT_VERSION:
        raise StructuralError("Unsupported snapshot version {}".format(version))
    offset = 4 + struct.calcsize('<IBII')
    dims = struct.unpack_from('<{}I'.format(ndims), payload, offset)
    offset += 4 * ndims
    (t,) = struct.unpack_from('<d', payload, offset)
    offset += 8
    if Backend(backend) == Backend.GRID:
        count = int(np.prod(dims)) * n * n
        samples = np.frombuffer(payload, dtype='<c16', count=count, offset=offset).reshape(tuple(dims) + (n, n))
        return FlowState.grid(t, samples.astype(complex))
    (length,) = struct.unpack_from('<I', payload, offset)
    offset += 4
    name = payload[offset:offset + length].decode('utf-8')
    offset += length
    (count,) = struct.unpack_from('<I', payload, offset)
    coefficients = np.frombuffer(payload, dtype='<f8', count=count, offset=offset + 4)
    return FlowState.ansatz(t, name, n, coefficients.astype(float))


def write_snapshot(state: FlowState, path) -> None:
    with open(path, 'wb') as handle:
        handle.write(encode_snapshot(state))


def read_snapshot(path) -> FlowState:
    with open(path, 'rb') as handle:
        return decode_snapshot(handle.read())
