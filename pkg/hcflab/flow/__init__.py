from .state import FlowMonitorRecord, FlowState, read_monitor_csv, read_snapshot, write_monitor_csv, write_snapshot
from .grid import GridMetricField, grid_rhs, lattice_points, sample_metric, spectral_derivatives, wirtinger_symbols
from .ansatz import AnsatzFamily, family_names, get_family, initial_state
from .integrator import (FlowMonitor, FlowRun, barrier_probe, convergence_ratio, evaluate_rhs,
                         evolution_consistency_check, flow_step, integrate, min_metric_eigenvalue)
