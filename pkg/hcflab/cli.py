"""Command line entry point: `hcflab <command> [--config FILE] ...`.

Exit codes: 0 pass, 1 scientific failure, 2 usage or configuration error,
3 numerical blowup.
"""
import argparse
import json
import logging
import os
import time
from functools import partial
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .archive import save_run
from .config import COMMANDS, RunConfig, load_config
from .curvature_ops import check_curvature_type, evolution_terms, metric_product
from .evaluator import get_evaluator
from .exceptions import (AnsatzEscapeError, ConfigError, DegenerateMetricError, FlowBlowupError, HCFError,
                         PreconditionError, TransportError)
from .expressions import squared_norm
from .flow.ansatz import initial_state
from .flow.grid import default_dims, sample_metric
from .flow.integrator import FlowMonitor, integrate
from .flow.state import FlowState, write_monitor_csv, write_snapshot
from .geometry import (bianchi_residuals, compute_frame, compute_frame_jets, curvature_via_christoffel,
                       frame_from_jets, torsion_norm, variation_check)
from .metrics import Chart, CombinedField, HermitianField, MetricField, list_metrics, metric_catalog
from .positivity import griffiths_verdict, min_griffiths
from .transport import get_curve, pairing_invariance_check, transport_pair, write_trajectory_csv
from .utils.model_utils import Backend, ReportEncoder, to_enum

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3

EVOLUTION_POINTS = 5
VECTOR_KEYS = ('point', 'center', 'start', 'end')


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, cls=ReportEncoder)


def _write_json(path: str, payload: Any):
    with open(path, 'w') as handle:
        handle.write(_dump(payload) + '\n')


def write_manifest(config: RunConfig, artifacts: List[str]) -> str:
    """Run manifest next to the artifacts: config echo, version, seed."""
    path = os.path.join(config.get_out(), 'manifest.json')
    _write_json(path, {'command': config.get_command(),
                       'version': __version__,
                       'seed': config.get_seed(),
                       'config': config.get_config(),
                       'artifacts': sorted(artifacts)})
    return path


def _complex_vector(values) -> np.ndarray:
    """Numbers or [re, im] pairs to a complex vector."""
    entries = []
    for value in values:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ConfigError("Complex entries are [re, im] pairs, got {}".format(value))
            entries.append(complex(value[0], value[1]))
        else:
            entries.append(complex(value))
    return np.array(entries, dtype=complex)


def chart_center(chart: Chart) -> np.ndarray:
    """A representative interior point of a chart."""
    if chart.kind == 'torus':
        return np.full(chart.n, 0.5 + 0.5j)
    if chart.kind == 'annulus':
        center = np.zeros(chart.n, dtype=complex)
        center[0] = 0.5 * (chart.inner + chart.outer)
        return center
    if chart.kind == 'product':
        return np.concatenate([chart_center(part) for part in chart.parts])
    return np.zeros(chart.n, dtype=complex)


def default_perturbation(metric: MetricField, rng: np.random.Generator) -> MetricField:
    """Random constant Hermitian matrix plus |z|^2 times the identity."""
    n = metric.n
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    constant = HermitianField.constant(0.5 * (a + a.conj().T), metric.chart)
    radial = HermitianField.scalar(squared_norm(n), n, metric.chart)
    return CombinedField([constant, radial], [1.0, 1.0], name='perturbation')


def _verify_point(metric: MetricField, perturbation: MetricField, x: np.ndarray) -> Dict[str, float]:
    jets = compute_frame_jets(metric, x, 1)
    f = frame_from_jets(jets)
    report = variation_check(metric, perturbation, x)
    return {'curvature_type': check_curvature_type(f.omega),
            'bianchi': max(bianchi_residuals(f).values()),
            'curvature_paths': float(np.max(np.abs(f.omega - curvature_via_christoffel(jets)))),
            'variation': report.max_error,
            'kahler': torsion_norm(f)}


def _evolution_point(metric: MetricField, x: np.ndarray) -> float:
    terms = evolution_terms(metric, x)
    return max(terms.twisted_residual.relative_residual, terms.decomposition_residual.relative_residual)


def _certify_point(metric: MetricField, tensor: str, method: str, restarts: int, seed: int, x: np.ndarray):
    f = compute_frame(metric, x, 0)
    u = f.omega if tensor == 'omega' else metric_product(f.g)
    return min_griffiths(u, f.g, method, restarts, seed=seed)


def _evaluator(config: RunConfig):
    return get_evaluator(config.get_evaluator(), num_workers=config.get_num_workers())


def cmd_verify(config: RunConfig) -> int:
    """Identity suite on random chart points; exit 0 iff every identity passes."""
    started = time.perf_counter()
    metric = metric_catalog(config.get_metric(), config.get_metric_params())
    rng = np.random.default_rng(config.get_seed())
    points = metric.chart.sample(rng, config.get_sample_points())
    perturbation = default_perturbation(metric, rng)
    evaluator = _evaluator(config)
    results = evaluator.map(partial(_verify_point, metric, perturbation), points)
    evolution = evaluator.map(partial(_evolution_point, metric), points[:EVOLUTION_POINTS])

    tolerances = config.tolerances()
    residuals = {key: max(result[key] for result in results)
                 for key in ('curvature_type', 'bianchi', 'curvature_paths', 'variation')}
    residuals['evolution'] = max(evolution)
    if metric.spec.kahler:
        residuals['kahler'] = max(result['kahler'] for result in results)
    passed = {key: bool(value <= tolerances[key]) for key, value in residuals.items()}
    report = {'metric': metric.name,
              'parameters': metric.spec.parameters,
              'sample_points': len(points),
              'evolution_points': len(evolution),
              'residuals': residuals,
              'tolerances': {key: tolerances[key] for key in residuals},
              'passed': passed,
              'pass': all(passed.values()),
              'wall_time': time.perf_counter() - started}
    path = os.path.join(config.get_out(), 'verify.json')
    _write_json(path, report)
    write_manifest(config, [path])
    print(_dump(report))
    if not report['pass']:
        logger.warning("Identity checks failed: %s", ', '.join(k for k, ok in passed.items() if not ok))
        return EXIT_FAILURE
    return EXIT_PASS


def flow_initial_state(config: RunConfig) -> FlowState:
    backend = to_enum(Backend, config.get_backend())
    if backend == Backend.ANSATZ:
        return initial_state(config.get_metric(), config.get_metric_params())
    metric = metric_catalog(config.get_metric(), config.get_metric_params())
    dims = config.get_grid_dims() or default_dims(metric.n)
    return FlowState.grid(0.0, sample_metric(metric, dims))


def cmd_flow(config: RunConfig, progress: bool = True) -> int:
    """Integrate the flow, write the monitor CSV, the run archive and optional snapshots."""
    state = flow_initial_state(config)
    monitor = FlowMonitor(method=config.get_method(), restarts=config.get_restarts(), seed=config.get_seed())
    run = integrate(state, config.get_dt(), config.get_t_end(), config.get_variant(), config.get_cadence(),
                    monitor, progress=progress)
    out = config.get_out()
    artifacts = [os.path.join(out, 'monitor.csv'), os.path.join(out, 'run.h5')]
    write_monitor_csv(run.records, artifacts[0])
    save_run(run, artifacts[1], config.get_config(), overwrite=True)
    if config.get_checkpoints():
        os.makedirs(os.path.join(out, 'snapshots'), exist_ok=True)
        for k, snapshot in enumerate(run.snapshots):
            path = os.path.join(out, 'snapshots', 'snapshot_{:06d}.hcf1'.format(k))
            write_snapshot(snapshot, path)
            artifacts.append(path)
    write_manifest(config, artifacts)
    if run.halted:
        logger.error("Flow halted: %s", run.error)
        return EXIT_BLOWUP
    return EXIT_PASS


def cmd_certify(config: RunConfig) -> int:
    """Griffiths minimum of the chosen tensor over random chart points."""
    metric = metric_catalog(config.get_metric(), config.get_metric_params())
    rng = np.random.default_rng(config.get_seed())
    points = metric.chart.sample(rng, config.get_sample_points())
    function = partial(_certify_point, metric, config.get_tensor(), config.get_method(), config.get_restarts(),
                       config.get_seed())
    reports = _evaluator(config).map(function, points)
    worst = int(np.argmin([report.min_value for report in reports]))
    tolerance = config.tolerances()['griffiths']
    verdict = griffiths_verdict(reports[worst].min_value, tolerance)
    result = {'metric': metric.name,
              'parameters': metric.spec.parameters,
              'tensor': config.get_tensor(),
              'sample_points': len(points),
              'min_value': reports[worst].min_value,
              'argmin_point': points[worst],
              'argmin': reports[worst].to_dict(),
              'verdict': verdict,
              'expected_nonnegative': metric.spec.expected_griffiths_nonneg,
              'tolerance': tolerance}
    path = os.path.join(config.get_out(), 'certify.json')
    _write_json(path, result)
    write_manifest(config, [path])
    print(_dump(result))
    return EXIT_FAILURE if verdict == 'negative' else EXIT_PASS


def transport_curve(config: RunConfig, metric: MetricField):
    """Configured curve; missing parameters default around the chart center."""
    name = config.get_curve()
    params = dict(config.get_curve_params())
    for key in VECTOR_KEYS:
        if key in params:
            params[key] = _complex_vector(params[key])
    center = chart_center(metric.chart)
    if name == 'hopf_circle':
        params.setdefault('point', np.eye(metric.n, dtype=complex)[0])
    elif name == 'line':
        params.setdefault('start', center)
        params.setdefault('end', center + 0.1)
    elif name == 'circle':
        params.setdefault('center', center)
        params.setdefault('radius', 0.1)
    elif name == 'lissajous':
        params.setdefault('center', center)
        params.setdefault('amplitudes', [0.1] * metric.n)
        params.setdefault('frequencies', [(1, 1)] * metric.n)
    try:
        return get_curve(name, **params)
    except TypeError as error:
        raise ConfigError("Bad parameters for curve {}: {}".format(name, error))


def transport_init(config: RunConfig, n: int):
    pair = config.get_pair()
    if pair is None:
        return np.eye(n, dtype=complex)[0], np.ones(n, dtype=complex) / np.sqrt(n)
    return _complex_vector(pair[0]), _complex_vector(pair[1])


def cmd_transport(config: RunConfig) -> int:
    """Transport a pair along the configured curve and report the pairing drift."""
    metric = metric_catalog(config.get_metric(), config.get_metric_params())
    curve = transport_curve(config, metric)
    init = transport_init(config, metric.n)
    twisted = bool(config.get_twisted())
    out = config.get_out()
    csv_path = os.path.join(out, 'trajectory.csv')
    try:
        trajectory = transport_pair(metric, curve, init, config.get_steps(), twisted, twisted, with_curvature=True)
    except TransportError as error:
        write_trajectory_csv(error.trajectory, csv_path)
        write_manifest(config, [csv_path])
        raise
    write_trajectory_csv(trajectory, csv_path)
    drift = pairing_invariance_check(trajectory)
    tolerance = config.tolerances()['pairing']
    result = {'metric': metric.name,
              'curve': curve.name,
              'steps': config.get_steps(),
              'twisted': twisted,
              'initial_pairing': trajectory.pairings[0],
              'pairing_drift': drift,
              'tolerance': tolerance,
              'pass': bool(drift <= tolerance)}
    json_path = os.path.join(out, 'transport.json')
    _write_json(json_path, result)
    write_manifest(config, [csv_path, json_path])
    print(_dump(result))
    if twisted and not result['pass']:
        return EXIT_FAILURE
    return EXIT_PASS


def cmd_list_metrics(config: RunConfig) -> int:
    print(_dump(list_metrics()))
    return EXIT_PASS


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog='hcflab', description="Numerical lab for the Hermitian curvature flow")
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--config', type=str, help="YAML file of run configuration keys")
    parser.add_argument('--metric', type=str, help="catalog metric, overrides the config file")
    parser.add_argument('--seed', type=int, help="random seed")
    parser.add_argument('--out', type=str, help="output directory")
    parser.add_argument('--tol', type=float, help="tolerance applied to every check")
    parser.add_argument('--quiet', action='store_true', help="warnings only, no progress bars")
    return parser.parse_args(argv)


def run_command(config: RunConfig, quiet: bool = False) -> int:
    command = config.get_command()
    if command == 'list-metrics':
        return cmd_list_metrics(config)
    os.makedirs(config.get_out(), exist_ok=True)
    if command == 'verify':
        return cmd_verify(config)
    if command == 'flow':
        return cmd_flow(config, progress=not quiet)
    if command == 'certify':
        return cmd_certify(config)
    return cmd_transport(config)


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        config = load_config(args.config, command=args.command, metric=args.metric, seed=args.seed, out=args.out,
                             tolerance=args.tol).validate()
        return run_command(config, quiet=args.quiet)
    except (FlowBlowupError, DegenerateMetricError, TransportError) as error:
        logger.error("Numerical failure: %s", error)
        return EXIT_BLOWUP
    except (AnsatzEscapeError, PreconditionError) as error:
        logger.error("Check failed: %s", error)
        return EXIT_FAILURE
    except (ConfigError, OSError) as error:
        logger.error("Configuration error: %s", error)
        return EXIT_USAGE
    except HCFError as error:
        logger.error("%s: %s", type(error).__name__, error)
        return EXIT_USAGE


if __name__ == '__main__':
    raise SystemExit(main())
