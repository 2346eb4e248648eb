"""Run configuration: pyspark Params with YAML loading and validation."""
import logging
from typing import Any, Dict

import yaml
from pyspark import keyword_only

from .exceptions import ConfigError, HCFError
from .flow.ansatz import initial_state
from .flow.grid import default_dims, validate_dims
from .metrics import metric_spec
from .ml.params import *
from .positivity import METHODS
from .transport import CURVES
from .utils.model_utils import Backend, Variant, to_enum

logger = logging.getLogger(__name__)

COMMANDS = ('verify', 'flow', 'certify', 'transport', 'list-metrics')
TENSORS = ('omega', 'metric_product')
EVALUATORS = ('local', 'spark')
DEFAULT_TOLERANCES = {'curvature_type': 1e-12,
                      'bianchi': 1e-9,
                      'curvature_paths': 1e-9,
                      'variation': 1e-6,
                      'kahler': 1e-12,
                      'evolution': 1e-8,
                      'griffiths': 1e-8,
                      'pairing': 1e-8}


class RunConfig(HasCommand, HasMetric, HasMetricParams, HasVariant, HasBackend, HasTimeStep, HasEndTime,
                HasGridDims, HasMonitorCadence, HasSeed, HasTolerance, HasOutputDir, HasCurve, HasPair, HasSteps,
                HasSamplePoints, HasEvaluator, HasGriffithsMethod, HasTensor, HasCheckpoints):
    """
    Configuration of one command run. Every key of a YAML config file is a
    parameter of this class; keys set on the command line win over the file.
    """

    @keyword_only
    def __init__(self, **kwargs):
        super(RunConfig, self).__init__()
        self.set_params(**kwargs)

    @keyword_only
    def set_params(self, **kwargs):
        """Set all provided parameters, otherwise keep defaults
        """
        known = {param.name for param in self.params}
        unknown = set(kwargs) - known
        if unknown:
            raise ConfigError("Unknown configuration keys: {}".format(', '.join(sorted(unknown))))
        return self._set(**{key: value for key, value in kwargs.items() if value is not None})

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> 'RunConfig':
        return cls(**dict(config))

    @classmethod
    def from_yaml(cls, path) -> 'RunConfig':
        with open(path) as handle:
            try:
                config = yaml.safe_load(handle)
            except yaml.YAMLError as error:
                raise ConfigError("Cannot parse config {}: {}".format(path, error))
        if config is None:
            config = {}
        if not isinstance(config, dict):
            raise ConfigError("Config {} must be a mapping of keys to values".format(path))
        return cls.from_dict(config)

    def get_config(self) -> Dict[str, Any]:
        return {param.name: self.getOrDefault(param) for param in sorted(self.params, key=lambda p: p.name)}

    def tolerances(self) -> Dict[str, float]:
        if self.get_tolerance() is None:
            return dict(DEFAULT_TOLERANCES)
        return {key: float(self.get_tolerance()) for key in DEFAULT_TOLERANCES}

    def validate(self) -> 'RunConfig':
        """Check values and cross-field consistency.

        :raises ConfigError: on the first violation found
        """
        command = self.get_command()
        if command not in COMMANDS:
            raise ConfigError("Choose from one of the commands: {}".format(', '.join(COMMANDS)))
        if command == 'list-metrics':
            return self
        _require(isinstance(self.get_metric_params(), dict), "metric_params must be a mapping")
        spec = metric_spec(self.get_metric(), self.get_metric_params())
        _require(_positive_int(self.get_seed(), allow_zero=True), "seed must be a non-negative integer")
        _require(_positive_int(self.get_sample_points()), "sample_points must be a positive integer")
        tolerance = self.get_tolerance()
        _require(tolerance is None or (_number(tolerance) and tolerance >= 0), "tolerance must be >= 0")
        _require(self.get_evaluator() in EVALUATORS, "evaluator must be one of {}".format(', '.join(EVALUATORS)))
        _require(_positive_int(self.get_num_workers()), "num_workers must be a positive integer")
        _require(self.get_method() in METHODS, "method must be one of {}".format(', '.join(METHODS)))
        _require(_positive_int(self.get_restarts()), "restarts must be a positive integer")
        if command == 'flow':
            self._validate_flow(spec)
        if command == 'certify':
            _require(self.get_tensor() in TENSORS, "tensor must be one of {}".format(', '.join(TENSORS)))
        if command == 'transport':
            _require(self.get_curve() in CURVES, "curve must be one of {}".format(', '.join(CURVES)))
            _require(isinstance(self.get_curve_params(), dict), "curve_params must be a mapping")
            _require(_positive_int(self.get_steps()), "steps must be a positive integer")
            pair = self.get_pair()
            _require(pair is None or (len(pair) == 2 and all(len(v) == spec.dimension for v in pair)),
                     "pair must hold two vectors of length {}".format(spec.dimension))
        return self

    def _validate_flow(self, spec):
        try:
            to_enum(Variant, self.get_variant())
            backend = to_enum(Backend, self.get_backend())
        except ValueError as error:
            raise ConfigError(str(error))
        _require(_number(self.get_dt()) and self.get_dt() > 0, "dt must be positive")
        _require(_number(self.get_t_end()) and self.get_t_end() >= 0, "t_end must be non-negative")
        _require(_positive_int(self.get_cadence()), "cadence must be a positive integer")
        if backend == Backend.GRID:
            _require(spec.chart.kind == 'torus', "grid backend needs a torus metric, {} is not".format(spec.name))
            dims = self.get_grid_dims() or default_dims(spec.dimension)
            try:
                validate_dims(dims, spec.dimension)
            except HCFError as error:
                raise ConfigError(str(error))
        else:
            initial_state(self.get_metric(), self.get_metric_params())


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _positive_int(value, allow_zero: bool = False) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and (value >= 0 if allow_zero else value > 0)


def load_config(path=None, **overrides) -> RunConfig:
    """Config from an optional YAML file with keyword overrides applied on top."""
    config = RunConfig.from_yaml(path) if path is not None else RunConfig()
    config.set_params(**overrides)
    return config
