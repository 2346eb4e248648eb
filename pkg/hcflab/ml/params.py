from pyspark.ml.param.shared import Param, Params


class HasCommand(Params):
    """Mandatory field:

    Parameter mixin for the command to run
    """

    def __init__(self):
        super(HasCommand, self).__init__()
        self.command = Param(self, "command", "one of verify, flow, certify, transport, list-metrics")
        self._setDefault(command='verify')

    def set_command(self, command):
        self._paramMap[self.command] = command
        return self

    def get_command(self):
        return self.getOrDefault(self.command)


class HasMetric(Params):
    """Mandatory field:

    Parameter mixin for the catalog metric name
    """

    def __init__(self):
        super(HasMetric, self).__init__()
        self.metric = Param(self, "metric", "catalog metric name")
        self._setDefault(metric='flat_torus')

    def set_metric(self, metric):
        self._paramMap[self.metric] = metric
        return self

    def get_metric(self):
        return self.getOrDefault(self.metric)


class HasMetricParams(Params):
    """Parameter mixin for catalog metric parameters
    """

    def __init__(self):
        super(HasMetricParams, self).__init__()
        self.metric_params = Param(self, "metric_params", "parameters of the catalog metric")
        self._setDefault(metric_params={})

    def set_metric_params(self, metric_params):
        self._paramMap[self.metric_params] = metric_params
        return self

    def get_metric_params(self):
        return self.getOrDefault(self.metric_params)


class HasVariant(Params):
    """Parameter mixin for the flow variant
    """

    def __init__(self):
        super(HasVariant, self).__init__()
        self.variant = Param(self, "variant", "hcf or chern_ricci")
        self._setDefault(variant='hcf')

    def set_variant(self, variant):
        self._paramMap[self.variant] = variant
        return self

    def get_variant(self):
        return self.getOrDefault(self.variant)


class HasBackend(Params):
    """Parameter mixin for the flow backend
    """

    def __init__(self):
        super(HasBackend, self).__init__()
        self.backend = Param(self, "backend", "grid or ansatz")
        self._setDefault(backend='ansatz')

    def set_backend(self, backend):
        self._paramMap[self.backend] = backend
        return self

    def get_backend(self):
        return self.getOrDefault(self.backend)


class HasTimeStep(Params):
    """Parameter mixin for the time step
    """

    def __init__(self):
        super(HasTimeStep, self).__init__()
        self.dt = Param(self, "dt", "time step")
        self._setDefault(dt=0.01)

    def set_dt(self, dt):
        self._paramMap[self.dt] = dt
        return self

    def get_dt(self):
        return self.getOrDefault(self.dt)


class HasEndTime(Params):
    """Parameter mixin for the final flow time
    """

    def __init__(self):
        super(HasEndTime, self).__init__()
        self.t_end = Param(self, "t_end", "final flow time")
        self._setDefault(t_end=0.1)

    def set_t_end(self, t_end):
        self._paramMap[self.t_end] = t_end
        return self

    def get_t_end(self):
        return self.getOrDefault(self.t_end)


class HasGridDims(Params):
    """Parameter mixin for lattice dimensions, one per real coordinate
    """

    def __init__(self):
        super(HasGridDims, self).__init__()
        self.grid_dims = Param(self, "grid_dims", "lattice points per real coordinate")
        self._setDefault(grid_dims=None)

    def set_grid_dims(self, grid_dims):
        self._paramMap[self.grid_dims] = grid_dims
        return self

    def get_grid_dims(self):
        return self.getOrDefault(self.grid_dims)


class HasMonitorCadence(Params):
    """Parameter mixin for the number of steps between monitor records
    """

    def __init__(self):
        super(HasMonitorCadence, self).__init__()
        self.cadence = Param(self, "cadence", "steps between monitor records")
        self._setDefault(cadence=10)

    def set_cadence(self, cadence):
        self._paramMap[self.cadence] = cadence
        return self

    def get_cadence(self):
        return self.getOrDefault(self.cadence)


class HasSeed(Params):
    """Parameter mixin for the random seed
    """

    def __init__(self):
        super(HasSeed, self).__init__()
        self.seed = Param(self, "seed", "random seed")
        self._setDefault(seed=0)

    def set_seed(self, seed):
        self._paramMap[self.seed] = seed
        return self

    def get_seed(self):
        return self.getOrDefault(self.seed)


class HasTolerance(Params):
    """Parameter mixin for a tolerance overriding every identity tolerance
    """

    def __init__(self):
        super(HasTolerance, self).__init__()
        self.tolerance = Param(self, "tolerance", "tolerance for all checks, default per check")
        self._setDefault(tolerance=None)

    def set_tolerance(self, tolerance):
        self._paramMap[self.tolerance] = tolerance
        return self

    def get_tolerance(self):
        return self.getOrDefault(self.tolerance)


class HasOutputDir(Params):
    """Parameter mixin for the output directory
    """

    def __init__(self):
        super(HasOutputDir, self).__init__()
        self.out = Param(self, "out", "output directory")
        self._setDefault(out='hcflab-output')

    def set_out(self, out):
        self._paramMap[self.out] = out
        return self

    def get_out(self):
        return self.getOrDefault(self.out)


class HasCurve(Params):
    """Parameter mixin for the transport curve, a name plus parameters
    """

    def __init__(self):
        super(HasCurve, self).__init__()
        self.curve = Param(self, "curve", "transport curve name")
        self.curve_params = Param(self, "curve_params", "transport curve parameters")
        self._setDefault(curve='hopf_circle', curve_params={})

    def set_curve(self, curve):
        self._paramMap[self.curve] = curve
        return self

    def get_curve(self):
        return self.getOrDefault(self.curve)

    def set_curve_params(self, curve_params):
        self._paramMap[self.curve_params] = curve_params
        return self

    def get_curve_params(self):
        return self.getOrDefault(self.curve_params)


class HasPair(Params):
    """Parameter mixin for the transported pair (ξ, η), entries as [re, im]
    """

    def __init__(self):
        super(HasPair, self).__init__()
        self.pair = Param(self, "pair", "initial vectors xi and eta")
        self.twisted = Param(self, "twisted", "torsion-twisted (true) or plain Chern (false) transport")
        self._setDefault(pair=None, twisted=True)

    def set_pair(self, pair):
        self._paramMap[self.pair] = pair
        return self

    def get_pair(self):
        return self.getOrDefault(self.pair)

    def set_twisted(self, twisted):
        self._paramMap[self.twisted] = twisted
        return self

    def get_twisted(self):
        return self.getOrDefault(self.twisted)


class HasSteps(Params):
    """Parameter mixin for the number of transport steps
    """

    def __init__(self):
        super(HasSteps, self).__init__()
        self.steps = Param(self, "steps", "RK4 steps along the curve")
        self._setDefault(steps=512)

    def set_steps(self, steps):
        self._paramMap[self.steps] = steps
        return self

    def get_steps(self):
        return self.getOrDefault(self.steps)


class HasSamplePoints(Params):
    """Parameter mixin for the number of random sample points
    """

    def __init__(self):
        super(HasSamplePoints, self).__init__()
        self.sample_points = Param(self, "sample_points", "number of random sample points")
        self._setDefault(sample_points=100)

    def set_sample_points(self, sample_points):
        self._paramMap[self.sample_points] = sample_points
        return self

    def get_sample_points(self):
        return self.getOrDefault(self.sample_points)


class HasEvaluator(Params):
    """Parameter mixin for the point evaluator type
    """

    def __init__(self):
        super(HasEvaluator, self).__init__()
        self.evaluator = Param(self, "evaluator", "local or spark")
        self.num_workers = Param(self, "num_workers", "number of partitions for the spark evaluator")
        self._setDefault(evaluator='local', num_workers=4)

    def set_evaluator(self, evaluator):
        self._paramMap[self.evaluator] = evaluator
        return self

    def get_evaluator(self):
        return self.getOrDefault(self.evaluator)

    def set_num_workers(self, num_workers):
        self._paramMap[self.num_workers] = num_workers
        return self

    def get_num_workers(self):
        return self.getOrDefault(self.num_workers)


class HasGriffithsMethod(Params):
    """Parameter mixin for the Griffiths minimizer
    """

    def __init__(self):
        super(HasGriffithsMethod, self).__init__()
        self.method = Param(self, "method", "alternating, grid or hybrid")
        self.restarts = Param(self, "restarts", "random restarts of the alternating minimizer")
        self._setDefault(method='alternating', restarts=32)

    def set_method(self, method):
        self._paramMap[self.method] = method
        return self

    def get_method(self):
        return self.getOrDefault(self.method)

    def set_restarts(self, restarts):
        self._paramMap[self.restarts] = restarts
        return self

    def get_restarts(self):
        return self.getOrDefault(self.restarts)


class HasTensor(Params):
    """Parameter mixin for the tensor to certify
    """

    def __init__(self):
        super(HasTensor, self).__init__()
        self.tensor = Param(self, "tensor", "omega (Chern curvature) or metric_product (g ⊗ g)")
        self._setDefault(tensor='omega')

    def set_tensor(self, tensor):
        self._paramMap[self.tensor] = tensor
        return self

    def get_tensor(self):
        return self.getOrDefault(self.tensor)


class HasCheckpoints(Params):
    """Parameter mixin for writing HCF1 snapshots at every monitor record
    """

    def __init__(self):
        super(HasCheckpoints, self).__init__()
        self.checkpoints = Param(self, "checkpoints", "write binary snapshots at monitor records")
        self._setDefault(checkpoints=False)

    def set_checkpoints(self, checkpoints):
        self._paramMap[self.checkpoints] = checkpoints
        return self

    def get_checkpoints(self):
        return self.getOrDefault(self.checkpoints)
