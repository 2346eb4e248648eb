from hcflab.ml.params import *


def test_has_command():
    param = HasCommand()
    assert param.get_command() == "verify"
    param.set_command("flow")
    assert param.get_command() == "flow"


def test_has_metric():
    param = HasMetric()
    assert param.get_metric() == "flat_torus"
    param.set_metric("hopf_round")
    assert param.get_metric() == "hopf_round"


def test_has_metric_params():
    param = HasMetricParams()
    assert param.get_metric_params() == {}
    conf = {"n": 3}
    param.set_metric_params(conf)
    assert conf == param.get_metric_params()


def test_has_variant():
    param = HasVariant()
    assert param.get_variant() == "hcf"
    param.set_variant("chern_ricci")
    assert param.get_variant() == "chern_ricci"


def test_has_backend():
    param = HasBackend()
    assert param.get_backend() == "ansatz"
    param.set_backend("grid")
    assert param.get_backend() == "grid"


def test_has_time_step():
    param = HasTimeStep()
    assert param.get_dt() == 0.01
    param.set_dt(0.5)
    assert param.get_dt() == 0.5


def test_has_end_time():
    param = HasEndTime()
    assert param.get_t_end() == 0.1
    param.set_t_end(2.0)
    assert param.get_t_end() == 2.0


def test_has_grid_dims():
    param = HasGridDims()
    assert param.get_grid_dims() is None
    param.set_grid_dims([8, 8])
    assert param.get_grid_dims() == [8, 8]


def test_has_monitor_cadence():
    param = HasMonitorCadence()
    assert param.get_cadence() == 10
    param.set_cadence(1)
    assert param.get_cadence() == 1


def test_has_seed():
    param = HasSeed()
    assert param.get_seed() == 0
    param.set_seed(42)
    assert param.get_seed() == 42


def test_has_tolerance():
    param = HasTolerance()
    assert param.get_tolerance() is None
    param.set_tolerance(1e-3)
    assert param.get_tolerance() == 1e-3


def test_has_output_dir():
    param = HasOutputDir()
    assert param.get_out() == "hcflab-output"
    param.set_out("/tmp/run")
    assert param.get_out() == "/tmp/run"


def test_has_curve():
    param = HasCurve()
    assert param.get_curve() == "hopf_circle"
    assert param.get_curve_params() == {}
    param.set_curve("line")
    param.set_curve_params({"start": [0.5], "end": [0.6]})
    assert param.get_curve() == "line"
    assert param.get_curve_params()["end"] == [0.6]


def test_has_pair():
    param = HasPair()
    assert param.get_pair() is None
    assert param.get_twisted()
    param.set_twisted(False)
    assert not param.get_twisted()


def test_has_steps():
    param = HasSteps()
    assert param.get_steps() == 512
    param.set_steps(64)
    assert param.get_steps() == 64


def test_has_sample_points():
    param = HasSamplePoints()
    assert param.get_sample_points() == 100
    param.set_sample_points(7)
    assert param.get_sample_points() == 7


def test_has_evaluator():
    param = HasEvaluator()
    assert param.get_evaluator() == "local"
    assert param.get_num_workers() == 4
    param.set_evaluator("spark")
    param.set_num_workers(2)
    assert param.get_evaluator() == "spark"
    assert param.get_num_workers() == 2


def test_has_griffiths_method():
    param = HasGriffithsMethod()
    assert param.get_method() == "alternating"
    assert param.get_restarts() == 32
    param.set_method("hybrid")
    assert param.get_method() == "hybrid"


def test_has_tensor():
    param = HasTensor()
    assert param.get_tensor() == "omega"
    param.set_tensor("metric_product")
    assert param.get_tensor() == "metric_product"


def test_has_checkpoints():
    param = HasCheckpoints()
    assert not param.get_checkpoints()
    param.set_checkpoints(True)
    assert param.get_checkpoints()
