class HCFError(Exception):
    """Base class for all errors raised by hcflab
    """


class StructuralError(HCFError, ValueError):
    """Mismatched shapes, orders, centers or missing derivative data
    """


class SingularityError(HCFError, ArithmeticError):
    """Inversion of a jet (or jet matrix) whose constant part vanishes
    """


class DegenerateMetricError(HCFError):
    """Metric sample below the positive-definiteness floor
    """

    def __init__(self, message, min_eigenvalue=None):
        super(DegenerateMetricError, self).__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DomainError(HCFError, ValueError):
    """Point outside the chart of a metric field
    """


class PreconditionError(HCFError):
    """An operation's mathematical precondition does not hold
    """


class FlowBlowupError(HCFError, RuntimeError):
    """Flow left the admissible set; `last_state` is the last good state
    """

    def __init__(self, message, last_state=None):
        super(FlowBlowupError, self).__init__(message)
        self.last_state = last_state


class AnsatzEscapeError(HCFError, RuntimeError):
    """Flow velocity does not lie in the span of the ansatz family
    """

    def __init__(self, message, residual=None):
        super(AnsatzEscapeError, self).__init__(message)
        self.residual = residual


class TransportError(HCFError, RuntimeError):
    """Frame failure along a transport curve; `trajectory` holds what was computed
    """

    def __init__(self, message, trajectory=None):
        super(TransportError, self).__init__(message)
        self.trajectory = trajectory if trajectory is not None else []


class ConfigError(HCFError, ValueError):
    """Invalid run configuration
    """
