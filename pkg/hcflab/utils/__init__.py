from .functional_utils import *
from .model_utils import *
from .rdd_utils import *
