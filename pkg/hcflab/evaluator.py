"""Data-parallel evaluation of a pure function over chart points."""
import logging
from abc import ABC, abstractmethod
from functools import partial
from typing import Any, Callable, Iterable, List, Optional

import numpy as np
from pyspark import SparkContext

from .exceptions import StructuralError
from .utils.rdd_utils import collect_ordered, to_point_rdd

logger = logging.getLogger(__name__)


class PointEvaluator(ABC):
    _type = 'base'

    @classmethod
    def get_evaluator(cls, _type: str, **kwargs) -> 'PointEvaluator':
        try:
            return next(cl for cl in cls.__subclasses__() if cl._type == _type)(**kwargs)
        except StopIteration:
            raise StructuralError("Unknown evaluator type {}".format(_type))

    @abstractmethod
    def map(self, function: Callable[[np.ndarray], Any], points: np.ndarray) -> List[Any]:
        """Results of `function` on every point, in input order."""


class LocalEvaluator(PointEvaluator):
    _type = 'local'

    def __init__(self, **kwargs):
        pass

    def map(self, function, points):
        return [function(np.asarray(x)) for x in points]


def _evaluate_partition(function: Callable, iterator: Iterable):
    for index, point in iterator:
        yield index, function(point)


class SparkEvaluator(PointEvaluator):
    """Ships `function` to the workers and evaluates one partition per task.

    :param sc: Spark context, the active one if omitted
    :param num_workers: number of partitions
    """
    _type = 'spark'

    def __init__(self, sc: Optional[SparkContext] = None, num_workers: int = 4):
        self.sc = sc
        self.num_workers = num_workers

    def map(self, function, points):
        sc = self.sc if self.sc is not None else SparkContext.getOrCreate()
        rdd = to_point_rdd(sc, points, self.num_workers)
        logger.debug("Evaluating %d points on %d partitions", len(points), self.num_workers)
        return collect_ordered(rdd.mapPartitions(partial(_evaluate_partition, function)))


def get_evaluator(_type: str = 'local', **kwargs) -> PointEvaluator:
    return PointEvaluator.get_evaluator(_type, **kwargs)
