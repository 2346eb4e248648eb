from typing import Any, List, Optional

import numpy as np
from pyspark import RDD, SparkContext


def to_point_rdd(sc: SparkContext, points: np.ndarray, num_slices: Optional[int] = None) -> RDD:
    """Convert an array of chart points into an RDD of (index, point) pairs.

    :param sc: Spark context
    :param points: numpy array of shape (count, n)
    :param num_slices: number of partitions
    :return: Spark RDD with index-point pairs
    """
    rdd = sc.parallelize([np.asarray(x) for x in points], num_slices)
    return rdd.zipWithIndex().map(lambda pair: (pair[1], pair[0]))


def collect_ordered(rdd: RDD) -> List[Any]:
    """Collect an RDD of (index, value) pairs as a list ordered by index

    :param rdd: Spark RDD with index-value pairs
    :return: list of values
    """
    return [value for _, value in sorted(rdd.collect(), key=lambda pair: pair[0])]
