import numpy as np
from hcflab.utils import rdd_utils


def test_to_point_rdd(spark_context):
    points = np.arange(10, dtype=complex).reshape(5, 2)
    rdd = rdd_utils.to_point_rdd(spark_context, points, 2)

    assert rdd.count() == 5
    assert rdd.getNumPartitions() == 2
    first = rdd.first()
    assert first[0] == 0
    assert np.array_equal(first[1], points[0])


def test_collect_ordered(spark_context):
    rdd = spark_context.parallelize([(2, 'c'), (0, 'a'), (1, 'b')], 2)
    assert rdd_utils.collect_ordered(rdd) == ['a', 'b', 'c']
