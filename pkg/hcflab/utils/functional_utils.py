from typing import List, Sequence

import numpy as np


def add_arrays(array_list_left: List[np.ndarray], array_list_right: List[np.ndarray]) -> List[np.ndarray]:
    """Add two lists of arrays one by one

    :param array_list_left: list of numpy arrays
    :param array_list_right: list of numpy arrays
    :return: list of numpy arrays
    """
    return [x + y for x, y in zip(array_list_left, array_list_right)]


def subtract_arrays(array_list_left: List[np.ndarray], array_list_right: List[np.ndarray]) -> List[np.ndarray]:
    """Subtract two lists of arrays one by one

    :param array_list_left: list of numpy arrays
    :param array_list_right: list of numpy arrays
    :return: list of numpy arrays
    """
    return [x - y for x, y in zip(array_list_left, array_list_right)]


def scale_by(array_list: List[np.ndarray], factor: float) -> List[np.ndarray]:
    """Multiply every array of a list by a scalar.

    :param array_list: list of numpy arrays
    :param factor: scalar
    :return: list of numpy arrays
    """
    return [factor * x for x in array_list]


def get_neutral(array_list: List[np.ndarray]) -> List[np.ndarray]:
    """Get list of zero-valued numpy arrays for
    specified list of numpy arrays

    :param array_list: list of numpy arrays
    :return: list of zeros of same shape as input
    """
    return [np.zeros_like(x) for x in array_list]


def linear_combination(weights: Sequence[float], array_lists: Sequence[List[np.ndarray]]) -> List[np.ndarray]:
    """Sum_k weights[k] * array_lists[k], entry by entry.

    :param weights: scalars, one per list
    :param array_lists: lists of numpy arrays of matching shapes
    :return: list of numpy arrays
    """
    result = get_neutral(array_lists[0])
    for weight, arrays in zip(weights, array_lists):
        result = add_arrays(result, scale_by(arrays, weight))
    return result
