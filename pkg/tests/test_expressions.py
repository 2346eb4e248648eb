import numpy as np
import pytest

from hcflab.expressions import Constant, Cos, Exp, Sin, squared_norm, z, zbar
from hcflab.jets import get_space


@pytest.fixture
def expression():
    return Exp(Constant(0.5j) * z(0)) * zbar(1) + Cos(z(1) + zbar(0)) / (Constant(1.0) + squared_norm(2)) ** 2


def test_evaluate_matches_jet_value(expression, rng):
    points = rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))
    values = expression.evaluate(points)
    for point, value in zip(points, values):
        assert expression.jet(get_space(2, 2), point).value == pytest.approx(value)


def test_conjugate(expression, rng):
    points = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    assert np.allclose(expression.conjugate().evaluate(points), np.conj(expression.evaluate(points)))


def test_jet_conjugate_agrees(expression):
    point = np.array([0.3 + 0.1j, -0.2 + 0.4j])
    space = get_space(2, 3)
    assert np.allclose(expression.conjugate().jet(space, point).coeffs, expression.jet(space, point).conj().coeffs)


def test_first_derivative_by_difference(expression):
    point = np.array([0.3 + 0.1j, -0.2 + 0.4j])
    jet = expression.jet(get_space(2, 1), point)
    h = 1e-6
    # ∂_z = (∂_x - i ∂_y) / 2
    dx = (expression.evaluate(point + [h, 0]) - expression.evaluate(point - [h, 0])) / (2 * h)
    dy = (expression.evaluate(point + [1j * h, 0]) - expression.evaluate(point - [1j * h, 0])) / (2 * h)
    assert jet.extract((1, 0), (0, 0)) == pytest.approx(0.5 * (dx - 1j * dy), abs=1e-8)
    assert jet.extract((0, 0), (1, 0)) == pytest.approx(0.5 * (dx + 1j * dy), abs=1e-8)


def test_shift_moves_coordinates():
    shifted = (z(0) * zbar(0) + Sin(z(0))).shift(1)
    point = np.array([5.0, 0.2 + 0.3j])
    expected = abs(point[1]) ** 2 + np.sin(point[1])
    assert shifted.evaluate(point) == pytest.approx(expected)


def test_operators_build_trees():
    expression = 2 - z(0) * 3
    assert expression.evaluate(np.array([1.0 + 1j])) == pytest.approx(-1 - 3j)
    assert (-z(0)).evaluate(np.array([2.0])) == pytest.approx(-2.0)
    assert (1 / z(0)).evaluate(np.array([4.0])) == pytest.approx(0.25)
