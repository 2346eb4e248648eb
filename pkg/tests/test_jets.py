import numpy as np
import pytest

from hcflab.exceptions import SingularityError, StructuralError
from hcflab.jets import (ComplexJet, contract, get_space, jet_algebra, jet_einsum, jet_extract, jet_invert,
                         jet_matrix_inverse)


def z_jet(order, center=(0.0,)):
    return ComplexJet.variable(get_space(len(center), order), 0, center)


def zbar_jet(order, center=(0.0,)):
    return ComplexJet.variable(get_space(len(center), order), 0, center, conjugate=True)


def random_jet(rng, n, order, shape=(), constant=1.0):
    space = get_space(n, order)
    coeffs = 0.3 * (rng.normal(size=shape + (space.size,)) + 1j * rng.normal(size=shape + (space.size,)))
    coeffs[..., 0] = constant
    return ComplexJet(space, coeffs, np.zeros(n))


def test_space_prefix_ordering():
    low, high = get_space(2, 2), get_space(2, 4)
    assert np.array_equal(high.exponents[:low.size], low.exponents)
    assert low.size == 15


def test_mul_monomials():
    product = jet_algebra(z_jet(2), zbar_jet(2), 'mul')
    k = product.space.position((1,), (1,))
    expected = np.zeros(product.space.size, dtype=complex)
    expected[k] = 1.0
    assert np.array_equal(product.coeffs, expected)


def test_add_negation_is_zero(rng):
    j = random_jet(rng, 2, 3)
    assert np.all(jet_algebra(j, -j, 'add').coeffs == 0)


def test_square_of_one_plus_norm():
    a = 1 + z_jet(4) * zbar_jet(4)
    square = jet_algebra(a, a, 'mul')
    assert square.coefficient((0,), (0,)) == 1
    assert square.coefficient((1,), (1,)) == 2
    assert square.coefficient((2,), (2,)) == 1
    assert square.coefficient((1,), (0,)) == 0


def test_unknown_operation():
    with pytest.raises(StructuralError):
        jet_algebra(z_jet(2), z_jet(2), 'div')


def test_center_mismatch():
    with pytest.raises(StructuralError):
        z_jet(2) + z_jet(2, center=(1.0,))


def test_order_mismatch():
    with pytest.raises(StructuralError):
        jet_algebra(z_jet(2), z_jet(3), 'add')


def test_invert_constant():
    inverse = jet_invert(ComplexJet.constant(get_space(1, 2), 2.0, [0.0]))
    assert inverse.value == 0.5
    assert np.all(inverse.coeffs[1:] == 0)


def test_invert_geometric_series():
    inverse = jet_invert(1 + z_jet(2) * zbar_jet(2))
    assert inverse.coefficient((0,), (0,)) == pytest.approx(1.0)
    assert inverse.coefficient((1,), (1,)) == pytest.approx(-1.0)


def test_invert_product_is_unit(rng):
    for _ in range(10):
        a = random_jet(rng, 2, 3, constant=0.5 + rng.random())
        unit = a * jet_invert(a)
        assert abs(unit.value - 1) < 1e-12
        assert np.max(np.abs(unit.coeffs[1:])) < 1e-12


def test_invert_singular():
    with pytest.raises(SingularityError):
        jet_invert(z_jet(2))


def test_extract():
    assert jet_extract(z_jet(2) * zbar_jet(2), (1,), (1,)) == 1
    a = 1 + z_jet(3) * zbar_jet(3)
    assert jet_extract(a, (0,), (0,)) == a.value


def test_extract_negative_power():
    a = (1 + z_jet(2) * zbar_jet(2)) ** -2
    assert jet_extract(a, (1,), (1,)) == pytest.approx(-2.0)


def test_extract_factorials():
    # ∂²_z e^z = e^z
    e = z_jet(3).exp()
    assert jet_extract(e, (2,), (0,)) == pytest.approx(1.0)
    assert jet_extract(e, (3,), (0,)) == pytest.approx(1.0)


def test_extract_beyond_order():
    with pytest.raises(StructuralError):
        jet_extract(z_jet(2), (3,), (0,))


def test_fractional_power_matches_reciprocal():
    a = 1 + z_jet(4) * zbar_jet(4)
    assert np.allclose((a ** -2).coeffs, (jet_invert(a) * jet_invert(a)).coeffs, atol=1e-14)


def test_conjugation_swaps_variables():
    assert np.array_equal(z_jet(3, (0.5 + 0.25j,)).conj().coeffs, zbar_jet(3, (0.5 + 0.25j,)).coeffs)


def test_derivative_of_product():
    space_center = (0.3 - 0.2j,)
    derivative = (z_jet(3, space_center) * zbar_jet(3, space_center)).derivative(0)
    assert np.allclose(derivative.coeffs, zbar_jet(2, space_center).coeffs)


def test_trig_identity(rng):
    a = random_jet(rng, 2, 4, constant=0.4)
    one = a.cos() * a.cos() + a.sin() * a.sin()
    assert abs(one.value - 1) < 1e-13
    assert np.max(np.abs(one.coeffs[1:])) < 1e-12


def test_matrix_inverse(rng):
    m = random_jet(rng, 2, 3, shape=(2, 2), constant=0.0)
    m = m + np.array([[2.0, 0.3], [0.1, 1.5]])
    unit = contract('ij,jk->ik', m, jet_matrix_inverse(m))
    assert np.allclose(unit.value, np.eye(2), atol=1e-13)
    assert np.max(np.abs(unit.coeffs[..., 1:])) < 1e-12


def test_einsum_matches_products(rng):
    a = random_jet(rng, 2, 2, shape=(2, 3))
    b = random_jet(rng, 2, 2, shape=(3,))
    result = jet_einsum('ij,j->i', a, b)
    expected = a[:, 0] * b[0] + a[:, 1] * b[1] + a[:, 2] * b[2]
    assert np.allclose(result.coeffs, expected.coeffs)


def test_einsum_mixed_operands(rng):
    a = random_jet(rng, 2, 2, shape=(2, 2))
    plain = rng.normal(size=(2, 2))
    result = jet_einsum('ij,jk->ik', a, plain)
    assert np.allclose(result.value, a.value.dot(plain))


def test_einsum_needs_explicit_output(rng):
    with pytest.raises(StructuralError):
        jet_einsum('ij,jk', random_jet(rng, 1, 1, shape=(2, 2)), np.eye(2))


def test_reality_of_real_function(rng):
    x = 1 + z_jet(3, (0.2 + 0.1j,)) * zbar_jet(3, (0.2 + 0.1j,))
    assert x.reality_residual() < 1e-15
    assert (x * 1j).reality_residual() > 0.1
