"""Truncated Taylor arithmetic in the 2n Wirtinger variables (z, z̄).

A jet stores, for every monomial (z - z0)^α (z̄ - z̄0)^β with |α| + |β| <= order,
the coefficient c_{αβ}. Coefficients live in the last axis of `coeffs`; leading
axes make a jet tensor-valued, so a metric is a single (n, n) jet.
"""
import string
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .exceptions import SingularityError, StructuralError

MAX_ORDER = 4
DEFAULT_SINGULARITY_TOLERANCE = 1e-12

Operand = Union['ComplexJet', np.ndarray, complex, float]


class JetSpace(object):
    """Monomial basis of jets in n complex dimensions up to a total order.

    Monomials are sorted by total degree, so the basis of a lower order is a
    prefix of the basis of a higher one and truncation is slicing.
    """

    def __init__(self, n: int, order: int):
        if n < 1:
            raise StructuralError("Jet dimension must be positive, got {}".format(n))
        if not 0 <= order <= MAX_ORDER:
            raise StructuralError("Jet order must lie in 0..{}, got {}".format(MAX_ORDER, order))
        self.n = n
        self.order = order
        self.nvars = 2 * n
        exponents = []
        for degree in range(order + 1):
            for combo in combinations_with_replacement(range(self.nvars), degree):
                exponent = [0] * self.nvars
                for var in combo:
                    exponent[var] += 1
                exponents.append(tuple(exponent))
        self.exponents = np.array(exponents, dtype=int).reshape(len(exponents), self.nvars)
        self.degrees = self.exponents.sum(axis=1)
        self.index = {e: k for k, e in enumerate(exponents)}
        self.size = len(exponents)
        self._product = None
        self._derivatives = {}
        swapped = np.concatenate([self.exponents[:, n:], self.exponents[:, :n]], axis=1)
        self.conjugation = np.array([self.index[tuple(e)] for e in swapped], dtype=int)
        self.factorials = np.array([np.prod([factorial(int(x)) for x in e]) for e in self.exponents],
                                   dtype=float)

    def __repr__(self):
        return "JetSpace(n={}, order={})".format(self.n, self.order)

    def __eq__(self, other):
        return isinstance(other, JetSpace) and other.n == self.n and other.order == self.order

    def __hash__(self):
        return hash((self.n, self.order))

    @property
    def product_table(self) -> sparse.csr_matrix:
        """Sparse (K, K*K) map from the flattened outer product of two coefficient
        vectors to the coefficients of their truncated product."""
        if self._product is None:
            rows, cols = [], []
            for i in range(self.size):
                for j in range(self.size):
                    if self.degrees[i] + self.degrees[j] <= self.order:
                        target = tuple(self.exponents[i] + self.exponents[j])
                        rows.append(self.index[target])
                        cols.append(i * self.size + j)
            self._product = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)),
                                              shape=(self.size, self.size * self.size))
        return self._product

    def multiply_outer(self, outer: np.ndarray) -> np.ndarray:
        """Reduce an array whose last two axes are an outer product of coefficient
        vectors to the coefficients of the truncated product."""
        lead = outer.shape[:-2]
        flat = outer.reshape(-1, self.size * self.size)
        reduced = self.product_table.dot(flat.T).T
        return np.asarray(reduced).reshape(lead + (self.size,))

    def derivative_map(self, var: int) -> Tuple[np.ndarray, np.ndarray]:
        """Source indices and factors so that the derivative in `var` of a jet of
        this order, as a jet of order - 1, is coeffs[..., src] * factor."""
        if self.order == 0:
            raise StructuralError("Cannot differentiate a jet of order 0")
        if var not in self._derivatives:
            lower = get_space(self.n, self.order - 1)
            src = np.empty(lower.size, dtype=int)
            factor = np.empty(lower.size, dtype=float)
            for k, exponent in enumerate(lower.exponents):
                raised = exponent.copy()
                raised[var] += 1
                src[k] = self.index[tuple(raised)]
                factor[k] = raised[var]
            self._derivatives[var] = (src, factor)
        return self._derivatives[var]

    def position(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        alpha, beta = tuple(int(a) for a in alpha), tuple(int(b) for b in beta)
        if len(alpha) != self.n or len(beta) != self.n or min(alpha + beta) < 0:
            raise StructuralError("Multi-indices must be {} non-negative integers".format(self.n))
        key = alpha + beta
        if key not in self.index:
            raise StructuralError("Multi-index of degree {} exceeds jet order {}".format(sum(key), self.order))
        return self.index[key]


@lru_cache(maxsize=None)
def get_space(n: int, order: int) -> JetSpace:
    return JetSpace(n, order)


class ComplexJet(object):
    """Tensor-valued truncated Taylor expansion at `center`.

    :param space: JetSpace fixing dimension and order
    :param coeffs: complex array, last axis indexes the monomials of `space`
    :param center: point of C^n the expansion is taken at
    """
    __array_priority__ = 1000
    __array_ufunc__ = None

    def __init__(self, space: JetSpace, coeffs, center):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 0 or coeffs.shape[-1] != space.size:
            raise StructuralError("Coefficient array of shape {} does not match {}".format(coeffs.shape, space))
        center = np.asarray(center, dtype=complex).reshape(-1)
        if center.shape != (space.n,):
            raise StructuralError("Center must be a point of C^{}".format(space.n))
        self.space = space
        self.coeffs = coeffs
        self.center = center

    @classmethod
    def constant(cls, space: JetSpace, value, center) -> 'ComplexJet':
        value = np.asarray(value, dtype=complex)
        coeffs = np.zeros(value.shape + (space.size,), dtype=complex)
        coeffs[..., 0] = value
        return cls(space, coeffs, center)

    @classmethod
    def variable(cls, space: JetSpace, index: int, center, conjugate: bool = False) -> 'ComplexJet':
        """Jet of the coordinate function z_index (or its conjugate)."""
        center = np.asarray(center, dtype=complex).reshape(-1)
        value = np.conj(center[index]) if conjugate else center[index]
        jet = cls.constant(space, value, center)
        if space.order >= 1:
            exponent = [0] * space.nvars
            exponent[index + (space.n if conjugate else 0)] = 1
            jet.coeffs[space.index[tuple(exponent)]] = 1.0
        return jet

    @property
    def order(self) -> int:
        return self.space.order

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[..., 0]

    @property
    def T(self) -> 'ComplexJet':
        return ComplexJet(self.space, np.swapaxes(self.coeffs, -2, -3), self.center)

    def __repr__(self):
        return "ComplexJet(shape={}, n={}, order={})".format(self.shape, self.n, self.order)

    def __getitem__(self, key) -> 'ComplexJet':
        return ComplexJet(self.space, self.coeffs[key], self.center)

    def transpose(self, *axes) -> 'ComplexJet':
        return ComplexJet(self.space, self.coeffs.transpose(tuple(axes) + (self.ndim,)), self.center)

    def _check(self, other: 'ComplexJet'):
        if other.space != self.space:
            raise StructuralError("Jet mismatch: {} vs {}".format(self.space, other.space))
        if not np.array_equal(other.center, self.center):
            raise StructuralError("Jets expanded at different centers")

    def _lift(self, other) -> 'ComplexJet':
        if isinstance(other, ComplexJet):
            self._check(other)
            return other
        return ComplexJet.constant(self.space, other, self.center)

    def __add__(self, other):
        other = self._lift(other)
        return ComplexJet(self.space, self.coeffs + other.coeffs, self.center)

    __radd__ = __add__

    def __neg__(self):
        return ComplexJet(self.space, -self.coeffs, self.center)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexJet):
            self._check(other)
            outer = self.coeffs[..., :, None] * other.coeffs[..., None, :]
            return ComplexJet(self.space, self.space.multiply_outer(outer), self.center)
        other = np.asarray(other, dtype=complex)
        return ComplexJet(self.space, self.coeffs * other[..., None], self.center)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ComplexJet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=complex)
        return ComplexJet(self.space, self.coeffs / other[..., None], self.center)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if float(exponent).is_integer() and exponent >= 0:
            result = ComplexJet.constant(self.space, np.ones(self.shape), self.center)
            for _ in range(int(exponent)):
                result = result * self
            return result
        a0 = self._nonvanishing_value()
        derivatives, falling = [], 1.0
        for k in range(self.order + 1):
            derivatives.append(falling * a0 ** (exponent - k))
            falling *= exponent - k
        return self.compose(derivatives)

    def _nonvanishing_value(self, tolerance: float = DEFAULT_SINGULARITY_TOLERANCE) -> np.ndarray:
        a0 = self.value
        if np.any(np.abs(a0) < tolerance):
            raise SingularityError("Constant term {} below tolerance {}".format(np.min(np.abs(a0)), tolerance))
        return a0

    def compose(self, derivatives: Sequence) -> 'ComplexJet':
        """Jet of f(self) given f and its derivatives at the constant term:
        f(a) = sum_k f^(k)(a0) / k! (a - a0)^k, exact to the jet order."""
        if len(derivatives) < self.order + 1:
            raise StructuralError("Need {} derivatives, got {}".format(self.order + 1, len(derivatives)))
        shift = self - self.value
        result = ComplexJet.constant(self.space, np.broadcast_to(derivatives[0], self.shape), self.center)
        power = None
        for k in range(1, self.order + 1):
            power = shift if power is None else power * shift
            result = result + power * (np.asarray(derivatives[k], dtype=complex) / factorial(k))
        return result

    def reciprocal(self, tolerance: float = DEFAULT_SINGULARITY_TOLERANCE) -> 'ComplexJet':
        a0 = self._nonvanishing_value(tolerance)
        return self.compose([(-1) ** k * factorial(k) * a0 ** (-k - 1) for k in range(self.order + 1)])

    def exp(self) -> 'ComplexJet':
        e = np.exp(self.value)
        return self.compose([e] * (self.order + 1))

    def cos(self) -> 'ComplexJet':
        c, s = np.cos(self.value), np.sin(self.value)
        return self.compose([(c, -s, -c, s)[k % 4] for k in range(self.order + 1)])

    def sin(self) -> 'ComplexJet':
        c, s = np.cos(self.value), np.sin(self.value)
        return self.compose([(s, c, -s, -c)[k % 4] for k in range(self.order + 1)])

    def conj(self) -> 'ComplexJet':
        """Jet of the complex conjugate function: swaps z and z̄ exponents."""
        return ComplexJet(self.space, np.conj(self.coeffs[..., self.space.conjugation]), self.center)

    def truncate(self, order: int) -> 'ComplexJet':
        if order > self.order:
            raise StructuralError("Cannot raise jet order from {} to {}".format(self.order, order))
        lower = get_space(self.n, order)
        return ComplexJet(lower, self.coeffs[..., :lower.size], self.center)

    def derivative(self, index: int, conjugate: bool = False) -> 'ComplexJet':
        """∂/∂z_index (or ∂/∂z̄_index) as a jet one order lower."""
        src, factor = self.space.derivative_map(index + (self.n if conjugate else 0))
        lower = get_space(self.n, self.order - 1)
        return ComplexJet(lower, self.coeffs[..., src] * factor, self.center)

    def gradient(self, conjugate: bool = False) -> 'ComplexJet':
        """All first partials stacked on a new leading axis."""
        parts = [self.derivative(i, conjugate).coeffs for i in range(self.n)]
        return ComplexJet(get_space(self.n, self.order - 1), np.stack(parts), self.center)

    def coefficient(self, alpha: Sequence[int], beta: Sequence[int]) -> np.ndarray:
        return self.coeffs[..., self.space.position(alpha, beta)]

    def extract(self, alpha: Sequence[int], beta: Sequence[int]) -> np.ndarray:
        """Mixed partial ∂^α ∂̄^β at the center."""
        k = self.space.position(alpha, beta)
        return self.coeffs[..., k] * self.space.factorials[k]

    def reality_residual(self) -> float:
        """max |c_{αβ} - conj(c_{βα})|; zero for jets of real-valued functions."""
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[..., self.space.conjugation])), initial=0.0))


def jet_algebra(a: ComplexJet, b: ComplexJet, op: str) -> ComplexJet:
    if not isinstance(a, ComplexJet) or not isinstance(b, ComplexJet):
        raise StructuralError("jet_algebra expects two jets")
    a._check(b)
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    raise StructuralError("Choose from one of the operations: add, sub, mul")


def jet_invert(a: ComplexJet, tolerance: float = DEFAULT_SINGULARITY_TOLERANCE) -> ComplexJet:
    return a.reciprocal(tolerance)


def jet_extract(a: ComplexJet, alpha: Sequence[int], beta: Sequence[int]) -> np.ndarray:
    return a.extract(alpha, beta)


def jet_matrix_inverse(m: ComplexJet) -> ComplexJet:
    """Inverse of a square jet matrix by the terminating Neumann series
    sum_k (-M0^{-1} N)^k M0^{-1} with N = M - M0."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError("Expected a square jet matrix, got shape {}".format(m.shape))
    try:
        inverse0 = np.linalg.inv(m.value)
    except np.linalg.LinAlgError as error:
        raise SingularityError("Constant part of jet matrix is singular") from error
    step = contract('ij,jk->ik', -inverse0, m - m.value)
    term = ComplexJet.constant(m.space, inverse0, m.center)
    result = term
    for _ in range(m.order):
        term = contract('ij,jk->ik', step, term)
        result = result + term
    return result


def _split_subscripts(subscripts: str):
    if '->' not in subscripts:
        raise StructuralError("Explicit output subscripts are required: {}".format(subscripts))
    inputs, output = subscripts.replace(' ', '').split('->')
    return inputs.split(','), output


def _letters(subscripts: str) -> str:
    return ''.join(c for c in subscripts if c.isalpha())


def _contract_pair(sub1, x1, sub2, x2, out, space, center):
    free = [c for c in string.ascii_uppercase if c not in sub1 + sub2 + out]
    left, right = free[0], free[1]
    jet1, jet2 = isinstance(x1, ComplexJet), isinstance(x2, ComplexJet)
    if jet1 and jet2:
        outer = np.einsum('{}{},{}{}->{}{}{}'.format(sub1, left, sub2, right, out, left, right),
                          x1.coeffs, x2.coeffs, optimize=True)
        return ComplexJet(space, space.multiply_outer(outer), center)
    if jet1:
        return ComplexJet(space, np.einsum('{}{},{}->{}{}'.format(sub1, left, sub2, out, left),
                                           x1.coeffs, x2, optimize=True), center)
    if jet2:
        return ComplexJet(space, np.einsum('{},{}{}->{}{}'.format(sub1, sub2, left, out, left),
                                           x1, x2.coeffs, optimize=True), center)
    return np.einsum('{},{}->{}'.format(sub1, sub2, out), x1, x2, optimize=True)


def jet_einsum(subscripts: str, *operands: Operand):
    """Einstein summation over tensor-valued jets and plain arrays.

    Jet operands are truncated to the lowest order present; products of two jets
    are truncated products. Operands are contracted pairwise left to right.
    """
    inputs, output = _split_subscripts(subscripts)
    if len(inputs) != len(operands):
        raise StructuralError("{} operands for subscripts {}".format(len(operands), subscripts))
    jets = [op for op in operands if isinstance(op, ComplexJet)]
    if not jets:
        return np.einsum(subscripts, *operands, optimize=True)
    order = min(jet.order for jet in jets)
    reference = jets[0]
    for jet in jets[1:]:
        if jet.n != reference.n or not np.array_equal(jet.center, reference.center):
            raise StructuralError("Jets expanded at different centers or dimensions")
    space = get_space(reference.n, order)
    operands = [op.truncate(order) if isinstance(op, ComplexJet) else np.asarray(op) for op in operands]

    if len(inputs) == 1:
        (sub,), (x,) = inputs, operands
        letter = next(c for c in string.ascii_uppercase if c not in sub + output)
        return ComplexJet(space, np.einsum('{}{}->{}{}'.format(sub, letter, output, letter), x.coeffs),
                          reference.center)

    current_sub, current = inputs[0], operands[0]
    for position in range(1, len(inputs)):
        next_sub, nxt = inputs[position], operands[position]
        if position == len(inputs) - 1:
            keep = output
        else:
            later = _letters(''.join(inputs[position + 1:]) + output)
            seen = []
            for c in _letters(current_sub + next_sub):
                if c in later and c not in seen:
                    seen.append(c)
            keep = ('...' if '...' in current_sub + next_sub else '') + ''.join(seen)
        current = _contract_pair(current_sub, current, next_sub, nxt, keep, space, reference.center)
        current_sub = keep
    return current


def contract(subscripts: str, *operands: Operand):
    """Einsum dispatching on operand type: jets when any operand is a jet."""
    if any(isinstance(op, ComplexJet) for op in operands):
        return jet_einsum(subscripts, *operands)
    return np.einsum(subscripts, *operands, optimize=True)


def conjugate(x: Operand):
    return x.conj() if isinstance(x, ComplexJet) else np.conj(x)


def value_of(x: Operand) -> np.ndarray:
    return x.value if isinstance(x, ComplexJet) else np.asarray(x)


def align(*operands: Operand):
    """Truncate every jet operand to the lowest jet order present."""
    orders = [op.order for op in operands if isinstance(op, ComplexJet)]
    if not orders:
        return operands
    return tuple(op.truncate(min(orders)) if isinstance(op, ComplexJet) else op for op in operands)
