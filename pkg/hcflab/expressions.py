"""Closed-form expression trees in the coordinates z_i and z̄_i.

Trees are the single source of truth for catalog metrics and transport curves:
they evaluate on arrays of points, lift to jets, and conjugate symbolically.
"""
from abc import ABC, abstractmethod
from typing import Dict, Optional, Sequence

import numpy as np

from .jets import ComplexJet, JetSpace


class Expression(ABC):

    @abstractmethod
    def _jet(self, space: JetSpace, center: np.ndarray, cache: Dict[int, ComplexJet]) -> ComplexJet:
        pass

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Values on an array of points of shape (..., n)."""

    @abstractmethod
    def conjugate(self) -> 'Expression':
        pass

    @abstractmethod
    def shift(self, offset: int) -> 'Expression':
        """Same expression with every coordinate index moved by `offset`."""

    def jet(self, space: JetSpace, center, cache: Optional[Dict[int, ComplexJet]] = None) -> ComplexJet:
        cache = {} if cache is None else cache
        key = id(self)
        if key not in cache:
            cache[key] = self._jet(space, np.asarray(center, dtype=complex).reshape(-1), cache)
        return cache[key]

    def __add__(self, other):
        return Sum([self, as_expression(other)])

    def __radd__(self, other):
        return Sum([as_expression(other), self])

    def __sub__(self, other):
        return Sum([self, Product([Constant(-1.0), as_expression(other)])])

    def __rsub__(self, other):
        return Sum([as_expression(other), Product([Constant(-1.0), self])])

    def __mul__(self, other):
        return Product([self, as_expression(other)])

    def __rmul__(self, other):
        return Product([as_expression(other), self])

    def __truediv__(self, other):
        return Product([self, Power(as_expression(other), -1)])

    def __rtruediv__(self, other):
        return Product([as_expression(other), Power(self, -1)])

    def __neg__(self):
        return Product([Constant(-1.0), self])

    def __pow__(self, exponent):
        return Power(self, exponent)


def as_expression(value) -> Expression:
    return value if isinstance(value, Expression) else Constant(value)


class Constant(Expression):

    def __init__(self, value):
        self.value = complex(value)

    def _jet(self, space, center, cache):
        return ComplexJet.constant(space, self.value, center)

    def evaluate(self, points):
        points = np.asarray(points)
        return np.full(points.shape[:-1], self.value, dtype=complex)

    def conjugate(self):
        return Constant(np.conj(self.value))

    def shift(self, offset):
        return self

    def __repr__(self):
        value = self.value.real if self.value.imag == 0 else self.value
        return repr(value)


class Coordinate(Expression):
    """z_index, or z̄_index when `conjugate` is set."""

    def __init__(self, index: int, conjugate: bool = False):
        self.index = index
        self.conjugated = conjugate

    def _jet(self, space, center, cache):
        return ComplexJet.variable(space, self.index, center, conjugate=self.conjugated)

    def evaluate(self, points):
        values = np.asarray(points, dtype=complex)[..., self.index]
        return np.conj(values) if self.conjugated else values

    def conjugate(self):
        return Coordinate(self.index, not self.conjugated)

    def shift(self, offset):
        return Coordinate(self.index + offset, self.conjugated)

    def __repr__(self):
        return "{}{}".format('zbar' if self.conjugated else 'z', self.index + 1)


class Sum(Expression):

    def __init__(self, terms: Sequence[Expression]):
        self.terms = list(terms)

    def _jet(self, space, center, cache):
        result = self.terms[0].jet(space, center, cache)
        for term in self.terms[1:]:
            result = result + term.jet(space, center, cache)
        return result

    def evaluate(self, points):
        return sum(term.evaluate(points) for term in self.terms)

    def conjugate(self):
        return Sum([term.conjugate() for term in self.terms])

    def shift(self, offset):
        return Sum([term.shift(offset) for term in self.terms])

    def __repr__(self):
        return "(" + " + ".join(repr(t) for t in self.terms) + ")"


class Product(Expression):

    def __init__(self, factors: Sequence[Expression]):
        self.factors = list(factors)

    def _jet(self, space, center, cache):
        result = self.factors[0].jet(space, center, cache)
        for factor in self.factors[1:]:
            if isinstance(factor, Constant):
                result = result * factor.value
            else:
                result = result * factor.jet(space, center, cache)
        return result

    def evaluate(self, points):
        result = self.factors[0].evaluate(points)
        for factor in self.factors[1:]:
            result = result * factor.evaluate(points)
        return result

    def conjugate(self):
        return Product([factor.conjugate() for factor in self.factors])

    def shift(self, offset):
        return Product([factor.shift(offset) for factor in self.factors])

    def __repr__(self):
        return "*".join(repr(f) for f in self.factors)


class Power(Expression):
    """base ** exponent for a real exponent."""

    def __init__(self, base: Expression, exponent: float):
        self.base = base
        self.exponent = float(exponent)

    def _jet(self, space, center, cache):
        return self.base.jet(space, center, cache) ** self.exponent

    def evaluate(self, points):
        return self.base.evaluate(points) ** self.exponent

    def conjugate(self):
        return Power(self.base.conjugate(), self.exponent)

    def shift(self, offset):
        return Power(self.base.shift(offset), self.exponent)

    def __repr__(self):
        return "{}**{:g}".format(repr(self.base), self.exponent)


class _Function(Expression):
    _name = 'f'
    _numpy = None

    def __init__(self, argument: Expression):
        self.argument = as_expression(argument)

    def evaluate(self, points):
        return type(self)._numpy(self.argument.evaluate(points))

    def conjugate(self):
        return type(self)(self.argument.conjugate())

    def shift(self, offset):
        return type(self)(self.argument.shift(offset))

    def __repr__(self):
        return "{}({})".format(self._name, repr(self.argument))


class Exp(_Function):
    _name = 'exp'
    _numpy = np.exp

    def _jet(self, space, center, cache):
        return self.argument.jet(space, center, cache).exp()


class Cos(_Function):
    _name = 'cos'
    _numpy = np.cos

    def _jet(self, space, center, cache):
        return self.argument.jet(space, center, cache).cos()


class Sin(_Function):
    _name = 'sin'
    _numpy = np.sin

    def _jet(self, space, center, cache):
        return self.argument.jet(space, center, cache).sin()


def z(index: int) -> Coordinate:
    return Coordinate(index)


def zbar(index: int) -> Coordinate:
    return Coordinate(index, conjugate=True)


def real_part(index: int) -> Expression:
    return Constant(0.5) * (z(index) + zbar(index))


def imag_part(index: int) -> Expression:
    return Constant(-0.5j) * (z(index) - zbar(index))


def squared_norm(n: int, offset: int = 0) -> Expression:
    return Sum([z(i + offset) * zbar(i + offset) for i in range(n)])
