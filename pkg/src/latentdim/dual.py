"""First-order forward-mode scalars carrying a vector of partial derivatives.

A :class:`Dual` holds a value and its partials with respect to a fixed list
of coordinates.  Arithmetic follows the chain rule and is exact whenever the
value and partials are Fractions; floats are supported for analytic maps
(``exp``, ``logistic``).  Mixing with plain numbers works on either side.
"""

from __future__ import annotations

import math


class Dual:
    __slots__ = ("value", "partials")

    def __init__(self, value, partials):
        self.value = value
        self.partials = tuple(partials)

    @classmethod
    def variable(cls, value, index: int, width: int) -> "Dual":
        """A coordinate seed: unit partial at ``index``."""
        partials = [0] * width
        partials[index] = 1
        return cls(value, partials)

    @classmethod
    def constant(cls, value, width: int) -> "Dual":
        return cls(value, (0,) * width)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value + other.value,
                        tuple(a + b for a, b in zip(self.partials, other.partials)))
        return Dual(self.value + other, self.partials)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value - other.value,
                        tuple(a - b for a, b in zip(self.partials, other.partials)))
        return Dual(self.value - other, self.partials)

    def __rsub__(self, other):
        return Dual(other - self.value, tuple(-a for a in self.partials))

    def __neg__(self):
        return Dual(-self.value, tuple(-a for a in self.partials))

    def __mul__(self, other):
        if isinstance(other, Dual):
            sv, ov = self.value, other.value
            return Dual(sv * ov,
                        tuple(sv * b + ov * a for a, b in zip(self.partials, other.partials)))
        return Dual(self.value * other, tuple(a * other for a in self.partials))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            ov = other.value
            value = self.value / ov
            return Dual(value,
                        tuple((a - value * b) / ov for a, b in zip(self.partials, other.partials)))
        return Dual(self.value / other, tuple(a / other for a in self.partials))

    def __rtruediv__(self, other):
        value = other / self.value
        scale = -value / self.value
        return Dual(value, tuple(scale * a for a in self.partials))

    def __repr__(self) -> str:
        return f"Dual({self.value!r}, {self.partials!r})"


def exp(x):
    """Exponential, Dual-aware; float-valued."""
    if isinstance(x, Dual):
        e = math.exp(float(x.value))
        return Dual(e, tuple(e * float(a) for a in x.partials))
    return math.exp(float(x))


def logistic(x):
    """Numerically stable logistic 1 / (1 + exp(-x)), Dual-aware."""
    if isinstance(x, Dual):
        s = logistic(float(x.value))
        slope = s * (1.0 - s)
        return Dual(s, tuple(slope * float(a) for a in x.partials))
    x = float(x)
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def partials_of(x, width: int) -> tuple:
    """Partial vector of ``x``; constants get an all-zero vector."""
    if isinstance(x, Dual):
        return x.partials
    return (0,) * width


def value_of(x):
    return x.value if isinstance(x, Dual) else x
