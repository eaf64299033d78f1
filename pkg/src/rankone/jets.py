"""Truncated Taylor arithmetic over arrays of complex expansion points.

A :class:`Jet` holds normalized Taylor coefficients ``c[k] = f^(k)(z0)/k!`` with
shape ``(order + 1, *points)``. Arithmetic is closed under truncation, so
compositions of elementary functions propagate all derivatives up to
``order`` exactly (up to rounding).
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["Jet", "variable", "constant"]


class Jet:
    __array_priority__ = 100

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def value(self):
        return self.c[0]

    def derivatives(self):
        """``f^(k)(z0)`` for ``k = 0..order``."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        out = np.zeros_like(self.c)
        out[0] = other
        return Jet(out)

    # arithmetic

    def __neg__(self):
        return Jet(-self.c)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c)
        out = self.c.copy()
        out[0] = out[0] + other
        return Jet(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        a, b = self.c, other.c
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
        for k in range(out.shape[0]):
            acc = out[k]
            for j in range(k + 1):
                acc = acc + a[j] * b[k - j]
            out[k] = acc
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        g = self.c
        out = np.zeros_like(g)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv0 = 1.0 / g[0]
            out[0] = inv0
            for k in range(1, g.shape[0]):
                acc = 0
                for j in range(1, k + 1):
                    acc = acc + g[j] * out[k - j]
                out[k] = -acc * inv0
        return Jet(out)

    def exp(self):
        f = self.c
        out = np.zeros_like(f)
        with np.errstate(over="ignore", invalid="ignore"):
            out[0] = np.exp(f[0])
            for k in range(1, f.shape[0]):
                acc = 0
                for j in range(1, k + 1):
                    acc = acc + j * f[j] * out[k - j]
                out[k] = acc / k
        return Jet(out)

    def log(self):
        """Principal branch."""
        f = self.c
        out = np.zeros_like(f)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[0] = np.log(f[0])
            inv0 = 1.0 / f[0]
            for k in range(1, f.shape[0]):
                acc = 0
                for j in range(1, k):
                    acc = acc + j * out[j] * f[k - j]
                out[k] = (f[k] - acc / k) * inv0
        return Jet(out)

    def ipow(self, n: int):
        """Integer power by repeated squaring; valid at zeros of ``f``."""
        if n < 0:
            return self.ipow(-n).reciprocal()
        result = self._lift(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def cpow(self, c):
        """``f**c`` for a constant (possibly complex) exponent, principal branch."""
        f = self.c
        out = np.zeros(np.broadcast_shapes(f.shape, np.shape(c)), dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out[0] = f[0] ** c
            inv0 = 1.0 / f[0]
            for k in range(1, f.shape[0]):
                acc = 0
                for j in range(1, k + 1):
                    acc = acc + ((c + 1) * j - k) * f[j] * out[k - j]
                out[k] = acc * inv0 / k
        return Jet(out)

    def sqrt(self):
        return self.cpow(0.5)

    def __pow__(self, other):
        if isinstance(other, Jet):
            return (other * self.log()).exp()
        if np.ndim(other) == 0 and float(np.real(other)) == other and float(other).is_integer():
            return self.ipow(int(float(np.real(other))))
        return self.cpow(other)

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape})"


def variable(z0, order: int) -> Jet:
    """The identity function expanded at ``z0``."""
    z0 = np.asarray(z0, dtype=complex)
    c = np.zeros((order + 1,) + z0.shape, dtype=complex)
    c[0] = z0
    if order >= 1:
        c[1] = 1.0
    return Jet(c)


def constant(value, order: int, shape=()) -> Jet:
    c = np.zeros((order + 1,) + tuple(shape), dtype=complex)
    c[0] = value
    return Jet(c)
