"""Truncated bivariate Taylor expansions ("jets") with complex coefficients.

A jet of order ``N`` stores ``c[i, j] = d^i/dx^i d^j/dy^j f / (i! j!)`` at an
expansion point for every ``i + j <= N``.  Coefficients outside that triangle
are kept at zero, so products are plain truncated convolutions.

Binary operators on jets of different order truncate to the smaller order
(the product is only known to that order).  The module level functions
:func:`jet_add` and :func:`jet_mul` are strict and reject mismatched orders.
"""
from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

DEFAULT_ORDER = 4
SINGULAR_TOL = 1e-12


class JetError(ValueError):
    """Raised on order mismatch, exhausted order or a singular jet."""


def _mask(order: int) -> np.ndarray:
    i, j = np.indices((order + 1, order + 1))
    return (i + j) <= order


_MASKS: dict[int, np.ndarray] = {}


def triangle_mask(order: int) -> np.ndarray:
    m = _MASKS.get(order)
    if m is None:
        m = _MASKS[order] = _mask(order)
    return m


class Jet:
    __slots__ = ("order", "c")

    def __init__(self, coeffs, order: int | None = None):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise JetError(f"jet coefficients must be square, got shape {c.shape}")
        n = c.shape[0] - 1 if order is None else order
        if n < 0:
            raise JetError("jet order must be >= 0")
        if c.shape[0] != n + 1:
            c = c[: n + 1, : n + 1] if c.shape[0] > n + 1 else _pad(c, n)
        c = np.where(triangle_mask(n), c, 0.0)
        c.flags.writeable = False
        self.order = n
        self.c = c

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, c: np.ndarray, order: int) -> "Jet":
        # trusted path: c already masked and of shape (order+1, order+1)
        obj = cls.__new__(cls)
        c.flags.writeable = False
        obj.order = order
        obj.c = c
        return obj

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> "Jet":
        c = np.zeros((order + 1, order + 1), dtype=complex)
        c[0, 0] = value
        return cls._raw(c, order)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "Jet":
        return cls.constant(0.0, order)

    @classmethod
    def variable(cls, axis: str, base: complex, order: int = DEFAULT_ORDER) -> "Jet":
        """Jet of the coordinate function ``x`` or ``y`` expanded at ``base``."""
        c = np.zeros((order + 1, order + 1), dtype=complex)
        c[0, 0] = base
        if order >= 1:
            if axis == "x":
                c[1, 0] = 1.0
            elif axis == "y":
                c[0, 1] = 1.0
            else:
                raise JetError(f"unknown axis {axis!r}")
        return cls._raw(c, order)

    @classmethod
    def from_derivatives(cls, derivs: dict[tuple[int, int], complex], order: int) -> "Jet":
        c = np.zeros((order + 1, order + 1), dtype=complex)
        for (i, j), v in derivs.items():
            if i + j <= order:
                c[i, j] = v / (math.factorial(i) * math.factorial(j))
        return cls._raw(c, order)

    # access ----------------------------------------------------------------
    @property
    def value(self) -> complex:
        return complex(self.c[0, 0])

    def __getitem__(self, idx: tuple[int, int]) -> complex:
        i, j = idx
        if i < 0 or j < 0 or i + j > self.order:
            raise IndexError(f"multi-index {idx} outside order-{self.order} triangle")
        return complex(self.c[i, j])

    def derivative(self, i: int, j: int) -> complex:
        """The partial derivative d^i/dx^i d^j/dy^j at the expansion point."""
        return self[i, j] * math.factorial(i) * math.factorial(j)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        if order < 0:
            raise JetError("jet order exhausted")
        c = self.c[: order + 1, : order + 1] * triangle_mask(order)
        return Jet._raw(c, order)

    def evaluate(self, dx: complex, dy: complex) -> complex:
        """Sum the truncated Taylor polynomial at offset (dx, dy)."""
        n = self.order
        px = dx ** np.arange(n + 1)
        py = dy ** np.arange(n + 1)
        return complex(px @ self.c @ py)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.c)))

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, value={self.value:.6g})"

    # arithmetic --------------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Jet.constant(complex(other), self.order)
        return NotImplemented

    def __neg__(self) -> "Jet":
        return Jet._raw(-self.c, self.order)

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        if isinstance(other, (int, float, complex, np.number)):
            c = self.c.copy()
            c[0, 0] += other
            return Jet._raw(c, self.order)
        if not isinstance(other, Jet):
            return NotImplemented
        a, b = _common(self, other)
        return Jet._raw(a.c + b.c, a.order)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        if isinstance(other, (int, float, complex, np.number)):
            return self + (-other)
        if not isinstance(other, Jet):
            return NotImplemented
        a, b = _common(self, other)
        return Jet._raw(a.c - b.c, a.order)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if isinstance(other, (int, float, complex, np.number)):
            return Jet._raw(self.c * other, self.order)
        if not isinstance(other, Jet):
            return NotImplemented
        a, b = _common(self, other)
        return Jet._raw(_convolve(a.c, b.c, a.order), a.order)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, (int, float, complex, np.number)):
            return Jet._raw(self.c / other, self.order)
        if not isinstance(other, Jet):
            return NotImplemented
        return self * jet_reciprocal(other)

    def __rtruediv__(self, other) -> "Jet":
        return jet_reciprocal(self) * other

    def __pow__(self, n) -> "Jet":
        if isinstance(n, int) or (isinstance(n, float) and n.is_integer()):
            return jet_int_power(self, int(n))
        if isinstance(n, (float, complex)):
            return jet_power(self, complex(n))
        return NotImplemented

    def partial(self, axis: str) -> "Jet":
        return jet_partial(self, axis)

    def dx(self) -> "Jet":
        return jet_partial(self, "x")

    def dy(self) -> "Jet":
        return jet_partial(self, "y")

    def conj(self) -> "Jet":
        return Jet._raw(np.conj(self.c), self.order)


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n + 1, n + 1), dtype=complex)
    out[: c.shape[0], : c.shape[1]] = c
    return out


def _common(a: Jet, b: Jet) -> tuple[Jet, Jet]:
    if a.order == b.order:
        return a, b
    n = min(a.order, b.order)
    return a.truncate(n), b.truncate(n)


def _convolve(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for i in range(n + 1):
        for j in range(n + 1 - i):
            aij = a[i, j]
            if aij != 0:
                out[i:, j:] += aij * b[: n + 1 - i, : n + 1 - j]
    out *= triangle_mask(n)
    return out


def _check_same_order(a: Jet, b: Jet) -> None:
    if a.order != b.order:
        raise JetError(f"jet order mismatch: {a.order} vs {b.order}")


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_same_order(a, b)
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    _check_same_order(a, b)
    return a * b


def jet_partial(a: Jet, axis: str) -> Jet:
    """Differentiate along ``x`` or ``y``; the result loses one order."""
    if a.order < 1:
        raise JetError("cannot differentiate an order-0 jet")
    n = a.order - 1
    c = np.zeros((n + 1, n + 1), dtype=complex)
    if axis == "x":
        k = np.arange(1, n + 2)[:, None]
        c[:, :] = a.c[1:, : n + 1] * k
    elif axis == "y":
        k = np.arange(1, n + 2)[None, :]
        c[:, :] = a.c[: n + 1, 1:] * k
    else:
        raise JetError(f"unknown axis {axis!r}")
    c *= triangle_mask(n)
    return Jet._raw(c, n)


def jet_univariate_compose(f_series: Sequence[complex], a: Jet) -> Jet:
    """Compose a scalar analytic ``f`` with a jet.

    ``f_series[k]`` is the k-th derivative of ``f`` at ``a.value``; at least
    ``a.order + 1`` entries are required.
    """
    n = a.order
    if len(f_series) < n + 1:
        raise JetError(f"need {n + 1} derivatives, got {len(f_series)}")
    h = a - a.value
    out = np.zeros((n + 1, n + 1), dtype=complex)
    out[0, 0] = f_series[0]
    power = Jet.constant(1.0, n)
    for k in range(1, n + 1):
        power = power * h
        out += (f_series[k] / math.factorial(k)) * power.c
    return Jet._raw(out, n)


def jet_reciprocal(a: Jet) -> Jet:
    a0 = a.value
    if abs(a0) <= SINGULAR_TOL:
        raise JetError(f"singular jet: constant term {a0!r} too close to zero")
    n = a.order
    series = [(-1) ** k * math.factorial(k) / a0 ** (k + 1) for k in range(n + 1)]
    return jet_univariate_compose(series, a)


def jet_int_power(a: Jet, n: int) -> Jet:
    if n < 0:
        return jet_int_power(jet_reciprocal(a), -n)
    result = Jet.constant(1.0, a.order)
    base = a
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def jet_power(a: Jet, p: complex) -> Jet:
    """Principal-branch ``a**p`` for a constant exponent."""
    if isinstance(p, (int,)) or (complex(p).imag == 0 and float(complex(p).real).is_integer()):
        return jet_int_power(a, int(complex(p).real))
    a0 = a.value
    if abs(a0) <= SINGULAR_TOL:
        raise JetError(f"power {p} of a jet with constant term {a0!r} near the branch point")
    series = []
    coef = 1.0 + 0j
    for k in range(a.order + 1):
        series.append(coef * a0 ** (p - k))
        coef *= p - k
    return jet_univariate_compose(series, a)


def jet_sqrt(a: Jet) -> Jet:
    a0 = a.value
    if abs(a0) <= SINGULAR_TOL:
        raise JetError(f"sqrt of a jet with constant term {a0!r} near the branch point")
    return jet_power(a, 0.5)


def jet_exp(a: Jet) -> Jet:
    e = cmath.exp(a.value)
    return jet_univariate_compose([e] * (a.order + 1), a)


def jet_log(a: Jet) -> Jet:
    a0 = a.value
    if abs(a0) <= SINGULAR_TOL:
        raise JetError(f"log of a jet with constant term {a0!r} near the branch point")
    series = [cmath.log(a0)]
    for k in range(1, a.order + 1):
        series.append((-1) ** (k - 1) * math.factorial(k - 1) / a0**k)
    return jet_univariate_compose(series, a)


def _cyclic(values: list[complex], n: int) -> list[complex]:
    return [values[k % len(values)] for k in range(n + 1)]


def jet_sin(a: Jet) -> Jet:
    s, c = cmath.sin(a.value), cmath.cos(a.value)
    return jet_univariate_compose(_cyclic([s, c, -s, -c], a.order), a)


def jet_cos(a: Jet) -> Jet:
    s, c = cmath.sin(a.value), cmath.cos(a.value)
    return jet_univariate_compose(_cyclic([c, -s, -c, s], a.order), a)


def jet_sinh(a: Jet) -> Jet:
    s, c = cmath.sinh(a.value), cmath.cosh(a.value)
    return jet_univariate_compose(_cyclic([s, c], a.order), a)


def jet_cosh(a: Jet) -> Jet:
    s, c = cmath.sinh(a.value), cmath.cosh(a.value)
    return jet_univariate_compose(_cyclic([c, s], a.order), a)


def integrate_closed_form(wx: Jet, wy: Jet, value: complex = 0.0) -> Jet:
    """Jet ``g`` of order ``n + 1`` with ``dg = wx dx + wy dy`` and ``g = value``.

    The 1-form is assumed closed to the stored order; only ``wx`` and the pure
    ``y`` column of ``wy`` are read.
    """
    wx, wy = _common(wx, wy)
    n = wx.order + 1
    c = np.zeros((n + 1, n + 1), dtype=complex)
    c[0, 0] = value
    for i in range(n):
        for j in range(n - i):
            c[i + 1, j] = wx.c[i, j] / (i + 1)
    for j in range(n):
        c[0, j + 1] = wy.c[0, j] / (j + 1)
    return Jet._raw(c * triangle_mask(n), n)
