"""
Truncated Taylor jets - exact higher-order differentiation
Toroidal Curve Toolkit

A Jet stores the derivative values [g(t0), g'(t0), ..., g^(k)(t0)] of a
scalar function at one parameter value (derivative convention, NOT Taylor
coefficients), up to order 4. Arithmetic follows the general Leibniz rule,
elementary functions the Faa di Bruno formula.

fd_jet is the independent finite-difference oracle used for verification only.
"""

import math
from dataclasses import dataclass
from numbers import Real
from typing import Callable, Sequence, Union

import numpy as np

from src.core.errors import JetDomainError, JetOrderError

MAX_ORDER = 4

# BINOMIALS[k][i] = C(k, i)
BINOMIALS = [np.array([math.comb(k, i) for i in range(k + 1)], dtype=float) for k in range(MAX_ORDER + 1)]

Scalar = Union[int, float, np.floating, np.integer]


def _check_order(order: int) -> int:
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"Jet order {order!r} outside supported range 0..{MAX_ORDER}", order=order)
    return int(order)


class Jet:
    """Derivative values of a scalar function at a point, orders 0..order."""

    __slots__ = ("coeffs",)
    # numpy scalars must defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, coeffs: Sequence[float]):
        arr = np.array(coeffs, dtype=float)
        if arr.ndim != 1 or not 1 <= arr.size <= MAX_ORDER + 1:
            raise JetOrderError(f"Jet needs 1..{MAX_ORDER + 1} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def __getitem__(self, k: int) -> float:
        return float(self.coeffs[k])

    def __len__(self) -> int:
        return self.coeffs.size

    def __repr__(self) -> str:
        return f"Jet({self.coeffs.tolist()!r})"

    def derivative(self) -> "Jet":
        """Jet of g' at one order less."""
        if self.order == 0:
            raise JetOrderError("cannot differentiate an order-0 jet")
        return Jet(self.coeffs[1:])

    def truncate(self, order: int) -> "Jet":
        order = _check_order(order)
        if order > self.order:
            raise JetOrderError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1])

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise JetOrderError(
                    f"jet orders differ ({self.order} vs {other.order})",
                    left=self.order,
                    right=other.order,
                )
            return other
        if isinstance(other, (Real, np.floating, np.integer)):
            return jet_const(float(other), self.order)
        return NotImplemented

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(self.coeffs - other.coeffs)

    def __rsub__(self, other) -> "Jet":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(other.coeffs - self.coeffs)

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs)

    def __pos__(self) -> "Jet":
        return self

    def __mul__(self, other) -> "Jet":
        if isinstance(other, (Real, np.floating, np.integer)):
            return Jet(self.coeffs * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(_leibniz(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, (Real, np.floating, np.integer)):
            if other == 0:
                raise JetDomainError("division of a jet by zero")
            return Jet(self.coeffs / float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(_quotient(self.coeffs, other.coeffs))

    def __rtruediv__(self, other) -> "Jet":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(_quotient(other.coeffs, self.coeffs))

    def __pow__(self, exponent) -> "Jet":
        if isinstance(exponent, Jet):
            return NotImplemented
        return jet_pow(self, float(exponent))


def _leibniz(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    for k in range(a.size):
        out[k] = np.dot(BINOMIALS[k] * a[: k + 1], b[k::-1])
    return out


def _quotient(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # q * b = a, solved order by order
    if b[0] == 0.0:
        raise JetDomainError("division by a jet with zero value part", divisor=b.tolist())
    q = np.empty_like(a)
    for k in range(a.size):
        acc = a[k]
        for i in range(k):
            acc -= BINOMIALS[k][i] * q[i] * b[k - i]
        q[k] = acc / b[0]
    return q


def _compose(g: np.ndarray, outer: Sequence[float]) -> np.ndarray:
    """Faa di Bruno: derivatives of F(g(t)) from F^(j)(g0) and g's jet."""
    n = g.size
    out = np.empty(n)
    out[0] = outer[0]
    if n > 1:
        out[1] = outer[1] * g[1]
    if n > 2:
        out[2] = outer[1] * g[2] + outer[2] * g[1] ** 2
    if n > 3:
        out[3] = outer[1] * g[3] + 3.0 * outer[2] * g[1] * g[2] + outer[3] * g[1] ** 3
    if n > 4:
        out[4] = (
            outer[1] * g[4]
            + outer[2] * (4.0 * g[1] * g[3] + 3.0 * g[2] ** 2)
            + 6.0 * outer[3] * g[1] ** 2 * g[2]
            + outer[4] * g[1] ** 4
        )
    return out


def jet_const(c: float, order: int) -> Jet:
    order = _check_order(order)
    coeffs = np.zeros(order + 1)
    coeffs[0] = c
    return Jet(coeffs)


def jet_var(t0: float, order: int) -> Jet:
    """Jet of the identity function at t0."""
    order = _check_order(order)
    coeffs = np.zeros(order + 1)
    coeffs[0] = t0
    if order >= 1:
        coeffs[1] = 1.0
    return Jet(coeffs)


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_sin(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    return Jet(_compose(a.coeffs, (s, c, -s, -c, s)))


def jet_cos(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    return Jet(_compose(a.coeffs, (c, -s, -c, s, c)))


def jet_pow(a: Jet, p: float) -> Jet:
    """a ** p for a constant exponent p."""
    g0 = a.value
    integral = float(p).is_integer()
    if not integral and g0 <= 0.0:
        raise JetDomainError(f"non-integer power {p} of non-positive value {g0}", value=g0, exponent=p)
    if integral and p < 0 and g0 == 0.0:
        raise JetDomainError(f"negative power {p} of zero", value=g0, exponent=p)
    outer = []
    falling = 1.0
    for j in range(a.order + 1):
        if integral and 0 <= p < j:
            outer.append(0.0)
        else:
            outer.append(falling * g0 ** (p - j))
        falling *= p - j
    return Jet(_compose(a.coeffs, outer))


def jet_sqrt(a: Jet) -> Jet:
    if a.value <= 0.0:
        raise JetDomainError(f"sqrt of non-positive value {a.value!r}", value=a.value)
    return jet_pow(a, 0.5)


def jet_func(a: Jet, fn: str, p: float = None) -> Jet:
    if fn == "sin":
        return jet_sin(a)
    if fn == "cos":
        return jet_cos(a)
    if fn == "sqrt":
        return jet_sqrt(a)
    if fn == "pow_const":
        if p is None:
            raise ValueError("pow_const needs an exponent")
        return jet_pow(a, p)
    raise ValueError(f"unknown jet function {fn!r}")


def jet_dot(u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    total = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        total = total + a * b
    return total


def jet_cross(u: Sequence[Jet], v: Sequence[Jet]) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def jet_norm(u: Sequence[Jet]) -> Jet:
    return jet_sqrt(jet_dot(u, u))


@dataclass(frozen=True)
class Jet2:
    """Planar vector-valued jet."""

    x: Jet
    y: Jet

    def __post_init__(self):
        if self.x.order != self.y.order:
            raise JetOrderError(f"Jet2 component orders differ ({self.x.order} vs {self.y.order})")

    @property
    def order(self) -> int:
        return self.x.order

    @property
    def value(self) -> np.ndarray:
        return np.array([self.x.value, self.y.value])

    def vector(self, k: int) -> np.ndarray:
        """k-th derivative as a plane vector."""
        return np.array([self.x[k], self.y[k]])

    def derivative(self) -> "Jet2":
        return Jet2(self.x.derivative(), self.y.derivative())

    def truncate(self, order: int) -> "Jet2":
        return Jet2(self.x.truncate(order), self.y.truncate(order))

    def components(self) -> tuple:
        return (self.x, self.y)


@dataclass(frozen=True)
class Jet3:
    """Spatial vector-valued jet (x, y, z components)."""

    x: Jet
    y: Jet
    z: Jet

    def __post_init__(self):
        if not self.x.order == self.y.order == self.z.order:
            raise JetOrderError("Jet3 component orders differ")

    @property
    def order(self) -> int:
        return self.x.order

    @property
    def value(self) -> np.ndarray:
        return np.array([self.x.value, self.y.value, self.z.value])

    def vector(self, k: int) -> np.ndarray:
        return np.array([self.x[k], self.y[k], self.z[k]])

    def derivative(self) -> "Jet3":
        return Jet3(self.x.derivative(), self.y.derivative(), self.z.derivative())

    def components(self) -> tuple:
        return (self.x, self.y, self.z)


# Central-difference stencils: {accuracy: {order: (offsets, weights)}}, divided by h**order
_STENCILS = {
    2: {
        1: ((-1, 1), (-0.5, 0.5)),
        2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
        3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
        4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
    },
    4: {
        1: ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
        2: ((-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
        3: ((-3, -2, -1, 1, 2, 3), (1 / 8, -1.0, 13 / 8, -13 / 8, 1.0, -1 / 8)),
        4: ((-3, -2, -1, 0, 1, 2, 3), (-1 / 6, 2.0, -6.5, 28 / 3, -6.5, 2.0, -1 / 6)),
    },
}


def fd_jet(f: Callable[[float], float], t: float, order: int, h: float, accuracy: int = 2) -> Jet:
    """
    Finite-difference estimate of the jet of f at t.

    Args:
        f: scalar function of one real
        t: evaluation point
        order: highest derivative to estimate (<= 4)
        h: step size, > 0
        accuracy: 2 for the standard central stencils, 4 for the wider ones

    Returns:
        Jet of the estimates; exceptions raised by f propagate.
    """
    order = _check_order(order)
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    if accuracy not in _STENCILS:
        raise ValueError(f"unsupported stencil accuracy {accuracy}")
    cache = {}

    def sample(k: int) -> float:
        if k not in cache:
            cache[k] = float(f(t + k * h))
        return cache[k]

    coeffs = [sample(0)]
    for k in range(1, order + 1):
        offsets, weights = _STENCILS[accuracy][k]
        total = sum(w * sample(o) for o, w in zip(offsets, weights))
        coeffs.append(total / h**k)
    return Jet(coeffs)
