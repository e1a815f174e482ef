"""Arithmetic in GF(p) and univariate polynomial evaluation / interpolation.

Scalars are plain Python ints in ``[0, p)``; :class:`FieldElement` is a thin
value type for callers that want operator syntax.  Polynomials are coefficient
lists in increasing degree order.  Coefficients may be scalars or
:class:`~codedmm.matrix_core.FieldMatrix` instances (anything exposing
``scale``, ``__add__`` and ``shape``), which is how the codecs evaluate matrix
polynomials at worker points.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from sympy import isprime

from .errors import DuplicatePoint, EmptyInput, InvalidParameter, ShapeError

DEFAULT_PRIME = 2**31 - 1

_lock = threading.Lock()
_stats = {"interpolations": 0}


def interpolation_count() -> int:
    """Number of interpolation-weight solves performed since the last reset."""
    return _stats["interpolations"]


def reset_interpolation_count() -> None:
    with _lock:
        _stats["interpolations"] = 0


def _bump() -> None:
    with _lock:
        _stats["interpolations"] += 1


@dataclass(frozen=True)
class FieldConfig:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or not isprime(self.p):
            raise InvalidParameter(f"field modulus must be prime, got {self.p!r}")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self.p)

    def reduce(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(a, -1, self.p)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a % self.p, e, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def check_capacity(self, workers: int) -> None:
        """Distinct evaluation points for ``workers`` nodes need p > workers."""
        if self.p <= workers:
            raise InvalidParameter(
                f"GF({self.p}) has too few elements for {workers} distinct points"
            )


@dataclass(frozen=True)
class FieldElement:
    value: int
    p: int

    def __post_init__(self):
        if not 0 <= self.value < self.p:
            raise InvalidParameter(f"{self.value} is not reduced mod {self.p}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise InvalidParameter("elements belong to different fields")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(v % self.p, self.p)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return self._wrap(pow(self.value, -1, self.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._wrap(o).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._wrap(pow(self.value, e, self.p))

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class EvalPoints:
    """Distinct evaluation points, one per worker (worker ``r`` uses ``xs[r-1]``)."""

    xs: tuple[int, ...]
    field: FieldConfig = FieldConfig()

    def __post_init__(self):
        xs = tuple(x % self.field.p for x in self.xs)
        object.__setattr__(self, "xs", xs)
        check_distinct(xs)

    @classmethod
    def default(cls, count: int, field: FieldConfig = FieldConfig()) -> "EvalPoints":
        field.check_capacity(count)
        return cls(tuple(range(1, count + 1)), field)

    def __len__(self):
        return len(self.xs)

    def __getitem__(self, i):
        return self.xs[i]

    def __iter__(self):
        return iter(self.xs)

    @cached_property
    def index(self) -> dict[int, int]:
        return {x: i for i, x in enumerate(self.xs)}


def check_distinct(xs: Sequence[int]) -> None:
    seen = set()
    for x in xs:
        if x in seen:
            raise DuplicatePoint(f"evaluation point {x} appears more than once")
        seen.add(x)


def eval_poly(coeffs: Sequence, x: int, field: FieldConfig = FieldConfig()):
    """Evaluate ``sum(coeffs[i] * x**i)`` over GF(p) by Horner's rule."""
    if len(coeffs) == 0:
        raise EmptyInput("polynomial has no coefficients")
    if hasattr(coeffs[0], "shape"):
        shape = coeffs[0].shape
        for c in coeffs:
            if c.shape != shape:
                raise ShapeError(f"coefficient shapes differ: {shape} vs {c.shape}")
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc.scale(x) + c
        return acc
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % field.p
    return acc


def _poly_from_roots(xs: Sequence[int], p: int) -> list[int]:
    """Coefficients (low to high) of prod (z - x) for x in xs."""
    out = [1]
    for x in xs:
        nxt = [0] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i + 1] = (nxt[i + 1] + c) % p
            nxt[i] = (nxt[i] - c * x) % p
        out = nxt
    return out


def interpolation_weights(xs: Sequence[int], field: FieldConfig = FieldConfig()) -> list[list[int]]:
    """Inverse Vandermonde matrix ``W`` for the points ``xs``.

    ``W[d][r]`` is the coefficient of ``z**d`` in the Lagrange basis polynomial
    of ``xs[r]``, so ``coeffs = W @ ys`` for any sample vector.  Cost is O(k^2):
    one master polynomial plus a synthetic division per point.
    """
    p = field.p
    xs = [x % p for x in xs]
    if not xs:
        raise EmptyInput("no interpolation points")
    check_distinct(xs)
    _bump()
    k = len(xs)
    master = _poly_from_roots(xs, p)
    weights = [[0] * k for _ in range(k)]
    for r, xr in enumerate(xs):
        # master / (z - xr), highest degree first
        quot = [0] * k
        carry = 0
        for d in range(k, 0, -1):
            carry = (master[d] + carry * xr) % p
            quot[d - 1] = carry
        denom = 1
        for j, xj in enumerate(xs):
            if j != r:
                denom = denom * (xr - xj) % p
        scale = pow(denom, -1, p)
        for d in range(k):
            weights[d][r] = quot[d] * scale % p
    return weights


def interpolate(samples: Sequence[tuple[int, int]], field: FieldConfig = FieldConfig()) -> list[int]:
    """Coefficients of the unique degree ``len(samples)-1`` polynomial through ``samples``."""
    if not samples:
        raise EmptyInput("no samples to interpolate")
    xs = [x for x, _ in samples]
    ys = [y % field.p for _, y in samples]
    weights = interpolation_weights(xs, field)
    return [sum(w * y for w, y in zip(row, ys)) % field.p for row in weights]


def vandermonde(xs: Sequence[int], field: FieldConfig = FieldConfig()) -> list[list[int]]:
    """Rows ``[1, x, x^2, ...]`` for each point (square)."""
    k = len(xs)
    return [[pow(x, d, field.p) for d in range(k)] for x in xs]
