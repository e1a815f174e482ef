"""Single-round codes for chain products ``D1 D2 ... Dn``.

Odd positions of the chain are ``A`` factors and even positions ``B``
factors.  Three variants share the chain engine and differ only in grids and
substitution weights:

``basic``
    ``A`` factors are cut into ``m`` column-blocks and ``B`` factors into ``m``
    row-blocks; the ``i``-th pair is evaluated at ``x^(m^(i-1))``.
    Threshold ``2 m^(n/2) - 1`` (``n`` even) or ``(m+1) m^floor(n/2) - 1``.
``generalized``
    every factor is cut into a ``t x s`` (``A``) or ``s x t`` (``B``) grid with
    ``z1 = x, z2 = x^t, z3 = x^(st), z4 = x^(st^2), ...``.
``improved``
    same grids, with the high powers moved onto the outer variables ``z1`` and
    ``z_{n+1}``.

Heterogeneous grids (``A(i)`` as ``t_i x s_i``, ``B(i)`` as ``s_i x t_{i+1}``)
are supported through :func:`heterogeneous_layout`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .codec import Share, WorkerProduct
from .errors import InvalidParameter
from .field_poly import FieldConfig
from .matrix_core import FieldMatrix
from .multilinear import ChainCode, ChainLayout, IsolationReport, verify_isolation

log = logging.getLogger(__name__)

VARIANTS = ("basic", "generalized", "improved")


# -- closed forms ------------------------------------------------------------


def basic_threshold_formula(n: int, m: int) -> int:
    if n % 2 == 0:
        return 2 * m ** (n // 2) - 1
    return (m + 1) * m ** (n // 2) - 1


def generalized_threshold_formula(n: int, s: int, t: int) -> int:
    if n % 2 == 0:
        h = n // 2
        return s**h * t ** (h + 1) + s**h * t**h - t
    h = (n + 1) // 2
    return s**h * t**h + s ** (h - 1) * t**h - t


def generalized_threshold_in_m(n: int, m: int, t: int) -> int:
    """The generalized threshold rewritten with ``st = m``."""
    if n % 2 == 0:
        return m ** (n // 2) * (t + 1) - t
    return m ** ((n - 1) // 2) * (m + t) - t


def improved_threshold_formula(n: int, s: int, t: int) -> int:
    if n % 2 == 0:
        h = n // 2
        return s**h * t ** (h + 1) + s**h * t ** (h - 1) - 1
    h = (n + 1) // 2
    return s**h * t**h + s ** (h - 1) * t ** (h - 1) - 1


def closed_form(variant: str, n: int, s: int, t: int) -> int:
    if variant == "basic":
        return basic_threshold_formula(n, s * t)
    if variant == "generalized":
        return generalized_threshold_formula(n, s, t)
    if variant == "improved":
        return improved_threshold_formula(n, s, t)
    raise InvalidParameter(f"unknown variant {variant!r}")


# -- substitutions -----------------------------------------------------------


def _check_n(n: int) -> None:
    if n < 2:
        raise InvalidParameter(f"chain length n must be >= 2, got {n}")


def uniform_grids(n: int, s: int, t: int) -> tuple[tuple[int, int], ...]:
    """``A`` factors ``t x s``, ``B`` factors ``s x t``."""
    return tuple((t, s) if f % 2 == 0 else (s, t) for f in range(n))


def basic_weights(n: int, m: int) -> tuple[int, ...]:
    """Variable ``z_v`` (1-based) receives ``x^(m^(ceil(v/2) - 1))``."""
    return tuple(m ** ((v + 1) // 2 - 1) for v in range(1, n + 2))


def generalized_weights(n: int, s: int, t: int) -> tuple[int, ...]:
    w = [1]
    for v in range(1, n + 1):
        w.append(w[-1] * (t if v % 2 == 1 else s))
    return tuple(w)


def improved_weights(n: int, s: int, t: int) -> tuple[int, ...]:
    """Middle variables climb ``1, s, st, s^2 t, ...``; the outer two take the top powers."""
    mid = [1]
    for v in range(2, n):
        mid.append(mid[-1] * (s if v % 2 == 0 else t))
    if n % 2 == 0:
        h = n // 2
        first, last = s**h * t ** (h - 1), s**h * t**h
    else:
        h = (n - 1) // 2
        first, last = s**h * t**h, s**h * t ** (h + 1)
    return (first, *mid, last)


def variant_layout(variant: str, n: int, s: int = 1, t: int = 1, m: int | None = None) -> ChainLayout:
    """Grids and weights for a uniform variant (``basic`` takes ``m``)."""
    _check_n(n)
    if variant == "basic":
        m = s * t if m is None else m
        if m < 1:
            raise InvalidParameter(f"m must be >= 1, got {m}")
        return ChainLayout(uniform_grids(n, m, 1), basic_weights(n, m))
    if s < 1 or t < 1:
        raise InvalidParameter(f"s and t must be >= 1, got s={s}, t={t}")
    if variant == "generalized":
        return ChainLayout(uniform_grids(n, s, t), generalized_weights(n, s, t))
    if variant == "improved":
        return ChainLayout(uniform_grids(n, s, t), improved_weights(n, s, t))
    raise InvalidParameter(f"unknown variant {variant!r}")


def heterogeneous_grids(s: Sequence[int], t: Sequence[int], n: int) -> tuple[tuple[int, int], ...]:
    """``A(i)`` is ``t_i x s_i``, ``B(i)`` is ``s_i x t_{i+1}`` (1-based ``i``)."""
    _check_n(n)
    need_s = (n + 1) // 2
    need_t = n // 2 + 1
    if len(s) != need_s or len(t) != need_t:
        raise InvalidParameter(
            f"n={n} needs {need_s} s-values and {need_t} t-values, got {len(s)} and {len(t)}"
        )
    grids = []
    for f in range(n):
        i = f // 2
        grids.append((t[i], s[i]) if f % 2 == 0 else (s[i], t[i + 1]))
    return tuple(grids)


def weights_from_grids(grids: Sequence[tuple[int, int]], variant: str) -> tuple[int, ...]:
    """Substitution weights for arbitrary conformable grids.

    ``generalized``: ``w1 = 1``, ``w2 = R1`` and each further weight is the
    previous one times the block count of the previous contraction.
    ``improved``: ``w2 = 1`` climbing the same way up to ``wn``; then
    ``w1 = wn * Kn`` and ``w_{n+1} = w1 * R1``.
    """
    lay = ChainLayout(tuple(grids), (0,) * (len(grids) + 1))
    n = lay.n
    K = {v: lay.inner(v) for v in range(1, n)}
    R1 = grids[0][0]
    if variant == "generalized":
        w = [1, R1]
        for v in range(1, n):
            w.append(w[-1] * K[v])
        return tuple(w)
    if variant == "improved":
        mid = [1]
        for v in range(1, n - 1):
            mid.append(mid[-1] * K[v])
        first = mid[-1] * K[n - 1] if n > 1 else 1
        return (first, *mid, first * R1)
    raise InvalidParameter(f"no grid-derived weights for variant {variant!r}")


def heterogeneous_layout(s: Sequence[int], t: Sequence[int], n: int,
                         variant: str = "improved") -> ChainLayout:
    grids = heterogeneous_grids(s, t, n)
    return ChainLayout(grids, weights_from_grids(grids, variant))


def heterogeneous_threshold_formula(s: Sequence[int], t: Sequence[int], n: int,
                                    literal: bool = True) -> Fraction:
    """The heterogeneous-grid threshold expression, evaluated exactly.

    With ``literal=True`` this is the commonly quoted expression:
    ``(t_{n/2+1} - 1/t_1) prod_{i<=n/2} s_i t_i - 1`` for even ``n`` and
    ``(t_1 s_{(n+1)/2} + 1) prod_{i<=(n-1)/2} s_i t_i - 1`` for odd ``n``.
    ``literal=False`` gives the form that agrees with the exponent map of
    :func:`heterogeneous_layout`: the fractional term enters with a plus sign,
    and for odd ``n`` the product runs over ``t_2 .. t_{(n+1)/2}``.  Both agree
    whenever all ``t_i`` are equal (odd ``n``).
    """
    heterogeneous_grids(s, t, n)
    if n % 2 == 0:
        h = n // 2
        prod = 1
        for i in range(h):
            prod *= s[i] * t[i]
        frac = Fraction(1, t[0])
        return (t[h] + (-frac if literal else frac)) * prod - 1
    h = (n - 1) // 2
    prod = 1
    for i in range(h):
        prod *= s[i] * (t[i] if literal else t[i + 1])
    return Fraction((t[0] * s[h] + 1) * prod - 1)


# -- mixed radix digits --------------------------------------------------------


def alternating_radices(n: int, s: int, t: int) -> tuple[int, ...]:
    """Radices ``(t, s, t, s, ...)`` with ``n + 2`` digits."""
    return tuple(t if i % 2 == 0 else s for i in range(n + 2))


def mixed_radix_digits(d: int, radices: Sequence[int]) -> tuple[int, ...]:
    out = []
    for r in radices:
        d, digit = divmod(d, r)
        out.append(digit)
    if d:
        raise InvalidParameter("value does not fit in the given radices")
    return tuple(out)


def from_mixed_radix(digits: Sequence[int], radices: Sequence[int]) -> int:
    value, place = 0, 1
    for dgt, r in zip(digits, radices):
        if not 0 <= dgt < r:
            raise InvalidParameter(f"digit {dgt} out of range for radix {r}")
        value += dgt * place
        place *= r
    return value


# -- code ------------------------------------------------------------------


@dataclass(frozen=True)
class NMatParams:
    n: int
    variant: str
    s: int
    t: int

    @property
    def m(self) -> int:
        return self.s * self.t


class NMatrix(ChainCode):
    """n-matrix code.  ``basic`` takes ``m``; the grid variants take ``s`` and ``t``."""

    family = "nmat"

    def __init__(self, n: int, workers: int, *, variant: str = "basic", m: int | None = None,
                 s: int | None = None, t: int | None = None, layout: ChainLayout | None = None,
                 field: FieldConfig | None = None, points=None, N: int | None = None):
        _check_n(n)
        if variant not in VARIANTS and layout is None:
            raise InvalidParameter(f"unknown variant {variant!r}")
        if layout is not None:
            if layout.n != n:
                raise InvalidParameter(f"layout has {layout.n} factors, expected {n}")
            s = s or 0
            t = t or 0
        elif variant == "basic":
            if m is None:
                if s is None or t is None:
                    raise InvalidParameter("basic variant needs m (or s and t)")
                m = s * t
            s, t = m, 1
            layout = variant_layout("basic", n, m=m)
        else:
            if s is None or t is None:
                if m is None:
                    raise InvalidParameter(f"{variant} variant needs s and t")
                if s is None and t is None:
                    s, t = m, 1
                elif s is None:
                    s = m // t
                else:
                    t = m // s
            if m is not None and s * t != m:
                raise InvalidParameter(f"s*t must equal m: {s}*{t} != {m}")
            layout = variant_layout(variant, n, s, t)
        self.n = n
        self.variant = variant
        self.params = NMatParams(n, variant, s, t)
        super().__init__(layout, workers, field, points, N)
        if s and t and variant in VARIANTS:
            nmat_threshold(self)

    @property
    def m(self) -> int:
        return self.params.m

    def describe(self) -> dict:
        return {**super().describe(), "n": self.n, "variant": self.variant,
                "m": self.m, "s": self.params.s, "t": self.params.t}


def nmat_threshold(spec: NMatrix) -> int:
    """Threshold from the exponent map, cross-checked against the closed form."""
    k = spec.layout.threshold
    p = spec.params
    if p.s and p.t:
        expected = closed_form(p.variant, p.n, p.s, p.t)
        if expected != k:
            log.warning("%s n=%d s=%d t=%d: exponent map gives %d, closed form %d",
                        p.variant, p.n, p.s, p.t, k, expected)
    return k


def verify_coefficient_isolation(spec: NMatrix | ChainLayout) -> IsolationReport:
    layout = spec.layout if isinstance(spec, NMatrix) else spec
    return verify_isolation(layout)


def nmat_encode(chain: Sequence[FieldMatrix], spec: NMatrix) -> list[Share]:
    return spec.encode(chain)


def nmat_worker(share: Share, spec: NMatrix) -> WorkerProduct:
    return spec.worker(share)


def nmat_decode(results: Sequence[WorkerProduct], spec: NMatrix) -> FieldMatrix:
    return spec.decode(results)
