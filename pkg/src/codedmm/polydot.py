"""PolyDot(m, s, t) codes and their exponent-map analysis.

``A`` is cut into a ``t x s`` grid and ``B`` into ``s x t``.  The encoding
polynomials ``p_A(x, y) = sum A_ij x^i y^j`` and
``p_B(y, z) = sum B_kl y^(s-1-k) z^l`` are collapsed to one variable by a
substitution rule; which rule is used fixes the recovery threshold.

Two rules are built in:

``paper``
    ``y = x^t``, ``z = x^(t(2s-1))``; threshold ``t^2 (2s-1)``.
``improved``
    ``x -> y^s``, ``z = y^(st)``; threshold ``s t^2 + s - 1``.

Thresholds are always read off the exponent map (maximum exponent + 1) and
then compared against the closed form.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

from .codec import CostReport
from .errors import InvalidParameter
from .field_poly import FieldConfig
from .multilinear import ChainCode, ChainLayout, verify_isolation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubstitutionRule:
    """Powers of the single variable substituted for ``(x, y, z)``."""

    name: str
    e_x: int
    e_y: int
    e_z: int

    @property
    def weights(self) -> tuple[int, int, int]:
        return (self.e_x, self.e_y, self.e_z)

    @classmethod
    def paper(cls, s: int, t: int) -> "SubstitutionRule":
        return cls("paper", 1, t, t * (2 * s - 1))

    @classmethod
    def improved(cls, s: int, t: int) -> "SubstitutionRule":
        return cls("improved", s, 1, s * t)

    @classmethod
    def named(cls, name: str, s: int, t: int) -> "SubstitutionRule":
        try:
            return {"paper": cls.paper, "improved": cls.improved}[name](s, t)
        except KeyError:
            raise InvalidParameter(f"unknown substitution rule {name!r}") from None


RULES = ("paper", "improved")


def _rule(rule, s: int, t: int) -> SubstitutionRule:
    return rule if isinstance(rule, SubstitutionRule) else SubstitutionRule.named(rule, s, t)


def _check_st(s: int, t: int) -> None:
    if s < 1 or t < 1:
        raise InvalidParameter(f"s and t must be >= 1, got s={s}, t={t}")


def closed_form_threshold(s: int, t: int, rule: str) -> int:
    if rule == "paper":
        return t * t * (2 * s - 1)
    if rule == "improved":
        return s * t * t + s - 1
    raise InvalidParameter(f"no closed form for rule {rule!r}")


def table_listed_threshold(s: int, t: int) -> int:
    """An alternate closed form ``t^2 s - s - 1`` sometimes quoted for the improved rule.

    Reported for comparison only; it is not what the exponent map yields.
    """
    return t * t * s - s - 1


def polydot_layout(s: int, t: int, rule="paper") -> ChainLayout:
    _check_st(s, t)
    return ChainLayout(((t, s), (s, t)), _rule(rule, s, t).weights)


def polydot_threshold(s: int, t: int, rule="paper") -> int:
    """Recovery threshold from the exponent map, cross-checked with the closed form."""
    r = _rule(rule, s, t)
    k = polydot_layout(s, t, r).threshold
    if r.name in RULES:
        expected = closed_form_threshold(s, t, r.name)
        if expected != k:
            log.warning("rule %s, s=%d, t=%d: exponent map gives %d, closed form %d",
                        r.name, s, t, k, expected)
    return k


def exponent_map(s: int, t: int, rule="paper") -> dict[tuple[int, int, int, int], int]:
    """Exponent of ``A_{i,j} B_{k,l}`` in the collapsed product polynomial."""
    lay = polydot_layout(s, t, rule)
    return {(i, j, k, l): lay.term_exponent(((i, j), (k, l)))
            for i in range(t) for j in range(s) for k in range(s) for l in range(t)}


def wanted_exponents(s: int, t: int, rule="paper") -> dict[tuple[int, int], int]:
    """Exponent holding output block ``C_{i,l}``."""
    return polydot_layout(s, t, rule).wanted_exponents()


@dataclass
class ExponentMapReport:
    s: int
    t: int
    rule: str
    threshold: int
    closed_form: int | None
    wanted: dict[tuple[int, int], int]
    collisions: list[str] = field(default_factory=list)
    bijection: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.collisions and self.bijection is not False


def digit_map(s: int, t: int, rule="paper") -> dict[tuple[int, int, int], int]:
    """``(alpha, beta, gamma) -> exponent`` with ``beta = s-1+j-k`` ranging over ``0..2s-2``."""
    w = _rule(rule, s, t).weights
    return {(a, b, g): a * w[0] + b * w[1] + g * w[2]
            for a, b, g in itertools.product(range(t), range(2 * s - 1), range(t))}


def verify_exponent_map(s: int, t: int, rule="paper") -> ExponentMapReport:
    """Exhaustively check that wanted exponents are collision-free.

    For the ``paper`` rule also confirm the digit map is a bijection onto
    ``0 .. t^2(2s-1) - 1``.
    """
    _check_st(s, t)
    r = _rule(rule, s, t)
    lay = polydot_layout(s, t, r)
    iso = verify_isolation(lay)
    closed = closed_form_threshold(s, t, r.name) if r.name in RULES else None
    report = ExponentMapReport(s, t, r.name, lay.threshold, closed, iso.wanted,
                               list(iso.violations))
    if r.name == "paper":
        values = sorted(digit_map(s, t, r).values())
        report.bijection = values == list(range(t * t * (2 * s - 1)))
        if not report.bijection:
            report.collisions.append("digit map is not a bijection onto 0..t^2(2s-1)-1")
    return report


class PolyDot(ChainCode):
    """PolyDot(m = s*t) code."""

    family = "polydot"

    def __init__(self, s: int, t: int, workers: int, rule="paper", *,
                 field: FieldConfig | None = None, points=None, N: int | None = None):
        _check_st(s, t)
        self.s, self.t = s, t
        self.rule = _rule(rule, s, t)
        polydot_threshold(s, t, self.rule)
        super().__init__(polydot_layout(s, t, self.rule), workers, field, points, N)

    @property
    def m(self) -> int:
        return self.s * self.t

    def describe(self) -> dict:
        return {**super().describe(), "m": self.m, "s": self.s, "t": self.t,
                "rule": self.rule.name}


def polydot_encode(a, b, spec: PolyDot):
    return spec.encode((a, b))


def polydot_decode(results, spec: PolyDot):
    return spec.decode(results)


def polydot_costs(spec: PolyDot, n: int) -> CostReport:
    return spec.costs(n)


def factor_pairs(m: int) -> list[tuple[int, int]]:
    """All ``(s, t)`` with ``s * t == m``, ordered by increasing ``t``."""
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    return [(m // t, t) for t in range(1, m + 1) if m % t == 0]


@dataclass(frozen=True)
class TradeoffPoint:
    s: int
    t: int
    recovery_threshold: int
    per_worker_out_symbols: int
    fusion_total_symbols: int


def tradeoff_table(m: int, n: int, rule: str = "paper") -> list[TradeoffPoint]:
    """Threshold versus worker-to-fusion traffic for every factor pair of ``m``.

    ``n`` is the matrix size; per-worker output is ``(n/t)^2`` symbols (with
    ``n`` padded up to a multiple of ``t``).
    """
    rows = []
    for s, t in factor_pairs(m):
        k = polydot_threshold(s, t, rule)
        block = -(-n // t)
        out = block * block
        rows.append(TradeoffPoint(s, t, k, out, k * out))
    rows.sort(key=lambda r: (r.recovery_threshold, r.t))
    return rows


def tradeoff_csv(points: Sequence[TradeoffPoint]) -> str:
    lines = ["s,t,recovery_threshold,per_worker_out_symbols,fusion_total_symbols"]
    lines += [f"{p.s},{p.t},{p.recovery_threshold},{p.per_worker_out_symbols},"
              f"{p.fusion_total_symbols}" for p in points]
    return "\n".join(lines) + "\n"
