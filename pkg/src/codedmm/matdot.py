"""MatDot and systematic MatDot codes for two-matrix products.

``A`` is split into ``m`` column-blocks and ``B`` into ``m`` row-blocks, so
``AB = sum_i A_i B_i``.  With ``p_A(x) = sum A_i x^i`` and
``p_B(x) = sum B_j x^(m-1-j)`` the product sits in the ``x^(m-1)``
coefficient of a degree ``2m-2`` polynomial, so any ``2m-1`` workers suffice.
The systematic variant swaps the monomial basis for Lagrange polynomials on
the first ``m`` points, making worker ``r <= m`` output ``A_{r-1} B_{r-1}``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .codec import Code, CostReport, Share, WorkerProduct
from .errors import InvalidParameter, RecoveryThresholdNotMet, ShapeError
from .field_poly import FieldConfig, check_distinct, eval_poly, interpolation_weights
from .matrix_core import (FieldMatrix, SplitSpec, crop, matmul, mult_count,
                          split_columns, split_rows)


def matdot_threshold(m: int) -> int:
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    return 2 * m - 1


class MatDot(Code):
    """MatDot code with ``m`` blocks per input on ``workers`` nodes."""

    family = "matdot"

    def __init__(self, m: int, workers: int, *, systematic: bool = False,
                 field: FieldConfig | None = None, points=None, N: int | None = None):
        if m < 1:
            raise InvalidParameter(f"m must be >= 1, got {m}")
        super().__init__(workers, field, points, N)
        self.m = m
        self.systematic = systematic
        if systematic:
            self.family = "sysmatdot"
        self._check_workers()

    @property
    def threshold(self) -> int:
        return matdot_threshold(self.m)

    def describe(self) -> dict:
        return {**super().describe(), "m": self.m}

    def lagrange_at(self, x: int) -> list[int]:
        """``[L_1(x), ..., L_m(x)]`` for the basis on the first ``m`` points."""
        p = self.p
        base = self.points.xs[: self.m]
        out = []
        for i, xi in enumerate(base):
            num, den = 1, 1
            for j, xj in enumerate(base):
                if j != i:
                    num = num * (x - xj) % p
                    den = den * (xi - xj) % p
            out.append(num * pow(den, -1, p) % p)
        return out

    def _check_inputs(self, inputs: Sequence[FieldMatrix]) -> tuple[FieldMatrix, FieldMatrix]:
        if len(inputs) != 2:
            raise InvalidParameter(f"MatDot multiplies two matrices, got {len(inputs)}")
        a, b = inputs
        if a.rows != a.cols or b.shape != a.shape:
            raise ShapeError(f"inputs must be equal-size square matrices: {a.shape}, {b.shape}")
        if a.p != self.p or b.p != self.p:
            raise InvalidParameter(f"inputs must live in GF({self.p})")
        return a, b

    def encode(self, inputs: Sequence[FieldMatrix]) -> list[Share]:
        a, b = self._check_inputs(inputs)
        a_blocks = split_columns(a, self.m)
        b_blocks = split_rows(b, self.m)
        shares = []
        for wid, x in enumerate(self.points, start=1):
            if self.systematic:
                lag = self.lagrange_at(x)
                pa = _combine(a_blocks, lag)
                pb = _combine(b_blocks, lag)
            else:
                pa = eval_poly(a_blocks, x, self.field)
                pb = eval_poly(b_blocks[::-1], x, self.field)
            shares.append(Share(wid, x, (pa, pb)))
        return shares

    def worker(self, share: Share) -> WorkerProduct:
        a, b = share.a_part, share.b_part
        if a.cols != b.rows:
            raise ShapeError(f"share parts do not conform: {a.shape} x {b.shape}")
        return WorkerProduct(share.worker_id, share.x, matmul(a, b), mult_count(a.shape, b.shape))

    def coefficients(self, results: Sequence[WorkerProduct]) -> list[FieldMatrix]:
        """All ``2m-1`` coefficients of ``p_A(x) p_B(x)`` from the first ``2m-1`` results."""
        chosen = self.select(results)
        shape = chosen[0].product.shape
        W = FieldMatrix(interpolation_weights([r.x for r in chosen], self.field), self.p)
        Y = FieldMatrix(np.stack([r.product.data.ravel() for r in chosen]), self.p)
        C = matmul(W, Y)
        return [FieldMatrix._wrap(C.data[d].reshape(shape).copy(), self.p) for d in range(C.rows)]

    def decode(self, results: Sequence[WorkerProduct], n: int | None = None) -> FieldMatrix:
        n = self.N if n is None else n
        if self.systematic:
            out = self._systematic_decode(results)
        else:
            out = self.coefficients(results)[self.m - 1]
        return out if n is None else crop(out, n, n)

    def _systematic_decode(self, results: Sequence[WorkerProduct]) -> FieldMatrix:
        check_distinct([r.x for r in results])
        window = list(results[: self.threshold])
        base = self.points.xs[: self.m]
        by_x = {r.x: r for r in window}
        if all(x in by_x for x in base):
            # fast path: the systematic workers already hold A_i B_i
            out = by_x[base[0]].product
            for x in base[1:]:
                out = out + by_x[x].product
            return out
        if len(window) < self.threshold:
            raise RecoveryThresholdNotMet(self.threshold, len(results))
        coeffs = self.coefficients(window)
        out = eval_poly(coeffs, base[0], self.field)
        for x in base[1:]:
            out = out + eval_poly(coeffs, x, self.field)
        return out

    def costs(self, n: int) -> CostReport:
        a_spec = SplitSpec.plan((n, n), "columns", 1, self.m)
        br, bc = a_spec.block_shape
        a_shape, b_shape = (br, bc), (bc, br)
        return CostReport.build(self.P, self.threshold, 2 * br * bc,
                                br * br, mult_count(a_shape, b_shape))

    def uncoded_blocks(self, a: FieldMatrix, b: FieldMatrix) -> list[FieldMatrix]:
        """``[A_0 B_0, ..., A_{m-1} B_{m-1}]``, the systematic workers' expected outputs."""
        return [matmul(x, y) for x, y in zip(split_columns(a, self.m), split_rows(b, self.m))]


def _combine(blocks: Sequence[FieldMatrix], scalars: Sequence[int]) -> FieldMatrix:
    acc = blocks[0].scale(scalars[0])
    for blk, c in zip(blocks[1:], scalars[1:]):
        acc = acc + blk.scale(c)
    return acc


# -- functional surface --------------------------------------------------------


def matdot_encode(a: FieldMatrix, b: FieldMatrix, spec: MatDot) -> list[Share]:
    return spec.encode((a, b))


def matdot_worker(share: Share) -> WorkerProduct:
    a, b = share.a_part, share.b_part
    if a.cols != b.rows:
        raise ShapeError(f"share parts do not conform: {a.shape} x {b.shape}")
    return WorkerProduct(share.worker_id, share.x, matmul(a, b), mult_count(a.shape, b.shape))


def matdot_decode(results: Sequence[WorkerProduct], spec: MatDot) -> FieldMatrix:
    return spec.decode(results)


def systematic_encode(a: FieldMatrix, b: FieldMatrix, spec: MatDot) -> list[Share]:
    if not spec.systematic:
        raise InvalidParameter("spec is not systematic")
    return spec.encode((a, b))


def systematic_decode(results: Sequence[WorkerProduct], spec: MatDot) -> FieldMatrix:
    if not spec.systematic:
        raise InvalidParameter("spec is not systematic")
    return spec.decode(results)
