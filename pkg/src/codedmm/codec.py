"""Types shared by every coded-multiplication scheme.

A code is anything with the :class:`Code` surface: it encodes input
matrices into per-worker :class:`Share` objects, computes a worker's product
and decodes the product from worker outputs.  The simulator and CLI only talk
to this surface.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientWorkers, InvalidParameter, RecoveryThresholdNotMet
from .field_poly import EvalPoints, FieldConfig, check_distinct
from .matrix_core import FieldMatrix, chain_product


@dataclass(frozen=True)
class Share:
    """Encoded inputs sent by the master to one worker."""

    worker_id: int
    x: int
    blocks: tuple[FieldMatrix, ...]

    @property
    def a_part(self) -> FieldMatrix:
        return self.blocks[0]

    @property
    def b_part(self) -> FieldMatrix:
        return self.blocks[1]

    @property
    def symbols(self) -> int:
        return sum(b.size for b in self.blocks)


@dataclass(frozen=True)
class WorkerProduct:
    """A worker's output: the encoded product evaluated at its point."""

    worker_id: int
    x: int
    product: FieldMatrix
    mults: int = 0

    @property
    def c_part(self) -> FieldMatrix:
        return self.product


@dataclass(frozen=True)
class CostReport:
    """Exact symbol and multiplication counts for one round of a code."""

    master_out_symbols: int
    per_worker_in_symbols: int
    per_worker_out_symbols: int
    fusion_in_symbols: int
    worker_mult_count: int

    @classmethod
    def build(cls, workers: int, threshold: int, in_symbols: int, out_symbols: int,
              mults: int) -> "CostReport":
        return cls(
            master_out_symbols=workers * in_symbols,
            per_worker_in_symbols=in_symbols,
            per_worker_out_symbols=out_symbols,
            fusion_in_symbols=threshold * out_symbols,
            worker_mult_count=mults,
        )


class Code:
    """Base class holding worker count, field and evaluation points."""

    family = "abstract"
    arity = 2

    def __init__(self, workers: int, field: FieldConfig | None = None,
                 points: EvalPoints | Sequence[int] | None = None, N: int | None = None):
        self.field = field or FieldConfig()
        if points is None:
            points = EvalPoints.default(workers, self.field)
        elif not isinstance(points, EvalPoints):
            points = EvalPoints(tuple(points), self.field)
        if len(points) != workers:
            raise InvalidParameter(f"need {workers} evaluation points, got {len(points)}")
        self.P = workers
        self.points = points
        # unpadded input size; decoders strip padding back to N x N when known
        self.N = N

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def threshold(self) -> int:
        raise NotImplementedError

    def _check_workers(self) -> None:
        if self.P < self.threshold:
            raise InsufficientWorkers(self.threshold, self.P)

    def point(self, worker_id: int) -> int:
        return self.points[worker_id - 1]

    def select(self, results: Sequence[WorkerProduct]) -> list[WorkerProduct]:
        """First ``threshold`` results in caller order, after validation."""
        check_distinct([r.x for r in results])
        if len(results) < self.threshold:
            raise RecoveryThresholdNotMet(self.threshold, len(results))
        return list(results[: self.threshold])

    def random_inputs(self, n: int, rng=None) -> tuple[FieldMatrix, ...]:
        rng = np.random.default_rng(rng)
        return tuple(FieldMatrix.random(n, n, self.p, rng) for _ in range(self.arity))

    def oracle(self, inputs: Sequence[FieldMatrix]) -> FieldMatrix:
        return chain_product(list(inputs))

    # subclass surface
    def encode(self, inputs: Sequence[FieldMatrix]) -> list[Share]:
        raise NotImplementedError

    def worker(self, share: Share) -> WorkerProduct:
        raise NotImplementedError

    def decode(self, results: Sequence[WorkerProduct], n: int | None = None) -> FieldMatrix:
        raise NotImplementedError

    def costs(self, n: int) -> CostReport:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": self.family, "P": self.P, "k": self.threshold}
