"""Generic engine for chain codes built from multilinear block polynomials.

Every code in this package (MatDot, PolyDot, the n-matrix codes) multiplies a
chain of factors ``M_1 ... M_n``.  Factor ``f`` is cut into an ``R_f x C_f``
block grid, and adjacent factors share a contraction variable ``z_{f+1}``
(``C_f == R_{f+1}``).  Block ``(r, c)`` of factor ``f`` is tagged with
``z_f^{row} z_{f+1}^{c}`` where ``row`` is ``r`` for the first factor and
``R_f - 1 - r`` otherwise, so the exponent of a middle variable in the product
equals ``K - 1`` exactly when the indices contract.  Substituting
``z_v = x^{w_v}`` turns everything into one univariate polynomial; the
weights ``w`` are the only thing that distinguishes one code from another.

A product term's exponent is therefore ``sum(w_v * digit_v)`` with digit
ranges ``[0, R_1)``, ``[0, 2K_v - 1)`` for each middle variable and
``[0, C_n)``.  Output block ``(a, b)`` sits at the exponent whose digits are
``(a, K_2 - 1, ..., K_n - 1, b)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .codec import Code, CostReport, Share, WorkerProduct
from .errors import InvalidParameter, ShapeError
from .field_poly import FieldConfig, interpolation_weights
from .matrix_core import FieldMatrix, SplitSpec, concat_blocks, matmul, mult_count, split_grid


@dataclass(frozen=True)
class ChainLayout:
    grids: tuple[tuple[int, int], ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        grids = tuple((int(r), int(c)) for r, c in self.grids)
        weights = tuple(int(w) for w in self.weights)
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "weights", weights)
        if len(grids) < 1:
            raise InvalidParameter("a chain needs at least one factor")
        if any(r < 1 or c < 1 for r, c in grids):
            raise InvalidParameter(f"grid dimensions must be >= 1: {grids}")
        for f in range(len(grids) - 1):
            if grids[f][1] != grids[f + 1][0]:
                raise InvalidParameter(
                    f"factor {f + 1} has {grids[f][1]} block columns but factor "
                    f"{f + 2} has {grids[f + 1][0]} block rows"
                )
        if len(weights) != len(grids) + 1:
            raise InvalidParameter(f"need {len(grids) + 1} weights, got {len(weights)}")
        if any(w < 0 for w in weights):
            raise InvalidParameter("substitution weights must be non-negative")

    @property
    def n(self) -> int:
        return len(self.grids)

    def inner(self, v: int) -> int:
        """Block count along contraction variable ``v`` (0-based, ``1 <= v < n``)."""
        return self.grids[v - 1][1]

    @property
    def digit_sizes(self) -> tuple[int, ...]:
        mids = tuple(2 * self.inner(v) - 1 for v in range(1, self.n))
        return (self.grids[0][0],) + mids + (self.grids[-1][1],)

    @property
    def wanted_digits_mid(self) -> tuple[int, ...]:
        return tuple(self.inner(v) - 1 for v in range(1, self.n))

    @property
    def output_grid(self) -> tuple[int, int]:
        return self.grids[0][0], self.grids[-1][1]

    def exponent(self, digits: Sequence[int]) -> int:
        return sum(w * d for w, d in zip(self.weights, digits))

    @property
    def max_exponent(self) -> int:
        return self.exponent([s - 1 for s in self.digit_sizes])

    @property
    def threshold(self) -> int:
        """Number of coefficients of the product polynomial, i.e. max degree + 1."""
        return self.max_exponent + 1

    def wanted_exponent(self, a: int, b: int) -> int:
        return self.exponent((a,) + self.wanted_digits_mid + (b,))

    def wanted_exponents(self) -> dict[tuple[int, int], int]:
        rows, cols = self.output_grid
        return {(a, b): self.wanted_exponent(a, b) for a in range(rows) for b in range(cols)}

    def block_exponent(self, f: int, r: int, c: int) -> int:
        rows = self.grids[f][0]
        row_digit = r if f == 0 else rows - 1 - r
        return row_digit * self.weights[f] + c * self.weights[f + 1]

    def term_exponent(self, indices: Sequence[tuple[int, int]]) -> int:
        return sum(self.block_exponent(f, r, c) for f, (r, c) in enumerate(indices))


# -- verification --------------------------------------------------------------


@dataclass
class IsolationReport:
    """Outcome of exhaustively checking that wanted coefficients are isolated."""

    threshold: int
    wanted: dict[tuple[int, int], int]
    terms_checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_isolation(layout: ChainLayout, max_terms: int = 2_000_000) -> IsolationReport:
    """Enumerate every block-index tuple of the chain product.

    A wanted exponent for output block ``(a, b)`` must collect exactly the
    tuples with ``r_1 = a``, ``c_f = r_{f+1}`` for every adjacent pair and
    ``c_n = b``, and nothing else.
    """
    wanted = layout.wanted_exponents()
    report = IsolationReport(layout.threshold, wanted)
    owner: dict[int, tuple[int, int]] = {}
    for blk, e in wanted.items():
        if e in owner:
            report.violations.append(f"blocks {owner[e]} and {blk} share exponent {e}")
        owner[e] = blk

    per_factor = [list(itertools.product(range(r), range(c))) for r, c in layout.grids]
    total = int(np.prod([len(x) for x in per_factor], dtype=object))
    if total > max_terms:
        raise InvalidParameter(f"{total} index tuples exceed enumeration budget {max_terms}")
    exps = [[layout.block_exponent(f, r, c) for r, c in blocks]
            for f, blocks in enumerate(per_factor)]
    hits = {e: 0 for e in owner}
    for combo in itertools.product(*[range(len(x)) for x in per_factor]):
        report.terms_checked += 1
        e = sum(exps[f][i] for f, i in enumerate(combo))
        idx = [per_factor[f][i] for f, i in enumerate(combo)]
        contracts = all(idx[f][1] == idx[f + 1][0] for f in range(layout.n - 1))
        blk = (idx[0][0], idx[-1][1])
        if contracts:
            if e != wanted[blk]:
                report.violations.append(f"contraction term {idx} lands on {e}, not {wanted[blk]}")
            else:
                hits[e] += 1
        elif e in owner:
            report.violations.append(
                f"non-contracting term {idx} collides with block {owner[e]} at exponent {e}"
            )
    inner = int(np.prod([layout.inner(v) for v in range(1, layout.n)], dtype=object))
    for e, count in hits.items():
        if count != inner:
            report.violations.append(f"exponent {e} received {count} terms, expected {inner}")
    return report


def digit_collisions(layout: ChainLayout) -> list[tuple[tuple[int, ...], tuple[int, int]]]:
    """Digit vectors (not block tuples) whose exponent hits a wanted coefficient.

    Cheaper than :func:`verify_isolation` because it enumerates the digit box
    rather than all block indices; returns the offending digit vectors.
    """
    owner = {e: blk for blk, e in layout.wanted_exponents().items()}
    mid = layout.wanted_digits_mid
    bad = []
    for digits in itertools.product(*[range(s) for s in layout.digit_sizes]):
        e = layout.exponent(digits)
        if e in owner:
            blk = owner[e]
            if digits != (blk[0],) + mid + (blk[1],):
                bad.append((digits, blk))
    return bad


# -- worker evaluation order ------------------------------------------------


def association_plan(n: int):
    """Bracketing used by a worker for an ``n``-factor chain (leaves are indices).

    Inner ``M_{2i} M_{2i+1}`` pairs first, then their product, then the first
    factor, and for even ``n`` the last factor at the very end.
    """
    if n < 1:
        raise InvalidParameter("chain must have at least one factor")
    if n == 1:
        return 0
    if n == 2:
        return (0, 1)
    last = n - 1 if n % 2 == 1 else n - 2
    pairs = [(i, i + 1) for i in range(1, last, 2)]
    inner = pairs[0]
    for pr in pairs[1:]:
        inner = (inner, pr)
    if n % 2 == 1:
        return (0, inner)
    return ((0, inner), n - 1)


def evaluate_plan(plan, leaves: Sequence, mul: Callable):
    if isinstance(plan, int):
        return leaves[plan]
    left, right = plan
    return mul(evaluate_plan(left, leaves, mul), evaluate_plan(right, leaves, mul))


def plan_mults(plan, shapes: Sequence[tuple[int, int]]) -> tuple[tuple[int, int], int]:
    """Shape of the plan's result and the scalar multiplications it costs."""
    if isinstance(plan, int):
        return shapes[plan], 0
    (ls, lc), (rs, rc) = plan_mults(plan[0], shapes), plan_mults(plan[1], shapes)
    if ls[1] != rs[0]:
        raise ShapeError(f"plan multiplies {ls} by {rs}")
    return (ls[0], rs[1]), lc + rc + mult_count(ls, rs)


# -- codec -----------------------------------------------------------------------


class ChainCode(Code):
    """Encoder / worker / decoder for any :class:`ChainLayout`."""

    family = "chain"

    def __init__(self, layout: ChainLayout, workers: int, field: FieldConfig | None = None,
                 points=None, N: int | None = None):
        super().__init__(workers, field, points, N)
        self.layout = layout
        self._check_workers()

    @property
    def arity(self) -> int:
        return self.layout.n

    @property
    def threshold(self) -> int:
        return self.layout.threshold

    def _splits(self, n: int) -> list[SplitSpec]:
        return [SplitSpec.plan((n, n), "grid", r, c) for r, c in self.layout.grids]

    def _check_inputs(self, inputs: Sequence[FieldMatrix]) -> int:
        if len(inputs) != self.layout.n:
            raise InvalidParameter(f"expected {self.layout.n} input matrices, got {len(inputs)}")
        n = inputs[0].rows
        for m in inputs:
            if m.shape != (n, n):
                raise ShapeError(f"all inputs must be {n}x{n} square, got {m.shape}")
            if m.p != self.p:
                raise InvalidParameter(f"input over GF({m.p}) but code uses GF({self.p})")
        return n

    def encode(self, inputs: Sequence[FieldMatrix]) -> list[Share]:
        self._check_inputs(inputs)
        lay = self.layout
        grids = [split_grid(m, r, c) for m, (r, c) in zip(inputs, lay.grids)]
        # exponent table per factor, reused for every worker
        tables = [[(blk, lay.block_exponent(f, r, c))
                   for r, row in enumerate(g) for c, blk in enumerate(row)]
                  for f, g in enumerate(grids)]
        shares = []
        for wid, x in enumerate(self.points, start=1):
            enc = []
            for table in tables:
                acc = None
                for blk, e in table:
                    term = blk.scale(pow(x, e, self.p))
                    acc = term if acc is None else acc + term
                enc.append(acc)
            shares.append(Share(wid, x, tuple(enc)))
        return shares

    def worker(self, share: Share) -> WorkerProduct:
        blocks = list(share.blocks)
        if len(blocks) != self.layout.n:
            raise ShapeError(f"share carries {len(blocks)} blocks, expected {self.layout.n}")
        plan = association_plan(len(blocks))
        _, mults = plan_mults(plan, [b.shape for b in blocks])
        product = evaluate_plan(plan, blocks, matmul)
        return WorkerProduct(share.worker_id, share.x, product, mults)

    def coefficients(self, results: Sequence[WorkerProduct]) -> list[FieldMatrix]:
        """Interpolate every coefficient of the product polynomial."""
        chosen = self.select(results)
        shape = chosen[0].product.shape
        for r in chosen:
            if r.product.shape != shape:
                raise ShapeError("worker products have different shapes")
        W = FieldMatrix(interpolation_weights([r.x for r in chosen], self.field), self.p)
        Y = FieldMatrix(np.stack([r.product.data.ravel() for r in chosen]), self.p)
        coeffs = matmul(W, Y)
        return [FieldMatrix._wrap(coeffs.data[d].reshape(shape).copy(), self.p)
                for d in range(coeffs.rows)]

    def decode(self, results: Sequence[WorkerProduct], n: int | None = None) -> FieldMatrix:
        """Recover the chain product, cropped to ``n`` (default ``self.N``) when given."""
        n = self.N if n is None else n
        coeffs = self.coefficients(results)
        rows, cols = self.layout.output_grid
        blocks = [[coeffs[self.layout.wanted_exponent(a, b)] for b in range(cols)]
                  for a in range(rows)]
        br, bc = blocks[0][0].shape
        padded = (br * rows, bc * cols)
        shape = padded if n is None else (n, n)
        return concat_blocks(blocks, SplitSpec("grid", rows, cols, shape, padded))

    def costs(self, n: int) -> CostReport:
        specs = self._splits(n)
        in_symbols = sum(s.block_shape[0] * s.block_shape[1] for s in specs)
        out_shape, mults = plan_mults(association_plan(self.layout.n),
                                      [s.block_shape for s in specs])
        return CostReport.build(self.P, self.threshold, in_symbols,
                                out_shape[0] * out_shape[1], mults)

    def run(self, inputs: Sequence[FieldMatrix], worker_ids: Sequence[int] | None = None) -> FieldMatrix:
        """Encode, compute on ``worker_ids`` (default: first ``threshold``) and decode."""
        n = self._check_inputs(inputs)
        shares = self.encode(inputs)
        ids = list(worker_ids) if worker_ids is not None else list(range(1, self.threshold + 1))
        results = [self.worker(shares[i - 1]) for i in ids]
        return self.decode(results, n)
