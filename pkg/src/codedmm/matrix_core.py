"""Dense matrices over GF(p), block partitioning and the multiplication oracle."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, ShapeError
from .field_poly import DEFAULT_PRIME

# int64 fast path: products of two residues fit in 62 bits
_INT64_PRIME_LIMIT = 2**31
_LO_BITS = 16
_LO_MASK = (1 << _LO_BITS) - 1


def _dtype_for(p: int):
    return np.int64 if p < _INT64_PRIME_LIMIT else object


class FieldMatrix:
    """Immutable ``rows x cols`` matrix of residues mod ``p``, stored row-major."""

    __slots__ = ("data", "p")

    def __init__(self, data, p: int = DEFAULT_PRIME):
        arr = np.array(data, dtype=_dtype_for(p))
        if arr.ndim != 2:
            raise ShapeError(f"matrix data must be 2-D, got {arr.ndim}-D")
        arr %= p
        arr.setflags(write=False)
        self.data = arr
        self.p = p

    @classmethod
    def _wrap(cls, arr: np.ndarray, p: int) -> "FieldMatrix":
        out = object.__new__(cls)
        arr.setflags(write=False)
        out.data = arr
        out.p = p
        return out

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int = DEFAULT_PRIME) -> "FieldMatrix":
        return cls._wrap(np.zeros((rows, cols), dtype=_dtype_for(p)), p)

    @classmethod
    def identity(cls, n: int, p: int = DEFAULT_PRIME) -> "FieldMatrix":
        return cls._wrap(np.eye(n, dtype=_dtype_for(p)), p)

    @classmethod
    def random(cls, rows: int, cols: int, p: int = DEFAULT_PRIME, rng=None) -> "FieldMatrix":
        rng = np.random.default_rng(rng)
        if p < _INT64_PRIME_LIMIT:
            return cls._wrap(rng.integers(0, p, size=(rows, cols), dtype=np.int64), p)
        vals = [[int(rng.integers(0, 2**62)) * 2**62 + int(rng.integers(0, 2**62))
                 for _ in range(cols)] for _ in range(rows)]
        return cls(vals, p)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.data]

    def _check_same(self, other: "FieldMatrix") -> None:
        if not isinstance(other, FieldMatrix):
            raise TypeError(f"expected FieldMatrix, got {type(other).__name__}")
        if other.p != self.p:
            raise InvalidParameter(f"field mismatch: GF({self.p}) vs GF({other.p})")
        if other.shape != self.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same(other)
        return FieldMatrix._wrap((self.data + other.data) % self.p, self.p)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same(other)
        return FieldMatrix._wrap((self.data - other.data) % self.p, self.p)

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix._wrap((-self.data) % self.p, self.p)

    def scale(self, c: int) -> "FieldMatrix":
        c %= self.p
        return FieldMatrix._wrap((self.data * c) % self.p, self.p)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return matmul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (self.p == other.p and self.shape == other.shape
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.p, self.shape, self.data.tobytes() if self.data.dtype != object
                     else tuple(map(int, self.data.ravel()))))

    def __repr__(self):
        return f"FieldMatrix({self.rows}x{self.cols}, p={self.p})"

    def is_zero(self) -> bool:
        return not self.data.any()

    # -- text format ------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.p}"]
        lines.extend(" ".join(str(int(v)) for v in row) for row in self.data)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FieldMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ShapeError("empty matrix file")
        header = lines[0].split()
        if len(header) != 3:
            raise ShapeError(f"bad header {lines[0]!r}; expected 'rows cols p'")
        rows, cols, p = (int(v) for v in header)
        body = [[int(v) for v in ln.split()] for ln in lines[1:]]
        if len(body) != rows or any(len(r) != cols for r in body):
            raise ShapeError(f"matrix body does not match header {rows}x{cols}")
        for r in body:
            for v in r:
                if not 0 <= v < p:
                    raise InvalidParameter(f"entry {v} outside [0, {p})")
        if rows == 0 or cols == 0:
            return cls.zeros(rows, cols, p)
        return cls(body, p)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "FieldMatrix":
        return cls.from_text(Path(path).read_text())


def _mulmod_int64(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # a = hi * 2^16 + lo keeps every partial dot product below 2^63
    hi = a >> _LO_BITS
    lo = a & _LO_MASK
    out = (hi @ b) % p
    out = (out << _LO_BITS) % p
    return (out + (lo @ b) % p) % p


def matmul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Exact product over GF(p)."""
    if a.p != b.p:
        raise InvalidParameter(f"field mismatch: GF({a.p}) vs GF({b.p})")
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    p = a.p
    if a.data.dtype == object or a.cols > (1 << _LO_BITS):
        prod = (a.data.astype(object) @ b.data.astype(object)) % p
        return FieldMatrix._wrap(prod.astype(_dtype_for(p)), p)
    return FieldMatrix._wrap(_mulmod_int64(a.data, b.data, p), p)


def mult_count(a_shape: tuple[int, int], b_shape: tuple[int, int]) -> int:
    """Scalar multiplications used by schoolbook ``a @ b``."""
    return a_shape[0] * a_shape[1] * b_shape[1]


def matmul_oracle(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Triple-loop reference product on Python ints; slow, independent of :func:`matmul`."""
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    A, B, p = a.tolist(), b.tolist(), a.p
    out = [[sum(A[i][k] * B[k][j] for k in range(a.cols)) % p for j in range(b.cols)]
           for i in range(a.rows)]
    if not out or not out[0]:
        return FieldMatrix.zeros(a.rows, b.cols, p)
    return FieldMatrix(out, p)


def chain_product(mats: Sequence[FieldMatrix]) -> FieldMatrix:
    """Left-to-right product of a matrix chain."""
    if not mats:
        raise InvalidParameter("empty matrix chain")
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m)
    return out


# -- partitioning -----------------------------------------------------------

_MODES = ("columns", "rows", "grid")


def _ceil_to(n: int, k: int) -> int:
    return -(-n // k) * k


@dataclass(frozen=True)
class SplitSpec:
    """How a matrix was cut into blocks, including any zero padding."""

    mode: str
    row_parts: int
    col_parts: int
    shape: tuple[int, int]
    padded: tuple[int, int]

    def __post_init__(self):
        if self.mode not in _MODES:
            raise InvalidParameter(f"unknown split mode {self.mode!r}")
        if self.row_parts < 1 or self.col_parts < 1:
            raise InvalidParameter("block counts must be positive")
        if self.padded[0] % self.row_parts or self.padded[1] % self.col_parts:
            raise InvalidParameter("padded shape is not divisible by the block counts")

    @classmethod
    def plan(cls, shape: tuple[int, int], mode: str, row_parts: int = 1,
             col_parts: int = 1) -> "SplitSpec":
        if row_parts < 1 or col_parts < 1:
            raise InvalidParameter(f"block counts must be >= 1, got {row_parts}x{col_parts}")
        padded = (_ceil_to(shape[0], row_parts), _ceil_to(shape[1], col_parts))
        return cls(mode, row_parts, col_parts, tuple(shape), padded)

    @property
    def padding(self) -> tuple[int, int]:
        return self.padded[0] - self.shape[0], self.padded[1] - self.shape[1]

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.padded[0] // self.row_parts, self.padded[1] // self.col_parts


def pad_to(a: FieldMatrix, rows: int, cols: int) -> FieldMatrix:
    if rows < a.rows or cols < a.cols:
        raise ShapeError(f"cannot pad {a.shape} down to {(rows, cols)}")
    if (rows, cols) == a.shape:
        return a
    out = np.zeros((rows, cols), dtype=a.data.dtype)
    out[: a.rows, : a.cols] = a.data
    return FieldMatrix._wrap(out, a.p)


def crop(a: FieldMatrix, rows: int, cols: int) -> FieldMatrix:
    if (rows, cols) == a.shape:
        return a
    return FieldMatrix._wrap(a.data[:rows, :cols].copy(), a.p)


def _grid(a: FieldMatrix, spec: SplitSpec) -> list[list[FieldMatrix]]:
    a = pad_to(a, *spec.padded)
    br, bc = spec.block_shape
    return [[FieldMatrix._wrap(a.data[i * br:(i + 1) * br, j * bc:(j + 1) * bc].copy(), a.p)
             for j in range(spec.col_parts)] for i in range(spec.row_parts)]


def split_columns(a: FieldMatrix, m: int) -> list[FieldMatrix]:
    """``A = [A_0 A_1 ... A_{m-1}]``; zero columns are appended if ``m`` does not divide."""
    if m < 1:
        raise InvalidParameter(f"number of blocks must be >= 1, got {m}")
    return _grid(a, SplitSpec.plan(a.shape, "columns", 1, m))[0]


def split_rows(a: FieldMatrix, m: int) -> list[FieldMatrix]:
    if m < 1:
        raise InvalidParameter(f"number of blocks must be >= 1, got {m}")
    return [row[0] for row in _grid(a, SplitSpec.plan(a.shape, "rows", m, 1))]


def split_grid(a: FieldMatrix, t: int, s: int) -> list[list[FieldMatrix]]:
    """``t`` block-rows by ``s`` block-columns; ``blocks[i][j]`` is ``A_{i,j}``."""
    if t < 1 or s < 1:
        raise InvalidParameter(f"grid dimensions must be >= 1, got {t}x{s}")
    return _grid(a, SplitSpec.plan(a.shape, "grid", t, s))


def concat_blocks(blocks, layout: SplitSpec) -> FieldMatrix:
    """Reassemble blocks produced by a split described by ``layout``, then strip padding.

    ``blocks`` is a flat list for ``columns``/``rows`` layouts and a nested
    ``[row][col]`` list for ``grid``.
    """
    if layout.mode == "columns":
        grid = [list(blocks)]
    elif layout.mode == "rows":
        grid = [[b] for b in blocks]
    else:
        grid = [list(r) for r in blocks]
    if len(grid) != layout.row_parts or any(len(r) != layout.col_parts for r in grid):
        raise ShapeError(
            f"expected {layout.row_parts}x{layout.col_parts} blocks for layout {layout.mode}"
        )
    br, bc = layout.block_shape
    p = grid[0][0].p
    for r in grid:
        for b in r:
            if b.shape != (br, bc):
                raise ShapeError(f"block shape {b.shape} does not match layout {(br, bc)}")
            if b.p != p:
                raise InvalidParameter("blocks belong to different fields")
    full = np.block([[b.data for b in r] for r in grid])
    return crop(FieldMatrix._wrap(full, p), *layout.shape)
