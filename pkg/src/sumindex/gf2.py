"""GF(2) linear algebra on int bitmask rows.

Matrices are stored as one integer bitmask per row (column j = bit j),
which keeps rank computation and matrix-vector products branch-free.  The
XOR decomposition needs uniformly random full-row-rank matrices and fast
batched products; vector lengths are capped at 62 bits so batches fit in
int64 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

MAX_BITS = 62


@dataclass(frozen=True)
class F2Matrix:
    rows: int
    cols: int
    row_masks: tuple  # one int bitmask per row

    def __post_init__(self):
        if self.cols > MAX_BITS:
            raise ValueError(f"bit-vector length {self.cols} exceeds supported {MAX_BITS}")
        if len(self.row_masks) != self.rows:
            raise ValueError("row count mismatch")

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))


def rank(masks: List[int]) -> int:
    """Row rank over GF(2) via elimination on bitmasks."""
    basis: List[int] = []
    for row in masks:
        cur = row
        for b in basis:
            cur = min(cur, cur ^ b)
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
    return len(basis)


def is_full_row_rank(m: F2Matrix) -> bool:
    return rank(list(m.row_masks)) == m.rows


def sample_full_rank(rows: int, cols: int, rng: np.random.Generator, max_attempts: int = 1000) -> F2Matrix:
    """Uniform full-row-rank matrix, by rejection sampling of uniform bits."""
    if rows > cols:
        raise ValueError(f"cannot have row rank {rows} with only {cols} columns")
    if cols > MAX_BITS:
        raise ValueError(f"bit-vector length {cols} exceeds supported {MAX_BITS}")
    for _ in range(max_attempts):
        masks = tuple(int(v) for v in rng.integers(0, 1 << cols, size=rows, dtype=np.int64))
        m = F2Matrix(rows, cols, masks)
        if is_full_row_rank(m):
            return m
    raise RuntimeError(f"no full-rank {rows}x{cols} matrix in {max_attempts} attempts")


def f2_matvec(m: F2Matrix, v: int) -> int:
    """Matrix-vector product over GF(2); v and the result are bitmasks."""
    if v >> m.cols:
        raise ValueError(f"vector has more than {m.cols} bits")
    out = 0
    for i, mask in enumerate(m.row_masks):
        out |= (int(v & mask).bit_count() & 1) << i
    return out


def f2_matvec_batch(m: F2Matrix, vs: np.ndarray) -> np.ndarray:
    """Vectorised f2_matvec over an int64 array of bitmask vectors."""
    vs = vs.astype(np.uint64, copy=False)
    out = np.zeros(vs.shape, dtype=np.uint64)
    for i, mask in enumerate(m.row_masks):
        bits = np.bitwise_count(vs & np.uint64(mask)) & np.uint64(1)
        out |= bits.astype(np.uint64) << np.uint64(i)
    return out.astype(np.int64)
