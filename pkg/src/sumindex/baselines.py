"""The two trivial data structures: sorted inputs, and the sorted sumset.

Both answer exactly and deterministically; they bracket the tradeoff curve
(linear space with linear probing versus quadratic space with logarithmic
probing) and double as cross-checks for the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import BudgetExceededError
from .serialize import field_width


@dataclass
class BaselineAnswer:
    witness: Optional[Tuple[int, int]]
    probes: int


class SortedArrayBaseline:
    """Store the inputs sorted; scan A and binary-search B per query."""

    def __init__(self, a_values: np.ndarray, b_values: Optional[np.ndarray] = None):
        self.a = np.asarray(a_values, dtype=np.int64)
        self.b = self.a if b_values is None else np.asarray(b_values, dtype=np.int64)
        self.b_order = np.lexsort((np.arange(self.b.size), self.b))
        self.b_sorted = self.b[self.b_order]
        w_val = field_width(int(max(self.a.max(), self.b.max())) + 1)
        self.bits = self.a.size * (w_val + field_width(self.a.size)) + self.b.size * (
            w_val + field_width(self.b.size)
        )

    def query(self, y: int) -> BaselineAnswer:
        probes = 0
        for i in range(self.a.size):
            need = y - int(self.a[i])
            probes += field_width(self.b.size) + 1
            pos = int(np.searchsorted(self.b_sorted, need))
            if pos < self.b.size and int(self.b_sorted[pos]) == need:
                return BaselineAnswer((i, int(self.b_order[pos])), probes)
        return BaselineAnswer(None, probes)


class SortedSumsetBaseline:
    """Store every distinct pair sum with one lex-least witness."""

    def __init__(
        self,
        a_values: np.ndarray,
        b_values: Optional[np.ndarray] = None,
        budget: int = 1 << 26,
    ):
        a = np.asarray(a_values, dtype=np.int64)
        b = a if b_values is None else np.asarray(b_values, dtype=np.int64)
        if a.size * b.size > budget:
            raise BudgetExceededError(f"sumset {a.size}x{b.size} exceeds budget {budget}")
        self.m = int(b.size)
        sums = (a[:, None] + b[None, :]).ravel()
        codes = np.arange(sums.size, dtype=np.int64)  # i*m + j, already lex order
        order = np.lexsort((codes, sums))
        sv = sums[order]
        keep = np.ones(sv.size, dtype=bool)
        keep[1:] = sv[1:] != sv[:-1]
        self.values = sv[keep]
        self.codes = codes[order][keep]
        w_val = field_width(int(sv.max()) + 1)
        self.bits = self.values.size * (
            w_val + field_width(a.size) + field_width(self.m)
        )

    def query(self, y: int) -> BaselineAnswer:
        probes = field_width(self.values.size) + 1
        pos = int(np.searchsorted(self.values, y))
        if pos < self.values.size and int(self.values[pos]) == y:
            code = int(self.codes[pos])
            return BaselineAnswer((code // self.m, code % self.m), probes)
        return BaselineAnswer(None, probes)

    def member_values(self) -> np.ndarray:
        return self.values
