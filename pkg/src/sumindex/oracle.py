"""Brute-force ground truth for every test and acceptance criterion.

Oracles enumerate candidate tuples directly from the raw input values,
sharing no code with the indexed query paths.  Membership uses dense
first-witness tables for the integer kinds (query values are bounded by
(k-1) * max) and a sorted pair table for the XOR kind; the four-argument
integer kind goes through a meet-in-the-middle pair table so the exhaustive
budget stays within n^2 instead of n^3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import BudgetExceededError
from .instances import KIND_KSUM, KIND_KXOR, KIND_SUM3, Instance

ORACLE_BUDGET = 1 << 26
_BIG = np.iinfo(np.int64).max


@dataclass
class OracleAnswer:
    member: bool
    witness: Optional[Tuple[int, ...]]


class Oracle:
    """Exhaustive answers for one instance (lexicographically least witness)."""

    def __init__(self, instance: Instance, budget: int = ORACLE_BUDGET):
        self.instance = instance
        kind = instance.kind
        a = instance.a_values
        n = a.size
        if kind == KIND_SUM3:
            b = instance.b_values
            if n * b.size > budget:
                raise BudgetExceededError("instance exceeds the exhaustive budget")
            sums = (a[:, None] + b[None, :]).ravel()
            self._table = np.full(int(sums.max()) + 1, _BIG, dtype=np.int64)
            np.minimum.at(self._table, sums, np.arange(sums.size, dtype=np.int64))
            self._shape = (n, b.size)
            self._mode = "dense-pairs"
        elif kind == KIND_KSUM:
            if n ** (instance.k - 1) > budget:
                raise BudgetExceededError("instance exceeds the exhaustive budget")
            if instance.k == 4:
                # meet in the middle: first-witness table of all 2-fold sums
                pair = (a[:, None] + a[None, :]).ravel()
                self._pair_table = np.full(int(pair.max()) + 1, _BIG, dtype=np.int64)
                np.minimum.at(self._pair_table, pair, np.arange(pair.size, dtype=np.int64))
                self._mode = "mitm4"
            else:
                tuples = _enumerate_tuples(n, instance.k - 1)
                sums = a[tuples].sum(axis=1)
                self._table = np.full(int(sums.max()) + 1, _BIG, dtype=np.int64)
                np.minimum.at(self._table, sums, np.arange(sums.size, dtype=np.int64))
                self._shape = tuple([n] * (instance.k - 1))
                self._mode = "dense-tuples"
        elif kind == KIND_KXOR:
            if n ** (instance.k - 1) > budget:
                raise BudgetExceededError("instance exceeds the exhaustive budget")
            tuples = _enumerate_tuples(n, instance.k - 1)
            vals = a[tuples[:, 0]].copy()
            for pos in range(1, instance.k - 1):
                vals ^= a[tuples[:, pos]]
            codes = np.arange(vals.size, dtype=np.int64)
            order = np.lexsort((codes, vals))
            sv = vals[order]
            keep = np.ones(sv.size, dtype=bool)
            keep[1:] = sv[1:] != sv[:-1]
            self._xor_vals = sv[keep]
            self._xor_codes = codes[order][keep]
            self._shape = tuple([n] * (instance.k - 1))
            self._mode = "xor"
        else:
            raise ValueError(f"unknown kind {kind!r}")

    def query(self, y: int) -> OracleAnswer:
        y = int(y)
        if y < 0:
            return OracleAnswer(False, None)
        if self._mode == "mitm4":
            a = self.instance.a_values
            n = a.size
            for i1 in range(n):
                need = y - int(a[i1])
                if 0 <= need < self._pair_table.size:
                    code = int(self._pair_table[need])
                    if code != _BIG:
                        return OracleAnswer(True, (i1, code // n, code % n))
            return OracleAnswer(False, None)
        if self._mode == "xor":
            pos = int(np.searchsorted(self._xor_vals, y))
            if pos < self._xor_vals.size and int(self._xor_vals[pos]) == y:
                return OracleAnswer(True, _decode(int(self._xor_codes[pos]), self._shape))
            return OracleAnswer(False, None)
        if y >= self._table.size:
            return OracleAnswer(False, None)
        code = int(self._table[y])
        if code == _BIG:
            return OracleAnswer(False, None)
        return OracleAnswer(True, _decode(code, self._shape))

    def member_values(self) -> np.ndarray:
        """All attainable query values, ascending."""
        if self._mode == "xor":
            return self._xor_vals
        if self._mode == "mitm4":
            a = self.instance.a_values
            pair_vals = np.flatnonzero(self._pair_table != _BIG)
            vals = np.unique((a[:, None] + pair_vals[None, :]).ravel())
            return vals
        return np.flatnonzero(self._table != _BIG)


def _enumerate_tuples(n: int, fold: int) -> np.ndarray:
    count = n**fold
    flat = np.arange(count, dtype=np.int64)
    out = np.empty((count, fold), dtype=np.int64)
    for pos in range(fold - 1, -1, -1):
        out[:, pos] = flat % n
        flat //= n
    return out


def _decode(code: int, shape: Tuple[int, ...]) -> Tuple[int, ...]:
    out = []
    for dim in reversed(shape[1:]):
        out.append(code % dim)
        code //= dim
    out.append(code)
    return tuple(reversed(out))


def oracle_query(instance: Instance, y: int, budget: int = ORACLE_BUDGET) -> OracleAnswer:
    """One-shot exhaustive answer (builds the table; use Oracle for batches)."""
    return Oracle(instance, budget=budget).query(y)
