"""Evaluatable finite functions with an evaluation meter.

Every inversion mode consumes a :class:`FunctionSpec`: a deterministic map
from [domain_size] to [range_size] whose evaluations are counted.  The
vectorised entry point ``eval_batch`` exists because chain construction and
batched queries evaluate millions of points; it charges the meter one unit
per evaluated point, exactly like the scalar path.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np


class FunctionSpec:
    """A function [L] -> [L'] with oracle-style evaluation counting.

    ``scalar_fn`` takes and returns Python ints.  ``batch_fn``, when given,
    takes and returns 1-d int64 numpy arrays and must agree pointwise with
    ``scalar_fn``.  The counter increments by exactly one per evaluated
    point on either path.
    """

    __slots__ = ("domain_size", "range_size", "_scalar_fn", "_batch_fn", "eval_count")

    def __init__(
        self,
        domain_size: int,
        range_size: int,
        scalar_fn: Optional[Callable[[int], int]] = None,
        batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        if domain_size < 1 or range_size < 1:
            raise ValueError("domain and range sizes must be positive")
        if scalar_fn is None and batch_fn is None:
            raise ValueError("need at least one of scalar_fn, batch_fn")
        self.domain_size = int(domain_size)
        self.range_size = int(range_size)
        self._scalar_fn = scalar_fn
        self._batch_fn = batch_fn
        self.eval_count = 0

    @classmethod
    def from_array(cls, values: np.ndarray, range_size: int) -> "FunctionSpec":
        """Wrap a dense value table (the common test fixture)."""
        table = np.asarray(values, dtype=np.int64)
        return cls(
            domain_size=len(table),
            range_size=range_size,
            scalar_fn=lambda x: int(table[x]),
            batch_fn=lambda xs: table[xs],
        )

    def __call__(self, x: int) -> int:
        if not 0 <= x < self.domain_size:
            raise ValueError(f"input {x} outside [{self.domain_size}]")
        self.eval_count += 1
        if self._scalar_fn is not None:
            y = int(self._scalar_fn(x))
        else:
            y = int(self._batch_fn(np.asarray([x], dtype=np.int64))[0])
        if not 0 <= y < self.range_size:
            raise ValueError(f"evaluator returned {y} outside [{self.range_size}]")
        return y

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        self.eval_count += int(xs.size)
        if self._batch_fn is not None:
            out = np.asarray(self._batch_fn(xs), dtype=np.int64)
        else:
            fn = self._scalar_fn
            out = np.fromiter((fn(int(x)) for x in xs), dtype=np.int64, count=xs.size)
        return out

    def reset_count(self) -> None:
        self.eval_count = 0
