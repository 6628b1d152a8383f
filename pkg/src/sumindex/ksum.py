"""k-argument sum indexing via a witnessed (k-2)-fold sumset.

The reduction materialises B as all n^(k-2) sums of (k-2)-tuples over A,
each entry keeping its generating tuple as a witness, and then runs the
two-array machinery on (A, B).  Duplicate sums stay as distinct entries so
minimum-j semantics are well defined; entries are sorted by value with
ties in generation (tuple-lexicographic) order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import BudgetExceededError
from .primes import DEFAULT_PRIME_CONSTANT
from .threesum import decompose_3sum

DEFAULT_SUMSET_BUDGET = 1 << 24


@dataclass
class WitnessedSumset:
    """Sorted (k-2)-fold sums with one witness tuple per entry."""

    values: np.ndarray  # length n^(k-2)
    witnesses: np.ndarray  # (n^(k-2), k-2) indices into A

    def check(self, a_values: np.ndarray) -> bool:
        recomputed = a_values[self.witnesses].sum(axis=1)
        return bool(np.array_equal(recomputed, self.values))


def _fold_tuples(n: int, fold: int) -> np.ndarray:
    """All index tuples in [n]^fold, most-significant digit first."""
    count = n**fold
    flat = np.arange(count, dtype=np.int64)
    digits = np.empty((count, fold), dtype=np.int64)
    for pos in range(fold - 1, -1, -1):
        digits[:, pos] = flat % n
        flat = flat // n
    return digits


def build_ksum_sumset(a_values: np.ndarray, k: int, budget: int = DEFAULT_SUMSET_BUDGET) -> WitnessedSumset:
    """B = all (k-2)-fold sums of A, with witnesses, sorted by value."""
    if k < 3:
        raise ValueError("k must be at least 3")
    a = np.asarray(a_values, dtype=np.int64)
    n = a.size
    fold = k - 2
    count = n**fold
    if count > budget:
        raise BudgetExceededError(f"sumset size {count} exceeds budget {budget}")
    tuples = _fold_tuples(n, fold)
    values = a[tuples].sum(axis=1)
    order = np.lexsort((np.arange(count), values))
    return WitnessedSumset(values=values[order], witnesses=tuples[order])


def preprocess_ksum(
    a_values: np.ndarray,
    k: int,
    delta: float,
    seed: int,
    prime_constant: float = DEFAULT_PRIME_CONSTANT,
    constants=None,
    copies: Optional[int] = None,
    sumset_budget: int = DEFAULT_SUMSET_BUDGET,
    instance_digest: bytes = b"",
):
    from .indexing import build_index_advice
    from .plans import PlanConstants

    a = np.asarray(a_values, dtype=np.int64)
    sumset = build_ksum_sumset(a, k, budget=sumset_budget)
    constants = constants if constants is not None else PlanConstants()
    trivial = int(max(a.max(), sumset.values.max())) < 8
    return build_index_advice(
        kind="ksum",
        a_values=a,
        b_values=sumset.values,
        witnesses=sumset.witnesses,
        make_decomp=lambda rng: decompose_3sum(a, sumset.values, rng, prime_constant),
        delta=delta,
        seed=seed,
        prime_constant=prime_constant,
        constants=constants,
        k=k,
        trivial=trivial,
        copies=copies,
        instance_digest=instance_digest,
    )


def query_ksum(advice, b: int, meter=None) -> Optional[Tuple[int, ...]]:
    """A (k-1)-tuple of indices whose values sum to b, or None."""
    from .indexing import query_index

    return query_index(advice, b, meter=meter)
