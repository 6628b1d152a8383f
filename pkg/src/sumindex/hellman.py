"""Chain tables: construction and endpoint search.

A table is s chains of length t.  Chain steps apply x <- h_i(f'(x)) where
f' is the (possibly bypassed) function and h_i the per-table mixing map.
Only (start, end) pairs are kept, sorted by end with ties broken by start
so serialisation is bit-reproducible.  Pairs are stored row-wise as the
combined key end*L + start, which keeps the tie order and makes endpoint
lookup a single binary search per table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .funcspec import FunctionSpec
from .mixing import (
    BlockedImages,
    bypass_batch,
    derive_key,
    keyed_value_arr,
    reduce_to_arr,
)
from .plans import ParamPlan


@dataclass(frozen=True)
class ChainSeeds:
    """Byte seeds for the three pseudorandom streams of one advice build."""

    mix_seed: bytes
    start_seed: bytes
    bypass_seed: bytes

    @classmethod
    def from_shared(cls, shared_seed: bytes) -> "ChainSeeds":
        return cls(
            mix_seed=shared_seed + b"/mix",
            start_seed=shared_seed + b"/start",
            bypass_seed=shared_seed + b"/bypass",
        )


@dataclass(frozen=True)
class HellmanTable:
    """One table's (start, end) pairs, sorted by end then start."""

    table_index: int
    pairs: Tuple[Tuple[int, int], ...]


def table_mix_keys(mix_seed: bytes, r: int) -> np.ndarray:
    """64-bit mixing key per table index."""
    return np.asarray([derive_key(mix_seed, "mix", i) for i in range(r)], dtype=np.uint64)


def start_points(start_seed: bytes, r: int, s: int, domain: int) -> np.ndarray:
    """Seeded chain start points, shape (r, s)."""
    key = derive_key(start_seed, "starts")
    idx = np.arange(r * s, dtype=np.uint64)
    return reduce_to_arr(keyed_value_arr(key, idx), domain).reshape(r, s)


class TableSet:
    """All r tables of one advice, packed for vectorised endpoint search.

    ``comb`` has shape (rows, s); each row holds end*L + start sorted
    ascending.  For the framework's consolidated advice, rows run over
    (sub-function, table) pairs; standalone advice has rows == r.
    """

    __slots__ = ("comb", "domain", "r", "s")

    def __init__(self, comb: np.ndarray, domain: int):
        self.comb = comb
        self.domain = int(domain)
        self.r = comb.shape[0]
        self.s = comb.shape[1]
        if comb.size and (comb.shape[0] + 1) * domain * domain >= 1 << 62:
            raise ValueError("table set too large for combined-key search")

    @classmethod
    def from_raw(cls, starts: np.ndarray, ends: np.ndarray, domain: int) -> "TableSet":
        comb = np.sort(ends.astype(np.int64) * domain + starts.astype(np.int64), axis=-1)
        return cls(comb.reshape(-1, comb.shape[-1]), domain)

    def flat_sorted(self) -> np.ndarray:
        """Row-offset combined keys, globally sorted (rows are sorted)."""
        rows = np.arange(self.r, dtype=np.int64)[:, None]
        return (self.comb + rows * self.domain * self.domain).ravel()

    def starts_for(self, row: int, end_value: int) -> List[int]:
        """Start points of every chain in `row` whose end equals end_value."""
        base = self.comb[row]
        lo = int(np.searchsorted(base, end_value * self.domain))
        hi = int(np.searchsorted(base, (end_value + 1) * self.domain))
        return [int(v % self.domain) for v in base[lo:hi]]

    def table(self, index: int) -> HellmanTable:
        row = self.comb[index]
        pairs = tuple((int(v % self.domain), int(v // self.domain)) for v in row)
        return HellmanTable(table_index=index, pairs=pairs)

    def tables(self) -> List[HellmanTable]:
        return [self.table(i) for i in range(self.r)]


def walk_chain_ends(
    step_values: Callable[[np.ndarray], np.ndarray],
    starts_flat: np.ndarray,
    mix_keys_flat: np.ndarray,
    t: int,
    domain: int,
) -> np.ndarray:
    """Advance every chain t steps of x <- h_i(step_values(x))."""
    x = starts_flat.astype(np.int64, copy=True)
    for _ in range(t):
        vals = step_values(x)
        x = reduce_to_arr(keyed_value_arr(mix_keys_flat, vals.astype(np.uint64)), domain)
    return x


def build_tables(
    f: FunctionSpec,
    plan: ParamPlan,
    blocked: BlockedImages,
    seeds: ChainSeeds,
) -> TableSet:
    """Build the r tables for one function (vectorised over all chains)."""
    if plan.r < 1 or plan.s < 1 or plan.t < 1:
        raise ValueError("table construction needs r, s, t >= 1")
    starts = start_points(seeds.start_seed, plan.r, plan.s, f.domain_size)
    keys = table_mix_keys(seeds.mix_seed, plan.r)
    keys_flat = np.repeat(keys, plan.s)
    bypass_key = derive_key(seeds.bypass_seed, "bypass")

    def step(x: np.ndarray) -> np.ndarray:
        vals = f.eval_batch(x)
        if len(blocked):
            vals = bypass_batch(vals, x, blocked, bypass_key, f.range_size)
        return vals

    ends = walk_chain_ends(step, starts.ravel(), keys_flat, plan.t, f.domain_size)
    return TableSet.from_raw(starts, ends.reshape(plan.r, plan.s), f.domain_size)


def rewalk(
    step_values: Callable[[np.ndarray], np.ndarray],
    starts: np.ndarray,
    mix_keys: np.ndarray,
    steps: np.ndarray,
    domain: int,
) -> np.ndarray:
    """Walk each chain its own number of steps (candidate reconstruction)."""
    x = starts.astype(np.int64, copy=True)
    if x.size == 0:
        return x
    max_steps = int(steps.max())
    for step_idx in range(max_steps):
        active = steps > step_idx
        if not active.any():
            break
        vals = step_values(x[active])
        x[active] = reduce_to_arr(
            keyed_value_arr(mix_keys[active], vals.astype(np.uint64)), domain
        )
    return x
