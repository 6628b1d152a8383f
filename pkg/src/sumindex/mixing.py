"""Keyed mixing, seeded point generation, and image bypass.

The chain machinery needs three deterministic pseudorandom primitives:
per-table mixing maps [L'] -> [L], seeded multisets of domain points, and
counter-salted replacement values for bypassed images.  All three are built
from one 64-bit finalizer so the scalar and vectorised paths agree exactly.
Keys are derived from byte seeds with BLAKE2b, so distinct labels and
indices give unrelated streams.
"""

from __future__ import annotations

import hashlib
from typing import Iterable

import numpy as np

MASK64 = (1 << 64) - 1
_C1 = 0x9E3779B97F4A7C15  # golden-ratio increment
_C2 = 0xC2B2AE3D27D4EB4F

_M1 = 0xFF51AFD7ED558CCD
_M2 = 0xC4CEB9FE1A85EC53


def mix64(v: int) -> int:
    """64-bit finalizer (fmix64); bijective on 64-bit words."""
    v &= MASK64
    v ^= v >> 33
    v = (v * _M1) & MASK64
    v ^= v >> 33
    v = (v * _M2) & MASK64
    v ^= v >> 33
    return v


def mix64_arr(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64, copy=True)
    v ^= v >> np.uint64(33)
    v *= np.uint64(_M1)
    v ^= v >> np.uint64(33)
    v *= np.uint64(_M2)
    v ^= v >> np.uint64(33)
    return v


def reduce_to(v: int, n: int) -> int:
    """Map a mixed 64-bit word into [n] by multiply-shift on the top bits."""
    if n > (1 << 31):
        raise ValueError("reduction supports n up to 2^31")
    return ((v >> 32) * n) >> 32


def reduce_to_arr(v: np.ndarray, n: int) -> np.ndarray:
    if n > (1 << 31):
        raise ValueError("reduction supports n up to 2^31")
    return (((v >> np.uint64(32)) * np.uint64(n)) >> np.uint64(32)).astype(np.int64)


def derive_key(seed: bytes, label: str, index: int = 0) -> int:
    """64-bit subkey for (seed, label, index), via BLAKE2b."""
    h = hashlib.blake2b(seed, digest_size=8, person=b"sumindex" + bytes(8))
    h.update(label.encode())
    h.update(index.to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def keyed_value(key: int, x: int, salt: int = 0) -> int:
    """Deterministic 64-bit word for (key, x, salt)."""
    return mix64(((x * _C1) & MASK64) ^ ((salt * _C2) & MASK64) ^ key)


def keyed_value_arr(key, x: np.ndarray, salt=0) -> np.ndarray:
    x = x.astype(np.uint64, copy=False)
    acc = x * np.uint64(_C1)
    if np.ndim(salt) or salt:
        acc = acc ^ (np.asarray(salt, dtype=np.uint64) * np.uint64(_C2))
    acc = acc ^ (np.asarray(key, dtype=np.uint64) if np.ndim(key) else np.uint64(key))
    return mix64_arr(acc)


def mixing_map(mix_key: int, values: np.ndarray, domain: int) -> np.ndarray:
    """Per-table mixing h: [L'] -> [L], vectorised."""
    return reduce_to_arr(keyed_value_arr(mix_key, values), domain)


def mixing_map_scalar(mix_key: int, value: int, domain: int) -> int:
    return reduce_to(keyed_value(mix_key, value), domain)


def build_sample_set(sample_seed: bytes, g: int, domain: int) -> np.ndarray:
    """The g seeded sample points in [domain] (multiset; duplicates allowed).

    Deterministic in (sample_seed, g, domain); the online and preprocessing
    sides both call this, which is what lets the sampled dictionary stay out
    of the stored advice.
    """
    if g > domain:
        raise ValueError(f"sample size {g} exceeds domain {domain}")
    if g == 0:
        return np.empty(0, dtype=np.int64)
    key = derive_key(sample_seed, "sample")
    idx = np.arange(g, dtype=np.uint64)
    return reduce_to_arr(keyed_value_arr(key, idx), domain)


class BlockedImages:
    """A set of range values to bypass, stored sorted for vector membership."""

    __slots__ = ("sorted_values", "range_size")

    def __init__(self, values: Iterable[int] | np.ndarray, range_size: int):
        arr = np.unique(np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int64))
        if arr.size >= range_size:
            raise ValueError("blocked images cover the whole range")
        self.sorted_values = arr
        self.range_size = int(range_size)

    def __len__(self) -> int:
        return int(self.sorted_values.size)

    def contains(self, y: int) -> bool:
        pos = int(np.searchsorted(self.sorted_values, y))
        return pos < self.sorted_values.size and int(self.sorted_values[pos]) == y

    def contains_arr(self, ys: np.ndarray) -> np.ndarray:
        if self.sorted_values.size == 0:
            return np.zeros(ys.shape, dtype=bool)
        pos = np.searchsorted(self.sorted_values, ys)
        pos_c = np.minimum(pos, self.sorted_values.size - 1)
        return self.sorted_values[pos_c] == ys


def bypass_value(bypass_key: int, x: int, counter: int, range_size: int) -> int:
    return reduce_to(keyed_value(bypass_key, x, counter), range_size)


def bypassed_eval(f, blocked: BlockedImages, bypass_seed: bytes, x: int) -> int:
    """f(x), with blocked images replaced by a counter-salted resample.

    The replacement depends only on (bypass_seed, x) and is guaranteed to
    land outside the blocked set; termination holds because the blocked set
    is strictly smaller than the range.
    """
    y = f(x)
    if not blocked.contains(y):
        return y
    key = derive_key(bypass_seed, "bypass")
    counter = 1
    while True:
        y = bypass_value(key, x, counter, f.range_size)
        if not blocked.contains(y):
            return y
        counter += 1


def bypass_batch(
    values: np.ndarray,
    xs: np.ndarray,
    blocked: BlockedImages,
    bypass_key: int,
    range_size: int,
) -> np.ndarray:
    """Vectorised bypass replacement; agrees elementwise with bypassed_eval."""
    out = values.copy()
    mask = blocked.contains_arr(out)
    counters = np.ones(out.shape, dtype=np.uint64)
    while mask.any():
        xs_m = xs[mask].astype(np.uint64)
        fresh = reduce_to_arr(keyed_value_arr(bypass_key, xs_m, counters[mask]), range_size)
        out[mask] = fresh
        counters[mask] += np.uint64(1)
        still = np.zeros(out.shape, dtype=bool)
        still[mask] = blocked.contains_arr(fresh)
        mask = still
    return out
