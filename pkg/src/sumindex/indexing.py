"""Top-level index advice: amplified copies plus witness decoding.

One advice bundles ceil(log2(N*N')) independent weak copies (each with its
own decomposition draw and framework advice), the witness table that turns
a pair answer back into an index tuple, and exact bit accounting.  Queries
try copies first-hit; every emitted tuple is recomputed against the input
values before it is returned, so answers are witnesses in the literal
sense.  Instances with a tiny universe skip the machinery entirely and
store a complete answer table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import DigestMismatchError, FormatError
from .framework import (
    Decomposition,
    FrameworkAdvice,
    amplification_copies,
    preprocess_framework,
    query_framework,
    query_framework_batch,
)
from .plans import PlanConstants
from .serialize import BitReader, BitWriter, field_width

MAGIC_INDEX = b"SADX"
INDEX_VERSION = 1

KIND_CODES = {"sum3": 0, "ksum": 1, "kxor": 2}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}

_ABSENT = -1


@dataclass
class IndexAdvice:
    kind: str
    n: int
    m: int
    k: int
    ell_bits: int
    max_value: int
    delta: float
    prime_constant: float
    ell: int
    copies: List[FrameworkAdvice] = field(default_factory=list)
    decomps: List[Decomposition] = field(default_factory=list)
    a_values: Optional[np.ndarray] = None
    b_values: Optional[np.ndarray] = None
    witnesses: Optional[np.ndarray] = None  # (m, k-2); ksum/kxor
    trivial_table: Optional[Dict[int, Tuple[int, ...]]] = None
    total_bits: int = 0
    preprocess_evals: int = 0
    instance_digest: bytes = b""

    @property
    def outer_domain(self) -> int:
        return self.n * self.m

    @property
    def outer_range(self) -> int:
        return (1 << self.ell_bits) if self.kind == "kxor" else 2 * self.max_value

    def weak_bits(self) -> int:
        """Advice bits of a single weak copy (witnesses included)."""
        per_copy = self.copies[0].total_bits if self.copies else 0
        return per_copy + self._witness_bits()

    def _witness_bits(self) -> int:
        if self.witnesses is None:
            return 0
        return self.witnesses.size * field_width(self.n)

    def _trivial_bits(self) -> int:
        if self.trivial_table is None:
            return 0
        w_y = field_width(max(2, self.outer_range + 1))
        w_idx = field_width(max(2, self.n))
        return len(self.trivial_table) * (w_y + (self.k - 1) * w_idx)

    def account_bits(self) -> int:
        bits = 64 * 8  # top header fields
        bits += self._witness_bits() + self._trivial_bits()
        bits += sum(c.total_bits for c in self.copies)
        return bits


def decode_answer(advice: IndexAdvice, y: int, x: int) -> Optional[Tuple[int, ...]]:
    """Outer-domain code -> index tuple, recomputed against the input values."""
    i, j = divmod(int(x), advice.m)
    if advice.witnesses is None:
        vals = (int(advice.a_values[i]), int(advice.b_values[j]))
        tup = (i, j)
    else:
        tup = (i,) + tuple(int(w) for w in advice.witnesses[j])
        vals = tuple(int(advice.a_values[v]) for v in tup)
    if advice.kind == "kxor":
        recombined = 0
        for v in vals:
            recombined ^= v
    else:
        recombined = sum(vals)
    return tup if recombined == y else None


def query_index(advice: IndexAdvice, y: int, meter=None) -> Optional[Tuple[int, ...]]:
    """Answer one query: first verified hit across the amplified copies."""
    y = int(y)
    if advice.trivial_table is not None:
        return advice.trivial_table.get(y)
    if y < 0:
        return None
    for copy, decomp in zip(advice.copies, advice.decomps):
        x = query_framework(copy, decomp, y, meter=meter)
        if x is not None:
            out = decode_answer(advice, y, x)
            if out is not None:
                return out
    return None


def query_index_batch(advice: IndexAdvice, ys: np.ndarray):
    """Batched first-hit queries.

    Returns (codes, evals, probes): codes holds the outer-domain answer
    code per query or -1; evals/probes aggregate across the copies tried.
    """
    ys = np.asarray(ys, dtype=np.int64)
    codes = np.full(ys.size, _ABSENT, dtype=np.int64)
    evals = np.zeros(ys.size, dtype=np.int64)
    probes = np.zeros(ys.size, dtype=np.int64)
    if advice.trivial_table is not None:
        for idx, y in enumerate(ys.tolist()):
            tup = advice.trivial_table.get(int(y))
            if tup is not None:
                codes[idx] = tup[0] * advice.m + _witness_code(advice, tup)
        return codes, evals, probes
    pending = np.flatnonzero(ys >= 0)
    for copy, decomp in zip(advice.copies, advice.decomps):
        if pending.size == 0:
            break
        ans, ev, pr = query_framework_batch(copy, decomp, ys[pending])
        evals[pending] += ev
        probes[pending] += pr
        hit = ans != _ABSENT
        codes[pending[hit]] = ans[hit]
        pending = pending[~hit]
    return codes, evals, probes


def decode_batch(advice: IndexAdvice, ys: np.ndarray, codes: np.ndarray) -> List[Optional[Tuple[int, ...]]]:
    out: List[Optional[Tuple[int, ...]]] = []
    for y, x in zip(ys.tolist(), codes.tolist()):
        out.append(None if x == _ABSENT else decode_answer(advice, int(y), int(x)))
    return out


def _witness_code(advice: IndexAdvice, tup: Tuple[int, ...]) -> int:
    # trivial tables store tuples; recover the j code for uniform decoding
    if advice.witnesses is None:
        return tup[1]
    # linear scan is fine: trivial tables only exist for tiny universes
    target = tuple(tup[1:])
    for j in range(advice.witnesses.shape[0]):
        if tuple(int(v) for v in advice.witnesses[j]) == target:
            return j
    raise KeyError(f"witness {target} not found")


def build_trivial_table(
    kind: str,
    a_values: np.ndarray,
    b_values: np.ndarray,
    witnesses: Optional[np.ndarray],
) -> Dict[int, Tuple[int, ...]]:
    """Complete answer table for tiny universes (lexicographically least)."""
    n, m = a_values.size, b_values.size
    table: Dict[int, Tuple[int, ...]] = {}
    op = (lambda u, v: u ^ v) if kind == "kxor" else (lambda u, v: u + v)
    for i in range(n):
        for j in range(m):
            y = op(int(a_values[i]), int(b_values[j]))
            if y not in table:
                tup = (i, j) if witnesses is None else (i,) + tuple(int(w) for w in witnesses[j])
                table[y] = tup
    return table


def build_index_advice(
    kind: str,
    a_values: np.ndarray,
    b_values: np.ndarray,
    witnesses: Optional[np.ndarray],
    make_decomp: Callable[[np.random.Generator], Decomposition],
    delta: float,
    seed: int,
    prime_constant: float,
    constants: PlanConstants = PlanConstants(),
    k: int = 3,
    ell_bits: int = 0,
    trivial: bool = False,
    copies: Optional[int] = None,
    instance_digest: bytes = b"",
) -> IndexAdvice:
    """Assemble amplified advice; `copies` overrides ell for cheap sweeps."""
    n, m = int(a_values.size), int(b_values.size)
    max_value = 0 if kind == "kxor" else int(max(a_values.max(), b_values.max()))
    advice = IndexAdvice(
        kind=kind,
        n=n,
        m=m,
        k=k,
        ell_bits=ell_bits,
        max_value=max_value,
        delta=delta,
        prime_constant=prime_constant,
        ell=0,
        a_values=np.asarray(a_values, dtype=np.int64),
        b_values=np.asarray(b_values, dtype=np.int64),
        witnesses=witnesses,
        instance_digest=instance_digest,
    )
    if trivial:
        advice.trivial_table = build_trivial_table(kind, advice.a_values, advice.b_values, witnesses)
        advice.ell = 0
        advice.total_bits = advice.account_bits()
        return advice

    ell = copies if copies is not None else amplification_copies(advice.outer_domain, advice.outer_range)
    advice.ell = ell
    for idx in range(ell):
        rng = np.random.default_rng(np.random.SeedSequence([seed & 0x7FFFFFFF, idx]))
        decomp = make_decomp(rng)
        fw = preprocess_framework(decomp, delta, rng, constants)
        advice.copies.append(fw)
        advice.decomps.append(decomp)
        advice.preprocess_evals += fw.preprocess_evals
    advice.total_bits = advice.account_bits()
    return advice


def serialize_index(advice: IndexAdvice) -> bytes:
    from .framework import serialize_framework

    w = BitWriter()
    w.write_bytes(MAGIC_INDEX)
    w.write(INDEX_VERSION, 16)
    w.write(KIND_CODES[advice.kind], 8)
    w.write_bytes(advice.instance_digest.ljust(32, b"\0")[:32])
    for v in (advice.n, advice.m, advice.k, advice.ell_bits, advice.max_value):
        w.write(v, 64)
    w.write(round(advice.delta * 65536), 32)
    w.write(round(advice.prime_constant * 65536), 64)
    w.write(advice.ell, 32)
    w.write(1 if advice.trivial_table is not None else 0, 8)
    if advice.trivial_table is not None:
        w.write(len(advice.trivial_table), 64)
        w_y = field_width(max(2, advice.outer_range + 1))
        w_idx = field_width(max(2, advice.n))
        for y in sorted(advice.trivial_table):
            w.write(y, w_y)
            for v in advice.trivial_table[y]:
                w.write(v, w_idx)
        return w.getvalue()
    if advice.witnesses is not None:
        w.write(1, 8)
        w.write(advice.witnesses.shape[1], 16)
        w_idx = field_width(advice.n)
        w.align()
        for v in advice.witnesses.ravel().tolist():
            w.write(v, w_idx)
    else:
        w.write(0, 8)
    blobs = [serialize_framework(c) for c in advice.copies]
    w.align()
    offset = 0
    for blob in blobs:
        w.write(offset, 64)
        offset += len(blob)
    for blob in blobs:
        w.write_bytes(blob)
    return w.getvalue()


def deserialize_index(blob: bytes, a_values: np.ndarray, b_values: np.ndarray, expected_digest: bytes) -> IndexAdvice:
    from .framework import deserialize_framework

    r = BitReader(blob)
    if r.read_bytes(4) != MAGIC_INDEX:
        raise FormatError("bad magic: not an index advice file")
    if r.read(16) != INDEX_VERSION:
        raise FormatError("unsupported index advice version")
    kind = KIND_NAMES[r.read(8)]
    digest = r.read_bytes(32)
    if expected_digest and digest != expected_digest.ljust(32, b"\0")[:32]:
        raise DigestMismatchError("advice does not match this instance (digest mismatch)")
    n, m, k, ell_bits, max_value = (r.read(64) for _ in range(5))
    delta = r.read(32) / 65536.0
    prime_constant = r.read(64) / 65536.0
    ell = r.read(32)
    advice = IndexAdvice(
        kind=kind,
        n=n,
        m=m,
        k=k,
        ell_bits=ell_bits,
        max_value=max_value,
        delta=delta,
        prime_constant=prime_constant,
        ell=ell,
        a_values=np.asarray(a_values, dtype=np.int64),
        b_values=np.asarray(b_values, dtype=np.int64),
        instance_digest=digest,
    )
    if r.read(8):  # trivial table
        count = r.read(64)
        w_y = field_width(max(2, advice.outer_range + 1))
        w_idx = field_width(max(2, n))
        table = {}
        for _ in range(count):
            y = r.read(w_y)
            table[y] = tuple(r.read(w_idx) for _ in range(k - 1))
        advice.trivial_table = table
        advice.total_bits = advice.account_bits()
        return advice
    if r.read(8):  # witnesses
        width = r.read(16)
        w_idx = field_width(n)
        r.align()
        flat = np.asarray([r.read(w_idx) for _ in range(m * width)], dtype=np.int64)
        advice.witnesses = flat.reshape(m, width)
    r.align()
    offsets = [r.read(64) for _ in range(ell)]
    body = r.read_bytes(len(blob))
    for i in range(ell):
        lo = offsets[i]
        hi = offsets[i + 1] if i + 1 < ell else len(body)
        advice.copies.append(deserialize_framework(body[lo:hi]))
    _rebuild_decomps(advice)
    advice.total_bits = advice.account_bits()
    return advice


def _rebuild_decomps(advice: IndexAdvice) -> None:
    if advice.kind == "kxor":
        from .kxor import kxor_decomposition_from_aux

        advice.decomps = [kxor_decomposition_from_aux(c.aux_bytes) for c in advice.copies]
    else:
        from .threesum import Aux3Sum, decomposition_from_aux

        advice.decomps = [decomposition_from_aux(Aux3Sum.unpack(c.aux_bytes)) for c in advice.copies]
