"""Two-array sum indexing via modular sub-function decomposition.

Preprocessing draws primes p and q from dyadic intervals sized to the two
array lengths, plus a uniform miss value z in [p].  The outer function
(i, j) -> a_i + b_j splits into q sub-functions indexed by the residue
class d = (a_i + b_j) mod q: sub-function d maps i to (a_i + b_j*) mod p
where j* is the least j whose pair lands in class d, and to z when the
class is empty for that i.  Queries route by (y mod q, y mod p) and
translate a recovered i back to a pair by binary search for y - a_i.

The auxiliary data is the three sorted views of the inputs (by value, and
B by residue mod q) plus the primes and z; everything the evaluators need
is recomputed from it, so advice files carry only aux + tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .framework import Decomposition
from .instances import Instance
from .primes import DEFAULT_PRIME_CONSTANT, prime_interval, sample_prime
from .serialize import BitReader, BitWriter, field_width

MAGIC_AUX3 = b"SAX3"


@dataclass
class Aux3Sum:
    """Packed auxiliary data of one decomposition draw."""

    p: int
    q: int
    z: int
    n: int
    m: int
    max_value: int
    sorted_a_vals: np.ndarray  # A sorted by (value, i)
    sorted_a_idx: np.ndarray
    sorted_b_vals: np.ndarray  # B sorted by (value, j)
    sorted_b_idx: np.ndarray
    bres_res: np.ndarray  # B residues mod q, sorted by (residue, j)
    bres_vals: np.ndarray
    bres_idx: np.ndarray

    def bit_size(self) -> int:
        w_val = field_width(self.max_value + 1)
        w_i = field_width(self.n)
        w_j = field_width(self.m)
        w_q = field_width(self.q)
        return (
            32 + 6 * 64
            + self.n * (w_val + w_i)
            + self.m * (w_val + w_j)
            + self.m * (w_q + w_val + w_j)
        )

    def pack(self) -> bytes:
        w = BitWriter()
        w.write_bytes(MAGIC_AUX3)
        for v in (self.p, self.q, self.z, self.n, self.m, self.max_value):
            w.write(v, 64)
        w_val = field_width(self.max_value + 1)
        w_i = field_width(self.n)
        w_j = field_width(self.m)
        w_q = field_width(self.q)
        for val, idx in zip(self.sorted_a_vals.tolist(), self.sorted_a_idx.tolist()):
            w.write(val, w_val)
            w.write(idx, w_i)
        for val, idx in zip(self.sorted_b_vals.tolist(), self.sorted_b_idx.tolist()):
            w.write(val, w_val)
            w.write(idx, w_j)
        for res, val, idx in zip(
            self.bres_res.tolist(), self.bres_vals.tolist(), self.bres_idx.tolist()
        ):
            w.write(res, w_q)
            w.write(val, w_val)
            w.write(idx, w_j)
        assert w.bits_written == self.bit_size()
        return w.getvalue()

    @classmethod
    def unpack(cls, blob: bytes) -> "Aux3Sum":
        r = BitReader(blob)
        if r.read_bytes(4) != MAGIC_AUX3:
            raise ValueError("bad aux magic")
        p, q, z, n, m, max_value = (r.read(64) for _ in range(6))
        w_val = field_width(max_value + 1)
        w_i = field_width(n)
        w_j = field_width(m)
        w_q = field_width(q)
        sa = np.empty(n, dtype=np.int64)
        sai = np.empty(n, dtype=np.int64)
        for i in range(n):
            sa[i] = r.read(w_val)
            sai[i] = r.read(w_i)
        sb = np.empty(m, dtype=np.int64)
        sbj = np.empty(m, dtype=np.int64)
        for j in range(m):
            sb[j] = r.read(w_val)
            sbj[j] = r.read(w_j)
        br = np.empty(m, dtype=np.int64)
        bv = np.empty(m, dtype=np.int64)
        bj = np.empty(m, dtype=np.int64)
        for j in range(m):
            br[j] = r.read(w_q)
            bv[j] = r.read(w_val)
            bj[j] = r.read(w_j)
        return cls(p, q, z, n, m, max_value, sa, sai, sb, sbj, br, bv, bj)

    def raw_a(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        out[self.sorted_a_idx] = self.sorted_a_vals
        return out

    def raw_b(self) -> np.ndarray:
        out = np.empty(self.m, dtype=np.int64)
        out[self.sorted_b_idx] = self.sorted_b_vals
        return out


def build_aux_3sum(a: np.ndarray, b: np.ndarray, p: int, q: int, z: int) -> Aux3Sum:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n, m = a.size, b.size
    a_order = np.lexsort((np.arange(n), a))
    b_order = np.lexsort((np.arange(m), b))
    res = b % q
    r_order = np.lexsort((np.arange(m), res))
    return Aux3Sum(
        p=p,
        q=q,
        z=z,
        n=n,
        m=m,
        max_value=int(max(a.max(), b.max())),
        sorted_a_vals=a[a_order],
        sorted_a_idx=a_order.astype(np.int64),
        sorted_b_vals=b[b_order],
        sorted_b_idx=b_order.astype(np.int64),
        bres_res=res[r_order],
        bres_vals=b[r_order],
        bres_idx=r_order.astype(np.int64),
    )


def map_3sum(y: int, p: int, q: int) -> Tuple[int, int]:
    """Dispatch: residue class and in-class target of a query value."""
    return y % q, y % p


def eval_subfn_3sum(aux: Aux3Sum, d: int, i: int) -> int:
    """Sub-function value at i: (a_i + b_j*) mod p for the least matching j."""
    a = aux.raw_a()  # scalar reference path; the batched closures cache this
    rd = (d - int(a[i])) % aux.q
    pos = int(np.searchsorted(aux.bres_res, rd))
    if pos < aux.m and int(aux.bres_res[pos]) == rd:
        return (int(a[i]) + int(aux.bres_vals[pos])) % aux.p
    return aux.z


def translate_3sum(aux: Aux3Sum, y: int, i: int) -> Tuple[int, int]:
    """Recover (i, j) with smallest j such that a_i + b_j = y; sentinel (0,0)."""
    a = aux.raw_a()
    need = y - int(a[i])
    pos = int(np.searchsorted(aux.sorted_b_vals, need))
    if pos < aux.m and int(aux.sorted_b_vals[pos]) == need:
        return i, int(aux.sorted_b_idx[pos])
    return 0, 0


def decompose_3sum(
    a_values: np.ndarray,
    b_values: np.ndarray,
    rng: np.random.Generator,
    prime_constant: float = DEFAULT_PRIME_CONSTANT,
) -> Decomposition:
    """Draw (p, q, z) and expose the sub-function family for (A, B)."""
    a = np.asarray(a_values, dtype=np.int64)
    b = np.asarray(b_values, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("inputs must be non-empty")
    if a.size > b.size:
        raise ValueError("expected len(A) <= len(B)")
    n, m = int(a.size), int(b.size)
    max_value = int(max(a.max(), b.max()))
    if max_value < 8:
        raise ValueError("max element below 8: use the trivial answer-table path")

    p = sample_prime(prime_interval(n, max_value, prime_constant), rng)
    q = sample_prime(prime_interval(m, max_value, prime_constant), rng)
    z = int(rng.integers(0, p))
    aux = build_aux_3sum(a, b, p, q, z)
    return decomposition_from_aux(aux)


def decomposition_from_aux(aux: Aux3Sum) -> Decomposition:
    """Evaluators over packed aux (used fresh and when loading advice files)."""
    p, q, z = aux.p, aux.q, aux.z
    n, m = aux.n, aux.m
    a_arr = aux.raw_a()
    b_arr = aux.raw_b()
    bres_res = aux.bres_res
    bres_vals = aux.bres_vals
    sorted_b_vals = aux.sorted_b_vals
    sorted_b_idx = aux.sorted_b_idx

    def eval_sub(d: int, i: int) -> int:
        rd = (d - int(a_arr[i])) % q
        pos = int(np.searchsorted(bres_res, rd))
        if pos < m and int(bres_res[pos]) == rd:
            return (int(a_arr[i]) + int(bres_vals[pos])) % p
        return z

    def eval_sub_batch(ds: np.ndarray, xs: np.ndarray) -> np.ndarray:
        ai = a_arr[xs]
        rd = (ds - ai) % q
        pos = np.searchsorted(bres_res, rd)
        pos_c = np.minimum(pos, m - 1)
        hit = bres_res[pos_c] == rd
        return np.where(hit, (ai + bres_vals[pos_c]) % p, z)

    def map_batch(ys: np.ndarray):
        return ys % q, ys % p

    def translate(y: int, i: int) -> int:
        need = y - int(a_arr[i])
        pos = int(np.searchsorted(sorted_b_vals, need))
        if pos < m and int(sorted_b_vals[pos]) == need:
            return i * m + int(sorted_b_idx[pos])
        return 0  # sentinel pair (0, 0); outer verification discards it

    def translate_batch(ys: np.ndarray, xps: np.ndarray) -> np.ndarray:
        need = ys - a_arr[xps]
        pos = np.searchsorted(sorted_b_vals, need)
        pos_c = np.minimum(pos, m - 1)
        hit = sorted_b_vals[pos_c] == need
        return np.where(hit, xps * m + sorted_b_idx[pos_c], 0)

    def eval_outer(x: int) -> int:
        return int(a_arr[x // m]) + int(b_arr[x % m])

    def eval_outer_batch(xs: np.ndarray) -> np.ndarray:
        return a_arr[xs // m] + b_arr[xs % m]

    return Decomposition(
        num_subfns=q,
        sub_domain=n,
        sub_range=p,
        outer_domain=n * m,
        outer_range=2 * aux.max_value,
        eval_sub=eval_sub,
        map_to_subfn=lambda y: y % q,
        map_to_target=lambda y: y % p,
        translate=translate,
        eval_outer=eval_outer,
        aux_bytes=aux.pack(),
        aux_bits=aux.bit_size(),
        eval_sub_batch=eval_sub_batch,
        map_batch=map_batch,
        translate_batch=translate_batch,
        eval_outer_batch=eval_outer_batch,
    )


def subfn_oracle_3sum(
    a_values: np.ndarray, b_values: np.ndarray, p: int, q: int, z: int, d: int, i: int
) -> int:
    """Independent linear-scan oracle for the sub-function definition."""
    best: Optional[int] = None
    a_i = int(a_values[i])
    for j in range(len(b_values)):
        if (a_i + int(b_values[j])) % q == d:
            best = j
            break
    if best is None:
        return z
    return (a_i + int(b_values[best])) % p


def preprocess_3sum(
    a_values: np.ndarray,
    b_values: np.ndarray,
    delta: float,
    seed: int,
    prime_constant: float = DEFAULT_PRIME_CONSTANT,
    constants=None,
    copies: Optional[int] = None,
    instance_digest: bytes = b"",
):
    """Amplified two-array sum advice; falls back to a full answer table
    when the universe is tiny."""
    from .indexing import build_index_advice
    from .plans import PlanConstants

    a = np.asarray(a_values, dtype=np.int64)
    b = np.asarray(b_values, dtype=np.int64)
    constants = constants if constants is not None else PlanConstants()
    trivial = int(max(a.max(), b.max())) < 8
    return build_index_advice(
        kind="sum3",
        a_values=a,
        b_values=b,
        witnesses=None,
        make_decomp=lambda rng: decompose_3sum(a, b, rng, prime_constant),
        delta=delta,
        seed=seed,
        prime_constant=prime_constant,
        constants=constants,
        k=3,
        trivial=trivial,
        copies=copies,
        instance_digest=instance_digest,
    )


def query_3sum(advice, y: int, meter=None) -> Optional[Tuple[int, int]]:
    """A pair (i, j) with a_i + b_j = y, or None."""
    from .indexing import query_index

    out = query_index(advice, y, meter=meter)
    return None if out is None else (out[0], out[1])
