"""XOR-variant indexing: linear residue maps over GF(2).

The integer decomposition's mod-q and mod-p dispatch becomes multiplication
by independent uniformly random full-row-rank bit matrices Q and P with
log-sized output dimensions; the miss value z is a uniform bit vector.
B is the (k-2)-fold XOR sumset with witnesses.  Vectors too short for the
dispatch dimensions route to the trivial full-table path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import BudgetExceededError
from .framework import Decomposition
from .gf2 import F2Matrix, f2_matvec, f2_matvec_batch, sample_full_rank
from .ksum import DEFAULT_SUMSET_BUDGET, _fold_tuples
from .serialize import BitReader, BitWriter, field_width

MAGIC_AUXX = b"SAXX"
DEFAULT_DIM_SLACK = 3


def min_bits_for(n: int) -> int:
    """The dispatch needs ell >= ceil(1.5 log2 n); below that, store answers."""
    return math.ceil(1.5 * math.log2(max(2, n)))


@dataclass
class AuxKXor:
    """Packed auxiliary data for one XOR decomposition draw."""

    ell: int
    n: int
    m: int
    z: int
    p_matrix: F2Matrix
    q_matrix: F2Matrix
    sorted_b_vals: np.ndarray  # B sorted by (value, j)
    sorted_b_idx: np.ndarray
    bres_res: np.ndarray  # Q*B sorted by (residue, j)
    bres_idx: np.ndarray
    a_vectors: np.ndarray  # original order (dispatch needs Q*a_i, P*a_i)

    def bit_size(self) -> int:
        w_j = field_width(self.m)
        return (
            32 + 6 * 64
            + (self.p_matrix.rows + self.q_matrix.rows) * self.ell
            + self.m * (self.ell + w_j)
            + self.m * (self.q_matrix.rows + w_j)
            + self.n * self.ell
        )

    def pack(self) -> bytes:
        w = BitWriter()
        w.write_bytes(MAGIC_AUXX)
        for v in (self.ell, self.n, self.m, self.z, self.p_matrix.rows, self.q_matrix.rows):
            w.write(v, 64)
        for mask in self.p_matrix.row_masks:
            w.write(mask, self.ell)
        for mask in self.q_matrix.row_masks:
            w.write(mask, self.ell)
        w_j = field_width(self.m)
        for val, idx in zip(self.sorted_b_vals.tolist(), self.sorted_b_idx.tolist()):
            w.write(val, self.ell)
            w.write(idx, w_j)
        for res, idx in zip(self.bres_res.tolist(), self.bres_idx.tolist()):
            w.write(res, self.q_matrix.rows)
            w.write(idx, w_j)
        for vec in self.a_vectors.tolist():
            w.write(vec, self.ell)
        assert w.bits_written == self.bit_size()
        return w.getvalue()

    @classmethod
    def unpack(cls, blob: bytes) -> "AuxKXor":
        r = BitReader(blob)
        if r.read_bytes(4) != MAGIC_AUXX:
            raise ValueError("bad aux magic")
        ell, n, m, z, p_rows, q_rows = (r.read(64) for _ in range(6))
        p_masks = tuple(r.read(ell) for _ in range(p_rows))
        q_masks = tuple(r.read(ell) for _ in range(q_rows))
        w_j = field_width(m)
        sb = np.empty(m, dtype=np.int64)
        sbj = np.empty(m, dtype=np.int64)
        for j in range(m):
            sb[j] = r.read(ell)
            sbj[j] = r.read(w_j)
        br = np.empty(m, dtype=np.int64)
        bj = np.empty(m, dtype=np.int64)
        for j in range(m):
            br[j] = r.read(q_rows)
            bj[j] = r.read(w_j)
        av = np.asarray([r.read(ell) for _ in range(n)], dtype=np.int64)
        return cls(
            ell, n, m, z,
            F2Matrix(p_rows, ell, p_masks),
            F2Matrix(q_rows, ell, q_masks),
            sb, sbj, br, bj, av,
        )

    def raw_b(self) -> np.ndarray:
        out = np.empty(self.m, dtype=np.int64)
        out[self.sorted_b_idx] = self.sorted_b_vals
        return out


def build_kxor_sumset(a_values: np.ndarray, k: int, budget: int = DEFAULT_SUMSET_BUDGET):
    """B = all (k-2)-fold XORs of A, with witnesses, sorted by value."""
    a = np.asarray(a_values, dtype=np.int64)
    n = a.size
    fold = k - 2
    count = n**fold
    if count > budget:
        raise BudgetExceededError(f"sumset size {count} exceeds budget {budget}")
    tuples = _fold_tuples(n, fold)
    values = a[tuples[:, 0]].copy()
    for pos in range(1, fold):
        values ^= a[tuples[:, pos]]
    order = np.lexsort((np.arange(count), values))
    return values[order], tuples[order]


def decompose_kxor(
    a_values: np.ndarray,
    b_values: np.ndarray,
    ell_bits: int,
    rng: np.random.Generator,
    dim_slack: int = DEFAULT_DIM_SLACK,
) -> Decomposition:
    """Draw (P, Q, z) and expose the sub-function family for (A, B)."""
    a = np.asarray(a_values, dtype=np.int64)
    b = np.asarray(b_values, dtype=np.int64)
    n, m = int(a.size), int(b.size)
    p_dim = min(math.ceil(math.log2(max(2, n))) + dim_slack, ell_bits)
    q_dim = min(math.ceil(math.log2(max(2, m))) + dim_slack, ell_bits)
    p_mat = sample_full_rank(p_dim, ell_bits, rng)
    q_mat = sample_full_rank(q_dim, ell_bits, rng)
    z = int(rng.integers(0, 1 << p_dim))

    qb = f2_matvec_batch(q_mat, b)
    b_order = np.lexsort((np.arange(m), b))
    r_order = np.lexsort((np.arange(m), qb))
    aux = AuxKXor(
        ell=ell_bits,
        n=n,
        m=m,
        z=z,
        p_matrix=p_mat,
        q_matrix=q_mat,
        sorted_b_vals=b[b_order],
        sorted_b_idx=b_order.astype(np.int64),
        bres_res=qb[r_order],
        bres_idx=r_order.astype(np.int64),
        a_vectors=a,
    )
    return kxor_decomposition_from_aux(aux)


def eval_subfn_kxor(aux: AuxKXor, d: int, i: int) -> int:
    """Sub-function value at i: P(a_i XOR b_j*) for the least j with
    Q(a_i XOR b_j*) = d, else the miss vector."""
    qa_i = f2_matvec(aux.q_matrix, int(aux.a_vectors[i]))
    rd = d ^ qa_i
    pos = int(np.searchsorted(aux.bres_res, rd))
    if pos < aux.m and int(aux.bres_res[pos]) == rd:
        b_j = int(aux.raw_b()[aux.bres_idx[pos]])
        return f2_matvec(aux.p_matrix, int(aux.a_vectors[i]) ^ b_j)
    return aux.z


def kxor_decomposition_from_aux(aux) -> Decomposition:
    if isinstance(aux, (bytes, bytearray)):
        aux = AuxKXor.unpack(bytes(aux))
    n, m, ell = aux.n, aux.m, aux.ell
    p_mat, q_mat, z = aux.p_matrix, aux.q_matrix, aux.z
    a_arr = aux.a_vectors
    b_arr = aux.raw_b()
    qa = f2_matvec_batch(q_mat, a_arr)
    pa = f2_matvec_batch(p_mat, a_arr)
    pb_by_res = f2_matvec_batch(p_mat, b_arr[aux.bres_idx])
    bres_res = aux.bres_res
    sorted_b_vals = aux.sorted_b_vals
    sorted_b_idx = aux.sorted_b_idx

    def eval_sub(d: int, i: int) -> int:
        rd = d ^ int(qa[i])
        pos = int(np.searchsorted(bres_res, rd))
        if pos < m and int(bres_res[pos]) == rd:
            return int(pa[i]) ^ int(pb_by_res[pos])
        return z

    def eval_sub_batch(ds: np.ndarray, xs: np.ndarray) -> np.ndarray:
        rd = ds ^ qa[xs]
        pos = np.searchsorted(bres_res, rd)
        pos_c = np.minimum(pos, m - 1)
        hit = bres_res[pos_c] == rd
        return np.where(hit, pa[xs] ^ pb_by_res[pos_c], z)

    def map_batch(ys: np.ndarray):
        return f2_matvec_batch(q_mat, ys), f2_matvec_batch(p_mat, ys)

    def translate(y: int, i: int) -> int:
        need = int(a_arr[i]) ^ y
        pos = int(np.searchsorted(sorted_b_vals, need))
        if pos < m and int(sorted_b_vals[pos]) == need:
            return i * m + int(sorted_b_idx[pos])
        return 0

    def translate_batch(ys: np.ndarray, xps: np.ndarray) -> np.ndarray:
        need = a_arr[xps] ^ ys
        pos = np.searchsorted(sorted_b_vals, need)
        pos_c = np.minimum(pos, m - 1)
        hit = sorted_b_vals[pos_c] == need
        return np.where(hit, xps * m + sorted_b_idx[pos_c], 0)

    return Decomposition(
        num_subfns=1 << q_mat.rows,
        sub_domain=n,
        sub_range=1 << p_mat.rows,
        outer_domain=n * m,
        outer_range=1 << ell,
        eval_sub=eval_sub,
        map_to_subfn=lambda y: f2_matvec(q_mat, y),
        map_to_target=lambda y: f2_matvec(p_mat, y),
        translate=translate,
        eval_outer=lambda x: int(a_arr[x // m]) ^ int(b_arr[x % m]),
        aux_bytes=aux.pack(),
        aux_bits=aux.bit_size(),
        eval_sub_batch=eval_sub_batch,
        map_batch=map_batch,
        translate_batch=translate_batch,
        eval_outer_batch=lambda xs: a_arr[xs // m] ^ b_arr[xs % m],
    )


def preprocess_kxor(
    a_values: np.ndarray,
    k: int,
    ell_bits: int,
    delta: float,
    seed: int,
    constants=None,
    copies: Optional[int] = None,
    dim_slack: int = DEFAULT_DIM_SLACK,
    sumset_budget: int = DEFAULT_SUMSET_BUDGET,
    instance_digest: bytes = b"",
):
    from .indexing import build_index_advice
    from .plans import PlanConstants

    a = np.asarray(a_values, dtype=np.int64)
    b_vals, witnesses = build_kxor_sumset(a, k, budget=sumset_budget)
    constants = constants if constants is not None else PlanConstants()
    trivial = ell_bits < min_bits_for(a.size)
    return build_index_advice(
        kind="kxor",
        a_values=a,
        b_values=b_vals,
        witnesses=witnesses,
        make_decomp=lambda rng: decompose_kxor(a, b_vals, ell_bits, rng, dim_slack),
        delta=delta,
        seed=seed,
        prime_constant=0.0,
        constants=constants,
        k=k,
        ell_bits=ell_bits,
        trivial=trivial,
        copies=copies,
        instance_digest=instance_digest,
    )


def query_kxor(advice, y: int, meter=None) -> Optional[Tuple[int, ...]]:
    """A (k-1)-tuple of indices whose vectors XOR to y, or None."""
    from .indexing import query_index

    return query_index(advice, y, meter=meter)
