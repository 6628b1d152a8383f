"""Preprocessed inversion advice and the online inverters.

Three modes share one advice container:

* ``FULL_INVERSE``: a complete image -> first-preimage map.
* ``CLASSIC_FN``: chain tables plus a stored dictionary of sampled heavy
  images; the dictionary is counted in the advice size.
* ``SAMPLE_SET``: chain tables built over the bypassed function; the sampled
  dictionary is recomputed online from the shared seed and never stored.

Inverters never return unverified answers: every candidate is re-evaluated
through the true function before it is accepted, so false positives are
impossible by construction.  The scalar ``invert`` is the reference
implementation; ``invert_batch`` is the vectorised twin used by the
framework and benchmarks and resolves candidates in the same
(step, table, chain) order, so the two agree answer-for-answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .funcspec import FunctionSpec
from .hellman import ChainSeeds, TableSet, build_tables, rewalk, table_mix_keys
from .mixing import (
    BlockedImages,
    build_sample_set,
    bypass_batch,
    bypassed_eval,
    derive_key,
    keyed_value_arr,
    mixing_map_scalar,
    reduce_to_arr,
)
from .plans import (
    CLASSIC_FN,
    FULL_INVERSE,
    SAMPLE_SET,
    ParamPlan,
    PlanConstants,
    plan_parameters,
)

_ABSENT = -1


@dataclass
class InversionAdvice:
    """One function's preprocessed state, with exact bit accounting."""

    plan: ParamPlan
    sample_seed: bytes
    bypass_seed: bytes
    tables: Optional[TableSet] = None
    full_inverse: Optional[np.ndarray] = None  # length L', sentinel L = absent
    heavy_images: Optional[np.ndarray] = None  # sorted; ClassicFN only
    heavy_preimages: Optional[np.ndarray] = None
    bit_size: int = 0

    @property
    def mode(self) -> str:
        return self.plan.mode

    def chain_seeds(self) -> ChainSeeds:
        return ChainSeeds(
            mix_seed=self.sample_seed + b"/mix",
            start_seed=self.sample_seed + b"/start",
            bypass_seed=self.bypass_seed,
        )

    def full_inverse_lookup(self, y: int) -> Optional[int]:
        if self.full_inverse is None or not 0 <= y < self.plan.range_size:
            return None
        x = int(self.full_inverse[y])
        return None if x == self.plan.domain_size else x

    def heavy_lookup(self, y: int) -> Optional[int]:
        if self.heavy_images is None or self.heavy_images.size == 0:
            return None
        pos = int(np.searchsorted(self.heavy_images, y))
        if pos < self.heavy_images.size and int(self.heavy_images[pos]) == y:
            return int(self.heavy_preimages[pos])
        return None


def _first_preimage_map(f: FunctionSpec, chunk: int = 1 << 20) -> np.ndarray:
    # sentinel = domain size; np.minimum.at keeps the first preimage in scan order
    inv = np.full(f.range_size, f.domain_size, dtype=np.int64)
    for lo in range(0, f.domain_size, chunk):
        hi = min(f.domain_size, lo + chunk)
        xs = np.arange(lo, hi, dtype=np.int64)
        ys = f.eval_batch(xs)
        np.minimum.at(inv, ys, xs)
    return inv


def _heavy_store(points: np.ndarray, images: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sorted (image, preimage) arrays; first sampled point wins per image."""
    order = np.lexsort((np.arange(points.size), images))
    imgs = images[order]
    pts = points[order]
    keep = np.ones(imgs.size, dtype=bool)
    keep[1:] = imgs[1:] != imgs[:-1]
    return imgs[keep], pts[keep]


def preprocess_inversion(
    f: FunctionSpec, plan: ParamPlan, shared_seed: bytes
) -> InversionAdvice:
    """Build advice for one function; deterministic in (f, plan, shared_seed)."""
    from .serialize import advice_bit_size  # local import to avoid a cycle

    sample_seed = shared_seed
    bypass_seed = shared_seed + b"/bypass"
    advice = InversionAdvice(plan=plan, sample_seed=sample_seed, bypass_seed=bypass_seed)

    if plan.mode == FULL_INVERSE:
        advice.full_inverse = _first_preimage_map(f)
    else:
        points = build_sample_set(sample_seed, plan.g, f.domain_size)
        images = f.eval_batch(points) if points.size else np.empty(0, dtype=np.int64)
        blocked = BlockedImages(images, f.range_size)
        if plan.mode == CLASSIC_FN:
            advice.heavy_images, advice.heavy_preimages = _heavy_store(points, images)
        advice.tables = build_tables(f, plan, blocked, advice.chain_seeds())

    advice.bit_size = advice_bit_size(advice)
    return advice


def _sample_dict(advice: InversionAdvice, f: FunctionSpec):
    """Recompute the online dictionary: sorted images, first-point preimages."""
    points = build_sample_set(advice.sample_seed, advice.plan.g, f.domain_size)
    images = f.eval_batch(points) if points.size else np.empty(0, dtype=np.int64)
    imgs, pts = _heavy_store(points, images)
    return imgs, pts, BlockedImages(images, f.range_size)


def invert(
    advice: InversionAdvice,
    f: FunctionSpec,
    y: int,
    meter=None,
) -> Optional[int]:
    """Find x with f(x) == y, or None.  Scalar reference implementation."""
    if not 0 <= y < f.range_size:
        raise ValueError(f"query {y} outside [{f.range_size}]")
    evals_before = f.eval_count
    probes = 0
    result = None
    plan = advice.plan

    if plan.mode == FULL_INVERSE:
        probes += 1
        x = advice.full_inverse_lookup(y)
        if x is not None and f(x) == y:
            result = x
    else:
        result, probes = _invert_tables_scalar(advice, f, y)

    if meter is not None:
        meter.record_query(evals=f.eval_count - evals_before, probes=probes)
    return result


def _invert_tables_scalar(advice: InversionAdvice, f: FunctionSpec, y: int):
    plan = advice.plan
    probes = 0
    budget = plan.eval_budget()
    spent = 0

    if plan.mode == SAMPLE_SET:
        imgs, pts, blocked = _sample_dict(advice, f)
        spent += plan.g
        pos = int(np.searchsorted(imgs, y))
        if pos < imgs.size and int(imgs[pos]) == y:
            return int(pts[pos]), probes
    else:
        probes += _search_probes(advice.heavy_images.size)
        hit = advice.heavy_lookup(y)
        if hit is not None:
            return hit, probes
        blocked = BlockedImages(advice.heavy_images, f.range_size)

    if blocked.contains(y):
        # y was bypassed during construction, chains cannot contain it
        return None, probes

    seeds = advice.chain_seeds()
    tables = advice.tables
    keys = table_mix_keys(seeds.mix_seed, plan.r)
    bypass_key = derive_key(seeds.bypass_seed, "bypass")
    z = [mixing_map_scalar(int(keys[i]), y, f.domain_size) for i in range(plan.r)]

    for j in range(1, plan.t + 1):
        for i in range(plan.r):
            probes += _search_probes(plan.s)
            for start in tables.starts_for(i, z[i]):
                probes += 1
                steps = plan.t - j
                x = start
                for _ in range(steps):
                    if spent >= budget:
                        return None, probes
                    v = bypassed_eval(f, blocked, seeds.bypass_seed, x)
                    spent += 1
                    x = mixing_map_scalar(int(keys[i]), v, f.domain_size)
                if spent >= budget:
                    return None, probes
                spent += 1
                if f(x) == y:
                    return x, probes
        if j == plan.t:
            break
        for i in range(plan.r):
            if spent >= budget:
                return None, probes
            v = bypassed_eval(f, blocked, seeds.bypass_seed, z[i])
            spent += 1
            z[i] = mixing_map_scalar(int(keys[i]), v, f.domain_size)
    _ = bypass_key
    return None, probes


def _search_probes(n: int) -> int:
    return max(1, int(np.ceil(np.log2(max(2, n)))))


@dataclass
class BatchResult:
    answers: np.ndarray  # -1 where unresolved
    evals_per_query: np.ndarray
    probes_per_query: np.ndarray


def invert_batch(advice: InversionAdvice, f: FunctionSpec, ys: np.ndarray) -> BatchResult:
    """Vectorised inverter: same candidate order, many queries at once.

    The sampled dictionary is recomputed once and shared across the batch;
    each query is still charged its g dictionary evaluations, matching the
    per-query cost of the scalar path.
    """
    ys = np.asarray(ys, dtype=np.int64)
    nq = ys.size
    plan = advice.plan
    answers = np.full(nq, _ABSENT, dtype=np.int64)
    evals = np.zeros(nq, dtype=np.int64)
    probes = np.zeros(nq, dtype=np.int64)

    if plan.mode == FULL_INVERSE:
        probes += 1
        valid = (ys >= 0) & (ys < plan.range_size)
        cand = np.where(valid, advice.full_inverse[np.clip(ys, 0, plan.range_size - 1)], plan.domain_size)
        have = cand < plan.domain_size
        if have.any():
            ok = f.eval_batch(cand[have]) == ys[have]
            evals[have] += 1
            idx = np.flatnonzero(have)[ok]
            answers[idx] = cand[have][ok]
        return BatchResult(answers, evals, probes)

    if plan.mode == SAMPLE_SET:
        imgs, pts, blocked = _sample_dict(advice, f)
        evals += plan.g
    else:
        imgs, pts = advice.heavy_images, advice.heavy_preimages
        blocked = BlockedImages(imgs, f.range_size)
        probes += _search_probes(imgs.size)

    if imgs.size:
        pos = np.searchsorted(imgs, ys)
        pos_c = np.minimum(pos, imgs.size - 1)
        dict_hit = imgs[pos_c] == ys
        answers[dict_hit] = pts[pos_c[dict_hit]]

    unresolved = answers == _ABSENT
    unresolved &= ~blocked.contains_arr(ys)  # bypassed images are unreachable
    active_q = np.flatnonzero(unresolved)
    if active_q.size == 0:
        return BatchResult(answers, evals, probes)

    seeds = advice.chain_seeds()
    keys = table_mix_keys(seeds.mix_seed, plan.r)
    bypass_key = derive_key(seeds.bypass_seed, "bypass")
    tables = advice.tables
    flat = tables.flat_sorted()
    L = f.domain_size
    L2 = L * L
    budget = plan.eval_budget()

    def step_vals(xs: np.ndarray) -> np.ndarray:
        vals = f.eval_batch(xs)
        if len(blocked):
            vals = bypass_batch(vals, xs, blocked, bypass_key, f.range_size)
        return vals

    # z state: shape (active queries, r)
    z = reduce_to_arr(
        keyed_value_arr(keys[None, :], np.broadcast_to(ys[active_q, None], (active_q.size, plan.r)).astype(np.uint64)),
        L,
    )
    row_base = (np.arange(plan.r, dtype=np.int64) * L2)[None, :]

    for j in range(1, plan.t + 1):
        if active_q.size == 0:
            break
        # endpoint search for every (query, table)
        keys_lo = row_base + z * L
        lo = np.searchsorted(flat, keys_lo.ravel()).reshape(z.shape)
        hi = np.searchsorted(flat, (keys_lo + L).ravel()).reshape(z.shape)
        probes[active_q] += plan.r * _search_probes(plan.s)
        counts = hi - lo
        if counts.any():
            qi_idx, tb_idx = np.nonzero(counts)
            reps = counts[qi_idx, tb_idx]
            # candidates ordered by (query, table, chain): first verified wins
            cq = np.repeat(qi_idx, reps)
            ct = np.repeat(tb_idx, reps)
            bounds = np.cumsum(reps)
            offs = np.arange(int(bounds[-1]), dtype=np.int64) - np.repeat(bounds - reps, reps)
            cpos = np.repeat(lo[qi_idx, tb_idx], reps) + offs
            cstarts = flat[cpos] % L
            np.add.at(probes, active_q[cq], 1)
            steps = np.full(cq.size, plan.t - j, dtype=np.int64)
            walked = rewalk(step_vals, cstarts, keys[ct], steps, L)
            np.add.at(evals, active_q[cq], steps)
            ok = f.eval_batch(walked) == ys[active_q[cq]]
            np.add.at(evals, active_q[cq], 1)
            if ok.any():
                # first verified candidate per query (cq is sorted)
                q_ok = cq[ok]
                first = np.unique(q_ok, return_index=True)[1]
                answers[active_q[q_ok[first]]] = walked[ok][first]
        # retire answered or over-budget queries
        alive = (answers[active_q] == _ABSENT) & (evals[active_q] < budget)
        if j < plan.t:
            z = z[alive]
            active_q = active_q[alive]
            if active_q.size == 0:
                break
            vals = step_vals(z.ravel())
            evals[active_q] += plan.r
            z = reduce_to_arr(
                keyed_value_arr(np.broadcast_to(keys[None, :], z.shape), vals.reshape(z.shape).astype(np.uint64)),
                L,
            )
    return BatchResult(answers, evals, probes)


def classic_fn_mode(
    f: FunctionSpec,
    delta: float,
    constants: PlanConstants = PlanConstants(),
    shared_seed: bytes = b"classic",
):
    """Classic tradeoff wrapper: stored heavy dictionary plus tables."""
    plan = plan_parameters(f.domain_size, delta, constants, mode_hint=CLASSIC_FN, range_size=f.range_size)
    advice = preprocess_inversion(f, plan, shared_seed)

    def inverter(y: int, meter=None) -> Optional[int]:
        return invert(advice, f, y, meter=meter)

    return advice, inverter
