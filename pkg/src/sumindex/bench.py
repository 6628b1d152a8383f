"""Benchmark cells: one measured run per (mode, size, delta, seed).

Each cell generates a deterministic instance, preprocesses it, answers a
batch of planted member queries, and returns a cost report.  Sweeps measure
the weak (single-copy) data structure by default: amplification multiplies
both space and time by the same log-sized copy count, which only shifts the
fitted tradeoff by an additive constant, and the slope and point criteria
are stated against the weak structure.  Planted queries (random (i, j)
pairs) make success measurement oracle-free at any scale.
"""

from __future__ import annotations

import time
from typing import Dict, Optional

import numpy as np

from .baselines import SortedArrayBaseline, SortedSumsetBaseline
from .costs import CostReport
from .funcspec import FunctionSpec
from .indexing import query_index_batch
from .instances import gen_instance
from .inversion import invert_batch, preprocess_inversion
from .ksum import preprocess_ksum
from .kxor import preprocess_kxor
from .plans import CLASSIC_FN, SAMPLE_SET, PlanConstants, plan_classicfn_for_bits, plan_parameters
from .serialize import serialized_bit_size
from .threesum import preprocess_3sum


def _framework_serialized_bits(fw) -> int:
    from .serialize import PLAN_BITS, advice_body_bits

    per_d = (advice_body_bits(fw.sub_advice(0)) + 7) // 8 * 8
    header = 304 + PLAN_BITS + 16 + 8 * len(fw.shared_seed) + 64 + 8 * len(fw.aux_bytes)
    return header + 64 * fw.num_subfns + per_d * fw.num_subfns


def _index_serialized_bits(advice) -> int:
    if advice.trivial_table is not None:
        return advice.account_bits()
    bits = sum(_framework_serialized_bits(c) for c in advice.copies)
    if advice.witnesses is not None:
        bits += advice.witnesses.size * 16  # stored padded in the outer file
    return bits + 64 * 8


def _planted_queries(advice, rng: np.random.Generator, n_queries: int) -> np.ndarray:
    i = rng.integers(0, advice.n, size=n_queries)
    j = rng.integers(0, advice.m, size=n_queries)
    if advice.kind == "kxor":
        return advice.a_values[i] ^ advice.b_values[j]
    return advice.a_values[i] + advice.b_values[j]


def run_index_cell(
    mode: str,
    n: int,
    delta: float,
    seed: int,
    m: Optional[int] = None,
    k: int = 3,
    ell_bits: int = 0,
    profile: str = "uniform",
    max_value: int = 1 << 24,
    prime_constant: float = 0.05,
    constants: PlanConstants = PlanConstants(),
    n_queries: int = 128,
    weak: bool = True,
) -> CostReport:
    """Preprocess one instance and measure a planted member-query batch."""
    m = m if m is not None else n
    inst = gen_instance(
        profile, seed, kind=mode, n=n, m=m, k=k, ell_bits=ell_bits, max_value=max_value
    )
    copies = 1 if weak else None
    t0 = time.perf_counter()
    if mode == "sum3":
        advice = preprocess_3sum(
            inst.a_values, inst.b_values, delta, seed,
            prime_constant=prime_constant, constants=constants, copies=copies,
        )
    elif mode == "ksum":
        advice = preprocess_ksum(
            inst.a_values, k, delta, seed,
            prime_constant=prime_constant, constants=constants, copies=copies,
        )
    elif mode == "kxor":
        advice = preprocess_kxor(
            inst.a_values, k, inst.ell_bits, delta, seed,
            constants=constants, copies=copies,
        )
    else:
        raise ValueError(f"unknown index mode {mode!r}")
    t_pre = time.perf_counter() - t0

    qrng = np.random.default_rng(np.random.SeedSequence([seed, 0xBEEF]))
    ys = _planted_queries(advice, qrng, n_queries)
    t0 = time.perf_counter()
    codes, evals, probes = query_index_batch(advice, ys)
    t_query = time.perf_counter() - t0
    success = float(np.mean(codes >= 0)) if ys.size else 0.0

    config: Dict = {
        "mode": mode, "profile": profile, "n": n, "m": m, "k": k,
        "ell_bits": ell_bits, "delta": delta, "seed": seed,
        "prime_constant": prime_constant, "c_g": constants.c_g,
        "c_t": constants.c_t, "c_s": constants.c_s, "c_r": constants.c_r,
        "cost_slack": constants.cost_slack, "max_value": max_value,
        "copies": advice.ell if advice.trivial_table is None else 0,
        "weak": weak, "queries": n_queries, "success_rate": success,
    }
    return CostReport(
        advice_bits=advice.weak_bits() if weak else advice.total_bits,
        serialized_bits=_index_serialized_bits(advice),
        preprocess_evals=advice.preprocess_evals,
        evals_per_query=evals.tolist(),
        probes_per_query=probes.tolist(),
        wall_times={"preprocess_s": t_pre, "query_s": t_query},
        config=config,
    )


def random_function(domain: int, range_size: int, seed: int) -> FunctionSpec:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF00D]))
    return FunctionSpec.from_array(rng.integers(0, range_size, size=domain), range_size)


def run_invert_cell(
    domain: int,
    delta: float,
    seed: int,
    mode: str = SAMPLE_SET,
    constants: PlanConstants = PlanConstants(),
    n_queries: int = 128,
    equal_bits_to: Optional[int] = None,
) -> CostReport:
    """Standalone inversion benchmark on a uniformly random function."""
    f = random_function(domain, domain, seed)
    if equal_bits_to is not None and mode == CLASSIC_FN:
        plan = plan_classicfn_for_bits(domain, domain, equal_bits_to, constants)
    else:
        plan = plan_parameters(domain, delta, constants, mode_hint=mode, range_size=domain)
    shared = seed.to_bytes(8, "little") + b"invert"
    t0 = time.perf_counter()
    advice = preprocess_inversion(f, plan, shared)
    t_pre = time.perf_counter() - t0
    pre_evals = f.eval_count

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xCAFE]))
    ys = f.eval_batch(rng.integers(0, domain, size=n_queries))  # members by construction
    f.eval_count = pre_evals
    t0 = time.perf_counter()
    res = invert_batch(advice, f, ys)
    t_query = time.perf_counter() - t0
    success = float(np.mean(res.answers >= 0))
    config = {
        "mode": f"invert-{plan.mode}", "n": domain, "m": domain, "delta": delta,
        "seed": seed, "g": plan.g, "t": plan.t, "s": plan.s, "r": plan.r,
        "queries": n_queries, "success_rate": success,
    }
    return CostReport(
        advice_bits=advice.bit_size,
        serialized_bits=serialized_bit_size(advice),
        preprocess_evals=pre_evals,
        evals_per_query=res.evals_per_query.tolist(),
        probes_per_query=res.probes_per_query.tolist(),
        wall_times={"preprocess_s": t_pre, "query_s": t_query},
        config=config,
    )


def run_baseline_cell(
    which: str, n: int, seed: int, profile: str = "uniform", max_value: int = 1 << 16,
    n_queries: int = 128,
) -> CostReport:
    inst = gen_instance(profile, seed, n=n, m=n, max_value=max_value)
    t0 = time.perf_counter()
    if which == "sorted_array":
        base = SortedArrayBaseline(inst.a_values, inst.b_values)
    elif which == "sorted_sumset":
        base = SortedSumsetBaseline(inst.a_values, inst.b_values)
    else:
        raise ValueError(f"unknown baseline {which!r}")
    t_pre = time.perf_counter() - t0
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xBA5E]))
    i = rng.integers(0, n, size=n_queries)
    j = rng.integers(0, n, size=n_queries)
    ys = inst.a_values[i] + inst.b_values[j]
    probes = []
    hits = 0
    t0 = time.perf_counter()
    for y in ys.tolist():
        ans = base.query(int(y))
        probes.append(ans.probes)
        hits += ans.witness is not None
    t_query = time.perf_counter() - t0
    config = {
        "mode": f"baseline-{which}", "profile": profile, "n": n, "m": n,
        "seed": seed, "max_value": max_value, "queries": n_queries,
        "success_rate": hits / max(1, n_queries),
    }
    return CostReport(
        advice_bits=base.bits,
        serialized_bits=base.bits,
        preprocess_evals=0,
        evals_per_query=[0] * n_queries,
        probes_per_query=probes,
        wall_times={"preprocess_s": t_pre, "query_s": t_query},
        config=config,
    )


CSV_COLUMNS = [
    "schema_version", "mode", "profile", "n", "m", "k", "ell_bits", "delta",
    "seed", "prime_constant", "c_r", "cost_slack", "max_value", "copies",
    "queries", "advice_bits", "serialized_bits", "preprocess_evals",
    "median_evals_per_query", "median_probes_per_query", "success_rate",
]

CSV_SCHEMA_VERSION = 1


def report_to_csv_row(report: CostReport) -> str:
    cfg = report.config
    vals = [
        CSV_SCHEMA_VERSION, cfg.get("mode", ""), cfg.get("profile", ""),
        cfg.get("n", 0), cfg.get("m", 0), cfg.get("k", 0), cfg.get("ell_bits", 0),
        cfg.get("delta", 0.0), cfg.get("seed", 0), cfg.get("prime_constant", 0.0),
        cfg.get("c_r", 1.0), cfg.get("cost_slack", 4.0), cfg.get("max_value", 0),
        cfg.get("copies", 0), cfg.get("queries", 0), report.advice_bits,
        report.serialized_bits, report.preprocess_evals,
        report.median_evals, report.median_probes,
        round(cfg.get("success_rate", 0.0), 6),
    ]
    return ",".join(str(v) for v in vals)
