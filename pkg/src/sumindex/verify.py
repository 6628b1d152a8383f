"""Verification suites: one function per acceptance criterion.

Each function runs a pinned configuration and returns a CriterionResult;
the acceptance tests and the CLI `verify` command both consume these.
Configurations record every scaled constant (prime-interval constant,
table-count multiplier, cost slack); scaling is what makes desk-scale runs
finish, and the pass bars below are the stated tolerances, not calibrated
afterwards.  Criteria 3, 4 and 10 measure the weak (single-copy) structure:
amplification multiplies space and time by the same ceil(log2(N*N'))
factor, which the exponent bands absorb poorly at desk scale and which
cancels in slope fits anyway.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .bench import run_index_cell, run_invert_cell
from .costs import CostReport
from .framework import amplification_copies
from .funcspec import FunctionSpec
from .gf2 import is_full_row_rank
from .indexing import query_index_batch
from .instances import gen_instance
from .inversion import invert_batch, preprocess_inversion
from .kxor import AuxKXor
from .mixing import keyed_value_arr
from .oracle import Oracle
from .plans import CLASSIC_FN, SAMPLE_SET, PlanConstants, plan_classicfn_for_bits, plan_parameters
from .primes import count_primes, prime_interval, sample_prime
from .bench import random_function
from .ksum import preprocess_ksum
from .kxor import preprocess_kxor
from .threesum import preprocess_3sum


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: str
    elapsed_s: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.details} ({self.elapsed_s:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs) -> CriterionResult:
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        result.elapsed_s = time.perf_counter() - t0
        return result

    return wrapper


# ---------------------------------------------------------------- criterion 1

C1_PROFILES = ("uniform", "clustered", "duplicates", "arithmetic")
C1_CONFIG = dict(n=64, m=64, max_value=1 << 9, delta=0.75, prime_constant=0.15)
C1_CONSTANTS = PlanConstants(cost_slack=1.0)


@_timed
def criterion_1_exhaustive(runs_per_profile: int = 100) -> CriterionResult:
    """All queries on small instances: no false positives, misses under 1/n."""
    n = C1_CONFIG["n"]
    bad_runs = 0
    total_runs = 0
    false_positives = 0
    for profile in C1_PROFILES:
        for seed in range(runs_per_profile):
            inst = gen_instance(
                profile, seed, n=n, m=C1_CONFIG["m"], max_value=C1_CONFIG["max_value"]
            )
            advice = preprocess_3sum(
                inst.a_values, inst.b_values, C1_CONFIG["delta"], seed,
                prime_constant=C1_CONFIG["prime_constant"], constants=C1_CONSTANTS,
            )
            oracle = Oracle(inst)
            member = np.zeros(2 * inst.max_value, dtype=bool)
            mv = oracle.member_values()
            member[mv[mv < 2 * inst.max_value]] = True
            ys = np.arange(2 * inst.max_value, dtype=np.int64)
            codes, _, _ = query_index_batch(advice, ys)
            answered = codes >= 0
            if answered.any():
                i = codes[answered] // advice.m
                j = codes[answered] % advice.m
                ok = inst.a_values[i] + inst.b_values[j] == ys[answered]
                false_positives += int((~ok).sum())
            misses = int((member & ~answered).sum())
            if misses / max(1, int(member.sum())) > 1.0 / n:
                bad_runs += 1
            total_runs += 1
    rate_runs_ok = 1 - bad_runs / total_runs
    passed = false_positives == 0 and rate_runs_ok >= 0.95
    return CriterionResult(
        "exhaustive correctness (2-array, 4 profiles)",
        passed,
        f"false_positives={false_positives}, runs with miss-rate<=1/n: "
        f"{rate_runs_ok:.1%} of {total_runs} (need >=95%)",
    )


# ---------------------------------------------------------------- criterion 2

@_timed
def criterion_2_subfn_oracle(draws: int = 20, n: int = 64) -> CriterionResult:
    """Sub-function values match a linear-scan oracle on every (d, i)."""
    from .threesum import build_aux_3sum, decomposition_from_aux

    mismatches = 0
    checked = 0
    for draw in range(draws):
        rng = np.random.default_rng(np.random.SeedSequence([draw, 0x5EED]))
        inst = gen_instance("uniform", draw, n=n, m=n, max_value=1 << 16)
        a, b = inst.a_values, inst.b_values
        p = sample_prime(prime_interval(n, inst.max_value, 1.0), rng)
        q = sample_prime(prime_interval(n, inst.max_value, 1.0), rng)
        z = int(rng.integers(0, p))
        decomp = decomposition_from_aux(build_aux_3sum(a, b, p, q, z))
        # oracle: first matching j by direct scan over the residue matrix
        match = (a[:, None] + b[None, :]) % q  # (n, m)
        for d_lo in range(0, q, 512):
            d_hi = min(q, d_lo + 512)
            ds = np.arange(d_lo, d_hi, dtype=np.int64)
            hit = match[None, :, :] == ds[:, None, None]  # (chunk, n, m)
            has = hit.any(axis=2)
            first_j = np.argmax(hit, axis=2)
            expect = np.where(has, (a[None, :] + b[first_j]) % p, z)
            grid_d = np.repeat(ds, n)
            grid_i = np.tile(np.arange(n, dtype=np.int64), ds.size)
            got = decomp.eval_sub_batch(grid_d, grid_i).reshape(ds.size, n)
            mismatches += int((got != expect).sum())
            checked += got.size
    return CriterionResult(
        "sub-function oracle equivalence",
        mismatches == 0,
        f"{checked} (d,i) pairs over {draws} prime draws, {mismatches} mismatches",
    )


# ------------------------------------------------------- criteria 3, 4, 10

SWEEP_SIZES = (256, 512, 1024, 2048, 4096)
SWEEP_SEEDS = (0, 1, 2)
SWEEP_MAX_VALUE = 1 << 24
SWEEP_PRIME_CONSTANT = 0.02

_sweep_cache: Dict[Tuple, List[CostReport]] = {}


def tradeoff_sweep(
    sizes: Tuple[int, ...] = SWEEP_SIZES,
    seeds: Tuple[int, ...] = SWEEP_SEEDS,
    delta: float = 0.75,
) -> List[CostReport]:
    """Weak-copy sweep shared by the slope criteria; cached per config."""
    key = (sizes, seeds, delta)
    if key not in _sweep_cache:
        reports = []
        for n in sizes:
            constants = PlanConstants(c_r=1.0 / math.log2(n), cost_slack=1.0)
            for seed in seeds:
                reports.append(
                    run_index_cell(
                        "sum3", n, delta, seed, m=n,
                        max_value=SWEEP_MAX_VALUE,
                        prime_constant=SWEEP_PRIME_CONSTANT,
                        constants=constants, n_queries=128, weak=True,
                    )
                )
        _sweep_cache[key] = reports
    return _sweep_cache[key]


def _fit_slope(xs: List[float], ys: List[float]) -> float:
    x = np.asarray(xs)
    y = np.asarray(ys)
    x0 = x - x.mean()
    return float((x0 * (y - y.mean())).sum() / (x0 * x0).sum())


def _per_n_median(reports: List[CostReport], value_fn) -> Dict[int, float]:
    byn: Dict[int, List[float]] = {}
    for rep in reports:
        byn.setdefault(rep.config["n"], []).append(value_fn(rep))
    return {n: float(np.median(v)) for n, v in sorted(byn.items())}


@_timed
def criterion_3_tradeoff_slope() -> CriterionResult:
    """log2(S*T) vs log2 n slope in [2.2, 2.9] at delta=0.75."""
    reports = tradeoff_sweep()
    st = _per_n_median(reports, lambda r: math.log2(r.advice_bits * max(1.0, r.median_evals)))
    slope = _fit_slope([math.log2(n) for n in st], list(st.values()))
    return CriterionResult(
        "tradeoff slope (delta=0.75)",
        2.2 <= slope <= 2.9,
        f"fitted slope {slope:.3f}, band [2.2, 2.9]",
    )


@_timed
def criterion_4_figure_point(n: int = 4096) -> CriterionResult:
    """At delta=5/6: space exponent near 5/3 and time exponent near 5/6."""
    delta = 5.0 / 6.0
    constants = PlanConstants(c_r=0.25 / math.log2(n), cost_slack=1.0)
    s_exps, t_exps = [], []
    for seed in SWEEP_SEEDS:
        rep = run_index_cell(
            "sum3", n, delta, seed, m=n, max_value=SWEEP_MAX_VALUE,
            prime_constant=SWEEP_PRIME_CONSTANT, constants=constants,
            n_queries=128, weak=True,
        )
        s_exps.append(math.log(rep.advice_bits) / math.log(n))
        t_exps.append(math.log(max(2.0, rep.median_evals)) / math.log(n))
    s_exp = float(np.median(s_exps))
    t_exp = float(np.median(t_exps))
    s_lo, s_hi = 5 / 3 - 0.25, 5 / 3 + 0.35
    t_lo, t_hi = 5 / 6 - 0.2, 5 / 6 + 0.3
    passed = s_lo <= s_exp <= s_hi and t_lo <= t_exp <= t_hi
    return CriterionResult(
        "space/time point check (S=n^{5/3} regime)",
        passed,
        f"log_n S={s_exp:.3f} (band [{s_lo:.3f},{s_hi:.3f}]), "
        f"log_n T={t_exp:.3f} (band [{t_lo:.3f},{t_hi:.3f}])",
    )


@_timed
def criterion_10_preprocess_slope() -> CriterionResult:
    """Preprocessing evaluations grow ~quadratically: slope in [1.8, 2.4]."""
    reports = tradeoff_sweep()
    pe = _per_n_median(reports, lambda r: math.log2(max(1, r.preprocess_evals)))
    slope = _fit_slope([math.log2(n) for n in pe], list(pe.values()))
    return CriterionResult(
        "preprocessing-evaluations slope",
        1.8 <= slope <= 2.4,
        f"fitted slope {slope:.3f}, band [1.8, 2.4]",
    )


# ---------------------------------------------------------------- criterion 5

@_timed
def criterion_5_inversion_modes(
    domain: int = 1 << 16, seeds: int = 20, queries: int = 200
) -> CriterionResult:
    """Shared-sample mode beats the classic mode at equal space when S << T.

    The time comparison runs each weak copy over a half member, half
    non-member query mix, so the medians reflect the worst-case walk the
    tradeoff bounds rather than lucky early hits; amplified success is
    measured on the member half.
    """
    delta = 0.9
    ell = amplification_copies(domain, domain)
    n_members = queries // 2 - 1
    n_misses = queries - n_members
    ss_evals: List[int] = []
    cf_evals: List[int] = []
    ss_hits = cf_hits = total = 0
    ss_bits = cf_bits = 0
    for seed in range(seeds):
        f = random_function(domain, domain, seed)
        ss_plan = plan_parameters(
            domain, delta, PlanConstants(cost_slack=1.0), mode_hint=SAMPLE_SET, range_size=domain
        )
        probe = preprocess_inversion(f, ss_plan, b"probe" + seed.to_bytes(4, "little"))
        cf_plan = plan_classicfn_for_bits(
            domain, domain, probe.bit_size, PlanConstants(cost_slack=1.0)
        )
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC0DE]))
        member_mask = np.zeros(domain, dtype=bool)
        member_mask[f.eval_batch(np.arange(domain, dtype=np.int64))] = True
        f.eval_count = 0
        members = f.eval_batch(rng.integers(0, domain, size=n_members))
        non_members = np.flatnonzero(~member_mask)
        misses = non_members[rng.integers(0, non_members.size, size=n_misses)]
        mixed = np.concatenate([members, misses])

        for plan, evals_sink, which in ((ss_plan, ss_evals, "ss"), (cf_plan, cf_evals, "cf")):
            weak = preprocess_inversion(f, plan, b"w" + seed.to_bytes(4, "little") + which.encode())
            if which == "ss":
                ss_bits = weak.bit_size
            else:
                cf_bits = weak.bit_size
            res = invert_batch(weak, f, mixed)
            evals_sink.extend(res.evals_per_query.tolist())
            # amplified success on the member half
            answers = np.full(n_members, -1, dtype=np.int64)
            pending = np.arange(n_members)
            for i in range(ell):
                if pending.size == 0:
                    break
                adv = weak if i == 0 else preprocess_inversion(
                    f, plan, seed.to_bytes(4, "little") + bytes([i]) + which.encode()
                )
                got = invert_batch(adv, f, members[pending])
                hit = got.answers >= 0
                answers[pending[hit]] = got.answers[hit]
                pending = pending[~hit]
            hits = int((answers >= 0).sum())
            if which == "ss":
                ss_hits += hits
            else:
                cf_hits += hits
        total += n_members
    ss_med = float(np.median(ss_evals))
    cf_med = float(np.median(cf_evals))
    ss_rate = ss_hits / total
    cf_rate = cf_hits / total
    passed = ss_med < cf_med and ss_rate >= 0.99 and cf_rate >= 0.99
    return CriterionResult(
        "standalone inversion modes at equal space",
        passed,
        f"equal space {ss_bits}/{cf_bits} bits; median evals shared-sample={ss_med:.0f} "
        f"< classic={cf_med:.0f}: {ss_med < cf_med}; "
        f"amplified success {ss_rate:.4f}/{cf_rate:.4f} (need >=0.99)",
    )


# ---------------------------------------------------------------- criterion 6

C6_CONFIG = dict(n=64, m=64, max_value=1 << 20, draws=400)


@_timed
def criterion_6_probability_constants(sieve_max: int = 1 << 34) -> CriterionResult:
    """Residue-twin and unique-residue rates at analysis- and benchmark-grade."""
    n, m, M, draws = (C6_CONFIG[k] for k in ("n", "m", "max_value", "draws"))
    inst = gen_instance("uniform", 123, n=n, m=m, max_value=M)
    a, b = inst.a_values, inst.b_values
    M = inst.max_value
    sumset = np.unique((a[:, None] + b[None, :]).ravel())

    # precondition: the sieve confirms the prime-count bound at c=50
    interval = prime_interval(n, M, 50.0)
    bound = 6 * n * math.log(2 * M) / math.log(n)
    pi = count_primes(interval, sieve_max=sieve_max)
    sieve_ok = pi >= bound

    def rates(constant: float, tag: int) -> Tuple[float, float]:
        rng = np.random.default_rng(np.random.SeedSequence([tag, 77]))
        i2 = prime_interval(m, M, constant)
        i1 = prime_interval(n, M, constant)
        j_fix = 0
        y_fix = int(sumset[sumset.size // 2])
        twins = 0
        unique = 0
        for _ in range(draws):
            q = sample_prime(i2, rng)
            p = sample_prime(i1, rng)
            others = b[(b != b[j_fix])]
            twins += bool((others % q == b[j_fix] % q).any())
            unique += int(((sumset % (p * q)) == (y_fix % (p * q))).sum()) == 1
        return twins / draws, unique / draws

    twin_a, uniq_a = rates(50.0, 1)
    twin_b, uniq_b = rates(0.3, 2)
    twin_bar = 1 / 6 + 0.05
    uniq_bar = 35 / 36 - 0.05
    analysis_ok = twin_a <= twin_bar and uniq_a >= uniq_bar
    bench_ok = twin_b <= twin_bar and uniq_b >= uniq_bar
    passed = bench_ok and (analysis_ok if sieve_ok else True)
    detail = (
        f"sieve pi(I)={pi} >= {bound:.0f}: {sieve_ok}; "
        f"analysis-grade twin={twin_a:.4f}<= {twin_bar:.3f}, unique={uniq_a:.4f}>={uniq_bar:.3f}; "
        f"benchmark-grade twin={twin_b:.4f}, unique={uniq_b:.4f}"
    )
    if not sieve_ok:
        detail += " [analysis scale out of asymptotic range; rates logged]"
    return CriterionResult("dispatch probability constants", passed, detail)


# ---------------------------------------------------------------- criterion 7

@_timed
def criterion_7_amplification(runs: int = 200, domain: int = 1 << 10) -> CriterionResult:
    """A half-success synthetic inverter amplified by ceil(log2(N*N')) copies."""
    from .framework import amplify, query_amplified

    ell = amplification_copies(domain, domain)
    if ell != 20:
        return CriterionResult("amplification of a weak inverter", False, f"ell={ell}, expected 20")
    f_rng = np.random.default_rng(np.random.SeedSequence([3, 0xA3]))
    table = f_rng.integers(0, domain, size=domain)
    first_pre = np.full(domain, domain, dtype=np.int64)
    np.minimum.at(first_pre, table, np.arange(domain, dtype=np.int64))
    member = first_pre < domain
    ys = np.arange(domain, dtype=np.int64)
    member_ys = ys[member]

    def query_one(copy_key: int, y: int):
        # fair coin per (copy, query); on success the true first preimage
        from .mixing import keyed_value

        if keyed_value(copy_key, y) & 1 and first_pre[y] < domain:
            return int(first_pre[y])
        return None

    failures = 0
    member_queries = 0
    for run in range(runs):
        amplified = amplify(lambda i: (run * 1009 + i) | (1 << 32), domain, domain)
        assert amplified.ell == 20
        # vectorised first-hit over the copies; spot-check the scalar API below
        coins = np.zeros(member_ys.size, dtype=bool)
        for copy_key in amplified.copies:
            coin = (keyed_value_arr(copy_key, member_ys.astype(np.uint64)) & np.uint64(1)).astype(bool)
            coins |= coin
        failures += int((~coins).sum())
        member_queries += member_ys.size
        if run % 50 == 0:
            for y in member_ys[:4].tolist():
                got = query_amplified(amplified, query_one, int(y))
                expected_hit = bool(coins[np.searchsorted(member_ys, y)])
                assert (got is not None) == expected_hit
                if got is not None:
                    assert int(table[got]) == y
    rate = failures / member_queries
    bar = 2.0 / domain
    return CriterionResult(
        "amplification of a weak inverter",
        rate <= bar,
        f"aggregate failure rate {rate:.2e} <= {bar:.2e} over {runs} runs x {member_ys.size} queries",
    )


# ---------------------------------------------------------------- criterion 8

C8_CONFIG = dict(n=32, k=4, max_value=1 << 9, delta=0.75, prime_constant=0.1, runs=30)


@_timed
def criterion_8_ksum() -> CriterionResult:
    """k=4 exhaustive sweep against the meet-in-the-middle oracle."""
    n, k = C8_CONFIG["n"], C8_CONFIG["k"]
    false_positives = 0
    bad_runs = 0
    bits_ratio = None
    constants = PlanConstants(cost_slack=1.0)
    for seed in range(C8_CONFIG["runs"]):
        inst = gen_instance("uniform", seed, kind="ksum", n=n, k=k, max_value=C8_CONFIG["max_value"])
        advice = preprocess_ksum(
            inst.a_values, k, C8_CONFIG["delta"], seed,
            prime_constant=C8_CONFIG["prime_constant"], constants=constants,
        )
        oracle = Oracle(inst)
        mv = oracle.member_values()
        top = int(mv.max()) + 1
        member = np.zeros(top, dtype=bool)
        member[mv] = True
        ys = np.arange(top, dtype=np.int64)
        codes, _, _ = query_index_batch(advice, ys)
        answered = codes >= 0
        if answered.any():
            i = codes[answered] // advice.m
            j = codes[answered] % advice.m
            sums = inst.a_values[i] + inst.a_values[advice.witnesses[j]].sum(axis=1)
            false_positives += int((sums != ys[answered]).sum())
        misses = int((member & ~answered).sum())
        if misses / max(1, int(member.sum())) > 1.0 / n:
            bad_runs += 1
        if bits_ratio is None:
            target = n ** (k - 0.5 - C8_CONFIG["delta"]) * math.ceil(math.log2(advice.outer_domain))
            bits_ratio = advice.weak_bits() / target
    polylog = math.log2(n ** (k - 1)) ** 3
    rate_runs_ok = 1 - bad_runs / C8_CONFIG["runs"]
    passed = (
        false_positives == 0
        and rate_runs_ok >= 0.95
        and 1 / polylog <= bits_ratio <= polylog
    )
    return CriterionResult(
        "k-argument sum (k=4) vs meet-in-the-middle oracle",
        passed,
        f"false_positives={false_positives}, good-run rate {rate_runs_ok:.1%}, "
        f"weak-bits ratio {bits_ratio:.1f} within x{polylog:.0f} of n^{{k-0.5-delta}} words",
    )


# ---------------------------------------------------------------- criterion 9

C9_CONFIG = dict(n=1 << 10, k=3, ell_bits=24, delta=0.75, seeds=3, queries=1 << 12)


@_timed
def criterion_9_kxor() -> CriterionResult:
    """XOR variant: mixed member/non-member sweep, full-rank dispatch."""
    n, k, ell_bits = C9_CONFIG["n"], C9_CONFIG["k"], C9_CONFIG["ell_bits"]
    constants = PlanConstants(c_r=8 / (math.sqrt(n) * math.log2(n)), cost_slack=1.0)
    false_positives = 0
    rank_ok = True
    bad_runs = 0
    for seed in range(C9_CONFIG["seeds"]):
        inst = gen_instance("uniform", seed, kind="kxor", n=n, k=k, ell_bits=ell_bits)
        advice = preprocess_kxor(
            inst.a_values, k, ell_bits, C9_CONFIG["delta"], seed, constants=constants
        )
        for copy in advice.copies:
            aux = AuxKXor.unpack(copy.aux_bytes)
            if not (is_full_row_rank(aux.p_matrix) and is_full_row_rank(aux.q_matrix)):
                rank_ok = False
        oracle = Oracle(inst)
        mv = oracle.member_values()
        qrng = np.random.default_rng(np.random.SeedSequence([seed, 0x90]))
        half = C9_CONFIG["queries"] // 2
        members = mv[qrng.integers(0, mv.size, size=half)]
        member_set = set(mv.tolist())
        non = []
        while len(non) < half:
            cand = qrng.integers(0, 1 << ell_bits, size=half)
            non.extend(int(v) for v in cand if int(v) not in member_set)
        non = np.asarray(non[:half], dtype=np.int64)
        ys = np.concatenate([members, non])
        codes, _, _ = query_index_batch(advice, ys)
        answered = codes >= 0
        if answered.any():
            i = codes[answered] // advice.m
            j = codes[answered] % advice.m
            vals = inst.a_values[i] ^ inst.a_values[advice.witnesses[j][:, 0]]
            false_positives += int((vals != ys[answered]).sum())
        miss_rate = float((~answered[:half]).mean())
        if miss_rate > 1.0 / n:
            bad_runs += 1
    passed = false_positives == 0 and rank_ok and bad_runs == 0
    return CriterionResult(
        "XOR variant vs exhaustive oracle",
        passed,
        f"false_positives={false_positives}, full-rank dispatch on every copy: {rank_ok}, "
        f"runs over miss bar: {bad_runs}/{C9_CONFIG['seeds']}",
    )


# ------------------------------------------------------------------- suites

SUITES: Dict[str, List] = {
    "correctness": [criterion_1_exhaustive, criterion_2_subfn_oracle],
    "tradeoff": [criterion_3_tradeoff_slope, criterion_4_figure_point, criterion_10_preprocess_slope],
    "inversion": [criterion_5_inversion_modes, criterion_7_amplification],
    "constants": [criterion_6_probability_constants],
    "ksum": [criterion_8_ksum],
    "kxor": [criterion_9_kxor],
}
SUITES["all"] = [fn for suite in ("correctness", "tradeoff", "inversion", "constants", "ksum", "kxor") for fn in SUITES[suite]]


def run_suite(name: str) -> List[CriterionResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [fn() for fn in SUITES[name]]
