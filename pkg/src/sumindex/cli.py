"""Benchmark command line: generate, preprocess, query, sweep, verify.

Exit codes: 0 ok, 2 verification failure, 3 malformed file or digest
mismatch, 4 budget refusal.  Sweeps honour SUMINDEX_THREADS for parallel
cells; rows are emitted in a deterministic order regardless.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import bench
from .errors import BudgetExceededError, DigestMismatchError, FormatError, VerificationError
from .indexing import deserialize_index, query_index, serialize_index
from .instances import (
    KIND_KSUM,
    KIND_KXOR,
    KIND_SUM3,
    PROFILES,
    gen_instance,
    instance_digest,
    read_instance,
    write_instance,
)
from .ksum import preprocess_ksum
from .kxor import preprocess_kxor
from .plans import PlanConstants
from .threesum import preprocess_3sum

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_IO = 3
EXIT_BUDGET = 4

_MODE_TO_KIND = {"3sum": KIND_SUM3, "ksum": KIND_KSUM, "kxor": KIND_KXOR}


def _parse_int_list(text: str):
    return [int(v) for v in text.split(",") if v]


def _parse_float_list(text: str):
    return [float(v) for v in text.split(",") if v]


def cmd_gen(args) -> int:
    kind = _MODE_TO_KIND[args.mode]
    inst = gen_instance(
        args.profile, args.seed, kind=kind, n=args.n,
        m=args.m if args.m else None, k=args.k, ell_bits=args.ell,
        max_value=args.max_value,
    )
    write_instance(inst, args.out)
    print(f"wrote {args.out}: kind={inst.kind} n={inst.n} m={inst.m} M={inst.max_value}")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    inst = read_instance(args.instance)
    digest = instance_digest(inst)
    constants = PlanConstants(c_r=args.c_r, cost_slack=args.cost_slack)
    if inst.kind == KIND_SUM3:
        advice = preprocess_3sum(
            inst.a_values, inst.b_values, args.delta, args.seed,
            prime_constant=args.prime_constant, constants=constants,
            copies=args.copies, instance_digest=digest,
        )
    elif inst.kind == KIND_KSUM:
        advice = preprocess_ksum(
            inst.a_values, inst.k, args.delta, args.seed,
            prime_constant=args.prime_constant, constants=constants,
            copies=args.copies, instance_digest=digest,
        )
    else:
        advice = preprocess_kxor(
            inst.a_values, inst.k, inst.ell_bits, args.delta, args.seed,
            constants=constants, copies=args.copies, instance_digest=digest,
        )
    blob = serialize_index(advice)
    with open(args.out, "wb") as fh:
        fh.write(blob)
    print(
        f"wrote {args.out}: {len(blob)} bytes, accounted {advice.total_bits} bits, "
        f"{advice.ell} copies, preprocess_evals={advice.preprocess_evals}"
    )
    return EXIT_OK


def _load_advice(advice_path: str, instance_path: str):
    inst = read_instance(instance_path)
    with open(advice_path, "rb") as fh:
        blob = fh.read()
    digest = instance_digest(inst)
    if inst.kind == KIND_SUM3:
        b_values = inst.b_values
    elif inst.kind == KIND_KSUM:
        from .ksum import build_ksum_sumset

        b_values = build_ksum_sumset(inst.a_values, inst.k).values
    else:
        from .kxor import build_kxor_sumset

        b_values, _ = build_kxor_sumset(inst.a_values, inst.k)
    return deserialize_index(blob, inst.a_values, b_values, digest)


def cmd_query(args) -> int:
    advice = _load_advice(args.advice, args.instance)
    for y in args.y:
        out = query_index(advice, y)
        if out is None:
            print("ABSENT")
        else:
            print(" ".join(str(v) for v in out))
    return EXIT_OK


def _sweep_cell(cell):
    mode, n, delta, seed, args_dict = cell
    constants = PlanConstants(c_r=args_dict["c_r"], cost_slack=args_dict["cost_slack"])
    if mode in ("3sum", "ksum", "kxor"):
        return bench.run_index_cell(
            _MODE_TO_KIND[mode], n, delta, seed,
            m=args_dict["m"] if args_dict["m"] else None,
            k=args_dict["k"], ell_bits=args_dict["ell"],
            profile=args_dict["profile"], max_value=args_dict["max_value"],
            prime_constant=args_dict["prime_constant"], constants=constants,
            n_queries=args_dict["queries"], weak=not args_dict["amplified"],
        )
    if mode == "invert":
        return bench.run_invert_cell(n, delta, seed, constants=constants,
                                     n_queries=args_dict["queries"])
    if mode == "baseline":
        return bench.run_baseline_cell("sorted_sumset", n, seed,
                                       max_value=args_dict["max_value"],
                                       n_queries=args_dict["queries"])
    raise ValueError(f"unknown sweep mode {mode!r}")


def cmd_sweep(args) -> int:
    cells = []
    args_dict = dict(
        m=args.m, k=args.k, ell=args.ell, profile=args.profile,
        max_value=args.max_value, prime_constant=args.prime_constant,
        c_r=args.c_r, cost_slack=args.cost_slack, queries=args.queries,
        amplified=args.amplified,
    )
    for n in _parse_int_list(args.n):
        for delta in _parse_float_list(args.delta):
            for seed in range(args.seeds):
                cells.append((args.mode, n, delta, seed, args_dict))
    threads = int(os.environ.get("SUMINDEX_THREADS", "1"))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_sweep_cell, cells))
    else:
        reports = [_sweep_cell(c) for c in cells]
    order = sorted(
        range(len(reports)),
        key=lambda i: (cells[i][0], cells[i][1], cells[i][2], cells[i][3]),
    )
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        if args.format == "csv":
            out.write(",".join(bench.CSV_COLUMNS) + "\n")
            for i in order:
                out.write(bench.report_to_csv_row(reports[i]) + "\n")
        else:
            for i in order:
                out.write(reports[i].to_json() + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    import functools

    from . import verify

    if args.sieve_max != 1 << 34:
        verify.SUITES["constants"] = [
            functools.partial(verify.criterion_6_probability_constants, sieve_max=args.sieve_max)
        ]
    results = verify.run_suite(args.suite)
    failed = 0
    for res in results:
        print(res.line())
        failed += not res.passed
    if failed:
        raise VerificationError(f"{failed} criterion(s) failed")
    print(f"all {len(results)} criteria passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sumindex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a deterministic instance file")
    p.add_argument("--mode", choices=sorted(_MODE_TO_KIND), default="3sum")
    p.add_argument("--profile", choices=PROFILES, default="uniform")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ell", type=int, default=0, help="bit-vector length (kxor)")
    p.add_argument("--max-value", type=int, default=1 << 12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("preprocess", help="build an advice file for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--delta", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prime-constant", type=float, default=0.3)
    p.add_argument("--c-r", type=float, default=1.0)
    p.add_argument("--cost-slack", type=float, default=4.0)
    p.add_argument("--copies", type=int, default=None,
                   help="override the amplification copy count")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("query", help="answer queries from an advice file")
    p.add_argument("--advice", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--y", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("sweep", help="measured cells over (mode, n, delta, seed)")
    p.add_argument("--mode", choices=["3sum", "ksum", "kxor", "invert", "baseline"], default="3sum")
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--delta", default="0.75", help="comma-separated deltas in [0,1]")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--profile", choices=PROFILES, default="uniform")
    p.add_argument("--max-value", type=int, default=1 << 24)
    p.add_argument("--prime-constant", type=float, default=0.05)
    p.add_argument("--c-r", type=float, default=1.0)
    p.add_argument("--cost-slack", type=float, default=1.0)
    p.add_argument("--queries", type=int, default=128)
    p.add_argument("--amplified", action="store_true",
                   help="measure the amplified structure instead of one weak copy")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("--suite", default="all",
                   choices=["all", "correctness", "tradeoff", "inversion", "constants", "ksum", "kxor"])
    p.add_argument("--sieve-max", type=int, default=1 << 34)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (FormatError, DigestMismatchError, FileNotFoundError) as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceededError as exc:
        print(f"budget refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
