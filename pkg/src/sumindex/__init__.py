"""Preprocessing data structures for sum/XOR indexing.

A generic function-inversion engine (chain tables with image bypass, in
full-inverse, classic, and shared-sample modes) drives modular and GF(2)
sub-function decompositions of pair-sum functions, with exact advice-bit
accounting, probe/evaluation meters, and a benchmark CLI.
"""

from .funcspec import FunctionSpec
from .plans import (
    CLASSIC_FN,
    FULL_INVERSE,
    SAMPLE_SET,
    ParamPlan,
    PlanConstants,
    plan_parameters,
)
from .inversion import InversionAdvice, classic_fn_mode, invert, invert_batch, preprocess_inversion
from .framework import (
    AmplifiedAdvice,
    Decomposition,
    FrameworkAdvice,
    amplification_copies,
    amplify,
    preprocess_framework,
    query_amplified,
    query_framework,
)
from .indexing import IndexAdvice, query_index
from .threesum import decompose_3sum, preprocess_3sum, query_3sum
from .ksum import build_ksum_sumset, preprocess_ksum, query_ksum
from .kxor import decompose_kxor, preprocess_kxor, query_kxor
from .instances import Instance, gen_instance
from .oracle import Oracle, OracleAnswer, oracle_query
from .primes import count_primes, is_prime, prime_interval, sample_prime
from .gf2 import F2Matrix, f2_matvec, sample_full_rank

__version__ = "0.1.0"

__all__ = [
    "FunctionSpec",
    "ParamPlan",
    "PlanConstants",
    "plan_parameters",
    "FULL_INVERSE",
    "CLASSIC_FN",
    "SAMPLE_SET",
    "InversionAdvice",
    "preprocess_inversion",
    "invert",
    "invert_batch",
    "classic_fn_mode",
    "Decomposition",
    "FrameworkAdvice",
    "AmplifiedAdvice",
    "preprocess_framework",
    "query_framework",
    "amplify",
    "query_amplified",
    "amplification_copies",
    "IndexAdvice",
    "query_index",
    "decompose_3sum",
    "preprocess_3sum",
    "query_3sum",
    "build_ksum_sumset",
    "preprocess_ksum",
    "query_ksum",
    "decompose_kxor",
    "preprocess_kxor",
    "query_kxor",
    "Instance",
    "gen_instance",
    "Oracle",
    "OracleAnswer",
    "oracle_query",
    "prime_interval",
    "sample_prime",
    "count_primes",
    "is_prime",
    "F2Matrix",
    "sample_full_rank",
    "f2_matvec",
]
