"""Parameter planning for the inversion modes.

Given a domain size L and a time exponent delta, pick the mode and the
internal chain parameters:

* ``FULL_INVERSE`` when the space budget of the requested mode already
  covers a complete inverse map (sample-set budget L^{1.5-delta} >= L, i.e.
  delta <= 1/2; classic budget L^{1-delta/3} >= L, i.e. delta <= 0).
* ``SAMPLE_SET``:  g = ceil(c_g L^delta) sampled points (recomputed online),
  chains of length t = ceil(c_t L^{delta-1/2}), s = ceil(c_s L^{1-delta})
  chains per table, r = ceil(c_r sqrt(L) log2 L) tables.  This satisfies the
  stopping rule s t^2 ~ g against effective collision 1/g and coverage
  r s t ~ L log L, giving space ~ L^{1.5-delta} pairs and time ~ L^delta.
* ``CLASSIC_FN``:  heavy store of g = ceil(c_g L^{1-delta/3}) sampled
  images kept in the advice, t = ceil(c_t L^{delta/3}),
  s = ceil(c_s L^{1-delta}), r = ceil(c_r L^{2delta/3} log2 L); space and
  time multiply out to T S^3 ~ L^3.

All multipliers are configuration; benchmark profiles shrink them and every
report echoes the values used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

FULL_INVERSE = "full_inverse"
CLASSIC_FN = "classic_fn"
SAMPLE_SET = "sample_set"

_MODE_CODES = {FULL_INVERSE: 0, CLASSIC_FN: 1, SAMPLE_SET: 2}
_MODE_NAMES = {v: k for k, v in _MODE_CODES.items()}


def mode_code(mode: str) -> int:
    return _MODE_CODES[mode]


def mode_from_code(code: int) -> str:
    return _MODE_NAMES[code]


@dataclass(frozen=True)
class PlanConstants:
    """Tunable multipliers for the planner formulas."""

    c_g: float = 1.0
    c_t: float = 1.0
    c_s: float = 1.0
    c_r: float = 1.0
    cost_slack: float = 4.0  # per-query eval budget multiplier, see invert()


@dataclass(frozen=True)
class ParamPlan:
    mode: str
    domain_size: int
    range_size: int
    delta: float
    g: int = 0
    t: int = 0
    s: int = 0
    r: int = 0
    constants: PlanConstants = field(default_factory=PlanConstants)

    def table_pairs(self) -> int:
        return self.r * self.s

    def eval_budget(self) -> int:
        """Per-query evaluator-call budget (cost contract)."""
        if self.mode == FULL_INVERSE:
            return 1
        return self.g + math.ceil(2 * self.constants.cost_slack * self.r * self.t) + 1


def _ceil_tol(x: float) -> int:
    # Guards against pow() landing a hair above an exact power of two.
    return max(1, math.ceil(x - 1e-9))


def plan_parameters(
    domain_size: int,
    delta: float,
    constants: PlanConstants = PlanConstants(),
    mode_hint: str = SAMPLE_SET,
    range_size: int | None = None,
) -> ParamPlan:
    """Choose mode and chain parameters for inverting one function on [L]."""
    if domain_size < 1:
        raise ValueError("domain_size must be >= 1")
    if not math.isfinite(delta) or not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be a finite value in [0, 1], got {delta!r}")
    if mode_hint not in (SAMPLE_SET, CLASSIC_FN, FULL_INVERSE):
        raise ValueError(f"unknown mode hint {mode_hint!r}")
    L = int(domain_size)
    Lp = int(range_size) if range_size is not None else L

    full_budget_exp = 1.5 - delta if mode_hint != CLASSIC_FN else 1.0 - delta / 3.0
    if mode_hint == FULL_INVERSE or L ** full_budget_exp >= L - 1e-9:
        return ParamPlan(FULL_INVERSE, L, Lp, delta, constants=constants)

    c = constants
    log2L = math.log2(L)
    if mode_hint == SAMPLE_SET:
        g = min(L, _ceil_tol(c.c_g * L**delta))
        t = _ceil_tol(c.c_t * L ** (delta - 0.5))
        s = _ceil_tol(c.c_s * L ** (1.0 - delta))
        r = _ceil_tol(c.c_r * math.sqrt(L) * log2L)
        return ParamPlan(SAMPLE_SET, L, Lp, delta, g=g, t=t, s=s, r=r, constants=c)

    g = min(L, _ceil_tol(c.c_g * L ** (1.0 - delta / 3.0)))
    t = _ceil_tol(c.c_t * L ** (delta / 3.0))
    s = _ceil_tol(c.c_s * L ** (1.0 - delta))
    r = _ceil_tol(c.c_r * L ** (2.0 * delta / 3.0) * log2L)
    return ParamPlan(CLASSIC_FN, L, Lp, delta, g=g, t=t, s=s, r=r, constants=c)


def plan_classicfn_for_bits(
    domain_size: int,
    range_size: int,
    target_bits: int,
    constants: PlanConstants = PlanConstants(),
) -> ParamPlan:
    """Classic-mode plan sized to a raw advice-bit budget.

    Used to compare the two table modes at equal measured space, where the
    classic tradeoff would need delta > 1.  Half the budget goes to the
    stored image dictionary, half to the chain tables; t then follows from
    the coverage target r*s*t ~ L log2 L and s from the stopping rule
    s t^2 ~ g.
    """
    L = int(domain_size)
    w_dom = max(1, (L - 1).bit_length())
    w_rng = max(1, (range_size - 1).bit_length())
    store_entries = max(1, (target_bits // 2) // (w_dom + w_rng))
    table_pairs = max(1, (target_bits // 2) // (2 * w_dom))
    g = min(L, store_entries)
    t = max(1, round(L * math.log2(max(2, L)) / table_pairs))
    s = max(1, g // (t * t))
    r = max(1, table_pairs // s)
    return ParamPlan(CLASSIC_FN, L, range_size, 1.0, g=g, t=t, s=s, r=r, constants=constants)
