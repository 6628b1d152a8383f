import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumindex.plans import (
    CLASSIC_FN,
    FULL_INVERSE,
    SAMPLE_SET,
    PlanConstants,
    plan_classicfn_for_bits,
    plan_parameters,
)


def test_half_delta_degenerates_to_full_inverse():
    plan = plan_parameters(1024, 0.5)
    assert plan.mode == FULL_INVERSE


def test_sample_set_formulas_power_of_two():
    plan = plan_parameters(2**16, 0.75, PlanConstants())
    assert plan.mode == SAMPLE_SET
    assert (plan.g, plan.t, plan.s, plan.r) == (2**12, 2**4, 2**4, 2**8 * 16)


def test_sample_set_delta_one():
    plan = plan_parameters(2**16, 1.0, PlanConstants())
    assert plan.mode == SAMPLE_SET
    assert (plan.g, plan.t, plan.s, plan.r) == (2**16, 2**8, 1, 2**8 * 16)


def test_classic_delta_zero_is_full_storage():
    plan = plan_parameters(16, 0.0, mode_hint=CLASSIC_FN)
    assert plan.mode == FULL_INVERSE


def test_classic_plan_consistency():
    # s*t^2 tracks the heavy-store size; r*s*t covers L log L
    L = 2**15
    plan = plan_parameters(L, 0.6, mode_hint=CLASSIC_FN)
    assert plan.mode == CLASSIC_FN
    assert plan.s * plan.t**2 == pytest.approx(plan.g, rel=0.5)
    assert plan.r * plan.s * plan.t == pytest.approx(L * math.log2(L), rel=0.5)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), -0.1, 1.5])
def test_rejects_bad_delta(bad):
    with pytest.raises(ValueError):
        plan_parameters(64, bad)


def test_rejects_bad_domain():
    with pytest.raises(ValueError):
        plan_parameters(0, 0.5)


@given(
    st.integers(min_value=2, max_value=2**20),
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
)
@settings(max_examples=200)
def test_table_parameters_positive_and_bounded(L, delta):
    plan = plan_parameters(L, delta)
    if plan.mode == SAMPLE_SET:
        assert plan.g >= 1 and plan.t >= 1 and plan.s >= 1 and plan.r >= 1
        assert plan.g <= L
        assert plan.eval_budget() > plan.g


def test_space_budget_plan_close_to_target():
    target = 500_000
    plan = plan_classicfn_for_bits(2**16, 2**16, target)
    w = 16
    used = plan.r * plan.s * 2 * w + plan.g * 2 * w
    assert used == pytest.approx(target, rel=0.35)
