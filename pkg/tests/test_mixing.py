import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumindex.funcspec import FunctionSpec
from sumindex.mixing import (
    BlockedImages,
    build_sample_set,
    bypass_batch,
    bypassed_eval,
    derive_key,
    keyed_value,
    keyed_value_arr,
    mix64,
    mix64_arr,
    mixing_map,
    mixing_map_scalar,
    reduce_to,
    reduce_to_arr,
)


def test_empty_sample_set():
    assert build_sample_set(b"\x00", 0, 8).size == 0


def test_sample_set_deterministic():
    a = build_sample_set(b"s1", 4, 8)
    b = build_sample_set(b"s1", 4, 8)
    assert np.array_equal(a, b)
    c = build_sample_set(b"s2", 4, 8)
    assert not np.array_equal(a, c)  # overwhelmingly likely


def test_sample_set_range():
    pts = build_sample_set(b"range", 1000, 2**20)
    assert pts.size == 1000
    assert ((0 <= pts) & (pts < 2**20)).all()


def test_sample_set_rejects_oversize():
    with pytest.raises(ValueError):
        build_sample_set(b"x", 9, 8)


@given(st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=200)
def test_mix64_scalar_matches_vector(v):
    assert mix64(v) == int(mix64_arr(np.asarray([v], dtype=np.uint64))[0])


@given(
    st.integers(min_value=0, max_value=2**64 - 1),
    st.integers(min_value=0, max_value=2**62 - 1),
    st.integers(min_value=0, max_value=1000),
)
@settings(max_examples=200)
def test_keyed_value_scalar_matches_vector(key, x, salt):
    expected = keyed_value(key, x, salt)
    got = int(keyed_value_arr(key, np.asarray([x], dtype=np.uint64), salt)[0])
    assert expected == got


@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=1, max_value=2**31))
@settings(max_examples=200)
def test_reduce_in_range(v, n):
    out = reduce_to(v, n)
    assert 0 <= out < n
    assert out == int(reduce_to_arr(np.asarray([v], dtype=np.uint64), n)[0])


def test_mixing_map_agrees_scalar_vector():
    key = derive_key(b"mix", "mix", 3)
    vals = np.arange(100, dtype=np.int64)
    vec = mixing_map(key, vals.astype(np.uint64), 37)
    for v in range(100):
        assert int(vec[v]) == mixing_map_scalar(key, v, 37)


def test_bypass_identity_unblocked():
    f = FunctionSpec.from_array(np.arange(8), 8)
    blocked = BlockedImages([], 8)
    assert bypassed_eval(f, blocked, b"seed", 5) == 5


def test_bypass_replaces_blocked_value():
    f = FunctionSpec.from_array(np.full(8, 3), 8)
    blocked = BlockedImages([3], 8)
    out = bypassed_eval(f, blocked, b"s", 2)
    assert out != 3 and 0 <= out < 8


def test_bypass_never_returns_blocked_exhaustive():
    rng = np.random.default_rng(0)
    table = rng.integers(0, 64, 64)
    f = FunctionSpec.from_array(table, 64)
    sample = build_sample_set(b"blk", 8, 64)
    blocked = BlockedImages(f.eval_batch(sample), 64)
    for x in range(64):
        assert not blocked.contains(bypassed_eval(f, blocked, b"bp", x))


def test_bypass_batch_matches_scalar():
    rng = np.random.default_rng(1)
    table = rng.integers(0, 50, 64)
    f = FunctionSpec.from_array(table, 50)
    blocked = BlockedImages(table[:20], 50)
    key = derive_key(b"bp", "bypass")
    xs = np.arange(64, dtype=np.int64)
    vals = f.eval_batch(xs)
    got = bypass_batch(vals, xs, blocked, key, 50)
    for x in range(64):
        assert int(got[x]) == bypassed_eval(f, blocked, b"bp", x)


def test_blocked_rejects_full_range():
    with pytest.raises(ValueError):
        BlockedImages(range(8), 8)
