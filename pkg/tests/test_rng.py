import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from nevlab.rng import draw, philox_block, philox_words


# known-answer vectors of the Random123 reference implementation (philox4x32, 10 rounds)
KAT = [
    ([0, 0, 0, 0], [0, 0], [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]),
    ([0xFFFFFFFF] * 4, [0xFFFFFFFF] * 2, [0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD]),
    ([0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344], [0xA4093822, 0x299F31D0],
     [0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1]),
]


@pytest.mark.parametrize("counter, key, expected", KAT)
def test_known_answers(counter, key, expected):
    assert philox_words(counter, key) == expected


def test_block_layout_matches_words():
    seed, path, step = (7 << 32) | 3, (5 << 32) | 11, (2 << 32) | 9
    assert list(philox_block(seed, path, step)) == philox_words([9, 2, 11, 5], [3, 7])


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**40), st.integers(0, 2**40))
def test_draw_is_pure(seed, path, step):
    a = draw(np.uint64(seed), np.int64(path), np.int64(step))
    b = draw(np.uint64(seed), np.int64(path), np.int64(step))
    assert a == b
    assert 0.0 < a[2] < 1.0


def test_draws_are_standard_normal():
    z = np.array([draw(np.uint64(42), np.int64(p), np.int64(0))[:2] for p in range(20000)]).ravel()
    assert stats.kstest(z, "norm").pvalue > 1e-3
    u = np.array([draw(np.uint64(42), np.int64(p), np.int64(0))[2] for p in range(20000)])
    assert stats.kstest(u, "uniform").pvalue > 1e-3


def test_streams_differ_between_paths_and_seeds():
    a = draw(np.uint64(1), np.int64(0), np.int64(0))
    assert a != draw(np.uint64(1), np.int64(1), np.int64(0))
    assert a != draw(np.uint64(2), np.int64(0), np.int64(0))
    assert a != draw(np.uint64(1), np.int64(0), np.int64(1))
