import numpy as np
import pytest

from grusslab.prng import ALGORITHM, CounterRNG, mix64, stream_key

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def splitmix64_reference(state, k):
    """Textbook sequential SplitMix64 in pure Python integers."""
    out = []
    for _ in range(k):
        state = (state + GAMMA) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_first_word_of_zero_state_is_published_value():
    assert mix64(GAMMA) == 0xE220A8397B1DCDAF


def test_counter_stream_matches_sequential_splitmix():
    rng = CounterRNG(12345, 3)
    key = stream_key(12345, 3)
    assert [int(w) for w in rng.words(10)] == splitmix64_reference(key, 10)


def test_words_continue_across_calls():
    a = CounterRNG(7)
    b = CounterRNG(7)
    assert np.array_equal(np.concatenate([a.words(3), a.words(5)]), b.words(8))


def test_determinism_and_stream_separation():
    assert np.array_equal(CounterRNG(1, 0).normal(16), CounterRNG(1, 0).normal(16))
    assert not np.array_equal(CounterRNG(1, 0).normal(16), CounterRNG(1, 1).normal(16))
    assert not np.array_equal(CounterRNG(1, 0).normal(16), CounterRNG(2, 0).normal(16))


def test_uniform_range_and_moments():
    u = CounterRNG(99).uniform(200_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 5e-3
    assert abs(u.var() - 1 / 12) < 2e-3


def test_normal_moments():
    z = CounterRNG(5).normal(200_001)
    assert z.size == 200_001
    assert abs(z.mean()) < 1e-2
    assert abs(z.var() - 1.0) < 1e-2
    assert np.all(np.isfinite(z))


def test_complex_normal_unit_variance():
    z = CounterRNG(11).complex_normal((300, 300))
    assert z.shape == (300, 300)
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 1e-2


def test_seed_validation():
    with pytest.raises(ValueError):
        CounterRNG(-1)
    with pytest.raises(ValueError):
        CounterRNG(1 << 64)
    CounterRNG(MASK)


def test_algorithm_tag():
    assert ALGORITHM == "splitmix64-ctr-v1"
