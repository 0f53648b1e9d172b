import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnopt.space import (
    Candidate,
    SearchSpace,
    boolean,
    categorical,
    integer,
    mutate,
    real,
    sample_binomial_positive,
    sample_uniform,
)


def test_domain_validation():
    with pytest.raises(ValueError):
        integer(3, 3)
    with pytest.raises(ValueError):
        real(1.0, 0.5)
    with pytest.raises(ValueError):
        categorical(1)
    with pytest.raises(ValueError):
        SearchSpace([])
    with pytest.raises(ValueError):
        SearchSpace([boolean()] * 4, shape=(3,))


def test_sample_uniform_membership_boolean():
    space = SearchSpace.boolean(3)
    for seed in range(20):
        c = sample_uniform(space, np.random.default_rng(seed))
        assert set(c.values) <= {0.0, 1.0}
        assert c.loss is None


def test_sample_uniform_deterministic_under_seed():
    space = SearchSpace.real_box(0.0, 1.0, 2)
    a = sample_uniform(space, np.random.default_rng(7)).values
    b = sample_uniform(space, np.random.default_rng(7)).values
    assert np.array_equal(a, b)


def test_sample_uniform_categorical_frequencies():
    # Each of the 5 categories should land within 5 sigma of 0.2.
    space = SearchSpace([categorical(5)])
    rng = np.random.default_rng(0)
    n = 100_000
    draws = np.array([sample_uniform(space, rng).values[0] for _ in range(n)])
    sigma = math.sqrt(0.2 * 0.8 / n)
    for cat in range(5):
        freq = np.mean(draws == cat)
        assert abs(freq - 0.2) < 5 * sigma


def test_sample_uniform_mixed_space_membership(rng):
    space = SearchSpace([boolean(), integer(-3, 4), real(-1.0, 2.0), categorical(7)])
    for _ in range(200):
        c = sample_uniform(space, rng)
        assert space.contains(c.values)


def test_mutate_boolean_full_strength_is_complement(rng):
    space = SearchSpace.boolean(8)
    x = sample_uniform(space, rng)
    y = mutate(space, x, 8, rng)
    assert np.array_equal(y.values, 1.0 - x.values)


def test_mutate_exact_hamming_distance(rng):
    space = SearchSpace.boolean(12)
    x = sample_uniform(space, rng)
    y = mutate(space, x, 2, rng)
    assert int(np.sum(x.values != y.values)) == 2


def test_mutate_real_resample_distinct_and_in_range(rng):
    space = SearchSpace.real_box(0.0, 1.0, 4)
    x = sample_uniform(space, rng)
    for _ in range(100):
        y = mutate(space, x, 1, rng)
        changed = np.flatnonzero(x.values != y.values)
        assert changed.size == 1
        v = y.values[changed[0]]
        assert 0.0 <= v <= 1.0 and v != x.values[changed[0]]


def test_mutate_strength_bounds(rng):
    space = SearchSpace.boolean(5)
    x = sample_uniform(space, rng)
    with pytest.raises(ValueError):
        mutate(space, x, 0, rng)
    with pytest.raises(ValueError):
        mutate(space, x, 6, rng)


def _domain_strategy():
    return st.one_of(
        st.just(boolean()),
        st.builds(lambda a, w: integer(a, a + w), st.integers(-5, 5), st.integers(1, 6)),
        st.builds(lambda a, w: real(a, a + w), st.floats(-5, 5), st.floats(0.5, 3.0)),
        st.builds(categorical, st.integers(2, 6)),
    )


@settings(max_examples=60, deadline=None)
@given(
    domains=st.lists(_domain_strategy(), min_size=1, max_size=8),
    ell_frac=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**31),
)
def test_mutate_changes_exactly_ell_and_stays_in_domain(domains, ell_frac, seed):
    space = SearchSpace(domains)
    rng = np.random.default_rng(seed)
    x = sample_uniform(space, rng)
    ell = max(1, min(space.n, int(round(ell_frac * space.n))))
    y = mutate(space, x, ell, rng)
    assert int(np.sum(x.values != y.values)) == ell
    assert space.contains(y.values)
    # original untouched
    assert x.loss is None and y.loss is None


def test_mutate_bit_identical_under_seed():
    space = SearchSpace([boolean(), integer(0, 9), real(0, 1), categorical(4)] * 3)
    x = sample_uniform(space, np.random.default_rng(3))
    a = mutate(space, x, 5, np.random.default_rng(11)).values
    b = mutate(space, x, 5, np.random.default_rng(11)).values
    assert np.array_equal(a, b)


# --- zero-truncated binomial ---


def _conditioned_mean(n, p):
    # independent oracle: direct summation of the conditioned pmf
    total = sum(k * math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(1, n + 1))
    return total / (1.0 - (1.0 - p) ** n)


def test_binpos_n1_always_one(rng):
    for p in (0.01, 0.4, 0.99):
        assert all(sample_binomial_positive(1, p, rng) == 1 for _ in range(50))


def test_binpos_mean_matches_conditioned_oracle():
    rng = np.random.default_rng(2024)
    draws = np.array([sample_binomial_positive(10, 0.5, rng) for _ in range(100_000)])
    exact = _conditioned_mean(10, 0.5)
    assert abs(draws.mean() - exact) / exact < 0.01


def test_binpos_always_positive_small_rate(rng):
    draws = [sample_binomial_positive(100, 0.01, rng) for _ in range(5000)]
    assert min(draws) >= 1


def test_binpos_large_n_mean():
    rng = np.random.default_rng(77)
    draws = np.array([sample_binomial_positive(200, 0.05, rng) for _ in range(20_000)])
    exact = _conditioned_mean(200, 0.05)
    assert abs(draws.mean() - exact) / exact < 0.02


def test_binpos_rate_domain():
    rng = np.random.default_rng(0)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            sample_binomial_positive(10, bad, rng)


def test_binpos_tiny_rate_returns_one(rng):
    # far below the rejection floor: conditioned law is concentrated at 1
    draws = [sample_binomial_positive(50, 1e-12, rng) for _ in range(100)]
    assert set(draws) == {1}


def test_candidate_copy_independent():
    c = Candidate(np.array([1.0, 0.0]), loss=3.5)
    d = c.copy()
    d.values[0] = 9.0
    assert c.values[0] == 1.0 and d.loss == 3.5
