import numpy as np
import pytest
from scipy import stats

from betaflow.rng import RngStream, beta_variates, log_gamma_variates, mix_seed, splitmix64


def test_splitmix64_reference_values():
    # first outputs of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_same_seed_and_stream_are_bit_identical():
    a, b = RngStream(42, 7), RngStream(42, 7)
    np.testing.assert_array_equal(a.uniform(1000), b.uniform(1000))
    np.testing.assert_array_equal(beta_variates(a, 0.3, 2.0, 500), beta_variates(b, 0.3, 2.0, 500))


def test_streams_differ():
    base = RngStream(42, 0).uniform(100)
    assert not np.array_equal(base, RngStream(42, 1).uniform(100))
    assert not np.array_equal(base, RngStream(43, 0).uniform(100))


def test_child_streams_are_deterministic_and_distinct():
    parent = RngStream(5)
    c1, c2 = parent.child(1), parent.child(2)
    assert c1.key == RngStream(5).child(1).key
    assert c1.key != c2.key
    # drawing from the parent does not move its children
    parent.uniform(10)
    np.testing.assert_array_equal(parent.child(1).uniform(5), RngStream(5).child(1).uniform(5))


def test_mix_seed_is_not_symmetric():
    assert mix_seed(1, 2) != mix_seed(2, 1)


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        RngStream(-1)


def test_signs_are_fair():
    s = RngStream(3).signs(100_000)
    assert set(np.unique(s)) == {-1.0, 1.0}
    assert stats.binomtest(int((s > 0).sum()), s.size).pvalue > 0.01


@pytest.mark.parametrize("shape", [0.05, 0.5, 1.0, 2.5, 30.0])
def test_log_gamma_variates_follow_gamma(shape):
    g = np.exp(log_gamma_variates(RngStream(11, int(shape * 100)), shape, 50_000))
    assert stats.kstest(g, stats.gamma(shape).cdf).pvalue > 0.01


def test_small_shape_log_gamma_has_no_underflow():
    lg = log_gamma_variates(RngStream(1), 0.01, 10_000)
    assert np.all(np.isfinite(lg))
    assert lg.min() < -700.0  # exp would underflow to zero


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (0.1, 3.0), (2.0, 1.5), (40.0, 0.2)])
def test_beta_variates_are_interior_and_beta_distributed(a, b):
    x = beta_variates(RngStream(2, int(10 * a + b)), a, b, 50_000)
    assert np.all((x > 0.0) & (x < 1.0))
    assert stats.kstest(x, stats.beta(a, b).cdf).pvalue > 0.01
