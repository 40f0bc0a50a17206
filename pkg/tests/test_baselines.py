import numpy as np
import pytest

from meantest import (
    BaselineKind,
    DistributionSpec,
    InsufficientDataError,
    Seed,
    sample,
    sign_map,
    sign_mean_norm,
    unsplit_plugin,
)


def test_unsplit_plugin_single_sample():
    stat = unsplit_plugin([[3.0, 4.0]])
    assert stat.value == 25.0
    assert stat.kind is BaselineKind.UNSPLIT_PLUGIN
    assert (stat.n, stat.dim) == (1, 2)


def test_unsplit_plugin_zeros():
    assert unsplit_plugin(np.zeros((10, 3))).value == 0.0


def test_unsplit_plugin_empty_batch():
    with pytest.raises(InsufficientDataError):
        unsplit_plugin(np.zeros((0, 3)))


def test_unsplit_plugin_bias_matches_trace_over_n():
    # null mean is tr(Sigma)/n = 10/100 = 0.1
    trials, n, d = 10_000, 100, 10
    rng = np.random.default_rng(404)
    values = np.empty(trials)
    for t in range(trials):
        values[t] = unsplit_plugin(rng.standard_normal((n, d))).value
    assert values.mean() == pytest.approx(0.1, abs=0.005)


def test_sign_map_values():
    out = sign_map([[1.5, -2.0, 0.1]])
    np.testing.assert_array_equal(out, [[1.0, -1.0, 1.0]])
    np.testing.assert_array_equal(sign_map([[-3.0, -0.2]]), [[-1.0, -1.0]])


def test_sign_map_zero_convention():
    np.testing.assert_array_equal(sign_map([[0.0, -0.0]]), [[1.0, 1.0]])


def test_sign_map_idempotent_and_pm_one():
    rng = np.random.default_rng(11)
    batch = rng.normal(size=(50, 7))
    once = sign_map(batch)
    assert set(np.unique(once)) <= {-1.0, 1.0}
    np.testing.assert_array_equal(sign_map(once), once)


def test_sign_map_balanced_on_symmetric_input():
    count = 10_000
    batch = sample(DistributionSpec.standard_normal(3), count, Seed(77))
    freq = (sign_map(batch) > 0).mean(axis=0)
    assert np.abs(freq - 0.5).max() <= 3.0 / np.sqrt(count)


def test_sign_mean_norm_single_sample_is_dim():
    assert sign_mean_norm([[0.2, -3.0, 1.0, -0.5]]).value == 4.0


def test_sign_mean_norm_opposite_rows_cancel():
    assert sign_mean_norm([[1.0, -2.0], [-3.0, 0.5]]).value == 0.0


def test_sign_mean_norm_null_mean_is_dim_over_n():
    # hypercube plug-in bias: d/n = 16/64 = 0.25
    trials, n, d = 10_000, 64, 16
    rng = np.random.default_rng(505)
    values = np.empty(trials)
    for t in range(trials):
        values[t] = sign_mean_norm(rng.standard_normal((n, d))).value
    assert values.mean() == pytest.approx(0.25, abs=0.01)
