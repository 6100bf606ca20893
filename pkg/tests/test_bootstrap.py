import numpy as np
import pytest

from cmcs.bootstrap import (
    BootstrapEnsemble,
    BootstrapPlan,
    bootstrap_means,
    bootstrap_variance,
    default_block_len,
    gen_block_indices,
    indices_from_starts,
    resolve_block_len,
)
from cmcs.core import LossPanel
from cmcs.statsutil import RandomStream


def test_default_block_len():
    assert default_block_len(1) == 1
    assert default_block_len(8) == 2
    assert default_block_len(9) == 3
    assert default_block_len(125) == 5
    assert default_block_len(500) == 8
    assert default_block_len(1000) == 10


def test_block_len_clamp():
    assert resolve_block_len(100, 5) == (5, None)
    p, warn = resolve_block_len(7, 5)
    assert p == 3 and "clamped" in warn
    assert resolve_block_len(1, 1) == (1, None)


def test_full_length_block_is_rotation():
    idx = gen_block_indices(5, BootstrapPlan(50, 5, RandomStream(4)))
    for row, s in zip(idx.indices, idx.starts[:, 0]):
        assert row.tolist() == [(s + k) % 5 for k in range(5)]


def test_wrap_around():
    # starts 4 and 2 in 1-based terms
    assert indices_from_starts([[3, 1]], 5, 3).tolist() == [[3, 4, 0, 1, 2]]


def test_single_observation():
    idx = gen_block_indices(1, BootstrapPlan(10, 1))
    assert np.all(idx.indices == 0)


def test_index_errors():
    with pytest.raises(ValueError):
        gen_block_indices(0, BootstrapPlan(10, 1))
    with pytest.raises(ValueError):
        gen_block_indices(4, BootstrapPlan(10, 5))
    with pytest.raises(ValueError):
        BootstrapPlan(0)


def test_rows_are_circular_blocks():
    n, p = 23, 4
    idx = gen_block_indices(n, BootstrapPlan(200, p, RandomStream(8)))
    for row in idx.indices:
        for k in range(0, n, p):
            blk = row[k:k + p]
            assert np.all(np.diff(blk) % n == 1)


def test_block_starts_uniform():
    n = 37
    idx = gen_block_indices(n, BootstrapPlan(10**5 // 10, 4, RandomStream(2)))
    counts = np.bincount(idx.starts.ravel(), minlength=n)
    e = counts.sum() / n
    stat = np.sum((counts - e) ** 2 / e)
    from cmcs.statsutil import chi2_upper_tail

    assert chi2_upper_tail(stat, n - 1) > 0.001


def test_means_examples(rng):
    x = rng.normal(size=(30, 3))
    ens = bootstrap_means(x, gen_block_indices(30, BootstrapPlan(20, 30)))
    assert np.max(np.abs(ens.centered_means)) < 1e-12
    c = np.column_stack([np.full(30, 2.0), x[:, 0]])
    ens = bootstrap_means(c, gen_block_indices(30, BootstrapPlan(20, 3)))
    assert np.max(np.abs(ens.centered_means[:, 0])) < 1e-12


def test_means_match_direct_formula(rng):
    x = rng.normal(size=(17, 4))
    idx = gen_block_indices(17, BootstrapPlan(40, 3, RandomStream(1)))
    ens = bootstrap_means(LossPanel(x), idx)
    direct = x[idx.indices].mean(axis=1) - x.mean(axis=0)
    np.testing.assert_allclose(ens.centered_means, direct, atol=1e-13)


def test_means_out_of_bounds():
    with pytest.raises(IndexError):
        bootstrap_means(np.zeros((3, 2)), np.array([[0, 1, 3]]))


def test_variance_examples():
    zero = BootstrapEnsemble(np.zeros((5, 2)), np.zeros(2))
    assert bootstrap_variance(zero, np.array([0.5, -0.5])) == 0
    ens = BootstrapEnsemble(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.zeros(2))
    assert bootstrap_variance(ens, np.array([0.7, 0.0])) == pytest.approx(0.49)


def test_iid_variance_of_mean(rng):
    x = rng.normal(size=(500, 1))
    ens = bootstrap_means(x, gen_block_indices(500, BootstrapPlan(2000, 1, RandomStream(5))))
    v = float(np.var(ens.centered_means[:, 0]))
    assert abs(v / (1 / 500) - 1) < 0.15


def test_determinism(rng):
    x = rng.normal(size=(100, 3))
    plan = BootstrapPlan(100, 4, RandomStream(11, 3))
    a = bootstrap_means(x, gen_block_indices(100, plan))
    b = bootstrap_means(x, gen_block_indices(100, plan))
    assert np.array_equal(a.centered_means, b.centered_means)


def test_ensemble_mean_near_zero(rng):
    x = rng.normal(size=(200, 2))
    ens = bootstrap_means(x, gen_block_indices(200, BootstrapPlan(4000, 6, RandomStream(2))))
    sd = ens.centered_means.std(axis=0)
    assert np.all(np.abs(ens.centered_means.mean(axis=0)) < 5 * sd / np.sqrt(4000))
