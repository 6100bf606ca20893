import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from cmcs.statsutil import (
    RandomStream,
    chi2_quantile,
    chi2_upper_tail,
    normal_quantile,
    std_normal_draws,
    uniform_int,
)


def test_normal_draws():
    assert std_normal_draws(RandomStream(1), 0).shape == (0,)
    x = std_normal_draws(RandomStream(1), 10**6)
    assert abs(x.mean()) < 0.005
    assert abs(x.var() - 1) < 0.01
    np.testing.assert_array_equal(x[:100], std_normal_draws(RandomStream(1), 100))


def test_uniform_int():
    assert uniform_int(RandomStream(0), 5, 5) == 5
    with pytest.raises(ValueError):
        uniform_int(RandomStream(0), 2, 1)
    x = uniform_int(RandomStream(3), 1, 4, size=10**5)
    freq = np.bincount(x, minlength=5)[1:] / x.size
    assert np.all(np.abs(freq - 0.25) < 0.01)
    # chi-square goodness of fit
    stat = float(np.sum((freq * x.size - x.size / 4) ** 2 / (x.size / 4)))
    assert chi2_upper_tail(stat, 3) > 0.001
    np.testing.assert_array_equal(x, uniform_int(RandomStream(3), 1, 4, size=10**5))


def test_normal_quantile_against_mpmath():
    mpmath.mp.dps = 30
    for p in (1e-8, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999):
        ref = float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(p) - 1))
        assert abs(normal_quantile(p) - ref) < 1e-9
    assert normal_quantile(0.5) == 0.0
    assert abs(normal_quantile(0.975) - 1.959964) < 1e-6
    assert abs(normal_quantile(0.025) + normal_quantile(0.975)) < 1e-12
    grid = np.linspace(0.001, 0.999, 999)
    assert np.all(np.diff(normal_quantile(grid)) > 0)
    for bad in (0.0, 1.0, -0.1, float("nan")):
        with pytest.raises(ValueError):
            normal_quantile(bad)


def _chi2_tail_by_quadrature(x, df):
    k = df / 2.0
    f = lambda u: u ** (k - 1) * math.exp(-u / 2) / (2**k * math.gamma(k))
    return integrate.quad(f, x, math.inf, epsabs=1e-13)[0]


def test_chi2_upper_tail():
    for df in (1, 2, 5):
        assert chi2_upper_tail(0.0, df) == 1.0
    assert abs(chi2_upper_tail(3.841459, 1) - 0.05) < 1e-6
    assert abs(chi2_upper_tail(5.991465, 2) - 0.05) < 1e-6
    for x in (0.1, 1.0, 5.991465, 20.0):
        assert abs(chi2_upper_tail(x, 2) - math.exp(-x / 2)) < 1e-12
    for df in (1, 3, 4, 7):
        for x in (0.5, 2.0, 9.0):
            assert abs(chi2_upper_tail(x, df) - _chi2_tail_by_quadrature(x, df)) < 1e-10
    with pytest.raises(ValueError):
        chi2_upper_tail(-1.0, 2)
    with pytest.raises(ValueError):
        chi2_upper_tail(1.0, 0)


def test_chi2_round_trip():
    for df in range(1, 11):
        for a in (0.01, 0.05, 0.10):
            assert abs(chi2_upper_tail(chi2_quantile(a, df), df) - a) < 1e-8


def test_stream_splitting():
    base = RandomStream(99)
    draws = [std_normal_draws(base.spawn(k), 10**5) for k in range(4)]
    c = np.corrcoef(draws)
    assert np.max(np.abs(c[np.triu_indices(4, 1)])) < 0.01
    assert base.spawn(2).spawn(5).key == (0, 2, 5)
    a = RandomStream(1, 0).generator().random(5)
    b = RandomStream(1, 1).generator().random(5)
    assert not np.array_equal(a, b)


def test_stream_validation():
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(2**64)
