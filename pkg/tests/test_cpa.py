import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from cmcs.bootstrap import BootstrapPlan
from cmcs.core import InsufficientDataError, LossPanel, StateSeries
from cmcs.cpa import (
    CovEstimatorSpec,
    NotPositiveDefiniteError,
    TwoStateDesign,
    WaldOutcome,
    closed_form_sigma,
    closed_form_terms,
    closed_form_wald,
    covariance,
    dfc_select,
    dm_test,
    instrument,
    relative_to_baseline,
    statewise_t_test,
    wald_test,
)
from cmcs.simlab import rejection_region_grid
from cmcs.statsutil import RandomStream, chi2_quantile, normal_quantile

designs = st.builds(
    TwoStateDesign,
    delta1=st.floats(-3, -0.01),
    v=st.floats(0, 1),
    state_prob=st.floats(0.05, 0.95),
    sigma2=st.floats(0.1, 5),
)


def test_instrument_structure():
    states = StateSeries((1, 2, 1, 3), (1, 2, 3))
    z = instrument(np.array([1.0, 2.0, 3.0, 4.0]), states)
    np.testing.assert_array_equal(z.z, [[1, 1, 0], [2, 0, 2], [3, 3, 0], [4, 0, 0]])
    z = instrument(np.array([1.0, 1.0]), StateSeries((1, 2)))
    np.testing.assert_array_equal(z.z, [[1, 1], [1, 0]])
    z = instrument(np.array([0.5, -1.0]), StateSeries(("a", "a")))
    np.testing.assert_array_equal(z.z, [[0.5], [-1.0]])
    with pytest.raises(ValueError):
        instrument(np.zeros(3), StateSeries((1, 2)))


def test_instrument_with_baseline_matrix():
    panel = LossPanel([[1.0, 2.0, 4.0], [0.0, 1.0, 1.0]], ("a", "b", "c"))
    d = relative_to_baseline(panel, "a")
    np.testing.assert_array_equal(d, [[-1, -3], [-1, -1]])
    z = instrument(d, StateSeries((1, 2)))
    assert z.q == 4 and z.k == 2
    np.testing.assert_array_equal(z.z, [[-1, -3, -1, -3], [-1, -1, 0, 0]])


def _hac_oracle(x, lag):
    # double sum over |t - s| <= lag with unit weights
    e = x - x.mean(axis=0)
    n = len(e)
    t = np.arange(n)
    w = (np.abs(t[:, None] - t[None, :]) <= lag).astype(float)
    return np.einsum("ti,ts,sj->ij", e, w, e) / n


def test_covariance_kernels(rng):
    x = rng.normal(size=(300, 2))
    x[:, 1] += 0.5 * x[:, 0]
    s0 = covariance(x, CovEstimatorSpec("sample"))
    np.testing.assert_allclose(s0, np.cov(x.T, bias=True), rtol=1e-12)
    np.testing.assert_array_equal(covariance(x, CovEstimatorSpec("truncated_hac", 0)), s0)
    for lag in (1, 4, 10):
        np.testing.assert_allclose(
            covariance(x, CovEstimatorSpec("truncated_hac", lag)), _hac_oracle(x, lag),
            rtol=1e-10, atol=1e-14,
        )


def test_covariance_errors():
    with pytest.raises(NotPositiveDefiniteError):
        covariance(np.ones((20, 1)))
    alt = (-1.0) ** np.arange(50)
    with pytest.raises(NotPositiveDefiniteError) as info:
        covariance(alt, CovEstimatorSpec("truncated_hac", 1))
    assert info.value.min_eigenvalue < 0
    with pytest.raises(ValueError, match="lag"):
        covariance(np.arange(10.0), CovEstimatorSpec("truncated_hac", 10))
    with pytest.raises(InsufficientDataError):
        covariance(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        CovEstimatorSpec("bartlett")


def test_ridge_repairs_singular_matrix(rng):
    x = rng.normal(size=(100, 1))
    z = np.hstack([x, x])
    s = covariance(z)
    assert np.all(np.linalg.eigvalsh(s) > 0)


def test_wald_basics(rng):
    x = rng.normal(size=(100, 2))
    x -= x.mean(axis=0)
    out = wald_test(x)
    assert out.statistic == pytest.approx(0, abs=1e-20) and out.p_value == pytest.approx(1)
    assert out.df == 2
    assert WaldOutcome(6.0, 2, 0.0498).rejects(0.05)


@pytest.mark.parametrize("spec", [CovEstimatorSpec(), CovEstimatorSpec("truncated_hac", 3)])
def test_single_state_wald_is_squared_dm(rng, spec):
    d = rng.normal(0.1, 1, 400)
    w = wald_test(instrument(d, StateSeries(("x",) * 400)), spec)
    t, p = dm_test(d, spec)
    assert w.statistic == pytest.approx(t * t, rel=1e-10)
    assert w.p_value == pytest.approx(p, rel=1e-8)


def test_wald_matches_direct_formula(rng):
    d = rng.normal(size=250)
    states = StateSeries.from_codes(rng.integers(0, 3, 250), ("a", "b", "c"))
    z = instrument(d, states).z
    e = z - z.mean(axis=0)
    s = e.T @ e / 250
    expect = 250 * z.mean(axis=0) @ np.linalg.inv(s) @ z.mean(axis=0)
    out = wald_test(z)
    assert out.statistic == pytest.approx(expect, rel=1e-10)
    assert out.p_value == pytest.approx(stats.chi2.sf(expect, 3), rel=1e-9)


def test_statewise_t(rng):
    states = StateSeries((1, 1, 2, 2, 2))
    out = statewise_t_test(np.array([1.0, -1.0, 0.3, 0.1, 0.5]), states, 1)
    assert out.t == 0 and out.p_value == 1
    d = rng.normal(0.2, 1, 300)
    st_ = StateSeries.from_codes(rng.integers(0, 2, 300), (1, 2))
    out = statewise_t_test(d, st_, 2)
    ref = stats.ttest_1samp(d[st_.codes() == 1], 0.0)
    assert out.t == pytest.approx(ref.statistic, rel=1e-12)
    assert out.p_value == pytest.approx(2 * stats.norm.sf(abs(ref.statistic)), rel=1e-10)
    boot = statewise_t_test(d, st_, 2, variance="bootstrap",
                            plan=BootstrapPlan(2000, 1, RandomStream(1)))
    assert boot.mean == out.mean
    assert abs(boot.variance / out.variance - 1) < 0.15


def test_statewise_t_insufficient():
    with pytest.raises(InsufficientDataError):
        statewise_t_test(np.array([1.0, 2.0]), StateSeries((1, 2)), 1)
    with pytest.raises(InsufficientDataError):
        statewise_t_test(np.array([1.0, 1.0, 2.0]), StateSeries((1, 1, 2)), 1)
    with pytest.raises(ValueError):
        statewise_t_test(np.zeros(3), StateSeries((1, 1, 2)), 7)


def test_dfc_rule():
    states = StateSeries((1, 1, 2, 2, 3, 3))
    d = np.array([-0.1, -0.3, 0.2, 0.0, 0.5, -0.5])
    keep = dfc_select(d, states, WaldOutcome(1.0, 3, 0.5))
    assert all(v == ("1", "2") for v in keep.selected.values())
    sel = dfc_select(d, states, WaldOutcome(20.0, 3, 0.001))
    assert sel.selected == {1: ("1",), 2: ("2",), 3: ("1", "2")}
    assert sel.ties == (3,)
    assert sel.conditional_means[1] == pytest.approx(-0.2)


def test_closed_form_sigma_examples():
    with pytest.raises(ValueError):
        TwoStateDesign(0.0, 0.5, 0.5)
    cf = closed_form_sigma(TwoStateDesign(-1e-300, 0.0, 0.5, 1.0))
    np.testing.assert_allclose(cf.matrix, [[1, 0.5], [0.5, 0.5]])
    assert cf.det == pytest.approx(0.25)
    cf = closed_form_sigma(TwoStateDesign(-0.3, 1.0, 0.5, 1.0))
    assert (cf.sigma11, cf.sigma12, cf.sigma22) == pytest.approx((1.09, 0.545, 0.5225))
    assert cf.det == pytest.approx(1.09 * 0.5225 - 0.545**2, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(designs)
def test_closed_form_sigma_identities(design):
    cf = closed_form_sigma(design)
    m = cf.matrix
    assert cf.det == pytest.approx(np.linalg.det(m), rel=1e-10)
    np.testing.assert_allclose(m @ cf.inverse, np.eye(2), atol=1e-10)
    assert np.all(np.linalg.eigvalsh(m) > 0)


@settings(max_examples=200, deadline=None)
@given(designs, st.floats(-1, 1), st.floats(-1, 1), st.integers(1, 5000))
def test_closed_form_wald_matches_matrix_form(design, d1, d2, n):
    p = design.state_prob
    zbar = np.array([p * d1 + (1 - p) * d2, p * d1])
    cf = closed_form_sigma(design)
    expect = n * zbar @ np.linalg.solve(cf.matrix, zbar)
    got = closed_form_wald(d1, d2, n, design)
    assert got == pytest.approx(expect, rel=1e-9, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, -0.01), st.floats(0.05, 0.95), st.floats(0.1, 5),
       st.floats(-1, 1), st.floats(-1, 1), st.integers(1, 5000))
def test_closed_form_wald_without_state2_effect(a, p, s2, d1, d2, n):
    design = TwoStateDesign(a, 0.0, p, s2)
    special = p * n * d1**2 / (s2 + (1 - p) * a * a) + (1 - p) * n * d2**2 / s2
    assert closed_form_wald(d1, d2, n, design) == pytest.approx(special, rel=1e-12, abs=1e-15)
    assert closed_form_terms(d1, d2, design)[1] == 0


@settings(max_examples=300, deadline=None)
@given(designs, st.floats(-1, 1).filter(lambda x: abs(x) > 1e-6), st.floats(-1, 1),
       st.integers(1, 5000))
def test_wald_below_statewise_bound(design, d1, d2, n):
    _, E, F = closed_form_terms(d1, d2, design)
    bound = design.state_prob * n * d1**2 / design.sigma2 + n * (E + F)
    assert closed_form_wald(d1, d2, n, design) < bound


def test_region_grid():
    design = TwoStateDesign(-0.3, 0.0, 0.5, 2.0)
    grid = rejection_region_grid(design, 500, 0.05, (-0.5, 0.5), (-0.5, 0.5), 101)
    i0 = 50
    assert grid.d_bar1[i0] == pytest.approx(0) and grid.d_bar2[i0] == pytest.approx(0)
    assert grid.codes()[i0, i0] == 0
    # Wald region is symmetric under reflection through the origin
    assert np.array_equal(grid.wald_rejects, grid.wald_rejects[::-1, ::-1])
    with pytest.raises(ValueError):
        rejection_region_grid(design, 500, resolution=1)


def test_region_power_gap_on_state1_axis():
    design = TwoStateDesign(-0.3, 0.0, 0.5, 2.0)
    n, p = 500, 0.5
    c = normal_quantile(0.975)
    # state-1 t statistic squared just above the normal critical value
    d1 = -np.sqrt(1.05 * c**2 * design.sigma2 / (p * n))
    grid = rejection_region_grid(design, n, 0.05, (d1, 0.1), (0.0, 0.1), 2)
    assert grid.t1_rejects[0, 0] and not grid.t2_rejects[0, 0]
    assert not grid.wald_rejects[0, 0]
    assert closed_form_wald(d1, 0.0, n, design) < chi2_quantile(0.05, 2)
