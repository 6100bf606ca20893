import numpy as np
import pytest

from cmcs.bootstrap import BootstrapPlan
from cmcs.core import LossPanel, StateSeries
from cmcs.mcs import DegenerateVarianceError, McsConfig, cmcs_run, mcs_run, tmax_statistic
from cmcs.simlab import TwoMethodDgp, gen_two
from cmcs.statsutil import RandomStream


def test_tmax_examples():
    t_max, j, t = tmax_statistic(np.zeros(2), np.ones(2))
    assert (t_max, j) == (0.0, 0)
    t_max, j, t = tmax_statistic(np.array([0.2, -0.2]), np.array([0.01, 0.01]))
    np.testing.assert_allclose(t, [2, -2])
    assert t_max == pytest.approx(2) and j == 0
    t_max, j, t = tmax_statistic(np.zeros(3), np.zeros(3))
    assert t_max == 0 and np.all(t == 0)


def test_tmax_ties_go_to_lowest_index():
    _, j, _ = tmax_statistic(np.array([-1.0, 1.0, 1.0]), np.ones(3))
    assert j == 1


def test_tmax_degenerate_variance():
    with pytest.raises(DegenerateVarianceError):
        tmax_statistic(np.array([0.5, -0.5]), np.zeros(2))
    with pytest.raises(ValueError):
        tmax_statistic(np.zeros(1), np.ones(1))


def test_clear_loser_is_eliminated(rng):
    noise = rng.normal(0, 0.1, 500)
    panel = LossPanel(np.column_stack([noise, 1 + noise + rng.normal(0, 0.1, 500)]))
    res = mcs_run(panel, McsConfig(0.05, BootstrapPlan(500)))
    assert res.surviving == ("1",)
    assert res.steps[0].eliminated == "2"
    assert res.steps[0].p_value < 0.01


def test_identical_columns_survive(rng):
    x = rng.normal(size=200)
    res = mcs_run(LossPanel(np.column_stack([x, x, x])), McsConfig(0.05, BootstrapPlan(200)))
    assert res.surviving == ("1", "2", "3")
    assert res.steps[0].t_max == 0
    assert res.steps[0].p_value >= 0.05


def test_trace_and_p_values(rng):
    means = np.array([0.0, 0.05, 0.3, 0.6, 0.9])
    x = rng.normal(size=(400, 5)) + means
    res = mcs_run(LossPanel(x), McsConfig(0.1, BootstrapPlan(500, stream=RandomStream(2))))
    assert set(res.surviving) | set(res.eliminated) == set(res.method_ids)
    assert not set(res.surviving) & set(res.eliminated)
    assert res.surviving
    p = [rec["p_mcs"] for rec in res.trace]
    assert p == sorted(p)
    steps = [s.p_value for s in res.steps if s.eliminated is not None]
    assert p == list(np.maximum.accumulate(steps))
    # replaying the argmax of stored t statistics reproduces the eliminations
    alive = list(res.method_ids)
    for s in res.steps:
        assert s.members == tuple(alive)
        top = s.members[int(np.argmax(s.t_stats))]
        assert top == s.argmax_method
        if s.eliminated is not None:
            alive.remove(top)
    assert tuple(alive) == res.surviving
    d = res.to_dict()
    assert set(d) >= {"state", "alpha", "block_len", "B", "seed", "surviving", "trace"}
    assert set(d["trace"][0]) == {"eliminated", "T_max", "p_step", "p_mcs"}


def test_determinism(rng):
    x = rng.normal(size=(300, 4)) + [0, 0.1, 0.2, 0.3]
    cfg = McsConfig(0.05, BootstrapPlan(300, stream=RandomStream(9)))
    a, b = mcs_run(LossPanel(x), cfg), mcs_run(LossPanel(x), cfg)
    assert a.to_dict() == b.to_dict()


def test_insufficient_data():
    res = mcs_run(LossPanel(np.zeros((5, 3))), McsConfig(min_state_obs=10))
    assert res.insufficient and res.surviving == ("1", "2", "3")
    assert "insufficient" in res.reason


def test_cmcs_with_one_state_equals_mcs(rng):
    x = rng.normal(size=(250, 4)) + [0, 0.1, 0.25, 0.4]
    panel = LossPanel(x)
    cfg = McsConfig(0.05, BootstrapPlan(300, stream=RandomStream(4)))
    cond = cmcs_run(panel, StateSeries(("s",) * 250), cfg)
    plain = mcs_run(panel, McsConfig(0.05, BootstrapPlan(300, stream=RandomStream(4).spawn(0))),
                    state="s")
    assert cond["s"].to_dict() == plain.to_dict()


def test_cmcs_reports_empty_state():
    panel = LossPanel(np.random.default_rng(0).normal(size=(50, 2)))
    out = cmcs_run(panel, StateSeries(("a",) * 50, ("a", "b")), McsConfig(0.05, BootstrapPlan(100)))
    assert out["b"].insufficient and out["b"].n == 0
    assert not out["a"].insufficient


def test_cmcs_separates_states_with_equal_unconditional_ability():
    hits = 0
    for r in range(20):
        dgp = TwoMethodDgp(0.3, 1.0, 0.5, 1000)
        panel, states = gen_two(dgp, RandomStream(31).spawn(r))
        cfg = McsConfig(0.05, BootstrapPlan(300, stream=RandomStream(32).spawn(r)))
        cond = cmcs_run(panel, states, cfg)
        hits += cond[1].surviving == ("1",) and cond[2].surviving == ("2",)
    assert hits >= 18
    uncond = mcs_run(panel, cfg)
    assert uncond.size == 2 or uncond.steps[0].p_value > 0.001
