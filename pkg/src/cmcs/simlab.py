"""
Monte Carlo designs for comparing conditional and unconditional tests.

* ``MultiMethodDgp``: m methods with equally spaced conditional mean losses
  whose ranking flips between two states (power of MCS vs CMCS).
* ``TwoMethodDgp``: two methods, method 1 better in state 1 by ``2 mu``,
  method 2 better in state 2 by ``2 v mu`` (statewise t vs Wald).

Replication ``r`` of every study draws from substream ``r`` of the master
seed, so results do not depend on the number of workers and every cell of
a grid sees the same underlying noise.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .bootstrap import BootstrapPlan
from .core import InsufficientDataError, LossPanel, StateSeries
from .cpa import (
    CovEstimatorSpec,
    TwoStateDesign,
    closed_form_wald,
    dfc_select,
    instrument,
    statewise_t_test,
    wald_test,
)
from .mcs import McsConfig, cmcs_run, mcs_run
from .statsutil import RandomStream, chi2_quantile, normal_quantile

__all__ = [
    "FIG1_PRESET",
    "REFERENCE_T1_BY_BLOCK",
    "REFERENCE_RATES",
    "REJECTION_PRESETS",
    "TABLE_COV",
    "TABLE_NOISE_SD",
    "MultiMethodDgp",
    "RegionGrid",
    "StudyResult",
    "TwoMethodDgp",
    "gen_multi",
    "gen_two",
    "power_study",
    "rejection_region_grid",
    "rejection_study",
    "run_study_config",
]

STATE_ALPHABET = (1, 2)


@dataclass(frozen=True)
class MultiMethodDgp:
    """
    Conditional mean of method i is ``-mu (1 - c_i)`` in state 1 and
    ``+mu (1 - c_i)`` in state 2 with ``c_i = 2 (i - 1) / (m - 1)``; noise is
    iid standard normal.
    """

    m: int = 10
    mu: float = 0.0
    state_prob: float = 0.5
    n: int = 500

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if not 0 < self.state_prob < 1:
            raise ValueError("state_prob must lie in (0, 1)")

    @property
    def spacing(self) -> np.ndarray:
        return 2.0 * np.arange(self.m) / (self.m - 1)

    def conditional_means(self) -> np.ndarray:
        """2 by m matrix: row 0 is state 1, row 1 is state 2."""
        base = self.mu * (1.0 - self.spacing)
        return np.vstack([-base, base])


@dataclass(frozen=True)
class TwoMethodDgp:
    """
    Mean losses ``(-mu, mu)`` in state 1 and ``v (mu, -mu)`` in state 2, plus
    independent normal noise with standard deviation ``noise_sd`` per method.
    The differential ``L_1 - L_2`` has means ``-2 mu`` and ``2 v mu`` and
    variance ``2 noise_sd**2``.
    """

    mu: float
    v: float = 0.0
    state_prob: float = 0.5
    n: int = 500
    noise_sd: float = 1.0

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if not 0 <= self.v <= 1:
            raise ValueError("v must lie in [0, 1]")
        if not 0 < self.state_prob < 1:
            raise ValueError("state_prob must lie in (0, 1)")
        if not self.noise_sd > 0:
            raise ValueError("noise_sd must be positive")

    @classmethod
    def from_delta(cls, delta1: float, v: float = 0.0, state_prob: float = 0.5,
                   n: int = 500, noise_sd: float = 1.0) -> TwoMethodDgp:
        return cls(-delta1 / 2.0, v, state_prob, n, noise_sd)

    @property
    def delta1(self) -> float:
        return -2.0 * self.mu

    @property
    def delta2(self) -> float:
        return 2.0 * self.v * self.mu

    def conditional_means(self) -> np.ndarray:
        return np.array([[-self.mu, self.mu], [self.v * self.mu, -self.v * self.mu]])


def _draw(means: np.ndarray, p: float, n: int, noise_sd: float,
          stream: RandomStream | np.random.Generator) -> tuple[LossPanel, StateSeries]:
    rng = stream if isinstance(stream, np.random.Generator) else stream.generator()
    codes = (rng.random(n) >= p).astype(np.intp)
    eps = rng.standard_normal((n, means.shape[1]))
    losses = means[codes] + noise_sd * eps
    return LossPanel(losses), StateSeries.from_codes(codes, STATE_ALPHABET)


def gen_multi(dgp: MultiMethodDgp, stream: RandomStream | np.random.Generator
              ) -> tuple[LossPanel, StateSeries]:
    return _draw(dgp.conditional_means(), dgp.state_prob, dgp.n, 1.0, stream)


def gen_two(dgp: TwoMethodDgp, stream: RandomStream | np.random.Generator
            ) -> tuple[LossPanel, StateSeries]:
    return _draw(dgp.conditional_means(), dgp.state_prob, dgp.n, dgp.noise_sd, stream)


# --------------------------------------------------------------------------
# study bookkeeping

@dataclass
class StudyResult:
    """
    ``cells`` maps ``(point, statistic)`` to ``(estimate, mc_se)``; ``point``
    is a tuple of ``(name, value)`` pairs.
    """

    config: dict[str, Any]
    cells: dict[tuple[tuple[tuple[str, Any], ...], str], tuple[float, float]]
    reps: int

    def get(self, statistic: str, **point: Any) -> tuple[float, float]:
        for (pt, stat), val in self.cells.items():
            if stat == statistic and all(
                math.isclose(dict(pt)[k], v) if isinstance(v, float) else dict(pt)[k] == v
                for k, v in point.items()
            ):
                return val
        raise KeyError((statistic, point))

    def estimate(self, statistic: str, **point: Any) -> float:
        return self.get(statistic, **point)[0]

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for (pt, stat), (est, se) in self.cells.items():
            out.append({**dict(pt), "statistic": stat, "estimate": est,
                        "mc_se": se, "reps": self.reps})
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()


def _rate(x: np.ndarray) -> tuple[float, float]:
    r = float(np.mean(x))
    return r, math.sqrt(r * (1.0 - r) / x.size)


def _average(x: np.ndarray) -> tuple[float, float]:
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return float(np.mean(x)), sd / math.sqrt(x.size)


def _map_reps(fn: Callable[[int], Any], reps: int, workers: int) -> list[Any]:
    """Apply ``fn`` to ``0..reps-1``; result order is replication order."""
    if workers <= 1:
        return [fn(r) for r in range(reps)]
    chunk = max(1, reps // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(reps), chunksize=chunk))


# --------------------------------------------------------------------------
# power of MCS vs CMCS

@dataclass(frozen=True)
class _PowerRep:
    dgp: MultiMethodDgp
    cfg: McsConfig
    seed: int

    def __call__(self, r: int) -> tuple[int, int, int]:
        base = RandomStream(self.seed).spawn(r)
        panel, states = gen_multi(self.dgp, base.spawn(0))
        boot = self.cfg.plan
        uncond = McsConfig(self.cfg.alpha, BootstrapPlan(boot.B, boot.block_len, base.spawn(1)),
                           self.cfg.min_state_obs)
        cond = McsConfig(self.cfg.alpha, BootstrapPlan(boot.B, boot.block_len, base.spawn(2)),
                         self.cfg.min_state_obs)
        u = mcs_run(panel, uncond)
        c = cmcs_run(panel, states, cond)
        return u.size, c[1].size, c[2].size


def power_study(
    mus: Sequence[float],
    ns: Sequence[int] = (1000,),
    *,
    m: int = 10,
    state_prob: float = 0.5,
    cfg: McsConfig | None = None,
    reps: int = 500,
    seed: int = 0,
    workers: int = 1,
) -> StudyResult:
    """
    Average confidence-set size of the unconditional MCS and of the CMCS in
    each state, over a grid of ``mu`` and ``n``.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    cfg = cfg or McsConfig(0.05, BootstrapPlan(B=500))
    cells = {}
    for n in ns:
        for mu in mus:
            dgp = MultiMethodDgp(m, float(mu), state_prob, int(n))
            sizes = np.array(_map_reps(_PowerRep(dgp, cfg, seed), reps, workers))
            pt = (("m", m), ("n", int(n)), ("mu", float(mu)), ("p", state_prob))
            cells[(pt, "mcs_size")] = _average(sizes[:, 0])
            cells[(pt, "cmcs_size_state1")] = _average(sizes[:, 1])
            cells[(pt, "cmcs_size_state2")] = _average(sizes[:, 2])
    config = {
        "kind": "power", "mus": list(map(float, mus)), "ns": list(map(int, ns)),
        "m": m, "state_prob": state_prob, "alpha": cfg.alpha, "B": cfg.plan.B,
        "block_len": cfg.plan.block_len, "min_state_obs": cfg.min_state_obs,
        "reps": reps, "seed": seed,
    }
    return StudyResult(config, cells, reps)


# --------------------------------------------------------------------------
# statewise t vs Wald rejection rates

REJECTION_STATS = ("t1_rejects", "t2_rejects", "wald_rejects", "wald_rejects_dbar2_neg")


@dataclass(frozen=True)
class _RejectionRep:
    dgp: TwoMethodDgp
    alpha: float
    cov: CovEstimatorSpec
    seed: int

    def __call__(self, r: int) -> tuple[bool, bool, bool, bool]:
        panel, states = gen_two(self.dgp, RandomStream(self.seed).spawn(r))
        d = panel.losses[:, 0] - panel.losses[:, 1]
        try:
            t1 = statewise_t_test(d, states, 1).p_value < self.alpha
            t2 = statewise_t_test(d, states, 2).p_value < self.alpha
        except InsufficientDataError:
            return False, False, False, False
        wald = wald_test(instrument(d, states), self.cov)
        sel = dfc_select(d, states, wald, self.alpha)
        # method 2 dropped in state 2
        wrong = sel.wald_rejects and sel.selected[2] == ("1",)
        return t1, t2, sel.wald_rejects, wrong


def rejection_study(
    points: Iterable[tuple[float, float, float]],
    *,
    n: int = 500,
    alpha: float = 0.05,
    reps: int = 10000,
    noise_sd: float = 1.0,
    cov: CovEstimatorSpec = CovEstimatorSpec(),
    seed: int = 0,
    workers: int = 1,
) -> StudyResult:
    """
    Rejection rates of the two statewise t-tests and the Wald test, and the
    rate at which the Wald test rejects while the state-2 mean differential
    is negative (method 2 wrongly dropped), for each ``(delta1, v, p)``.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    points = [tuple(map(float, pt)) for pt in points]
    cells = {}
    for delta1, v, p in points:
        dgp = TwoMethodDgp.from_delta(delta1, v, p, n, noise_sd)
        res = np.array(_map_reps(_RejectionRep(dgp, alpha, cov, seed), reps, workers))
        pt = (("delta1", delta1), ("v", v), ("p", p), ("n", n))
        for k, name in enumerate(REJECTION_STATS):
            cells[(pt, name)] = _rate(res[:, k])
    config = {
        "kind": "rejection", "points": [list(pt) for pt in points], "n": n,
        "alpha": alpha, "reps": reps, "noise_sd": noise_sd, "cov": asdict(cov),
        "seed": seed,
    }
    return StudyResult(config, cells, reps)


# --------------------------------------------------------------------------
# rejection regions with the true covariance

@dataclass(frozen=True, eq=False)
class RegionGrid:
    """
    Rejection indicators on a grid of conditional mean differentials;
    arrays are indexed ``[i2, i1]`` (rows follow ``d_bar2``).
    """

    d_bar1: np.ndarray
    d_bar2: np.ndarray
    t1_rejects: np.ndarray
    t2_rejects: np.ndarray
    wald_rejects: np.ndarray
    design: TwoStateDesign
    n: float
    alpha: float

    def codes(self) -> np.ndarray:
        """Bit code per cell: 1 = state-1 t, 2 = state-2 t, 4 = Wald."""
        return (self.t1_rejects.astype(int) + 2 * self.t2_rejects
                + 4 * self.wald_rejects)

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for i2, y in enumerate(self.d_bar2):
            for i1, x in enumerate(self.d_bar1):
                out.append({
                    "d_bar1": float(x), "d_bar2": float(y),
                    "t1_rejects": bool(self.t1_rejects[i2, i1]),
                    "t2_rejects": bool(self.t2_rejects[i2, i1]),
                    "wald_rejects": bool(self.wald_rejects[i2, i1]),
                })
        return out


def rejection_region_grid(
    design: TwoStateDesign,
    n: float = 500,
    alpha: float = 0.05,
    d1_bounds: tuple[float, float] = (-0.6, 0.6),
    d2_bounds: tuple[float, float] = (-0.6, 0.6),
    resolution: int | tuple[int, int] = 121,
) -> RegionGrid:
    """
    Which tests reject at each ``(d_bar1, d_bar2)`` when the state counts are
    their expected values ``p n``, ``(1 - p) n`` and the covariance is known.
    """
    r1, r2 = (resolution, resolution) if isinstance(resolution, int) else resolution
    if r1 < 2 or r2 < 2:
        raise ValueError("resolution must be at least 2 per axis")
    x = np.linspace(*d1_bounds, r1)
    y = np.linspace(*d2_bounds, r2)
    X, Y = np.meshgrid(x, y)
    p, s = design.state_prob, math.sqrt(design.sigma2)
    n1, n2 = p * n, (1 - p) * n
    c = normal_quantile(1 - alpha / 2)
    t1 = np.abs(X) * math.sqrt(n1) / s > c
    t2 = np.abs(Y) * math.sqrt(n2) / s > c
    wald = closed_form_wald(X, Y, n, design) > chi2_quantile(alpha, 2)
    return RegionGrid(x, y, t1, t2, wald, design, float(n), alpha)


# --------------------------------------------------------------------------
# presets

DELTAS = (-0.1, -0.2, -0.3, -0.4, -0.5, -0.6)
V_GRID = (0.05, 0.1, 0.25, 0.5, 0.75, 1.0)

# Tables are reproduced with per-method noise sd sqrt(2) (differential sd 2).
TABLE_NOISE_SD = math.sqrt(2.0)

# reported rejection rates; v = 0 tables give (t1, t2, wald),
# v > 0 tables give (t2, wald, wald & dbar2 < 0)
REFERENCE_RATES: dict[int, dict[Any, tuple[float, ...]]] = {
    1: {
        -0.1: (0.126, 0.050, 0.102), -0.2: (0.354, 0.054, 0.282),
        -0.3: (0.657, 0.050, 0.550), -0.4: (0.880, 0.052, 0.797),
        -0.5: (0.976, 0.054, 0.945), -0.6: (0.996, 0.054, 0.990),
    },
    3: {
        -0.1: (0.086, 0.053, 0.069), -0.2: (0.178, 0.054, 0.133),
        -0.3: (0.329, 0.052, 0.238), -0.4: (0.523, 0.050, 0.395),
        -0.5: (0.695, 0.049, 0.568), -0.6: (0.845, 0.049, 0.743),
    },
    2: {
        (-0.1, 0.05): (0.054, 0.100, 0.049), (-0.1, 0.1): (0.052, 0.099, 0.046),
        (-0.1, 0.25): (0.057, 0.107, 0.038), (-0.1, 0.5): (0.071, 0.114, 0.029),
        (-0.1, 0.75): (0.095, 0.132, 0.023), (-0.1, 1.0): (0.120, 0.149, 0.013),
        (-0.2, 0.05): (0.054, 0.268, 0.123), (-0.2, 0.1): (0.053, 0.276, 0.115),
        (-0.2, 0.25): (0.071, 0.293, 0.088), (-0.2, 0.5): (0.125, 0.334, 0.051),
        (-0.2, 0.75): (0.222, 0.402, 0.028), (-0.2, 1.0): (0.356, 0.507, 0.013),
        (-0.3, 0.05): (0.056, 0.547, 0.248), (-0.3, 0.1): (0.055, 0.553, 0.217),
        (-0.3, 0.25): (0.096, 0.572, 0.141), (-0.3, 0.5): (0.233, 0.661, 0.061),
        (-0.3, 0.75): (0.435, 0.761, 0.019), (-0.3, 1.0): (0.663, 0.864, 0.005),
        (-0.4, 0.05): (0.053, 0.810, 0.342), (-0.4, 0.1): (0.062, 0.812, 0.304),
        (-0.4, 0.25): (0.129, 0.835, 0.165), (-0.4, 0.5): (0.351, 0.891, 0.040),
        (-0.4, 0.75): (0.660, 0.951, 0.008), (-0.4, 1.0): (0.888, 0.987, 0.001),
        (-0.5, 0.05): (0.056, 0.946, 0.396), (-0.5, 0.1): (0.071, 0.950, 0.328),
        (-0.5, 0.25): (0.174, 0.958, 0.147), (-0.5, 0.5): (0.506, 0.981, 0.024),
        (-0.5, 0.75): (0.841, 0.995, 0.002), (-0.5, 1.0): (0.975, 1.000, 0.000),
        (-0.6, 0.05): (0.059, 0.992, 0.397), (-0.6, 0.1): (0.080, 0.990, 0.316),
        (-0.6, 0.25): (0.215, 0.994, 0.120), (-0.6, 0.5): (0.654, 0.998, 0.009),
        (-0.6, 0.75): (0.943, 1.000, 0.000), (-0.6, 1.0): (0.997, 1.000, 0.000),
    },
    4: {
        (-0.1, 0.05): (0.056, 0.069, 0.033), (-0.1, 0.1): (0.052, 0.069, 0.027),
        (-0.1, 0.25): (0.058, 0.075, 0.024), (-0.1, 0.5): (0.084, 0.093, 0.017),
        (-0.1, 0.75): (0.118, 0.116, 0.009), (-0.1, 1.0): (0.171, 0.161, 0.007),
        (-0.2, 0.05): (0.050, 0.122, 0.054), (-0.2, 0.1): (0.061, 0.142, 0.053),
        (-0.2, 0.25): (0.081, 0.151, 0.032), (-0.2, 0.5): (0.172, 0.227, 0.015),
        (-0.2, 0.75): (0.329, 0.352, 0.006), (-0.2, 1.0): (0.518, 0.499, 0.002),
        (-0.3, 0.05): (0.055, 0.240, 0.099), (-0.3, 0.1): (0.061, 0.248, 0.082),
        (-0.3, 0.25): (0.121, 0.298, 0.045), (-0.3, 0.5): (0.324, 0.457, 0.010),
        (-0.3, 0.75): (0.608, 0.671, 0.002), (-0.3, 1.0): (0.847, 0.860, 0.000),
        (-0.4, 0.05): (0.062, 0.397, 0.154), (-0.4, 0.1): (0.070, 0.415, 0.128),
        (-0.4, 0.25): (0.168, 0.498, 0.056), (-0.4, 0.5): (0.508, 0.705, 0.006),
        (-0.4, 0.75): (0.853, 0.905, 0.000), (-0.4, 1.0): (0.975, 0.983, 0.000),
        (-0.5, 0.05): (0.056, 0.575, 0.222), (-0.5, 0.1): (0.084, 0.594, 0.171),
        (-0.5, 0.25): (0.238, 0.690, 0.058), (-0.5, 0.5): (0.701, 0.890, 0.003),
        (-0.5, 0.75): (0.963, 0.986, 0.000), (-0.5, 1.0): (0.999, 0.999, 0.000),
        (-0.6, 0.05): (0.059, 0.741, 0.279), (-0.6, 0.1): (0.091, 0.760, 0.194),
        (-0.6, 0.25): (0.325, 0.845, 0.047), (-0.6, 0.5): (0.845, 0.972, 0.002),
        (-0.6, 0.75): (0.994, 0.999, 0.000), (-0.6, 1.0): (1.000, 1.000, 0.000),
    },
}

# state-1 t rejection rate printed once per delta1 block of the v > 0 tables
REFERENCE_T1_BY_BLOCK: dict[int, dict[float, float]] = {
    2: {-0.1: 0.126, -0.2: 0.351, -0.3: 0.659, -0.4: 0.882, -0.5: 0.975, -0.6: 0.997},
    4: {-0.1: 0.086, -0.2: 0.175, -0.3: 0.329, -0.4: 0.517, -0.5: 0.701, -0.6: 0.842},
}

TABLE_STATE_PROB = {1: 0.5, 2: 0.5, 3: 0.2, 4: 0.2}

# the Wald benchmark uses the raw second moment of z (zero mean imposed)
TABLE_COV = CovEstimatorSpec("sample", 0, centered=False)


def _table_points(table: int) -> list[tuple[float, float, float]]:
    p = TABLE_STATE_PROB[table]
    if table in (1, 3):
        return [(d, 0.0, p) for d in DELTAS]
    return [(d, v, p) for d in DELTAS for v in V_GRID]


REJECTION_PRESETS: dict[str, dict[str, Any]] = {
    f"table{k}": {"points": _table_points(k), "n": 500, "alpha": 0.05,
                  "reps": 10000, "noise_sd": TABLE_NOISE_SD}
    for k in (1, 2, 3, 4)
}

FIG1_PRESET: dict[str, Any] = {
    "mus": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], "ns": [150, 500, 1000], "m": 10,
    "state_prob": 0.5, "alpha": 0.05, "B": 500, "reps": 5000,
}


def table_layout(result: StudyResult, table: int) -> str:
    """Plain-text table in the row and column layout of the reference rates."""
    lines = []
    if table in (1, 3):
        lines.append(f"{'delta1':>8} {'P(|T1|>c)':>10} {'P(|T2|>c)':>10} {'P(|Th|>c)':>10}")
        for d, _, p in _table_points(table):
            vals = [result.estimate(s, delta1=d, v=0.0, p=p) for s in REJECTION_STATS[:3]]
            lines.append(f"{d:8.1f} " + " ".join(f"{x:10.3f}" for x in vals))
    else:
        lines.append(f"{'delta1':>8} {'v':>6} {'P(|T2|>c)':>10} {'P(|Th|>c)':>10} "
                     f"{'P(Th & d2<0)':>13}")
        for d, v, p in _table_points(table):
            vals = [result.estimate(s, delta1=d, v=v, p=p) for s in REJECTION_STATS[1:]]
            lines.append(f"{d:8.1f} {v:6.2f} " + " ".join(f"{x:10.3f}" for x in vals[:2])
                         + f" {vals[2]:13.3f}")
    return "\n".join(lines)


def run_study_config(config: dict[str, Any], workers: int = 1) -> StudyResult:
    """
    Run a study described by a plain dictionary (as loaded from JSON/TOML).

    ``kind = "rejection"`` takes ``points`` (list of ``[delta1, v, p]``) or a
    ``preset`` name; ``kind = "power"`` takes ``mus``, ``ns`` and bootstrap
    settings. ``seed`` defaults to 0.
    """
    kind = config.get("kind")
    seed = int(config.get("seed", 0))
    if kind == "rejection":
        base = dict(REJECTION_PRESETS[config["preset"]]) if "preset" in config else {}
        base.update({k: v for k, v in config.items() if k not in ("kind", "preset")})
        cov = base.get("cov", TABLE_COV)
        if isinstance(cov, dict):
            cov = CovEstimatorSpec(**cov)
        return rejection_study(
            [tuple(p) for p in base["points"]], n=int(base.get("n", 500)),
            alpha=float(base.get("alpha", 0.05)), reps=int(base.get("reps", 10000)),
            noise_sd=float(base.get("noise_sd", TABLE_NOISE_SD)), cov=cov,
            seed=seed, workers=workers,
        )
    if kind == "power":
        base = {**FIG1_PRESET, **{k: v for k, v in config.items() if k != "kind"}}
        cfg = McsConfig(
            float(base["alpha"]),
            BootstrapPlan(int(base["B"]), base.get("block_len")),
            int(base.get("min_state_obs", 10)),
        )
        return power_study(
            base["mus"], base["ns"], m=int(base["m"]),
            state_prob=float(base["state_prob"]), cfg=cfg, reps=int(base["reps"]),
            seed=seed, workers=workers,
        )
    raise ValueError(f"unknown study kind {kind!r}")
