"""
Wald-type conditional predictive ability test, the sign-based selection
rule applied after it, statewise t-tests, and closed-form algebra for the
two-state, two-method case.

Test functions are ``h_t = (1, 1{S_t = s_1}, ..., 1{S_t = s_(d-1)})``: the
last state of the alphabet is the omitted category. The instrumented
differential is ``z_t = h_t (x) d_t``.
"""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bootstrap import BootstrapPlan, bootstrap_means, gen_block_indices, resolve_block_len
from .core import InsufficientDataError, LossPanel, StateSeries, partition_by_state
from .statsutil import chi2_upper_tail, normal_cdf

__all__ = [
    "ClosedFormCov",
    "CovEstimatorSpec",
    "DfcSelection",
    "InstrumentSeries",
    "NotPositiveDefiniteError",
    "StatewiseTTest",
    "TwoStateDesign",
    "WaldOutcome",
    "closed_form_sigma",
    "closed_form_terms",
    "closed_form_wald",
    "covariance",
    "dfc_select",
    "dm_test",
    "instrument",
    "relative_to_baseline",
    "statewise_t_test",
    "wald_test",
]


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    def __init__(self, min_eigenvalue: float) -> None:
        super().__init__(
            f"covariance estimate is not positive definite after ridge repair "
            f"(minimum eigenvalue {min_eigenvalue:.3g})"
        )
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True, eq=False)
class InstrumentSeries:
    """n by q matrix of instrumented loss differentials."""

    z: np.ndarray
    alphabet: tuple[Hashable, ...]
    k: int = 1

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def q(self) -> int:
        return self.z.shape[1]


def relative_to_baseline(panel: LossPanel, baseline: Hashable) -> np.ndarray:
    """Loss differences ``L_baseline - L_j`` against every other method (n by m-1)."""
    b = panel.method_ids.index(baseline)
    others = [j for j in range(panel.m) if j != b]
    return panel.losses[:, [b]] - panel.losses[:, others]


def instrument(d: np.ndarray, states: StateSeries) -> InstrumentSeries:
    """
    Kronecker product of the test functions with the loss differential(s).

    ``d`` is a length-n vector (pairwise comparison) or an n by k matrix of
    differentials against a baseline. With a single state the result is
    ``d`` itself.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    n, k = d.shape
    if len(states) != n:
        raise ValueError(f"differential has length {n}, state series {len(states)}")
    codes = states.codes()
    h = np.empty((n, states.d))
    h[:, 0] = 1.0
    for j in range(states.d - 1):
        h[:, j + 1] = codes == j
    z = (h[:, :, None] * d[:, None, :]).reshape(n, -1)
    return InstrumentSeries(z, states.alphabet, k)


@dataclass(frozen=True)
class CovEstimatorSpec:
    """
    Parameters
    ----------
    kind : {"sample", "truncated_hac"}
        Contemporaneous covariance only, or with autocovariances up to
        ``lag`` added at unit weight.
    lag : int
        Truncation lag of the HAC estimator.
    centered : bool
        Demean ``z`` before forming moments. ``False`` gives the raw second
        moment, which imposes the zero-mean null.
    """

    kind: Literal["sample", "truncated_hac"] = "sample"
    lag: int = 0
    centered: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("sample", "truncated_hac"):
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if self.lag < 0:
            raise ValueError("lag must be nonnegative")


def _is_pd(eig: np.ndarray) -> bool:
    return eig[-1] > 0 and eig[0] > 1e-14 * eig[-1]


def covariance(z: InstrumentSeries | np.ndarray, spec: CovEstimatorSpec = CovEstimatorSpec()) -> np.ndarray:
    """
    Long-run covariance estimate of ``z``.

    ``Gamma_0 + sum_{k=1..lag} (Gamma_k + Gamma_k')`` for the truncated
    kernel. If the estimate is not positive definite a ridge of
    ``1e-8 * trace / q`` is added once; failing that, raises
    :class:`NotPositiveDefiniteError`.
    """
    x = z.z if isinstance(z, InstrumentSeries) else np.asarray(z, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, q = x.shape
    if n <= q:
        raise InsufficientDataError(f"need n > q, got n={n}, q={q}")
    if spec.kind == "truncated_hac" and spec.lag >= n:
        raise ValueError(f"HAC lag {spec.lag} must be smaller than n={n}")
    e = x - x.mean(axis=0) if spec.centered else x
    s = e.T @ e / n
    if spec.kind == "truncated_hac":
        for k in range(1, spec.lag + 1):
            g = e[k:].T @ e[:-k] / n
            s += g + g.T
    s = 0.5 * (s + s.T)
    eig = np.linalg.eigvalsh(s)
    if _is_pd(eig):
        return s
    s = s + 1e-8 * np.trace(s) / q * np.eye(q)
    eig = np.linalg.eigvalsh(s)
    if not _is_pd(eig):
        raise NotPositiveDefiniteError(float(eig[0]))
    return s


@dataclass(frozen=True)
class WaldOutcome:
    statistic: float
    df: int
    p_value: float

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha


def wald_test(z: InstrumentSeries | np.ndarray, spec: CovEstimatorSpec = CovEstimatorSpec()) -> WaldOutcome:
    """``T = n zbar' S^-1 zbar`` against the chi-square with q degrees of freedom."""
    x = z.z if isinstance(z, InstrumentSeries) else np.asarray(z, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    s = covariance(x, spec)
    n, q = x.shape
    zbar = x.mean(axis=0)
    stat = float(n * zbar @ np.linalg.solve(s, zbar))
    stat = max(stat, 0.0)
    return WaldOutcome(stat, q, float(chi2_upper_tail(stat, q)))


def dm_test(d: np.ndarray, spec: CovEstimatorSpec = CovEstimatorSpec()) -> tuple[float, float]:
    """Unconditional equal-predictive-ability t statistic and two-sided normal p-value."""
    d = np.asarray(d, dtype=float)
    s = covariance(d[:, None], spec)
    t = float(d.mean() / np.sqrt(s[0, 0] / d.size))
    return t, float(2.0 * normal_cdf(-abs(t)))


@dataclass(frozen=True)
class StatewiseTTest:
    state: Hashable
    t: float
    p_value: float
    n: int
    mean: float
    variance: float

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha


def statewise_t_test(
    d: np.ndarray,
    states: StateSeries,
    target: Hashable,
    *,
    variance: Literal["iid", "bootstrap"] = "iid",
    plan: BootstrapPlan | None = None,
) -> StatewiseTTest:
    """
    Two-sided test of a zero mean differential in one state.

    The variance of the conditional mean is ``s**2 / n_l`` by default, or a
    circular block bootstrap estimate with ``variance="bootstrap"``.
    """
    d = np.asarray(d, dtype=float)
    if len(states) != d.size:
        raise ValueError(f"differential has length {d.size}, state series {len(states)}")
    if target not in states.alphabet:
        raise ValueError(f"unknown state {target!r}")
    x = d[states.codes() == states.alphabet.index(target)]
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"state {target!r} has {n} observations")
    mean = float(x.mean())
    if variance == "iid":
        var = float(x.var(ddof=1) / n)
    elif variance == "bootstrap":
        plan = plan or BootstrapPlan()
        p, _ = resolve_block_len(n, plan.block_len)
        idx = gen_block_indices(n, BootstrapPlan(plan.B, p, plan.stream))
        var = float(np.mean(bootstrap_means(x, idx).centered_means[:, 0] ** 2))
    else:
        raise ValueError(f"unknown variance estimator {variance!r}")
    if not var > 0:
        raise InsufficientDataError(f"state {target!r} has zero variance")
    t = mean / np.sqrt(var)
    return StatewiseTTest(target, float(t), float(2.0 * normal_cdf(-abs(t))), n, mean, var)


@dataclass(frozen=True)
class DfcSelection:
    """
    Per-state retained methods after the Wald test. ``ties`` lists states
    where the conditional mean differential is exactly zero or undefined.
    """

    selected: dict[Hashable, tuple[Hashable, ...]]
    wald_rejects: bool
    conditional_means: dict[Hashable, float]
    ties: tuple[Hashable, ...] = ()


def dfc_select(
    d: np.ndarray,
    states: StateSeries,
    wald: WaldOutcome,
    alpha: float = 0.05,
    method_ids: Sequence[Hashable] = ("1", "2"),
) -> DfcSelection:
    """
    Keep both methods everywhere unless the Wald test rejects; otherwise keep,
    in each state, the method with the smaller conditional average loss
    (``d = L_1 - L_2``, so a negative mean selects method 1).
    """
    d = np.asarray(d, dtype=float)
    first, second = tuple(method_ids)
    part = partition_by_state(d.size, states)
    rejects = wald.p_value < alpha
    selected: dict[Hashable, tuple[Hashable, ...]] = {}
    means: dict[Hashable, float] = {}
    ties = []
    for s in states.alphabet:
        idx = part.index_sets[s]
        mu = float(d[idx].mean()) if idx.size else float("nan")
        means[s] = mu
        if not rejects:
            selected[s] = (first, second)
        elif mu < 0:
            selected[s] = (first,)
        elif mu > 0:
            selected[s] = (second,)
        else:
            selected[s] = (first, second)
            ties.append(s)
    return DfcSelection(selected, rejects, means, tuple(ties))


@dataclass(frozen=True)
class TwoStateDesign:
    """
    Two-state normal differential: mean ``delta1`` in state 1 (probability
    ``state_prob``), ``delta2 = -v * delta1`` in state 2, common variance
    ``sigma2``.
    """

    delta1: float
    v: float
    state_prob: float
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        if not self.delta1 < 0:
            raise ValueError("delta1 must be negative")
        if not 0 <= self.v <= 1:
            raise ValueError("v must lie in [0, 1]")
        if not 0 < self.state_prob < 1:
            raise ValueError("state_prob must lie in (0, 1)")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def delta2(self) -> float:
        return -self.v * self.delta1


@dataclass(frozen=True)
class ClosedFormCov:
    sigma11: float
    sigma12: float
    sigma22: float
    det: float
    inverse: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.sigma11, self.sigma12], [self.sigma12, self.sigma22]])


def closed_form_sigma(design: TwoStateDesign) -> ClosedFormCov:
    """Exact covariance of ``(D_t, D_t 1{S_t = 1})`` and its inverse."""
    p, s2 = design.state_prob, design.sigma2
    a, b = design.delta1, design.delta2
    q = p * (1 - p)
    s11 = s2 + q * (a - b) ** 2
    s12 = p * s2 + q * (a * a - a * b)
    s22 = p * s2 + q * a * a
    det = (1 - p) * p * s2 * ((1 - p) * a * a + p * b * b + s2)
    if not det > 0:
        raise ValueError(f"degenerate design, det = {det}")
    inv = np.array([[s22, -s12], [-s12, s11]]) / det
    return ClosedFormCov(s11, s12, s22, det, inv)


def closed_form_terms(
    d_bar1: float, d_bar2: float, design: TwoStateDesign
) -> tuple[float, float, float]:
    """
    The three summands ``(D, E, F)`` of the Wald statistic per observation,
    using expected state counts and the true covariance.
    """
    p, s2 = design.state_prob, design.sigma2
    a, b = design.delta1, design.delta2
    k = (1 - p) * a * a + p * b * b + s2
    D = p * p * d_bar1**2 * (s2 + p * b * b) / (p * s2 * k)
    E = 2 * p * (1 - p) * d_bar1 * d_bar2 * a * b / (s2 * k)
    F = (1 - p) ** 2 * d_bar2**2 * (s2 + (1 - p) * a * a) / ((1 - p) * s2 * k)
    return D, E, F


def closed_form_wald(d_bar1: float, d_bar2: float, n: float, design: TwoStateDesign) -> float:
    D, E, F = closed_form_terms(d_bar1, d_bar2, design)
    return n * (D + E + F)
