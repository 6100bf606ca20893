"""
Sequential T_max testing with the max elimination rule, run on the full
sample (MCS) or separately on the losses of each state (conditional MCS).

One bootstrap index matrix is drawn per run; at every step the relative
losses and the bootstrap contrasts are recentred on the current method set,
which is a linear recombination of the stored centred bootstrap means.
"""

from __future__ import annotations

from collections.abc import Hashable
from dataclasses import dataclass, field

import numpy as np

from .bootstrap import (
    BootstrapEnsemble,
    BootstrapPlan,
    bootstrap_means,
    gen_block_indices,
    resolve_block_len,
)
from .core import (
    ConfidenceSetResult,
    EliminationStep,
    LossPanel,
    StateSeries,
    partition_by_state,
)
from .statsutil import RandomStream

__all__ = [
    "DegenerateVarianceError",
    "McsConfig",
    "cmcs_run",
    "mcs_run",
    "tmax_statistic",
]

_TINY = 1e-12


class DegenerateVarianceError(ValueError):
    """Zero variance estimate paired with a nonzero mean relative loss."""


@dataclass(frozen=True)
class McsConfig:
    """
    Parameters
    ----------
    alpha : float
        Level of each equivalence test.
    plan : BootstrapPlan
        Bootstrap replications, block length (``None`` = per-sample default)
        and random stream.
    min_state_obs : int
        Samples shorter than this are reported as insufficient data.
    """

    alpha: float = 0.05
    plan: BootstrapPlan = field(default_factory=BootstrapPlan)
    min_state_obs: int = 10

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.min_state_obs < 2:
            raise ValueError("min_state_obs must be at least 2")


def tmax_statistic(
    d_bar: np.ndarray, variances: np.ndarray
) -> tuple[float, int, np.ndarray]:
    """
    Standardised mean relative losses and their maximum.

    Returns ``(T_max, argmax, t_stats)``; ``argmax`` is a position in the
    input vectors, ties resolved to the lowest position. Pairs with variance
    and mean both below 1e-12 get a t statistic of 0.
    """
    d_bar = np.asarray(d_bar, dtype=float)
    variances = np.asarray(variances, dtype=float)
    if d_bar.shape != variances.shape or d_bar.ndim != 1 or d_bar.size < 2:
        raise ValueError("need two equal-length vectors with at least 2 entries")
    if np.any(variances < 0):
        raise ValueError("variances must be nonnegative")
    flat = variances < _TINY
    if np.any(flat & (np.abs(d_bar) >= _TINY)):
        i = int(np.flatnonzero(flat & (np.abs(d_bar) >= _TINY))[0])
        raise DegenerateVarianceError(
            f"variance {variances[i]:.3g} with mean relative loss {d_bar[i]:.3g} "
            f"at position {i}"
        )
    t = np.zeros_like(d_bar)
    ok = ~flat
    t[ok] = d_bar[ok] / np.sqrt(variances[ok])
    j = int(np.argmax(t))
    return float(t[j]), j, t


def _test_step(ens: BootstrapEnsemble) -> tuple[float, int, np.ndarray, float]:
    """One equivalence test on the full set held by ``ens``."""
    d_bar = ens.sample_means - ens.sample_means.mean()
    xi = ens.centered_means - ens.centered_means.mean(axis=1, keepdims=True)
    var = np.mean(xi**2, axis=0)
    t_max, j, t = tmax_statistic(d_bar, var)
    ok = var >= _TINY
    if not ok.any():
        # every method in the set is identical: the null holds by construction
        return t_max, j, t, 1.0
    scale = np.zeros_like(var)
    scale[ok] = 1.0 / np.sqrt(var[ok])
    t_boot_max = (xi * scale).max(axis=1)
    p = float(np.mean(t_max < t_boot_max))
    return t_max, j, t, p


def _insufficient(
    ids: tuple[Hashable, ...], n: int, cfg: McsConfig, state, reason: str
) -> ConfidenceSetResult:
    return ConfidenceSetResult(
        method_ids=ids,
        surviving=ids,
        steps=(),
        mcs_p_values={i: 1.0 for i in ids},
        alpha=cfg.alpha,
        state=state,
        n=n,
        B=cfg.plan.B,
        seed=cfg.plan.stream.seed,
        reason=reason,
    )


def mcs_run(
    panel: LossPanel,
    cfg: McsConfig = McsConfig(),
    *,
    state: Hashable | None = None,
) -> ConfidenceSetResult:
    """
    Method confidence set of ``panel`` at level ``1 - cfg.alpha``.

    Tests are repeated on the shrinking set until the first non-rejection.
    MCS p-values are running maxima of the step p-values; survivors get the
    p-value of the final (non-rejected) test, or 1 when a single method is
    left.
    """
    n = panel.n
    if n < cfg.min_state_obs:
        return _insufficient(
            panel.method_ids, n, cfg, state,
            f"insufficient data: n={n} < min_state_obs={cfg.min_state_obs}",
        )
    block_len, warn = resolve_block_len(n, cfg.plan.block_len)
    plan = BootstrapPlan(cfg.plan.B, block_len, cfg.plan.stream)
    ens = bootstrap_means(panel, gen_block_indices(n, plan))

    ids = panel.method_ids
    active = list(range(panel.m))
    steps: list[EliminationStep] = []
    p_mcs: dict[Hashable, float] = {}
    running = 0.0
    while len(active) > 1:
        t_max, j, t, p = _test_step(ens.subset(active))
        members = tuple(ids[k] for k in active)
        running = max(running, p)
        if p < cfg.alpha:
            out = ids[active[j]]
            steps.append(EliminationStep(members, t, t_max, out, p, out))
            p_mcs[out] = running
            del active[j]
        else:
            steps.append(EliminationStep(members, t, t_max, members[j], p, None))
            break
    final = running if steps and steps[-1].eliminated is None else 1.0
    for k in active:
        p_mcs[ids[k]] = final
    return ConfidenceSetResult(
        method_ids=ids,
        surviving=tuple(ids[k] for k in active),
        steps=tuple(steps),
        mcs_p_values=p_mcs,
        alpha=cfg.alpha,
        state=state,
        n=n,
        block_len=block_len,
        B=cfg.plan.B,
        seed=cfg.plan.stream.seed,
        warnings=(warn,) if warn else (),
    )


def cmcs_run(
    panel: LossPanel, states: StateSeries, cfg: McsConfig = McsConfig()
) -> dict[Hashable, ConfidenceSetResult]:
    """
    Conditional MCS: an independent :func:`mcs_run` on the losses of each
    declared state, in alphabet order. State ``k`` draws its bootstrap from
    substream ``k`` of ``cfg.plan.stream``.
    """
    part = partition_by_state(panel, states)
    out: dict[Hashable, ConfidenceSetResult] = {}
    base: RandomStream = cfg.plan.stream
    for k, s in enumerate(states.alphabet):
        sub_cfg = McsConfig(
            cfg.alpha,
            BootstrapPlan(cfg.plan.B, cfg.plan.block_len, base.spawn(k)),
            cfg.min_state_obs,
        )
        idx = part.index_sets[s]
        if idx.size < cfg.min_state_obs:
            out[s] = _insufficient(
                panel.method_ids, int(idx.size), sub_cfg, s,
                f"insufficient data: n={idx.size} < min_state_obs={cfg.min_state_obs}",
            )
            continue
        out[s] = mcs_run(panel.rows(idx), sub_cfg, state=s)
    return out
