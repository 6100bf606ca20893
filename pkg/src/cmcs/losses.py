"""
Joint VaR/ES scoring, Basel-style aggregation of ES across liquidity
horizons, and stress windows turned into state labels.
"""

from __future__ import annotations

from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import StateSeries

__all__ = [
    "BASEL_HORIZONS",
    "HorizonEsSet",
    "StressWindow",
    "VarEsForecast",
    "es_bcbs",
    "find_stress_window",
    "fz_loss",
    "states_from_windows",
]

BASEL_HORIZONS = (10, 20, 40, 60, 120)
_LN2 = np.log(2.0)


def fz_loss(var, es, r, prob: float = 0.025):
    """
    Strictly consistent joint loss for (VaR, ES) at tail level ``prob``.

    Uses ``G1(x) = x``, ``G2(x) = logistic(x)`` with its antiderivative
    ``softplus(x)``, and the constant ``a = ln 2``::

        L = VaR (H - p) - H r + G2(ES) (ES - VaR + H (VaR - r) / p)
            - softplus(ES) + ln 2,      H = 1{r <= VaR}

    Arguments broadcast; scalars in give a float out.
    """
    if not 0 < prob < 1:
        raise ValueError("prob must lie in (0, 1)")
    var = np.asarray(var, dtype=float)
    es = np.asarray(es, dtype=float)
    r = np.asarray(r, dtype=float)
    hit = (r <= var).astype(float)
    g2 = 0.5 * (1.0 + np.tanh(0.5 * es))
    out = (
        var * (hit - prob)
        - hit * r
        + g2 * (es - var + hit * (var - r) / prob)
        - np.logaddexp(0.0, es)
        + _LN2
    )
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class VarEsForecast:
    var: float
    es: float
    prob: float = 0.025

    def __post_init__(self) -> None:
        if not 0 < self.prob < 1:
            raise ValueError("prob must lie in (0, 1)")
        if self.es > self.var:
            raise ValueError(f"ES {self.es} exceeds VaR {self.var}")

    def loss(self, r):
        return fz_loss(self.var, self.es, r, self.prob)


@dataclass(frozen=True)
class HorizonEsSet:
    """ES forecasts per liquidity horizon; the first entry is the base horizon."""

    horizons: tuple[int, ...]
    es: tuple[float, ...]
    base_T: float = 10.0

    def __post_init__(self) -> None:
        h = tuple(int(x) for x in self.horizons)
        es = tuple(float(x) for x in self.es)
        if not h:
            raise ValueError("at least one liquidity horizon is required")
        if len(h) != len(es):
            raise ValueError(f"{len(h)} horizons but {len(es)} ES values")
        if any(x <= 0 for x in h):
            raise ValueError("liquidity horizons must be positive")
        if any(b <= a for a, b in zip(h, h[1:])):
            raise ValueError(f"liquidity horizons must be strictly increasing, got {h}")
        if not self.base_T > 0:
            raise ValueError("base_T must be positive")
        object.__setattr__(self, "horizons", h)
        object.__setattr__(self, "es", es)

    @classmethod
    def basel(cls, es: Sequence[float], base_T: float = 10.0) -> HorizonEsSet:
        return cls(BASEL_HORIZONS[: len(es)], tuple(es), base_T)


def es_bcbs(h: HorizonEsSet) -> float:
    """
    Root-sum-of-squares aggregate: the base-horizon ES plus each longer
    horizon scaled by ``sqrt((LH_j - LH_{j-1}) / T)``. Reported as a
    positive magnitude.
    """
    es = np.asarray(h.es)
    lh = np.asarray(h.horizons, dtype=float)
    scale = np.ones_like(es)
    scale[1:] = np.sqrt(np.diff(lh) / h.base_T)
    return float(np.sqrt(np.sum((es * scale) ** 2)))


@dataclass(frozen=True)
class StressWindow:
    start: int
    length: int = 252

    @property
    def stop(self) -> int:
        return self.start + self.length

    def covers(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        mask[self.start:self.stop] = True
        return mask


def find_stress_window(
    factor: Sequence[float] | np.ndarray,
    win_len: int = 252,
    how: Literal["mean", "max"] = "mean",
) -> StressWindow:
    """
    Window of ``win_len`` periods where the risk factor is highest.

    ``how="mean"`` maximises the rolling mean, ``how="max"`` the rolling
    maximum. Near-ties (relative 1e-12) go to the earliest start.
    """
    x = np.asarray(factor, dtype=float)
    if x.ndim != 1:
        raise ValueError("factor must be a 1-d series")
    if win_len < 1:
        raise ValueError("win_len must be positive")
    if x.size < win_len:
        raise ValueError(f"series of length {x.size} is shorter than the window {win_len}")
    if not np.all(np.isfinite(x)):
        raise ValueError("factor series contains non-finite values")
    win = sliding_window_view(x, win_len)
    score = win.mean(axis=1) if how == "mean" else win.max(axis=1)
    best = score.max()
    tol = 1e-12 * max(1.0, float(np.abs(x).max()))
    start = int(np.flatnonzero(score >= best - tol)[0])
    return StressWindow(start, win_len)


def states_from_windows(
    windows: Mapping[Hashable, StressWindow],
    n: int,
    baseline_label: Hashable = "calm",
) -> StateSeries:
    """
    Label each period by the first regime (in mapping order) whose window
    covers it, else ``baseline_label``.
    """
    labels: list[Hashable] = [baseline_label] * n
    for regime, w in reversed(list(windows.items())):
        if w.start < 0 or w.stop > n:
            raise ValueError(f"window {regime!r} [{w.start}, {w.stop}) outside [0, {n})")
        for t in range(w.start, w.stop):
            labels[t] = regime
    alphabet = tuple(windows) + ((baseline_label,) if baseline_label not in windows else ())
    return StateSeries(tuple(labels), alphabet)
