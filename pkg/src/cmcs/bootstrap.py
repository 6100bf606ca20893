"""
Circular block bootstrap of loss matrices.

Each resample concatenates blocks of fixed length whose start points are
drawn independently and uniformly from the sample, wrapping around the end
of the sample; the last block is truncated so every resample has exactly n
rows. All methods are resampled with the same index rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LossPanel
from .statsutil import RandomStream, as_generator

__all__ = [
    "BootstrapEnsemble",
    "BootstrapIndexMatrix",
    "BootstrapPlan",
    "bootstrap_means",
    "bootstrap_variance",
    "default_block_len",
    "gen_block_indices",
    "indices_from_starts",
    "resolve_block_len",
]


@dataclass(frozen=True)
class BootstrapPlan:
    """
    Parameters
    ----------
    B : int
        Number of bootstrap resamples.
    block_len : int or None
        Block length. ``None`` means ``ceil(n ** (1/3))`` at use time.
    stream : RandomStream
        Source of the block start draws.
    """

    B: int = 1000
    block_len: int | None = None
    stream: RandomStream = RandomStream(0)

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError(f"B must be positive, got {self.B}")
        if self.block_len is not None and self.block_len < 1:
            raise ValueError(f"block_len must be positive, got {self.block_len}")


def default_block_len(n: int) -> int:
    # integer cube root first so that exact cubes do not round up
    r = round(n ** (1.0 / 3.0))
    return max(1, r if r**3 >= n else math.ceil(n ** (1.0 / 3.0)))


def resolve_block_len(n: int, block_len: int | None) -> tuple[int, str | None]:
    """
    Block length to use for a sample of size ``n``, plus a warning if it had
    to be clamped because ``n < 2 * block_len``.
    """
    p = default_block_len(n) if block_len is None else int(block_len)
    if n < 2 * p:
        clamped = max(1, n // 2)
        if clamped != p:
            return clamped, (
                f"block_len {p} clamped to {clamped} for a sample of size {n}"
            )
    return p, None


@dataclass(frozen=True, eq=False)
class BootstrapIndexMatrix:
    """B by n matrix of 0-based row indices, with the block starts that produced it."""

    indices: np.ndarray
    starts: np.ndarray
    block_len: int

    @property
    def B(self) -> int:
        return self.indices.shape[0]

    @property
    def n(self) -> int:
        return self.indices.shape[1]


def indices_from_starts(starts: np.ndarray, n: int, block_len: int) -> np.ndarray:
    """
    Expand block start points (B by k, 0-based) into B by n resample indices.

    Index ``n + i`` wraps to ``i``.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=np.intp))
    offsets = np.arange(block_len, dtype=np.intp)
    rows = (starts[:, :, None] + offsets).reshape(starts.shape[0], -1)
    if rows.shape[1] < n:
        raise ValueError(
            f"{starts.shape[1]} blocks of length {block_len} cannot fill n={n}"
        )
    return rows[:, :n] % n


def gen_block_indices(n: int, plan: BootstrapPlan) -> BootstrapIndexMatrix:
    if n < 1:
        raise ValueError("cannot resample an empty sample")
    p = default_block_len(n) if plan.block_len is None else plan.block_len
    if p > n:
        raise ValueError(f"block_len {p} exceeds sample size {n}")
    k = -(-n // p)
    rng = as_generator(plan.stream)
    starts = rng.integers(0, n, size=(plan.B, k))
    idx = indices_from_starts(starts, n, p)
    idx.flags.writeable = False
    return BootstrapIndexMatrix(idx, starts, p)


@dataclass(frozen=True, eq=False)
class BootstrapEnsemble:
    """
    Centred bootstrap means ``xi[b, i] = mean_b*(L_i) - mean(L_i)`` and the
    sample means they are centred on.
    """

    centered_means: np.ndarray
    sample_means: np.ndarray

    @property
    def B(self) -> int:
        return self.centered_means.shape[0]

    @property
    def m(self) -> int:
        return self.centered_means.shape[1]

    def subset(self, cols: np.ndarray | list[int]) -> BootstrapEnsemble:
        cols = np.asarray(cols, dtype=np.intp)
        return BootstrapEnsemble(self.centered_means[:, cols], self.sample_means[cols])


def bootstrap_means(
    panel: LossPanel | np.ndarray, idx: BootstrapIndexMatrix | np.ndarray
) -> BootstrapEnsemble:
    losses = panel.losses if isinstance(panel, LossPanel) else np.asarray(panel, float)
    if losses.ndim == 1:
        losses = losses[:, None]
    indices = idx.indices if isinstance(idx, BootstrapIndexMatrix) else np.asarray(idx)
    n = losses.shape[0]
    if indices.ndim != 2 or indices.shape[1] != n:
        raise ValueError(f"index matrix shape {indices.shape} does not match n={n}")
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise IndexError(f"bootstrap indices outside [0, {n - 1}]")
    B = indices.shape[0]
    # row multiplicities per resample, then one matrix product
    flat = (np.arange(B, dtype=np.intp)[:, None] * n + indices).ravel()
    counts = np.bincount(flat, minlength=B * n).reshape(B, n).astype(float)
    sample_means = losses.mean(axis=0)
    centered = counts @ losses / n - sample_means
    return BootstrapEnsemble(centered, sample_means)


def bootstrap_variance(ensemble: BootstrapEnsemble, contrast: np.ndarray) -> float:
    """
    Bootstrap variance of the contrast ``w' L-bar``: ``mean_b (w' xi_b)**2``.

    With ``w = e_i - 1/m`` this is the variance estimate of the mean relative
    loss of method ``i``.
    """
    w = np.asarray(contrast, dtype=float)
    if w.shape != (ensemble.m,):
        raise ValueError(f"contrast has shape {w.shape}, expected ({ensemble.m},)")
    proj = ensemble.centered_means @ w
    return float(np.mean(proj**2))
