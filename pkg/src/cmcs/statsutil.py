"""
Seeded random streams and the few distribution functions the tests need.

Streams use NumPy's PCG64 bit generator keyed by a ``SeedSequence`` whose
spawn key is the stream id, so ``(seed, stream_id)`` pins the draw sequence
and distinct ids give independent substreams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "RandomStream",
    "as_generator",
    "chi2_quantile",
    "chi2_upper_tail",
    "normal_cdf",
    "normal_quantile",
    "std_normal_draws",
    "uniform_int",
]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RandomStream:
    """
    Value-type handle on a reproducible random stream.

    Parameters
    ----------
    seed : int
        Master seed, 0 <= seed < 2**64.
    stream_id : int or tuple of int
        Substream key. ``spawn(k)`` appends ``k`` to the key.
    """

    seed: int
    stream_id: int | tuple[int, ...] = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) <= _UINT64_MAX:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        key = self.key
        if any(not 0 <= k <= _UINT64_MAX for k in key):
            raise ValueError(f"stream ids must be unsigned 64-bit integers, got {key}")

    @property
    def key(self) -> tuple[int, ...]:
        sid = self.stream_id
        return tuple(int(k) for k in sid) if isinstance(sid, tuple) else (int(sid),)

    def spawn(self, k: int) -> RandomStream:
        return RandomStream(self.seed, self.key + (int(k),))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng: RandomStream | np.random.Generator | int) -> np.random.Generator:
    """Generators pass through (and keep advancing); streams and ints start fresh."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    return RandomStream(int(rng)).generator()


def std_normal_draws(
    rng: RandomStream | np.random.Generator, count: int
) -> np.ndarray:
    if count < 0:
        raise ValueError("count must be nonnegative")
    return as_generator(rng).standard_normal(count)


def uniform_int(
    rng: RandomStream | np.random.Generator,
    lo: int,
    hi: int,
    size: int | tuple[int, ...] | None = None,
) -> int | np.ndarray:
    """Uniform draw(s) on ``{lo, ..., hi}`` (inclusive, rejection-sampled, unbiased)."""
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    out = as_generator(rng).integers(lo, hi, size=size, endpoint=True)
    return int(out) if size is None else out


def normal_quantile(prob: float | np.ndarray) -> float | np.ndarray:
    p = np.asarray(prob, dtype=float)
    if np.any((p <= 0) | (p >= 1)) or np.any(np.isnan(p)):
        raise ValueError("prob must lie strictly inside (0, 1)")
    out = special.ndtri(p)
    return float(out) if out.ndim == 0 else out


def normal_cdf(x: float | np.ndarray) -> float | np.ndarray:
    out = special.ndtr(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def chi2_upper_tail(x: float | np.ndarray, df: int) -> float | np.ndarray:
    """``P(chi2_df > x)`` through the regularized upper incomplete gamma function."""
    if int(df) != df or df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("x must be nonnegative")
    out = special.gammaincc(df / 2.0, x / 2.0)
    return float(out) if out.ndim == 0 else out


def chi2_quantile(alpha: float, df: int) -> float:
    """Upper-tail critical value: ``chi2_upper_tail(c, df) == alpha``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if int(df) != df or df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    return float(2.0 * special.gammainccinv(df / 2.0, alpha))
