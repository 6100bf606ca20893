"""
Shared data types: loss panels, state series, partitions and confidence-set
results.

All time indices are 0-based. Losses are stored time-major (row = time,
column = method) so that block resampling slices contiguous rows.
"""

from __future__ import annotations

from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

__all__ = [
    "ConfidenceSetResult",
    "EliminationStep",
    "InsufficientDataError",
    "LossPanel",
    "RelativeLoss",
    "StatePartition",
    "StateSeries",
    "compute_relative_losses",
    "partition_by_state",
]


class InsufficientDataError(ValueError):
    """Raised when a (statewise) sample is too small for the requested test."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class LossPanel:
    """
    n by m matrix of out-of-sample losses, one column per method.

    Parameters
    ----------
    losses : array_like
        2-d array with rows indexed by time and columns by method.
    method_ids : sequence of hashable, optional
        Distinct method identifiers. Defaults to ``"1", ..., "m"``.
    time_index : sequence, optional
        Timestamps or integers labelling the rows.
    """

    losses: np.ndarray
    method_ids: tuple[Hashable, ...] = ()
    time_index: tuple[Any, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.losses, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"losses must be 2-d, got {arr.ndim} dimensions")
        n, m = arr.shape
        if n < 1 or m < 2:
            raise ValueError(f"need n >= 1 and m >= 2, got shape {arr.shape}")
        bad = np.argwhere(~np.isfinite(arr))
        if bad.size:
            t, i = bad[0]
            raise ValueError(
                f"non-finite loss {arr[t, i]} at (t={t}, i={i}); "
                f"{len(bad)} non-finite entries in total"
            )
        ids = tuple(self.method_ids) if self.method_ids else tuple(
            str(i + 1) for i in range(m)
        )
        if len(ids) != m:
            raise ValueError(f"{len(ids)} method ids for {m} columns")
        if len(set(ids)) != m:
            raise ValueError("method ids must be distinct")
        if self.time_index is not None:
            tix = tuple(self.time_index)
            if len(tix) != n:
                raise ValueError(f"time_index has length {len(tix)}, expected {n}")
            object.__setattr__(self, "time_index", tix)
        object.__setattr__(self, "losses", _readonly(arr))
        object.__setattr__(self, "method_ids", ids)

    @property
    def n(self) -> int:
        return self.losses.shape[0]

    @property
    def m(self) -> int:
        return self.losses.shape[1]

    def rows(self, index: Sequence[int] | np.ndarray) -> LossPanel:
        """Sub-panel holding the given rows in their original order."""
        index = np.asarray(index, dtype=np.intp)
        tix = None
        if self.time_index is not None:
            tix = tuple(self.time_index[i] for i in index)
        return LossPanel(self.losses[index], self.method_ids, tix)

    def columns(self, ids: Sequence[Hashable]) -> LossPanel:
        pos = [self.method_ids.index(i) for i in ids]
        return LossPanel(self.losses[:, pos], tuple(ids), self.time_index)


@dataclass(frozen=True, eq=False)
class StateSeries:
    """
    Per-period regime labels observed at the forecast origin.

    ``alphabet`` fixes the declared states and their order; states that never
    occur are kept so that downstream code can report them as empty. When
    omitted, the alphabet is the sorted set of observed labels.
    """

    labels: tuple[Hashable, ...]
    alphabet: tuple[Hashable, ...] = ()

    def __post_init__(self) -> None:
        labels = tuple(np.asarray(self.labels).tolist()) if isinstance(
            self.labels, np.ndarray
        ) else tuple(self.labels)
        if self.alphabet:
            alphabet = tuple(self.alphabet)
            if len(set(alphabet)) != len(alphabet):
                raise ValueError("state alphabet has duplicates")
        else:
            alphabet = tuple(sorted(set(labels), key=_sort_key))
        if not alphabet:
            raise ValueError("state alphabet is empty")
        lookup = {s: k for k, s in enumerate(alphabet)}
        try:
            codes = np.array([lookup[s] for s in labels], dtype=np.intp)
        except KeyError:
            t = next(t for t, lab in enumerate(labels) if lab not in lookup)
            raise ValueError(f"unknown state label {labels[t]!r} at t={t}") from None
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_codes", _readonly(codes))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def d(self) -> int:
        return len(self.alphabet)

    def codes(self) -> np.ndarray:
        """Integer code of each label (position in the alphabet), read-only."""
        return self._codes

    @classmethod
    def from_codes(cls, codes: np.ndarray, alphabet: Sequence[Hashable]) -> StateSeries:
        alphabet = tuple(alphabet)
        return cls(tuple(map(alphabet.__getitem__, np.asarray(codes).tolist())), alphabet)


def _sort_key(x: Hashable) -> tuple[str, Any]:
    # mixed-type alphabets sort by type name first
    return (type(x).__name__, x)


@dataclass(frozen=True)
class StatePartition:
    """Index sets ``I^l`` (sorted, 0-based) and their sizes for every declared state."""

    index_sets: Mapping[Hashable, np.ndarray]
    counts: Mapping[Hashable, int]

    @property
    def states(self) -> tuple[Hashable, ...]:
        return tuple(self.index_sets)


def partition_by_state(panel: LossPanel | int, states: StateSeries) -> StatePartition:
    """
    Split the time axis into the disjoint index sets of each state.

    ``panel`` may be a :class:`LossPanel` or simply the sample size ``n``.
    Every declared state gets an entry, possibly empty.
    """
    n = panel if isinstance(panel, int) else panel.n
    if len(states) != n:
        raise ValueError(f"state series has length {len(states)}, panel has n={n}")
    codes = states.codes()
    index_sets = {}
    counts = {}
    for k, s in enumerate(states.alphabet):
        idx = _readonly(np.flatnonzero(codes == k))
        index_sets[s] = idx
        counts[s] = int(idx.size)
    return StatePartition(index_sets, counts)


@dataclass(frozen=True, eq=False)
class RelativeLoss:
    """
    Losses relative to the cross-method average, ``d_i.,t = L_i,t - mean_j L_j,t``.
    """

    d_dot: np.ndarray
    row_mean: np.ndarray
    method_ids: tuple[Hashable, ...]

    def pairwise(self, i: int, j: int) -> np.ndarray:
        """``d_ij,t = L_i,t - L_j,t`` reconstructed from the centred losses."""
        return self.d_dot[:, i] - self.d_dot[:, j]

    def losses(self) -> np.ndarray:
        return self.d_dot + self.row_mean[:, None]


def compute_relative_losses(panel: LossPanel) -> RelativeLoss:
    mean = panel.losses.mean(axis=1)
    d_dot = panel.losses - mean[:, None]
    return RelativeLoss(_readonly(d_dot), _readonly(mean), panel.method_ids)


@dataclass(frozen=True, eq=False)
class EliminationStep:
    """One equivalence test of the sequential procedure.

    ``members`` is the method set being tested, ``t_stats`` aligns with it.
    ``eliminated`` is ``None`` when the null was not rejected.
    """

    members: tuple[Hashable, ...]
    t_stats: np.ndarray
    t_max: float
    argmax_method: Hashable
    p_value: float
    eliminated: Hashable | None


@dataclass(frozen=True, eq=False)
class ConfidenceSetResult:
    """
    Outcome of a (conditional) method confidence set run.

    ``steps`` holds every test performed, including the final non-rejected
    one. MCS p-values are running maxima of the step p-values. A result
    with ``reason`` set is an "insufficient data" outcome: no test was run
    and every method is retained.
    """

    method_ids: tuple[Hashable, ...]
    surviving: tuple[Hashable, ...]
    steps: tuple[EliminationStep, ...]
    mcs_p_values: Mapping[Hashable, float]
    alpha: float
    state: Hashable | None = None
    n: int = 0
    block_len: int | None = None
    B: int | None = None
    seed: int | None = None
    warnings: tuple[str, ...] = ()
    reason: str | None = None

    @property
    def insufficient(self) -> bool:
        return self.reason is not None

    @property
    def eliminated(self) -> tuple[Hashable, ...]:
        return tuple(s.eliminated for s in self.steps if s.eliminated is not None)

    @property
    def trace(self) -> list[dict[str, Any]]:
        """Elimination records in order, as plain dictionaries."""
        out = []
        for s in self.steps:
            if s.eliminated is None:
                continue
            out.append({
                "eliminated": s.eliminated,
                "T_max": float(s.t_max),
                "p_step": float(s.p_value),
                "p_mcs": float(self.mcs_p_values[s.eliminated]),
            })
        return out

    @property
    def size(self) -> int:
        return len(self.surviving)

    def to_dict(self) -> dict[str, Any]:
        return {
            "state": _jsonable(self.state),
            "alpha": self.alpha,
            "n": self.n,
            "block_len": self.block_len,
            "B": self.B,
            "seed": self.seed,
            "surviving": [_jsonable(i) for i in self.surviving],
            "trace": [
                {**rec, "eliminated": _jsonable(rec["eliminated"])} for rec in self.trace
            ],
            "mcs_p_values": {str(k): float(v) for k, v in self.mcs_p_values.items()},
            "warnings": list(self.warnings),
            "reason": self.reason,
        }


def _jsonable(x: Any) -> Any:
    if isinstance(x, np.generic):
        return x.item()
    return x
