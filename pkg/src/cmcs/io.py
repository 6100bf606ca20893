"""
Readers and writers for the plain-text formats used on the command line.

Loss panel CSV
    Header row of method ids, then one row of losses per period. Decimal
    point ``.``, no thousands separators.
State series CSV
    Two columns ``time_index,state_label`` with a header row, one row per
    period in the same order as the loss panel. Integer-looking labels are
    read as integers.
Risk-factor CSV
    Two columns ``time,value`` with a header row.
ES-by-horizon CSV
    ``asset`` column, optional ``UC`` column, then ``LH<k>`` columns in
    increasing ``k`` holding the ES forecast for each liquidity horizon.

Every parse failure raises :class:`InputFormatError` carrying the 1-based
line number of the offending row.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import sys
from collections.abc import Hashable, Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .core import LossPanel, StateSeries
from .losses import HorizonEsSet, es_bcbs

__all__ = [
    "EsHorizonRow",
    "InputFormatError",
    "read_es_horizon_csv",
    "read_factor_csv",
    "read_loss_csv",
    "read_report",
    "read_state_csv",
    "write_es_horizon_csv",
    "write_rows_csv",
    "write_state_csv",
    "write_text",
]


class InputFormatError(ValueError):
    def __init__(self, path: str | Path, line: int | None, message: str) -> None:
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


def _rows(path: str | Path) -> list[tuple[int, list[str]]]:
    """Non-blank CSV rows with their 1-based line numbers."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(path, None, f"cannot open file ({exc.strerror})") from None
    out = []
    with fh:
        reader = csv.reader(fh)
        try:
            for row in reader:
                if row and any(c.strip() for c in row):
                    out.append((reader.line_num, [c.strip() for c in row]))
        except csv.Error as exc:
            raise InputFormatError(path, reader.line_num, str(exc)) from None
    if not out:
        raise InputFormatError(path, None, "file is empty")
    return out


def _float(path, line: int, text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise InputFormatError(path, line, f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise InputFormatError(path, line, f"non-finite value {text!r}")
    return x


def _label(text: str) -> Hashable:
    return int(text) if re.fullmatch(r"[+-]?\d+", text) else text


def read_loss_csv(path: str | Path) -> LossPanel:
    rows = _rows(path)
    (_, header), body = rows[0], rows[1:]
    if len(header) < 2:
        raise InputFormatError(path, rows[0][0], "need at least two method columns")
    if len(set(header)) != len(header):
        raise InputFormatError(path, rows[0][0], "duplicate method ids in header")
    if not body:
        raise InputFormatError(path, None, "no loss rows after the header")
    data = np.empty((len(body), len(header)))
    for t, (line, row) in enumerate(body):
        if len(row) != len(header):
            raise InputFormatError(path, line, f"expected {len(header)} fields, got {len(row)}")
        data[t] = [_float(path, line, c) for c in row]
    return LossPanel(data, tuple(header))


def read_state_csv(
    path: str | Path, alphabet: Sequence[Hashable] | None = None
) -> tuple[tuple[Hashable, ...], StateSeries]:
    """Returns the time index column and the state series."""
    rows = _rows(path)
    (hline, header), body = rows[0], rows[1:]
    if len(header) != 2:
        raise InputFormatError(path, hline, "expected header 'time_index,state_label'")
    if not body:
        raise InputFormatError(path, None, "no state rows after the header")
    times, labels = [], []
    for line, row in body:
        if len(row) != 2:
            raise InputFormatError(path, line, f"expected 2 fields, got {len(row)}")
        if not row[1]:
            raise InputFormatError(path, line, "empty state label")
        times.append(_label(row[0]))
        labels.append(_label(row[1]))
    try:
        states = StateSeries(tuple(labels), tuple(alphabet) if alphabet else ())
    except ValueError as exc:
        t = next((k for k, lab in enumerate(labels) if alphabet and lab not in alphabet), None)
        raise InputFormatError(path, body[t][0] if t is not None else None, str(exc)) from None
    return tuple(times), states


def write_state_csv(path: str | Path, times: Sequence[Any], states: StateSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_index", "state_label"])
        w.writerows(zip(times, states.labels))


def read_factor_csv(path: str | Path) -> tuple[tuple[Hashable, ...], np.ndarray]:
    rows = _rows(path)
    (hline, header), body = rows[0], rows[1:]
    if len(header) != 2:
        raise InputFormatError(path, hline, "expected header 'time,value'")
    if not body:
        raise InputFormatError(path, None, "no rows after the header")
    times, values = [], []
    for line, row in body:
        if len(row) != 2:
            raise InputFormatError(path, line, f"expected 2 fields, got {len(row)}")
        times.append(_label(row[0]))
        values.append(_float(path, line, row[1]))
    return tuple(times), np.asarray(values)


class EsHorizonRow:
    """One asset: optional unconditional ES plus ES per liquidity horizon."""

    __slots__ = ("asset", "uc", "horizons")

    def __init__(self, asset: str, uc: float | None, horizons: HorizonEsSet) -> None:
        self.asset = asset
        self.uc = uc
        self.horizons = horizons

    @property
    def es_bcbs(self) -> float:
        return es_bcbs(self.horizons)


def read_es_horizon_csv(path: str | Path, base_T: float = 10.0) -> list[EsHorizonRow]:
    rows = _rows(path)
    (hline, header), body = rows[0], rows[1:]
    if not header or header[0].lower() != "asset":
        raise InputFormatError(path, hline, "first column must be 'asset'")
    cols = header[1:]
    has_uc = bool(cols) and cols[0].upper() == "UC"
    lh_cols = cols[1:] if has_uc else cols
    horizons = []
    for c in lh_cols:
        m = re.fullmatch(r"LH(\d+)", c, flags=re.IGNORECASE)
        if not m:
            raise InputFormatError(path, hline, f"column {c!r} is not of the form LH<days>")
        horizons.append(int(m.group(1)))
    out = []
    for line, row in body:
        if len(row) != len(header):
            raise InputFormatError(path, line, f"expected {len(header)} fields, got {len(row)}")
        vals = [_float(path, line, c) for c in row[1:]]
        uc = vals[0] if has_uc else None
        es = vals[1:] if has_uc else vals
        try:
            h = HorizonEsSet(tuple(horizons), tuple(es), base_T)
        except ValueError as exc:
            raise InputFormatError(path, line, str(exc)) from None
        out.append(EsHorizonRow(row[0], uc, h))
    return out


def write_es_horizon_csv(rows: Sequence[EsHorizonRow]) -> str:
    """Table with columns ``asset, [UC,] LH.., ES_BCBS``."""
    if not rows:
        return ""
    has_uc = rows[0].uc is not None
    header = ["asset"] + (["UC"] if has_uc else []) + [
        f"LH{h}" for h in rows[0].horizons.horizons
    ] + ["ES_BCBS"]
    lines = [",".join(header)]
    for r in rows:
        vals = ([r.uc] if has_uc else []) + list(r.horizons.es) + [r.es_bcbs]
        lines.append(",".join([r.asset] + [repr(float(v)) for v in vals]))
    return "\n".join(lines) + "\n"


def write_rows_csv(rows: Iterable[dict[str, Any]]) -> str:
    rows = list(rows)
    if not rows:
        return ""
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_report(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(path, exc.lineno, exc.msg) from None
