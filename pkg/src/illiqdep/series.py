"""Daily return series, trade/no-trade binarization, and CSV ingestion.

A day counts as traded when the absolute return exceeds the zero-detection
threshold (0 by default, so any nonzero price change is a trade).  Missing
days are not imputed: the statistics index consecutive observations, so the
caller must supply a gap-free series.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput


@dataclass
class ReturnSeries:
    """Ordered log-returns with optional calendar dates."""

    values: np.ndarray
    timestamps: list[dt.date] | None = None
    source_id: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise InvalidInput("return series must be a non-empty 1-d sequence")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise InvalidInput(f"non-finite return at index {int(bad[0])}")
        self.values = values
        if self.timestamps is not None:
            if len(self.timestamps) != values.size:
                raise InvalidInput(
                    f"{len(self.timestamps)} timestamps for {values.size} returns"
                )
            for prev, cur in zip(self.timestamps, self.timestamps[1:]):
                if cur <= prev:
                    raise InvalidInput(
                        f"timestamps must be strictly increasing ({prev} -> {cur})"
                    )

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass
class BinarySeries:
    """Trade/no-trade indicator sequence with its provenance."""

    bits: np.ndarray
    threshold: float = 0.0
    source_id: str = ""

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or bits.size < 2:
            raise InvalidInput("binary series needs at least two observations")
        if not np.isin(bits, (0, 1)).all():
            raise InvalidInput("binary series may only contain 0 and 1")
        if not self.threshold >= 0:
            raise InvalidInput(f"threshold must be non-negative, got {self.threshold}")
        self.bits = bits.astype(np.int8)

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def as_float(self) -> np.ndarray:
        return self.bits.astype(float)


def binarize(returns: ReturnSeries, threshold: float = 0.0) -> BinarySeries:
    """Map returns to the trade indicator: 0 where ``|r| <= threshold``, else 1."""
    if threshold < 0:
        raise InvalidInput(f"threshold must be non-negative, got {threshold}")
    bits = (np.abs(returns.values) > threshold).astype(np.int8)
    return BinarySeries(bits=bits, threshold=float(threshold), source_id=returns.source_id)


def sample_mean(series: BinarySeries) -> float:
    """Share of traded days, i.e. the arithmetic mean of the indicator."""
    return float(series.bits.mean())


def read_returns_csv(path: str | Path) -> ReturnSeries:
    """Read a return series from CSV.

    Two layouts are accepted: a ``date,return`` header followed by two-column
    rows, or a headerless single column of returns.  Decimal separator is the
    point.  Any row that fails to parse aborts ingestion with the offending
    row number (1-based, header included).
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidInput(f"{path.name}: empty input")

    header = [cell.strip().lower() for cell in rows[0]]
    with_dates = header == ["date", "return"]
    start = 1 if with_dates else 0
    if with_dates and len(rows) == 1:
        raise InvalidInput(f"{path.name}: no data rows after header")

    values: list[float] = []
    dates: list[dt.date] = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if with_dates:
            if len(row) != 2:
                raise InvalidInput(f"{path.name}: row {i}: expected 2 columns, got {len(row)}")
            raw_date, raw_ret = row
            try:
                dates.append(dt.date.fromisoformat(raw_date.strip()))
            except ValueError:
                raise InvalidInput(f"{path.name}: row {i}: unparseable date {raw_date!r}") from None
        else:
            if len(row) != 1:
                raise InvalidInput(f"{path.name}: row {i}: expected 1 column, got {len(row)}")
            raw_ret = row[0]
        try:
            value = float(raw_ret.strip())
        except ValueError:
            raise InvalidInput(f"{path.name}: row {i}: unparseable return {raw_ret!r}") from None
        if not np.isfinite(value):
            raise InvalidInput(f"{path.name}: row {i}: non-finite return {raw_ret!r}")
        values.append(value)

    return ReturnSeries(
        values=np.asarray(values, dtype=float),
        timestamps=dates if with_dates else None,
        source_id=path.stem,
    )
