"""Parsing and daily partitioning of transaction and price files.

File formats:

* ``transactions.csv`` - header ``tx_id,timestamp,inputs,outputs``; the
  address lists are ``;``-separated (addresses contain no commas or
  semicolons by contract, so no quoting is involved).
* ``prices.csv`` - header ``date,close`` with ISO dates and decimal closes.

Timestamps are seconds since epoch, interpreted as UTC; day boundaries sit
at UTC midnight.  All parsed structures are plain immutable records, safe to
share across threads.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateTxId,
    MalformedRow,
    MissingFile,
    NonPositivePrice,
    UnparseableDate,
)

_EPOCH = dt.date(1970, 1, 1)
SECONDS_PER_DAY = 86400

TX_HEADER = "tx_id,timestamp,inputs,outputs"
PRICE_HEADER = "date,close"


def day_of(timestamp: int) -> dt.date:
    """UTC calendar day containing the given epoch timestamp."""
    return _EPOCH + dt.timedelta(days=int(timestamp) // SECONDS_PER_DAY)


@dataclass(frozen=True)
class TransactionRecord:
    tx_id: str
    timestamp: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @property
    def is_coinbase(self) -> bool:
        """True for block-reward transactions, which have no input addresses."""
        return len(self.inputs) == 0

    @property
    def day(self) -> dt.date:
        return day_of(self.timestamp)


@dataclass(frozen=True)
class DayWindow:
    date: dt.date
    transactions: tuple[TransactionRecord, ...] = ()


@dataclass
class PriceSeries:
    """Daily closing prices, forward-filled so the date range has no gaps."""

    dates: list[dt.date]
    closes: np.ndarray
    _index: dict[dt.date, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.closes = np.asarray(self.closes, dtype=np.float64)
        self._index = {d: i for i, d in enumerate(self.dates)}

    @classmethod
    def from_entries(cls, entries: list[tuple[dt.date, float]]) -> "PriceSeries":
        """Build a series from (date, close) pairs, forward-filling gaps."""
        entries = sorted(entries, key=lambda e: e[0])
        dates: list[dt.date] = []
        closes: list[float] = []
        for date, close in entries:
            if dates:
                day = dates[-1] + dt.timedelta(days=1)
                while day < date:
                    dates.append(day)
                    closes.append(closes[-1])
                    day += dt.timedelta(days=1)
            dates.append(date)
            closes.append(float(close))
        return cls(dates, np.array(closes, dtype=np.float64))

    def price_on(self, date: dt.date) -> float | None:
        i = self._index.get(date)
        return float(self.closes[i]) if i is not None else None

    @property
    def first_date(self) -> dt.date:
        return self.dates[0]

    @property
    def last_date(self) -> dt.date:
        return self.dates[-1]

    def __len__(self) -> int:
        return len(self.dates)


def _split_addresses(text: str) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(part for part in text.split(";") if part)


def parse_transactions(path: str | Path) -> list[TransactionRecord]:
    """Parse a transactions CSV into validated records, in file order."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    records: list[TransactionRecord] = []
    seen: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != TX_HEADER:
            raise MalformedRow(1, f"expected header {TX_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise MalformedRow(lineno, f"expected 4 fields, got {len(parts)}")
            tx_id, ts_text, in_text, out_text = parts
            if not tx_id:
                raise MalformedRow(lineno, "empty tx_id")
            if tx_id in seen:
                raise DuplicateTxId(tx_id, seen[tx_id], lineno)
            try:
                timestamp = int(ts_text)
            except ValueError:
                raise MalformedRow(lineno, f"bad timestamp {ts_text!r}") from None
            outputs = _split_addresses(out_text)
            if not outputs:
                raise MalformedRow(lineno, "transaction has no outputs")
            seen[tx_id] = lineno
            records.append(
                TransactionRecord(tx_id, timestamp, _split_addresses(in_text), outputs)
            )
    return records


def write_transactions(records: list[TransactionRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(TX_HEADER + "\n")
        for rec in records:
            fh.write(
                f"{rec.tx_id},{rec.timestamp},"
                f"{';'.join(rec.inputs)},{';'.join(rec.outputs)}\n"
            )


def parse_prices(path: str | Path) -> PriceSeries:
    """Parse a prices CSV; gaps are forward-filled, never interpolated."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    entries: list[tuple[dt.date, float]] = []
    seen_dates: dict[dt.date, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != PRICE_HEADER:
            raise MalformedRow(1, f"expected header {PRICE_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise MalformedRow(lineno, f"expected 2 fields, got {len(parts)}")
            try:
                date = dt.date.fromisoformat(parts[0])
            except ValueError:
                raise UnparseableDate(lineno, parts[0]) from None
            try:
                close = float(parts[1])
            except ValueError:
                raise MalformedRow(lineno, f"bad close {parts[1]!r}") from None
            if close <= 0:
                raise NonPositivePrice(date)
            if date in seen_dates:
                raise MalformedRow(lineno, f"duplicate date {date.isoformat()}")
            seen_dates[date] = lineno
            entries.append((date, close))
    if not entries:
        raise MalformedRow(1, "price file has no data rows")
    return PriceSeries.from_entries(entries)


def write_prices(entries: list[tuple[dt.date, float]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(PRICE_HEADER + "\n")
        for date, close in entries:
            fh.write(f"{date.isoformat()},{float(close)!r}\n")


def partition_daily(records: list[TransactionRecord]) -> list[DayWindow]:
    """Split records into per-day windows (UTC), keeping empty gap days."""
    if not records:
        return []
    by_day: dict[dt.date, list[TransactionRecord]] = {}
    for rec in records:
        by_day.setdefault(rec.day, []).append(rec)
    first = min(by_day)
    last = max(by_day)
    windows = []
    day = first
    while day <= last:
        windows.append(DayWindow(day, tuple(by_day.get(day, ()))))
        day += dt.timedelta(days=1)
    return windows
