"""CSV price ingestion.

Input format: header ``timestamp,ticker,close``; timestamp is epoch seconds
or an ISO date (YYYY-MM-DD); UTF-8, comma-delimited.  Rows with missing or
nonpositive prices are skipped and counted; duplicate timestamps keep the
last row seen.  The sampling label (daily vs intraday) is inferred from the
median timestamp spacing.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .series import PricePoint, PriceSeries

__all__ = ["IngestResult", "ingest_csv"]

EXPECTED_HEADER = ["timestamp", "ticker", "close"]

# spacing at or above half a day means the series is daily
DAILY_SPACING_SECONDS = 43_200


@dataclass(frozen=True)
class IngestResult:
    series: tuple[PriceSeries, ...]
    skipped_rows: int
    duplicate_rows: int


def _parse_timestamp(raw: str) -> int:
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    dt = datetime.strptime(raw, "%Y-%m-%d").replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _sampling_label(timestamps: list[int]) -> str:
    if len(timestamps) < 2:
        return "daily"
    spacing = float(np.median(np.diff(timestamps)))
    return "daily" if spacing >= DAILY_SPACING_SECONDS else "intraday"


def ingest_csv(path: str | Path) -> IngestResult:
    """Parse one price CSV into per-ticker, timestamp-sorted series."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != EXPECTED_HEADER:
            raise ValueError(f"{path}: expected header {','.join(EXPECTED_HEADER)}, got {header}")

        per_ticker: dict[str, dict[int, float]] = {}
        skipped = 0
        duplicates = 0
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                skipped += 1
                continue
            raw_ts, ticker, raw_price = (c.strip() for c in row)
            try:
                ts = _parse_timestamp(raw_ts)
                price = float(raw_price) if raw_price else float("nan")
            except ValueError:
                skipped += 1
                continue
            if not ticker or not price > 0:  # also catches NaN
                skipped += 1
                continue
            book = per_ticker.setdefault(ticker, {})
            if ts in book:
                duplicates += 1
            book[ts] = price

    if not per_ticker:
        raise ValueError(f"{path}: no valid rows")

    series = []
    for ticker in sorted(per_ticker):
        book = per_ticker[ticker]
        timestamps = sorted(book)
        points = tuple(PricePoint(timestamp=ts, price=book[ts]) for ts in timestamps)
        series.append(
            PriceSeries(ticker=ticker, sampling=_sampling_label(timestamps), points=points)
        )
    return IngestResult(series=tuple(series), skipped_rows=skipped, duplicate_rows=duplicates)
