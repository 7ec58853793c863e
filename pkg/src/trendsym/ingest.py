"""Daily price CSV ingestion.

Accepts Yahoo-style exports (``Date,Open,High,Low,Close,Adj Close,Volume``)
and the canonical two-column form ``date,price`` written by
:func:`serialize_csv`.  Weekends and holidays are simply absent: one row is
one trading day.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path

import numpy as np

from .exceptions import EmptySeries, MalformedHeader

__all__ = [
    "PriceSeries",
    "CleaningReport",
    "parse_csv",
    "read_csv",
    "serialize_csv",
    "PRICE_COLUMNS",
]

# accepted header spellings per price column choice, matched case-insensitively
PRICE_COLUMNS = {
    "close": ("close", "price"),
    "adjclose": ("adj close", "adj_close", "adjclose", "adjusted close"),
}
DATE_FORMATS = {"iso": "%Y-%m-%d", "us": "%m/%d/%Y"}


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Dated strictly positive prices, one per trading day, ascending dates."""

    dates: np.ndarray  # datetime64[D]
    prices: np.ndarray  # float64
    symbol: str = ""

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        prices = np.asarray(self.prices, dtype=np.float64)
        if dates.ndim != 1 or dates.shape != prices.shape:
            raise ValueError("dates and prices must be 1-D and equally long")
        if prices.size < 2:
            raise EmptySeries(f"need at least 2 prices, got {prices.size}")
        if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise ValueError("prices must be finite and positive")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "prices", prices)

    def __len__(self):
        return self.prices.size

    def __eq__(self, other):
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return (
            self.symbol == other.symbol
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.prices, other.prices)
        )

    def slice(self, start, stop):
        return PriceSeries(self.dates[start:stop], self.prices[start:stop], self.symbol)


@dataclass
class CleaningReport:
    rows_read: int = 0
    rows_kept: int = 0
    duplicates_replaced: int = 0
    dropped: dict = field(default_factory=dict)  # reason -> list of line numbers

    @property
    def rows_dropped(self):
        return sum(len(v) for v in self.dropped.values())

    def drop(self, reason, line):
        self.dropped.setdefault(reason, []).append(line)

    def to_dict(self):
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "duplicates_replaced": self.duplicates_replaced,
            "dropped": {k: len(v) for k, v in sorted(self.dropped.items())},
        }


def _find_column(header, names):
    lowered = [h.strip().lower() for h in header]
    for name in names:
        if name in lowered:
            return lowered.index(name)
    return None


def _parse_price(text):
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def parse_csv(raw, price_column="close", date_format="iso", symbol=""):
    """Parse a daily price CSV into a :class:`PriceSeries`.

    Rows with an unparseable date, a missing or non-numeric price, or a
    price <= 0 are dropped and recorded in the report by reason and line
    number.  Duplicate dates keep the last occurrence.

    Parameters
    ----------
    raw : bytes, str or text stream
    price_column : {"close", "adjclose"}
    date_format : {"iso", "us"}
        ``iso`` is YYYY-MM-DD, ``us`` is MM/DD/YYYY.

    Returns
    -------
    (PriceSeries, CleaningReport)
    """
    if price_column not in PRICE_COLUMNS:
        raise ValueError(f"price_column must be one of {sorted(PRICE_COLUMNS)}")
    fmt = DATE_FORMATS[date_format]
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8-sig")
    stream = io.StringIO(raw) if isinstance(raw, str) else raw

    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise MalformedHeader("empty input: no header row")
    date_idx = _find_column(header, ("date",))
    price_idx = _find_column(header, PRICE_COLUMNS[price_column])
    missing = [
        name
        for name, idx in (("Date", date_idx), (price_column, price_idx))
        if idx is None
    ]
    if missing:
        raise MalformedHeader(
            f"line 1: missing column(s) {', '.join(missing)} in header {header}"
        )

    report = CleaningReport()
    by_date = {}
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        report.rows_read += 1
        if len(row) <= max(date_idx, price_idx):
            report.drop("short_row", line_no)
            continue
        try:
            day = datetime.strptime(row[date_idx].strip(), fmt).date()
        except ValueError:
            report.drop("bad_date", line_no)
            continue
        price = _parse_price(row[price_idx].strip())
        if price is None:
            report.drop("missing_price", line_no)
            continue
        if price <= 0:
            report.drop("non_positive_price", line_no)
            continue
        if day in by_date:
            report.duplicates_replaced += 1
        by_date[day] = price

    if len(by_date) < 2:
        raise EmptySeries(f"only {len(by_date)} valid row(s) after cleaning")
    days = sorted(by_date)
    report.rows_kept = len(days)
    series = PriceSeries(
        np.array(days, dtype="datetime64[D]"),
        np.array([by_date[d] for d in days]),
        symbol,
    )
    return series, report


def read_csv(path, price_column="close", date_format="iso", symbol=None):
    with open(path, "rb") as fh:
        raw = fh.read()
    if symbol is None:
        symbol = Path(path).stem
    return parse_csv(raw, price_column, date_format, symbol)


def serialize_csv(series):
    """Canonical ``date,price`` CSV; ``repr`` keeps floats round-trippable."""
    lines = ["date,price"]
    for d, p in zip(series.dates, series.prices):
        lines.append(f"{date.fromisoformat(str(d)).isoformat()},{float(p)!r}")
    return "\n".join(lines) + "\n"
