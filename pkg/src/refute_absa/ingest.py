"""Load price and sentiment CSVs onto a shared trading calendar.

Input formats:

* prices:    ``date,ticker,adj_close`` — one row per ticker-day, ISO dates
* sentiment: ``date,aspect,pos,neg,neu`` — per-aspect daily mention counts

The trading calendar is the intersection of all tickers' price dates. Daily
returns are simple returns ``P_t / P_{t-1} - 1``. Sentiment rows that fall on
non-trading days are handled by a fill policy: ``fold`` (default) adds their
counts to the next trading day, ``drop``/``zero`` discard them. Trading days
with no sentiment rows get zero counts.
"""

from __future__ import annotations

import bisect
import csv
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .errors import ConfigError, InsufficientDataError, ParseError, ValidationError

FILL_POLICIES = ("fold", "drop", "zero")
CALENDAR_POLICIES = ("intersection",)


@dataclass(frozen=True)
class TradingCalendar:
    """Strictly increasing list of trading days; all panels index into it."""

    dates: tuple[date, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValidationError("calendar dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.dates)

    def index(self, d: date) -> int:
        i = bisect.bisect_left(self.dates, d)
        if i == len(self.dates) or self.dates[i] != d:
            raise KeyError(d)
        return i

    def isoformat(self) -> list[str]:
        return [d.isoformat() for d in self.dates]


@dataclass(frozen=True)
class ReturnPanel:
    """Adjusted close and simple daily returns for one ticker.

    ``returns[i]`` is the return on calendar day ``i + 1``; the first day has
    no return, so ``len(returns) == len(adj_close) - 1``.
    """

    ticker: str
    adj_close: np.ndarray
    returns: np.ndarray = field(init=False)

    def __post_init__(self):
        prices = np.asarray(self.adj_close, dtype=float)
        if np.any(prices <= 0):
            raise ValidationError(f"{self.ticker}: non-positive adjusted close")
        object.__setattr__(self, "adj_close", prices)
        object.__setattr__(self, "returns", prices[1:] / prices[:-1] - 1.0)

    def return_on(self, day_index: int) -> float:
        """Simple return realised on calendar day ``day_index`` (>= 1)."""
        return float(self.returns[day_index - 1])


@dataclass(frozen=True)
class RawSentimentPanel:
    """Per-day positive/negative/neutral mention counts for one aspect."""

    aspect: str
    pos: np.ndarray
    neg: np.ndarray
    neu: np.ndarray

    def __post_init__(self):
        for name in ("pos", "neg", "neu"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if np.any(arr < 0):
                raise ValidationError(f"{self.aspect}: negative {name} count")
            object.__setattr__(self, name, arr)
        if not (len(self.pos) == len(self.neg) == len(self.neu)):
            raise ValidationError(f"{self.aspect}: count arrays differ in length")


def _parse_date(text: str, line: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(f"bad date {text!r}", line) from None


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad {column} value {text!r}", line) from None


def _parse_count(text: str, line: int, column: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"bad {column} value {text!r}", line) from None
    return value


def _read_rows(path: Path, expected_header: list[str]):
    """Yield (line_number, row) tuples, validating the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", 1) from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(
                f"{path}: expected header {','.join(expected_header)}, got {','.join(header)}", 1
            )
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected_header):
                raise ParseError(f"expected {len(expected_header)} columns, got {len(row)}", line)
            yield line, row


def load_prices(
    path: str | Path, calendar_policy: str = "intersection"
) -> tuple[dict[str, ReturnPanel], TradingCalendar]:
    """Load the price CSV and align every ticker to the shared calendar.

    The calendar is the intersection of all tickers' dates; tickers must
    share at least two dates so returns exist.
    """
    if calendar_policy not in CALENDAR_POLICIES:
        raise ConfigError(
            f"unknown calendar policy {calendar_policy!r}; expected one of {CALENDAR_POLICIES}"
        )
    path = Path(path)
    per_ticker: dict[str, dict[date, float]] = {}
    for line, row in _read_rows(path, ["date", "ticker", "adj_close"]):
        d = _parse_date(row[0], line)
        ticker = row[1].strip()
        if not ticker:
            raise ParseError("empty ticker", line)
        price = _parse_float(row[2], line, "adj_close")
        if price <= 0:
            raise ValidationError(f"line {line}: non-positive price {price} for {ticker}")
        per_ticker.setdefault(ticker, {})[d] = price

    if not per_ticker:
        raise InsufficientDataError(f"{path}: no price rows")
    for ticker, series in per_ticker.items():
        if len(series) < 2:
            raise InsufficientDataError(f"{ticker}: fewer than 2 price rows")

    common = None
    for series in per_ticker.values():
        days = set(series)
        common = days if common is None else (common & days)
    if len(common) < 2:
        raise InsufficientDataError("fewer than 2 trading days common to all tickers")
    calendar = TradingCalendar(tuple(sorted(common)))

    panels = {
        ticker: ReturnPanel(ticker, np.array([series[d] for d in calendar.dates]))
        for ticker, series in sorted(per_ticker.items())
    }
    return panels, calendar


def load_sentiment(
    path: str | Path,
    calendar: TradingCalendar,
    fill_policy: str = "fold",
) -> dict[str, RawSentimentPanel]:
    """Load the sentiment CSV and align each aspect to the trading calendar.

    ``fill_policy`` controls rows dated on non-trading days: ``fold`` adds
    their counts to the next trading day, ``drop`` and ``zero`` discard them.
    Trading days absent from the file are zero-filled. Counts for repeated
    (date, aspect) rows accumulate.
    """
    if fill_policy not in FILL_POLICIES:
        raise ConfigError(f"unknown fill policy {fill_policy!r}; expected one of {FILL_POLICIES}")
    path = Path(path)
    T = len(calendar)
    counts: dict[str, np.ndarray] = {}

    def slot_for(d: date) -> int | None:
        """Calendar index receiving counts dated ``d``, or None to discard."""
        i = bisect.bisect_left(calendar.dates, d)
        if i < T and calendar.dates[i] == d:
            return i
        if fill_policy == "fold" and i < T:
            return i  # next trading day
        return None

    for line, row in _read_rows(path, ["date", "aspect", "pos", "neg", "neu"]):
        d = _parse_date(row[0], line)
        aspect = row[1].strip()
        if not aspect:
            raise ParseError("empty aspect", line)
        pos = _parse_count(row[2], line, "pos")
        neg = _parse_count(row[3], line, "neg")
        neu = _parse_count(row[4], line, "neu")
        if min(pos, neg, neu) < 0:
            raise ValidationError(f"line {line}: negative count for aspect {aspect!r}")
        slot = slot_for(d)
        if slot is None:
            continue
        block = counts.setdefault(aspect, np.zeros((3, T), dtype=np.int64))
        block[0, slot] += pos
        block[1, slot] += neg
        block[2, slot] += neu

    return {
        aspect: RawSentimentPanel(aspect, block[0], block[1], block[2])
        for aspect, block in sorted(counts.items())
    }


def write_prices_csv(path: str | Path, panels: dict[str, ReturnPanel], calendar: TradingCalendar) -> None:
    """Write panels back to the prices CSV schema (round-trip safe)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "ticker", "adj_close"])
        for ticker in sorted(panels):
            panel = panels[ticker]
            for d, price in zip(calendar.dates, panel.adj_close):
                writer.writerow([d.isoformat(), ticker, repr(float(price))])


def write_sentiment_csv(
    path: str | Path, panels: dict[str, RawSentimentPanel], calendar: TradingCalendar
) -> None:
    """Write sentiment panels back to the sentiment CSV schema."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "aspect", "pos", "neg", "neu"])
        for aspect in sorted(panels):
            panel = panels[aspect]
            for i, d in enumerate(calendar.dates):
                writer.writerow(
                    [d.isoformat(), aspect, int(panel.pos[i]), int(panel.neg[i]), int(panel.neu[i])]
                )
