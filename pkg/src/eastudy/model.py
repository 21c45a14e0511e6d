"""Core domain types: bars, tweet buckets, announcement events, datasets.

All instants are timezone-aware UTC datetimes; naive timestamps are never
accepted. Calendar dates are exchange-local ``datetime.date`` values.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from datetime import date, datetime

TICKER_RE = re.compile(r"^[A-Z.]{1,6}$")

INDEX_TICKER = "INDEX"


def validate_ticker(symbol: str) -> str:
    """Return the symbol if it is a valid ticker, else raise ValueError."""
    if not TICKER_RE.match(symbol):
        raise ValueError(f"invalid ticker symbol: {symbol!r}")
    return symbol


class Timing(enum.Enum):
    """When an announcement was made relative to NYSE trading hours."""

    BEFORE_OPEN = "BeforeOpen"
    AFTER_CLOSE = "AfterClose"


@dataclass(frozen=True)
class DailyBar:
    """One ticker's closing price and share volume for one trading day."""

    ticker: str
    date: date
    close: float
    volume: int


@dataclass(frozen=True)
class IndexBar:
    """Benchmark index level for one trading day."""

    date: date
    close: float


@dataclass(frozen=True)
class TweetBucket:
    """Hourly sentiment-labeled tweet counts for one ticker."""

    ticker: str
    hour_start: datetime  # UTC, truncated to the hour
    n_neg: int
    n_neut: int
    n_pos: int

    @property
    def total(self) -> int:
        return self.n_neg + self.n_neut + self.n_pos


@dataclass(frozen=True)
class EarningsEvent:
    """One earnings announcement with its timing class and EPS figures."""

    ticker: str
    announce_at: datetime  # UTC
    timing: Timing
    eps_reported: float
    eps_estimated: float
    excluded: bool = False
    exclusion_reason: str = ""

    def key(self) -> tuple:
        """Canonical ordering key, used wherever determinism matters."""
        return (self.ticker, self.announce_at)


@dataclass
class Dataset:
    """Immutable-by-convention container for the four input collections.

    Collections are canonically sorted tuples; lookup maps are built once
    in ``__post_init__`` so the dataset can be shared freely.
    """

    bars: tuple[DailyBar, ...]
    index: tuple[IndexBar, ...]
    tweets: tuple[TweetBucket, ...]
    events: tuple[EarningsEvent, ...]

    bars_by_ticker: dict[str, tuple[DailyBar, ...]] = field(
        init=False, repr=False, compare=False
    )
    index_by_date: dict[date, IndexBar] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_ticker: dict[str, list[DailyBar]] = {}
        for bar in self.bars:
            by_ticker.setdefault(bar.ticker, []).append(bar)
        self.bars_by_ticker = {t: tuple(bs) for t, bs in by_ticker.items()}
        self.index_by_date = {b.date: b for b in self.index}

    def close_prices(self, ticker: str) -> dict[date, float]:
        return {b.date: b.close for b in self.bars_by_ticker.get(ticker, ())}

    def index_closes(self) -> dict[date, float]:
        return {b.date: b.close for b in self.index}

    @property
    def tickers(self) -> tuple[str, ...]:
        return tuple(sorted(self.bars_by_ticker))

