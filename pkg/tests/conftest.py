from datetime import date, datetime, timedelta
from zoneinfo import ZoneInfo

import pytest
from hypothesis import settings

from eastudy.alignment import TradingCalendar
from eastudy.model import DailyBar, Dataset, EarningsEvent, IndexBar, Timing

settings.register_profile("ci", deadline=None, derandomize=True)
settings.load_profile("ci")

EASTERN = ZoneInfo("America/New_York")
UTC = ZoneInfo("UTC")


def business_days(start: date, n: int) -> list[date]:
    out = []
    d = start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def make_calendar(start: date = date(2015, 6, 1), n: int = 10,
                  skip: set[date] = frozenset()) -> TradingCalendar:
    days = [d for d in business_days(start, n + len(skip)) if d not in skip][:n]
    return TradingCalendar(tuple(days))


def eastern(y, m, d, hh, mm=0, ss=0) -> datetime:
    return datetime(y, m, d, hh, mm, ss, tzinfo=EASTERN).astimezone(UTC)


def bars_from_closes(ticker: str, dates, closes, volume: int = 1000) -> tuple[DailyBar, ...]:
    return tuple(
        DailyBar(ticker=ticker, date=d, close=c, volume=volume)
        for d, c in zip(dates, closes)
    )


def index_from_closes(dates, closes) -> tuple[IndexBar, ...]:
    return tuple(IndexBar(date=d, close=c) for d, c in zip(dates, closes))


def make_event(ticker: str, announce_at: datetime, timing: Timing,
               eps_reported: float = 1.1, eps_estimated: float = 1.0) -> EarningsEvent:
    return EarningsEvent(
        ticker=ticker,
        announce_at=announce_at,
        timing=timing,
        eps_reported=eps_reported,
        eps_estimated=eps_estimated,
    )


def make_dataset(bars=(), index=(), tweets=(), events=()) -> Dataset:
    return Dataset(
        bars=tuple(sorted(bars, key=lambda b: (b.ticker, b.date))),
        index=tuple(sorted(index, key=lambda b: b.date)),
        tweets=tuple(sorted(tweets, key=lambda b: (b.ticker, b.hour_start))),
        events=tuple(sorted(events, key=lambda e: e.key())),
    )


@pytest.fixture
def week_calendar() -> TradingCalendar:
    # Mon 2015-06-01 .. Fri 2015-06-12, two full weeks
    return make_calendar(date(2015, 6, 1), 10)
