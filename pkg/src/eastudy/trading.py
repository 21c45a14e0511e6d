"""Per-class trade-return curves and the short-on-negative backtest.

The backtest implements the one-day strategy suggested by the event
study: consider AfterClose announcements only, and when the sentiment of
the day before the announcement classifies the event as negative, short
the stock at the day -1 close and buy it back at the day 0 close. All
proceeds are reinvested; a fixed per-share spread is charged once per
round trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Mapping, Sequence

from .alignment import TradingCalendar, anchor_event
from .errors import EmptyClass, MissingBar, NonTradingAnnouncement, OutOfCalendarRange
from .event_study import LabeledEvent
from .model import Dataset, EarningsEvent, Timing
from .returns import trading_return
from .sentiment import (
    EventPolarity,
    PolarityThresholds,
    categorize_event,
    daily_counts,
    sentiment_score,
)


@dataclass(frozen=True)
class ClassCurve:
    """Mean hold-from-day--1 returns for one polarity class."""

    polarity: EventPolarity
    n_events: int
    stock_mean: tuple[float, ...]  # indexed by d = 0..max_d
    index_mean: tuple[float, ...]


@dataclass(frozen=True)
class TradeReturnCurves:
    days: tuple[int, ...]
    classes: dict[EventPolarity, ClassCurve]
    skipped: tuple[tuple[EarningsEvent, str], ...]


def trade_return_curves(
    labeled: Sequence[LabeledEvent],
    ds: Dataset,
    max_d: int = 10,
) -> TradeReturnCurves:
    """Class means of RT_d for the stock and for the benchmark index.

    The index curve applies the same buy-at-day--1 arithmetic to index
    levels on each event's own dates. An event with any missing bar over
    day -1..day max_d is skipped (recorded), not fatal.
    """
    if not labeled:
        raise EmptyClass("no events to average")
    days = tuple(range(max_d + 1))
    index_closes = ds.index_closes()
    rows: dict[EventPolarity, list[tuple[list[float], list[float]]]] = {}
    skipped: list[tuple[EarningsEvent, str]] = []
    for item in sorted(labeled, key=lambda le: le.event.key()):
        prices = ds.close_prices(item.event.ticker)
        try:
            stock_rts = [trading_return(item.anchor, prices, d) for d in days]
            index_rts = [trading_return(item.anchor, index_closes, d) for d in days]
        except (MissingBar, OutOfCalendarRange) as exc:
            skipped.append((item.event, f"{type(exc).__name__}: {exc}"))
            continue
        rows.setdefault(item.polarity, []).append((stock_rts, index_rts))
    if not rows:
        raise EmptyClass("every event was skipped")
    classes = {}
    for pol, event_rows in sorted(rows.items()):
        n = len(event_rows)
        stock_mean = tuple(
            sum(r[0][j] for r in event_rows) / n for j in range(len(days))
        )
        index_mean = tuple(
            sum(r[1][j] for r in event_rows) / n for j in range(len(days))
        )
        classes[pol] = ClassCurve(
            polarity=pol, n_events=n, stock_mean=stock_mean, index_mean=index_mean
        )
    return TradeReturnCurves(days=days, classes=classes, skipped=tuple(skipped))


@dataclass(frozen=True)
class Trade:
    """One executed short-then-cover round trip."""

    event: EarningsEvent
    ticker: str
    open_date: date  # day -1, short sold at the close
    close_date: date  # day 0, repurchased at the close
    open_price: float
    close_price: float
    spread: float  # per-share round-trip cost
    net_return: float  # (open - close - spread) / open

    @staticmethod
    def net(open_price: float, close_price: float, spread: float) -> float:
        return (open_price - close_price - spread) / open_price


@dataclass(frozen=True)
class TradeLedger:
    trades: tuple[Trade, ...]
    equity: tuple[tuple[date, float], ...]  # starts at 1.0
    benchmark: tuple[tuple[date, float], ...]  # index normalized to 1.0 at start
    skipped: tuple[tuple[EarningsEvent, str], ...]

    @property
    def final_equity(self) -> float:
        return self.equity[-1][1] if self.equity else 1.0

    @property
    def final_benchmark(self) -> float:
        return self.benchmark[-1][1] if self.benchmark else 1.0


def run_strategy(
    ds: Dataset,
    thresholds: PolarityThresholds,
    spread: float = 0.05,
    start: date | None = None,
    end: date | None = None,
    cal: TradingCalendar | None = None,
    day_counts: Mapping[tuple[str, date], tuple[int, int, int]] | None = None,
) -> TradeLedger:
    """Backtest the short-on-negative strategy over [start, end].

    ``thresholds`` must be the day -1 sentiment cuts for the AfterClose
    stratum. Trades whose open or close bar is missing are skipped with a
    diagnostic. Several events closing on the same day split the portfolio
    equally, which is equivalent to applying their mean net return. The
    ledger is a pure function of its inputs.
    """
    if cal is None:
        cal = TradingCalendar.from_dataset(ds)
    if start is None:
        start = cal.dates[0]
    if end is None:
        end = cal.dates[-1]
    in_range = [d for d in cal.dates if start <= d <= end]
    if not in_range:
        raise OutOfCalendarRange(f"no trading dates between {start} and {end}")
    if day_counts is None:
        day_counts = {
            (c.ticker, c.trading_date): (c.n_neg, c.n_neut, c.n_pos)
            for c in daily_counts(ds.tweets, cal)
        }

    trades: list[Trade] = []
    skipped: list[tuple[EarningsEvent, str]] = []
    for ev in sorted(ds.events, key=lambda e: e.key()):
        if ev.timing is not Timing.AFTER_CLOSE:
            continue
        try:
            anchor = anchor_event(ev, cal)
            open_date = anchor.day(-1)
        except (OutOfCalendarRange, NonTradingAnnouncement) as exc:
            skipped.append((ev, f"{type(exc).__name__}: {exc}"))
            continue
        if open_date < in_range[0] or anchor.day0 > in_range[-1]:
            continue
        neg, neut, pos = day_counts.get((ev.ticker, open_date), (0, 0, 0))
        score = sentiment_score(neg, neut, pos)
        if categorize_event(score, thresholds) is not EventPolarity.NEGATIVE:
            continue
        prices = ds.close_prices(ev.ticker)
        if open_date not in prices or anchor.day0 not in prices:
            skipped.append((ev, f"MissingBar: no close on {open_date} or {anchor.day0}"))
            continue
        open_px = prices[open_date]
        close_px = prices[anchor.day0]
        trades.append(
            Trade(
                event=ev,
                ticker=ev.ticker,
                open_date=open_date,
                close_date=anchor.day0,
                open_price=open_px,
                close_price=close_px,
                spread=spread,
                net_return=Trade.net(open_px, close_px, spread),
            )
        )
    trades.sort(key=lambda t: (t.open_date, t.ticker))

    by_close: dict[date, list[Trade]] = {}
    for t in trades:
        by_close.setdefault(t.close_date, []).append(t)

    index_closes = ds.index_closes()
    base = index_closes[in_range[0]]
    value = 1.0
    equity = []
    benchmark = []
    for d in in_range:
        group = by_close.get(d)
        if group:
            value *= 1.0 + sum(t.net_return for t in group) / len(group)
        equity.append((d, value))
        benchmark.append((d, index_closes[d] / base))
    return TradeLedger(
        trades=tuple(trades),
        equity=tuple(equity),
        benchmark=tuple(benchmark),
        skipped=tuple(skipped),
    )
