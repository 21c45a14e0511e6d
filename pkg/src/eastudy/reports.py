"""Analysis orchestration shared by the CLI subcommands.

Builds the common event universe (anchored events with day-aligned tweet
counts), per-stratum polarity thresholds, and the plot-ready report tables:
tweet/trading-volume profiles, study and trade-return curves, surprise
regressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Sequence

from .alignment import TradingCalendar, anchor_event, to_eastern
from .errors import NonTradingAnnouncement, OutOfCalendarRange
from .event_study import LabeledEvent
from .model import Dataset, EarningsEvent, Timing
from .regression import RegressionFit, fit_es_regression
from .returns import earnings_surprise
from .sentiment import (
    EventPolarity,
    PolarityThresholds,
    categorize_event,
    daily_counts,
    sentiment_score,
    tercile_thresholds,
)

POLARITY_DAYS = (0, -1)
CLASS_NAMES = {
    EventPolarity.NEGATIVE: "negative",
    EventPolarity.NEUTRAL: "neutral",
    EventPolarity.POSITIVE: "positive",
}
TIMING_NAMES = {Timing.AFTER_CLOSE: "afterclose", Timing.BEFORE_OPEN: "beforeopen"}


@dataclass(frozen=True)
class AnchoredEvent:
    event: EarningsEvent
    day0: date
    day_m1: date
    day0_tweets: int


@dataclass
class EventUniverse:
    """Anchorable events with day-0 tweet coverage, plus shared lookups.

    Events that cannot be anchored or that have zero day-0 tweets are
    dropped (recorded in ``dropped``), mirroring the exclusion of
    announcements with no same-day tweet activity.
    """

    ds: Dataset
    cal: TradingCalendar
    counts: dict[tuple[str, date], tuple[int, int, int]]
    events: list[AnchoredEvent]
    dropped: list[tuple[EarningsEvent, str]]

    def timing_events(self, timing: Timing) -> list[AnchoredEvent]:
        return [ae for ae in self.events if ae.event.timing is timing]

    def counts_at(self, ticker: str, day: date) -> tuple[int, int, int]:
        return self.counts.get((ticker, day), (0, 0, 0))

    def score(self, ae: AnchoredEvent, polarity_day: int) -> float:
        day = ae.day0 if polarity_day == 0 else ae.day_m1
        return sentiment_score(*self.counts_at(ae.event.ticker, day))


def build_universe(
    ds: Dataset,
    cal: TradingCalendar | None = None,
    until: date | None = None,
) -> EventUniverse:
    if cal is None:
        cal = TradingCalendar.from_dataset(ds)
    covered = [b for b in ds.tweets if cal.covers(b.hour_start)]
    counts = {
        (c.ticker, c.trading_date): (c.n_neg, c.n_neut, c.n_pos)
        for c in daily_counts(covered, cal)
    }
    events: list[AnchoredEvent] = []
    dropped: list[tuple[EarningsEvent, str]] = []
    for ev in sorted(ds.events, key=lambda e: e.key()):
        if until is not None and to_eastern(ev.announce_at).date() > until:
            continue
        try:
            anchor = anchor_event(ev, cal)
            day_m1 = anchor.day(-1)
        except (OutOfCalendarRange, NonTradingAnnouncement) as exc:
            dropped.append((ev, f"not anchorable: {exc}"))
            continue
        day0_tweets = sum(counts.get((ev.ticker, anchor.day0), (0, 0, 0)))
        if day0_tweets == 0:
            dropped.append((ev, "no day-0 tweets"))
            continue
        events.append(
            AnchoredEvent(event=ev, day0=anchor.day0, day_m1=day_m1, day0_tweets=day0_tweets)
        )
    return EventUniverse(ds=ds, cal=cal, counts=counts, events=events, dropped=dropped)


def stratum_thresholds(
    universe: EventUniverse, timing: Timing, polarity_day: int
) -> tuple[PolarityThresholds, int]:
    """Tercile cuts for one (timing, scoring-day) stratum."""
    scores = [universe.score(ae, polarity_day) for ae in universe.timing_events(timing)]
    return tercile_thresholds(scores), len(scores)


def all_thresholds(
    universe: EventUniverse,
) -> list[tuple[Timing, int, PolarityThresholds, int]]:
    rows = []
    for timing in (Timing.AFTER_CLOSE, Timing.BEFORE_OPEN):
        for day in POLARITY_DAYS:
            th, n = stratum_thresholds(universe, timing, day)
            rows.append((timing, day, th, n))
    return rows


def label_stratum(
    universe: EventUniverse,
    timing: Timing,
    polarity_day: int,
    thresholds: PolarityThresholds | None = None,
) -> list[LabeledEvent]:
    """Classify one timing class's events by their stratum sentiment score."""
    if thresholds is None:
        thresholds, _ = stratum_thresholds(universe, timing, polarity_day)
    labeled = []
    for ae in universe.timing_events(timing):
        polarity = categorize_event(universe.score(ae, polarity_day), thresholds)
        labeled.append(
            LabeledEvent(
                event=ae.event,
                anchor=anchor_event(ae.event, universe.cal),
                polarity=polarity,
            )
        )
    return labeled


def surprise_regressions(universe: EventUniverse) -> list[RegressionFit]:
    """The four sentiment-vs-surprise fits: timing x scoring day."""
    fits = []
    for timing in (Timing.AFTER_CLOSE, Timing.BEFORE_OPEN):
        for day in POLARITY_DAYS:
            pairs = []
            for ae in universe.timing_events(timing):
                if ae.event.excluded:
                    continue
                pairs.append(
                    (universe.score(ae, day), earnings_surprise(ae.event).es)
                )
            name = f"{TIMING_NAMES[timing]}_day{day}"
            fits.append(fit_es_regression(pairs, stratum=name))
    return fits


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var) / math.sqrt(n)


@dataclass
class VolumeReport:
    daily_rows: list[tuple]  # timing, rel_day, n, mean_tweets, se_tweets, mean_volume, se_volume
    hourly_rows: list[tuple]  # timing, rel_day, hour_eastern, n, mean_tweets, se_tweets
    summary_rows: list[tuple]  # metric, value


def volume_report(
    universe: EventUniverse, rel_days: tuple[int, int] = (-5, 5)
) -> VolumeReport:
    """Tweet and trading activity around announcements.

    Relative-day tweet means use the event's own ticker; trading volume is
    the share volume of that ticker's bar. Hourly profiles cover days
    -1..+1 in US/Eastern wall-clock hours of the close-delimited day. The
    three-day multiplier compares days -1..+1 cumulatively against three
    average ticker-days; the quiet baseline excludes event windows.
    """
    ds, cal = universe.ds, universe.cal
    tickers = ds.tickers
    volume_by: dict[tuple[str, date], int] = {
        (b.ticker, b.date): b.volume for b in ds.bars
    }
    total_by_day: dict[tuple[str, date], int] = {
        key: sum(c) for key, c in universe.counts.items()
    }
    hour_by_day: dict[tuple[str, date], dict[int, int]] = {}
    for b in ds.tweets:
        if not cal.covers(b.hour_start):
            continue
        day = cal.close_delimited_day(b.hour_start)
        hours = hour_by_day.setdefault((b.ticker, day), {})
        hour = to_eastern(b.hour_start).hour
        hours[hour] = hours.get(hour, 0) + b.total

    groups: list[tuple[str, list[AnchoredEvent]]] = [
        ("all", universe.events),
        ("afterclose", universe.timing_events(Timing.AFTER_CLOSE)),
        ("beforeopen", universe.timing_events(Timing.BEFORE_OPEN)),
    ]

    def day_at(ae: AnchoredEvent, k: int) -> date | None:
        try:
            i = cal.index_of(ae.day0) + k
            return cal.date_at(i) if i >= 0 else None
        except OutOfCalendarRange:
            return None

    daily_rows = []
    mean_at: dict[int, float] = {}
    for name, group in groups:
        for k in range(rel_days[0], rel_days[1] + 1):
            tweet_vals: list[float] = []
            volume_vals: list[float] = []
            for ae in group:
                d = day_at(ae, k)
                if d is None:
                    continue
                tweet_vals.append(float(total_by_day.get((ae.event.ticker, d), 0)))
                vol = volume_by.get((ae.event.ticker, d))
                if vol is not None:
                    volume_vals.append(float(vol))
            if not tweet_vals:
                continue
            mt, st = _mean_se(tweet_vals)
            mv, sv = _mean_se(volume_vals) if volume_vals else (0.0, 0.0)
            daily_rows.append((name, k, len(tweet_vals), mt, st, mv, sv))
            if name == "all":
                mean_at[k] = mt

    hourly_rows = []
    for name, group in groups:
        for k in (-1, 0, 1):
            per_hour: dict[int, list[float]] = {h: [] for h in range(24)}
            n_ev = 0
            for ae in group:
                d = day_at(ae, k)
                if d is None:
                    continue
                n_ev += 1
                hours = hour_by_day.get((ae.event.ticker, d), {})
                for h in range(24):
                    per_hour[h].append(float(hours.get(h, 0)))
            if n_ev == 0:
                continue
            for h in range(24):
                mt, st = _mean_se(per_hour[h])
                hourly_rows.append((name, k, h, n_ev, mt, st))

    n_days = len(cal.dates)
    n_tickers = max(len(tickers), 1)
    total_tweets = sum(total_by_day.values())
    overall_mean = total_tweets / (n_days * n_tickers)

    elevated: set[tuple[str, date]] = set()
    for ae in universe.events:
        for k in (-1, 0, 1):
            d = day_at(ae, k)
            if d is not None:
                elevated.add((ae.event.ticker, d))
    quiet_total = 0
    quiet_cells = 0
    for t in tickers:
        for d in cal.dates:
            if (t, d) in elevated:
                continue
            quiet_cells += 1
            quiet_total += total_by_day.get((t, d), 0)
    quiet_mean = quiet_total / quiet_cells if quiet_cells else 0.0

    three_day = sum(mean_at.get(k, 0.0) for k in (-1, 0, 1))
    summary_rows = [
        ("mean_tweets_per_ticker_day", overall_mean),
        ("three_day_event_multiplier", three_day / (3 * overall_mean) if overall_mean else 0.0),
        ("quiet_day_mean_tweets", quiet_mean),
        ("day0_to_quiet_ratio", mean_at.get(0, 0.0) / quiet_mean if quiet_mean else 0.0),
        ("n_events", float(len(universe.events))),
        ("n_dropped_events", float(len(universe.dropped))),
        ("n_trading_days", float(n_days)),
        ("n_tickers", float(len(tickers))),
    ]
    return VolumeReport(
        daily_rows=daily_rows, hourly_rows=hourly_rows, summary_rows=summary_rows
    )
