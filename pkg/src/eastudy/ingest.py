"""CSV ingestion, validation, canonical emission, and coverage checks.

Four inputs: daily bars, benchmark index levels, hourly tweet buckets, and
announcement events. Parsing is total: every data row is either accepted
or produces exactly one row-numbered diagnostic; nothing is dropped
silently. ``load_dataset`` raises on the first problem (carrying all
diagnostics), while the ``parse_*`` functions expose the collect-all
behavior directly.

The trading calendar is implied by the index file: a date is a trading
day iff the index has a bar for it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .alignment import MARKET_CLOSE, MARKET_OPEN, TradingCalendar, anchor_event, to_eastern
from .errors import (
    InvariantViolation,
    MissingFile,
    NonTradingAnnouncement,
    OutOfCalendarRange,
    SchemaMismatch,
)
from .event_study import StudyConfig
from .model import (
    DailyBar,
    Dataset,
    EarningsEvent,
    IndexBar,
    TICKER_RE,
    Timing,
    TweetBucket,
)
from .returns import calendar_aligned_returns, daily_returns
from .sentiment import daily_counts

PRICES_HEADER = ["date", "ticker", "close", "volume"]
INDEX_HEADER = ["date", "close"]
TWEETS_HEADER = ["hour_start_utc", "ticker", "n_neg", "n_neut", "n_pos"]
EVENTS_HEADER = ["ticker", "announce_at_utc", "timing", "eps_reported", "eps_estimated"]


@dataclass(frozen=True)
class Diagnostic:
    """One rejected row (or header), with its file line number."""

    path: str
    line: int  # physical line number; the header is line 1
    kind: str  # "schema" or "invariant"
    message: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line}: {self.message}"


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp (offset or Z) and normalize to UTC."""
    t = text.strip()
    if t.endswith(("Z", "z")):
        t = t[:-1] + "+00:00"
    parsed = datetime.fromisoformat(t)
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp without UTC offset: {text!r}")
    return parsed.astimezone(timezone.utc)


def format_rfc3339(instant: datetime) -> str:
    return instant.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _read_rows(path: Path, header: list[str]):
    """Yield (lineno, cells) for data rows; raise on a bad header."""
    if not path.exists():
        raise MissingFile(str(path))
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise SchemaMismatch(
                f"{path}: empty file, expected header {','.join(header)}"
            ) from None
        if first != header:
            raise SchemaMismatch(
                f"{path}:1: header {','.join(first)!r} does not match "
                f"expected {','.join(header)!r}"
            )
        for lineno, cells in enumerate(reader, start=2):
            yield lineno, cells


def _cell_error(path, lineno, column, message) -> Diagnostic:
    return Diagnostic(str(path), lineno, "schema", f"column {column}: {message}")


def _invariant(path, lineno, message) -> Diagnostic:
    return Diagnostic(str(path), lineno, "invariant", message)


def _parse_date(text: str) -> date:
    return date.fromisoformat(text.strip())


def parse_prices_csv(path: str | Path):
    """Parse prices.csv -> (list[(lineno, DailyBar)], list[Diagnostic])."""
    path = Path(path)
    accepted: list[tuple[int, DailyBar]] = []
    diags: list[Diagnostic] = []
    last_date: dict[str, date] = {}
    for lineno, cells in _read_rows(path, PRICES_HEADER):
        if len(cells) != len(PRICES_HEADER):
            diags.append(
                Diagnostic(str(path), lineno, "schema", f"expected 4 cells, got {len(cells)}")
            )
            continue
        raw_date, raw_ticker, raw_close, raw_volume = cells
        try:
            day = _parse_date(raw_date)
        except ValueError:
            diags.append(_cell_error(path, lineno, "date", f"bad date {raw_date!r}"))
            continue
        ticker = raw_ticker.strip()
        if not TICKER_RE.match(ticker):
            diags.append(_cell_error(path, lineno, "ticker", f"bad ticker {raw_ticker!r}"))
            continue
        try:
            close = float(raw_close)
        except ValueError:
            diags.append(_cell_error(path, lineno, "close", f"not a number: {raw_close!r}"))
            continue
        try:
            volume = int(raw_volume)
        except ValueError:
            diags.append(_cell_error(path, lineno, "volume", f"not an integer: {raw_volume!r}"))
            continue
        if not close > 0:
            diags.append(_invariant(path, lineno, f"close must be positive, got {close}"))
            continue
        if volume < 0:
            diags.append(_invariant(path, lineno, f"volume must be non-negative, got {volume}"))
            continue
        prev = last_date.get(ticker)
        if prev is not None and day <= prev:
            what = "duplicate" if day == prev else "out-of-order"
            diags.append(_invariant(path, lineno, f"{what} bar for {ticker} on {day}"))
            continue
        last_date[ticker] = day
        accepted.append((lineno, DailyBar(ticker=ticker, date=day, close=close, volume=volume)))
    return accepted, diags


def parse_index_csv(path: str | Path):
    path = Path(path)
    accepted: list[tuple[int, IndexBar]] = []
    diags: list[Diagnostic] = []
    prev: date | None = None
    for lineno, cells in _read_rows(path, INDEX_HEADER):
        if len(cells) != len(INDEX_HEADER):
            diags.append(
                Diagnostic(str(path), lineno, "schema", f"expected 2 cells, got {len(cells)}")
            )
            continue
        raw_date, raw_close = cells
        try:
            day = _parse_date(raw_date)
        except ValueError:
            diags.append(_cell_error(path, lineno, "date", f"bad date {raw_date!r}"))
            continue
        try:
            close = float(raw_close)
        except ValueError:
            diags.append(_cell_error(path, lineno, "close", f"not a number: {raw_close!r}"))
            continue
        if not close > 0:
            diags.append(_invariant(path, lineno, f"index level must be positive, got {close}"))
            continue
        if prev is not None and day <= prev:
            what = "duplicate" if day == prev else "out-of-order"
            diags.append(_invariant(path, lineno, f"{what} index bar on {day}"))
            continue
        prev = day
        accepted.append((lineno, IndexBar(date=day, close=close)))
    return accepted, diags


def parse_tweets_csv(path: str | Path):
    path = Path(path)
    accepted: list[tuple[int, TweetBucket]] = []
    diags: list[Diagnostic] = []
    seen: set[tuple[str, datetime]] = set()
    for lineno, cells in _read_rows(path, TWEETS_HEADER):
        if len(cells) != len(TWEETS_HEADER):
            diags.append(
                Diagnostic(str(path), lineno, "schema", f"expected 5 cells, got {len(cells)}")
            )
            continue
        raw_hour, raw_ticker, raw_neg, raw_neut, raw_pos = cells
        try:
            hour_start = parse_rfc3339(raw_hour)
        except ValueError:
            diags.append(
                _cell_error(path, lineno, "hour_start_utc", f"bad timestamp {raw_hour!r}")
            )
            continue
        if hour_start.minute or hour_start.second or hour_start.microsecond:
            diags.append(
                _invariant(path, lineno, f"hour_start not on a whole hour: {raw_hour!r}")
            )
            continue
        ticker = raw_ticker.strip()
        if not TICKER_RE.match(ticker):
            diags.append(_cell_error(path, lineno, "ticker", f"bad ticker {raw_ticker!r}"))
            continue
        try:
            counts = [int(raw_neg), int(raw_neut), int(raw_pos)]
        except ValueError:
            diags.append(
                _cell_error(path, lineno, "n_neg/n_neut/n_pos", "counts must be integers")
            )
            continue
        if min(counts) < 0:
            diags.append(_invariant(path, lineno, "tweet counts must be non-negative"))
            continue
        key = (ticker, hour_start)
        if key in seen:
            diags.append(
                _invariant(path, lineno, f"duplicate bucket for {ticker} at {raw_hour}")
            )
            continue
        seen.add(key)
        accepted.append(
            (
                lineno,
                TweetBucket(
                    ticker=ticker,
                    hour_start=hour_start,
                    n_neg=counts[0],
                    n_neut=counts[1],
                    n_pos=counts[2],
                ),
            )
        )
    return accepted, diags


def parse_events_csv(path: str | Path):
    path = Path(path)
    accepted: list[tuple[int, EarningsEvent]] = []
    diags: list[Diagnostic] = []
    for lineno, cells in _read_rows(path, EVENTS_HEADER):
        if len(cells) != len(EVENTS_HEADER):
            diags.append(
                Diagnostic(str(path), lineno, "schema", f"expected 5 cells, got {len(cells)}")
            )
            continue
        raw_ticker, raw_at, raw_timing, raw_rep, raw_est = cells
        ticker = raw_ticker.strip()
        if not TICKER_RE.match(ticker):
            diags.append(_cell_error(path, lineno, "ticker", f"bad ticker {raw_ticker!r}"))
            continue
        try:
            announce_at = parse_rfc3339(raw_at)
        except ValueError:
            diags.append(
                _cell_error(path, lineno, "announce_at_utc", f"bad timestamp {raw_at!r}")
            )
            continue
        timing_text = raw_timing.strip()
        try:
            timing = Timing(timing_text)
        except ValueError:
            diags.append(
                _cell_error(
                    path, lineno, "timing",
                    f"{raw_timing!r} not in {{BeforeOpen, AfterClose}}",
                )
            )
            continue
        try:
            eps_reported = float(raw_rep)
            eps_estimated = float(raw_est)
        except ValueError:
            diags.append(
                _cell_error(path, lineno, "eps_reported/eps_estimated", "not a number")
            )
            continue
        local_time = to_eastern(announce_at).time()
        if timing is Timing.BEFORE_OPEN and local_time >= MARKET_OPEN:
            diags.append(
                _invariant(
                    path, lineno,
                    f"{ticker}: BeforeOpen announcement at {local_time} US/Eastern "
                    "(not before 09:30)",
                )
            )
            continue
        if timing is Timing.AFTER_CLOSE and local_time < MARKET_CLOSE:
            diags.append(
                _invariant(
                    path, lineno,
                    f"{ticker}: AfterClose announcement at {local_time} US/Eastern "
                    "(not at/after 16:00)",
                )
            )
            continue
        excluded = eps_estimated == 0.0
        accepted.append(
            (
                lineno,
                EarningsEvent(
                    ticker=ticker,
                    announce_at=announce_at,
                    timing=timing,
                    eps_reported=eps_reported,
                    eps_estimated=eps_estimated,
                    excluded=excluded,
                    exclusion_reason="zero estimate" if excluded else "",
                ),
            )
        )
    return accepted, diags


def load_dataset(
    prices_path: str | Path,
    index_path: str | Path,
    tweets_path: str | Path,
    events_path: str | Path,
) -> Dataset:
    """Load and cross-validate the four inputs into one Dataset.

    Raises MissingFile / SchemaMismatch / InvariantViolation; row-level
    problems are attached to the exception as ``.diagnostics``.
    """
    bars, d1 = parse_prices_csv(prices_path)
    index, d2 = parse_index_csv(index_path)
    tweets, d3 = parse_tweets_csv(tweets_path)
    events, d4 = parse_events_csv(events_path)
    diags = d1 + d2 + d3 + d4

    if not index:
        diags.append(_invariant(Path(index_path), 1, "index file has no usable rows"))
    else:
        index_dates = {b.date for _, b in index}
        bar_tickers = {b.ticker for _, b in bars}
        for lineno, bar in bars:
            if bar.date not in index_dates:
                diags.append(
                    _invariant(
                        Path(prices_path), lineno,
                        f"{bar.ticker} bar on {bar.date} has no index bar (non-trading date)",
                    )
                )
        for lineno, ev in events:
            if ev.ticker not in bar_tickers:
                diags.append(
                    _invariant(
                        Path(events_path), lineno,
                        f"event ticker {ev.ticker} has no price bars",
                    )
                )

    if diags:
        kinds = {d.kind for d in diags}
        summary = f"{len(diags)} problem(s), first: {diags[0]}"
        if "schema" in kinds:
            raise SchemaMismatch(summary, diagnostics=diags)
        raise InvariantViolation(summary, diagnostics=diags)

    return Dataset(
        bars=tuple(sorted((b for _, b in bars), key=lambda b: (b.ticker, b.date))),
        index=tuple(b for _, b in index),
        tweets=tuple(sorted((b for _, b in tweets), key=lambda b: (b.ticker, b.hour_start))),
        events=tuple(sorted((e for _, e in events), key=lambda e: e.key())),
    )


def _write_csv(path: Path, header: list[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def write_dataset(ds: Dataset, out_dir: str | Path) -> list[Path]:
    """Emit the canonical four-file form; re-loading reproduces it exactly."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "prices.csv", out / "index.csv", out / "tweets.csv", out / "events.csv"]
    _write_csv(
        paths[0], PRICES_HEADER,
        ((b.date.isoformat(), b.ticker, repr(b.close), b.volume) for b in ds.bars),
    )
    _write_csv(
        paths[1], INDEX_HEADER,
        ((b.date.isoformat(), repr(b.close)) for b in ds.index),
    )
    _write_csv(
        paths[2], TWEETS_HEADER,
        (
            (format_rfc3339(b.hour_start), b.ticker, b.n_neg, b.n_neut, b.n_pos)
            for b in ds.tweets
        ),
    )
    _write_csv(
        paths[3], EVENTS_HEADER,
        (
            (
                e.ticker,
                format_rfc3339(e.announce_at),
                e.timing.value,
                repr(e.eps_reported),
                repr(e.eps_estimated),
            )
            for e in ds.events
        ),
    )
    return paths


@dataclass(frozen=True)
class CoverageReport:
    """Per-event data sufficiency for the event study."""

    day0_tweets: int
    estimation_days: int
    event_window_ok: bool
    excluded: bool
    reasons: tuple[str, ...]


def validate_event_coverage(
    ds: Dataset, cfg: StudyConfig = StudyConfig()
) -> list[tuple[EarningsEvent, CoverageReport]]:
    """Report, per event, whether the study's data requirements are met.

    An event is marked excluded when it has no day-0 tweets, when fewer
    than the required paired returns precede its event window, or when the
    window itself cannot be served. Report-only: nothing raises.
    """
    cal = TradingCalendar.from_dataset(ds)
    covered = [b for b in ds.tweets if cal.covers(b.hour_start)]
    tweet_totals = {
        (c.ticker, c.trading_date): c.total for c in daily_counts(covered, cal)
    }
    index_returns = daily_returns(ds.index).as_dict() if len(ds.index) > 1 else {}
    stock_returns_cache: dict[str, dict] = {}
    out = []
    for ev in sorted(ds.events, key=lambda e: e.key()):
        reasons: list[str] = []
        day0_tweets = 0
        estimation_days = 0
        window_ok = False
        try:
            anchor = anchor_event(ev, cal)
        except (OutOfCalendarRange, NonTradingAnnouncement) as exc:
            reasons.append(f"announcement not anchorable: {exc}")
        else:
            day0_tweets = tweet_totals.get((ev.ticker, anchor.day0), 0)
            if day0_tweets == 0:
                reasons.append("no day-0 tweets")
            if ev.ticker not in stock_returns_cache:
                bars = ds.bars_by_ticker.get(ev.ticker, ())
                stock_returns_cache[ev.ticker] = (
                    calendar_aligned_returns(bars, cal) if len(bars) > 1 else {}
                )
            stock_returns = stock_returns_cache[ev.ticker]
            i = cal.index_of(anchor.day0) + cfg.event_window[0] - 1
            while i >= 0 and estimation_days < cfg.estimation_window_length:
                d = cal.date_at(i)
                if d in stock_returns and d in index_returns:
                    estimation_days += 1
                i -= 1
            if estimation_days < cfg.estimation_window_length:
                reasons.append("insufficient estimation window")
            try:
                window_dates = [anchor.day(k) for k in cfg.taus]
                window_ok = all(
                    d in stock_returns and d in index_returns for d in window_dates
                )
            except OutOfCalendarRange:
                window_ok = False
            if not window_ok:
                reasons.append("insufficient event window")
        out.append(
            (
                ev,
                CoverageReport(
                    day0_tweets=day0_tweets,
                    estimation_days=estimation_days,
                    event_window_ok=window_ok,
                    excluded=bool(reasons),
                    reasons=tuple(reasons),
                ),
            )
        )
    return out
