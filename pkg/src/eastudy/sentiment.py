"""Daily sentiment aggregation and event polarity classification.

Hourly tweet buckets roll up into close-delimited trading days. A day's
sentiment score is the Laplace-smoothed mean of the {-1, 0, +1} label
distribution, which keeps the score strictly inside (-1, +1) even for
empty days. Events are classified negative/neutral/positive by tercile
cuts of the score distribution within their stratum (timing class x
scoring day), so the three classes are uniformly populated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date

from .alignment import TradingCalendar
from .errors import TooFewEvents, ZeroDenominator
from .model import TweetBucket

LAPLACE_LABELS = 3  # one pseudo-count per sentiment label


class EventPolarity(enum.IntEnum):
    """Ordered so that monotone score implies monotone polarity."""

    NEGATIVE = -1
    NEUTRAL = 0
    POSITIVE = 1


@dataclass(frozen=True)
class DailyTweetCounts:
    ticker: str
    trading_date: date
    n_neg: int
    n_neut: int
    n_pos: int

    @property
    def total(self) -> int:
        return self.n_neg + self.n_neut + self.n_pos


@dataclass(frozen=True)
class PolarityThresholds:
    """Right-closed class boundaries: (-1, t_low], (t_low, t_high], (t_high, 1)."""

    t_low: float
    t_high: float

    def __post_init__(self):
        if self.t_low > self.t_high:
            raise ValueError(f"t_low {self.t_low} exceeds t_high {self.t_high}")


def daily_counts(
    tweets: tuple[TweetBucket, ...] | list[TweetBucket],
    cal: TradingCalendar,
) -> list[DailyTweetCounts]:
    """Sum hourly buckets into close-delimited daily counts.

    Sum-preserving: every input tweet lands in exactly one output day.
    Raises OutOfCalendarRange if a bucket falls outside calendar coverage.
    """
    acc: dict[tuple[str, date], list[int]] = {}
    for bucket in tweets:
        day = cal.close_delimited_day(bucket.hour_start)
        counts = acc.setdefault((bucket.ticker, day), [0, 0, 0])
        counts[0] += bucket.n_neg
        counts[1] += bucket.n_neut
        counts[2] += bucket.n_pos
    return [
        DailyTweetCounts(ticker=t, trading_date=d, n_neg=c[0], n_neut=c[1], n_pos=c[2])
        for (t, d), c in sorted(acc.items())
    ]


def sentiment_score(n_neg: int, n_neut: int, n_pos: int) -> float:
    """Laplace-smoothed mean of the label distribution, in (-1, +1)."""
    if min(n_neg, n_neut, n_pos) < 0:
        raise ValueError("tweet counts must be non-negative")
    return (n_pos - n_neg) / (n_pos + n_neut + n_neg + LAPLACE_LABELS)


def sentiment_polarity_score(n_neg: int, n_pos: int) -> float:
    """Neutral-blind score (n_pos - n_neg)/(n_pos + n_neg), in [-1, +1].

    Kept for comparison with earlier sentiment measures; the main pipeline
    uses ``sentiment_score``.
    """
    if min(n_neg, n_pos) < 0:
        raise ValueError("tweet counts must be non-negative")
    if n_neg + n_pos == 0:
        raise ZeroDenominator("polarity score needs at least one non-neutral tweet")
    return (n_pos - n_neg) / (n_pos + n_neg)


def tercile_thresholds(scores: list[float]) -> PolarityThresholds:
    """Order-statistic cuts that split scores into three equal classes.

    t_low is the ceil(n/3)-th smallest score and t_high the ceil(2n/3)-th;
    ties straddling a cut fall into the lower class because the class
    intervals are right-closed.
    """
    n = len(scores)
    if n < 3:
        raise TooFewEvents(f"need at least 3 scores to cut terciles, got {n}")
    ordered = sorted(scores)
    t_low = ordered[-(-n // 3) - 1]
    t_high = ordered[-(-2 * n // 3) - 1]
    return PolarityThresholds(t_low=t_low, t_high=t_high)


def categorize_event(score: float, th: PolarityThresholds) -> EventPolarity:
    if score <= th.t_low:
        return EventPolarity.NEGATIVE
    if score <= th.t_high:
        return EventPolarity.NEUTRAL
    return EventPolarity.POSITIVE


def categorize_event_by_surprise(es: float, cutoff: float = 0.025) -> EventPolarity:
    """Classic surprise-based categorization: +/-2.5% cutoffs by default."""
    if es > cutoff:
        return EventPolarity.POSITIVE
    if es < -cutoff:
        return EventPolarity.NEGATIVE
    return EventPolarity.NEUTRAL
