from datetime import date
from fractions import Fraction

import pytest

from eastudy.alignment import anchor_event
from eastudy.errors import EmptyClass
from eastudy.event_study import LabeledEvent
from eastudy.model import TweetBucket, Timing
from eastudy.returns import trading_return
from eastudy.sentiment import EventPolarity, PolarityThresholds
from eastudy.trading import Trade, run_strategy, trade_return_curves

from conftest import (
    bars_from_closes,
    eastern,
    index_from_closes,
    make_calendar,
    make_dataset,
    make_event,
)

# thresholds that call any sub-zero score negative
LOOSE_TH = PolarityThresholds(t_low=-0.0001, t_high=0.5)


def one_event_dataset(closes, index_closes=None, tweets=(), n_days=10):
    cal = make_calendar(date(2015, 6, 1), n_days)
    bars = bars_from_closes("AAA", cal.dates[: len(closes)], closes)
    idx = index_from_closes(cal.dates, index_closes or [1000.0 + i for i in range(n_days)])
    ev = make_event("AAA", eastern(2015, 6, 2, 17, 0), Timing.AFTER_CLOSE)
    ds = make_dataset(bars=bars, index=idx, tweets=tweets, events=[ev])
    return ds, cal, ev


class TestTradeNet:
    def test_toy_case_exact(self):
        # open 100, close 95, spread 0.05: the direct evaluation of the
        # net-return identity, bit for bit
        net = Trade.net(100.0, 95.0, 0.05)
        assert net == (100.0 - 95.0 - 0.05) / 100.0
        assert net == 0.0495
        assert 1.0 * (1.0 + net) == 1.0495

    @pytest.mark.parametrize(
        "open_px,close_px,spread",
        [(100.0, 95.0, 0.05), (50.0, 55.0, 0.05), (10.0, 10.0, 0.0),
         (200.0, 190.0, 0.02), (33.0, 30.0, 0.05), (80.0, 81.5, 0.1),
         (120.0, 96.0, 0.05), (64.0, 66.0, 0.0), (99.0, 88.0, 0.05),
         (41.0, 40.0, 0.01)],
    )
    def test_matches_exact_rational(self, open_px, close_px, spread):
        exact = (Fraction(open_px) - Fraction(close_px) - Fraction(spread)) / Fraction(open_px)
        assert abs(Trade.net(open_px, close_px, spread) - float(exact)) <= 1e-12


class TestTradeReturnCurves:
    def test_constant_prices_flat_curves(self):
        ds, cal, ev = one_event_dataset([100.0] * 10, index_closes=[500.0] * 10)
        labeled = [LabeledEvent(ev, anchor_event(ev, cal), EventPolarity.NEUTRAL)]
        curves = trade_return_curves(labeled, ds, max_d=5)
        c = curves.classes[EventPolarity.NEUTRAL]
        assert c.stock_mean == (0.0,) * 6
        assert c.index_mean == (0.0,) * 6

    def test_two_event_means_match_hand_oracle(self):
        cal = make_calendar(date(2015, 6, 1), 10)
        bars_a = bars_from_closes("AAA", cal.dates, [100, 104, 102, 106, 103, 105, 101, 99, 98, 97])
        bars_b = bars_from_closes("BBB", cal.dates, [50, 49, 51, 53, 52, 54, 55, 53, 52, 51])
        idx = index_from_closes(cal.dates, [1000, 1010, 1005, 1020, 1015, 1030, 1025, 1040, 1035, 1050])
        ev_a = make_event("AAA", eastern(2015, 6, 2, 17, 0), Timing.AFTER_CLOSE)
        ev_b = make_event("BBB", eastern(2015, 6, 2, 17, 0), Timing.AFTER_CLOSE)
        ds = make_dataset(bars=bars_a + bars_b, index=idx, events=[ev_a, ev_b])
        labeled = [
            LabeledEvent(ev_a, anchor_event(ev_a, cal), EventPolarity.POSITIVE),
            LabeledEvent(ev_b, anchor_event(ev_b, cal), EventPolarity.POSITIVE),
        ]
        curves = trade_return_curves(labeled, ds, max_d=3)
        c = curves.classes[EventPolarity.POSITIVE]
        # hand evaluation: both events anchor at day -1 = 6/2 (index 1)
        for d in range(4):
            rt_a = Fraction([100, 104, 102, 106, 103, 105][2 + d] - 104, 104)
            rt_b = Fraction([50, 49, 51, 53, 52, 54][2 + d] - 49, 49)
            expected = (rt_a + rt_b) / 2
            assert c.stock_mean[d] == pytest.approx(float(expected), abs=1e-15)
            rt_i = Fraction([1000, 1010, 1005, 1020, 1015, 1030][2 + d] - 1010, 1010)
            assert c.index_mean[d] == pytest.approx(float(rt_i), abs=1e-15)

    def test_missing_bar_skips_event_only(self):
        ds, cal, ev = one_event_dataset([100.0] * 4)  # bars end before day 10
        labeled = [LabeledEvent(ev, anchor_event(ev, cal), EventPolarity.NEUTRAL)]
        with pytest.raises(EmptyClass):
            trade_return_curves(labeled, ds, max_d=8)

    def test_empty_input(self):
        ds, _, _ = one_event_dataset([100.0] * 10)
        with pytest.raises(EmptyClass):
            trade_return_curves([], ds)


def negative_tweets(ticker, when):
    return TweetBucket(ticker, when, n_neg=30, n_neut=5, n_pos=1)


class TestRunStrategy:
    def test_no_negative_events_means_flat_equity(self):
        # all-positive tweets keep the score above the negative cut
        tweets = [TweetBucket("AAA", eastern(2015, 6, 2, 10, 0), 0, 0, 20)]
        ds, cal, ev = one_event_dataset([100.0] * 10, tweets=tweets)
        ledger = run_strategy(ds, LOOSE_TH)
        assert ledger.trades == ()
        assert all(v == 1.0 for _, v in ledger.equity)

    def test_single_trade_toy_equity(self):
        # day -1 = 6/2 close 100, day 0 = 6/3 close 95
        closes = [100.0, 100.0, 95.0] + [95.0] * 7
        tweets = [negative_tweets("AAA", eastern(2015, 6, 2, 10, 0))]
        ds, cal, ev = one_event_dataset(closes, tweets=tweets)
        ledger = run_strategy(ds, LOOSE_TH, spread=0.05)
        assert len(ledger.trades) == 1
        trade = ledger.trades[0]
        assert trade.open_date == date(2015, 6, 2)
        assert trade.close_date == date(2015, 6, 3)
        assert trade.net_return == 0.0495
        assert ledger.final_equity == 1.0495

    def test_zero_spread_single_trade_is_negated_rt0(self):
        closes = [100.0, 102.0, 97.0, 98.0, 99.0, 100.0, 101.0, 96.0, 95.0, 94.0]
        tweets = [negative_tweets("AAA", eastern(2015, 6, 2, 10, 0))]
        ds, cal, ev = one_event_dataset(closes, tweets=tweets)
        ledger = run_strategy(ds, LOOSE_TH, spread=0.0)
        anchor = anchor_event(ev, cal)
        rt0 = trading_return(anchor, ds.close_prices("AAA"), 0)
        assert ledger.final_equity - 1.0 == pytest.approx(-rt0, abs=1e-15)

    def test_benchmark_normalized_to_one(self):
        ds, cal, ev = one_event_dataset([100.0] * 10)
        ledger = run_strategy(ds, LOOSE_TH)
        assert ledger.benchmark[0][1] == 1.0
        last_date, last_val = ledger.benchmark[-1]
        assert last_val == pytest.approx(1009.0 / 1000.0, abs=1e-15)

    def test_equity_piecewise_constant_between_trades(self):
        closes = [100.0, 100.0, 95.0] + [95.0] * 7
        tweets = [negative_tweets("AAA", eastern(2015, 6, 2, 10, 0))]
        ds, cal, ev = one_event_dataset(closes, tweets=tweets)
        ledger = run_strategy(ds, LOOSE_TH)
        values = [v for _, v in ledger.equity]
        assert values[0] == 1.0  # 6/1, before the trade settles
        assert values[1] == 1.0  # 6/2, trade opens at the close
        assert all(v == 1.0495 for v in values[2:])

    def test_same_day_events_split_capital(self):
        cal = make_calendar(date(2015, 6, 1), 10)
        bars_a = bars_from_closes("AAA", cal.dates, [100.0, 100.0] + [90.0] * 8)
        bars_b = bars_from_closes("BBB", cal.dates, [50.0, 50.0] + [55.0] * 8)
        idx = index_from_closes(cal.dates, [1000.0] * 10)
        ev_a = make_event("AAA", eastern(2015, 6, 2, 17, 0), Timing.AFTER_CLOSE)
        ev_b = make_event("BBB", eastern(2015, 6, 2, 16, 30), Timing.AFTER_CLOSE)
        tweets = [
            negative_tweets("AAA", eastern(2015, 6, 2, 10, 0)),
            negative_tweets("BBB", eastern(2015, 6, 2, 11, 0)),
        ]
        ds = make_dataset(bars=bars_a + bars_b, index=idx, tweets=tweets,
                          events=[ev_a, ev_b])
        ledger = run_strategy(ds, LOOSE_TH, spread=0.0)
        assert len(ledger.trades) == 2
        r_a = (100.0 - 90.0) / 100.0
        r_b = (50.0 - 55.0) / 50.0
        assert ledger.final_equity == pytest.approx(1.0 + (r_a + r_b) / 2, abs=1e-15)

    def test_reruns_identical(self):
        closes = [100.0, 100.0, 95.0] + [94.0] * 7
        tweets = [negative_tweets("AAA", eastern(2015, 6, 2, 10, 0))]
        ds, cal, ev = one_event_dataset(closes, tweets=tweets)
        a = run_strategy(ds, LOOSE_TH)
        b = run_strategy(ds, LOOSE_TH)
        assert a == b

    def test_missing_close_bar_skips_with_diagnostic(self):
        # bars stop at day -1, so the cover price is missing
        cal = make_calendar(date(2015, 6, 1), 10)
        bars = bars_from_closes("AAA", cal.dates[:2], [100.0, 100.0])
        idx = index_from_closes(cal.dates, [1000.0] * 10)
        ev = make_event("AAA", eastern(2015, 6, 2, 17, 0), Timing.AFTER_CLOSE)
        tweets = [negative_tweets("AAA", eastern(2015, 6, 2, 10, 0))]
        ds = make_dataset(bars=bars, index=idx, tweets=tweets, events=[ev])
        ledger = run_strategy(ds, LOOSE_TH)
        assert ledger.trades == ()
        assert len(ledger.skipped) == 1
        assert "MissingBar" in ledger.skipped[0][1]

    def test_date_range_filter(self):
        closes = [100.0, 100.0, 95.0] + [94.0] * 7
        tweets = [negative_tweets("AAA", eastern(2015, 6, 2, 10, 0))]
        ds, cal, ev = one_event_dataset(closes, tweets=tweets)
        ledger = run_strategy(ds, LOOSE_TH, start=date(2015, 6, 4), end=date(2015, 6, 10))
        assert ledger.trades == ()  # event's open date precedes the range
        assert ledger.final_equity == 1.0
