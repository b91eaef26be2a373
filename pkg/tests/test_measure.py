"""Window bookkeeping for the throughput estimator.

The closed-form window_counts is checked against brute-force per-packet
binning, and the estimator against hand-computed kbps values.
"""

import pytest
from hypothesis import given, strategies as st

from txpsim.channel import PAYLOAD_BITS
from txpsim.measure import (
    PKT_CYCLE_US,
    ThroughputEstimator,
    packet_timestamps_us,
    window_counts,
    window_us,
)


def test_window_us():
    assert window_us(1.0) == 1_000_000
    assert window_us(1000.0) == 1000
    assert window_us(0.001) == 1_000_000_000
    with pytest.raises(ValueError):
        window_us(0.0)
    with pytest.raises(ValueError):
        window_us(2e6)  # sub-microsecond window


def test_packet_timestamps():
    assert packet_timestamps_us(0, 3) == [1500, 3000, 4500]
    assert packet_timestamps_us(1_000_000, 1) == [1_001_500]
    assert packet_timestamps_us(0, 0) == []


def brute_counts(start_us, delivered, win_us):
    counts = {}
    for t in packet_timestamps_us(start_us, delivered):
        counts[t // win_us] = counts.get(t // win_us, 0) + 1
    return sorted(counts.items())


@given(
    st.integers(min_value=0, max_value=3_000_000),
    st.integers(min_value=0, max_value=266),
    st.sampled_from([1000, 10_000, 100_000, 400_000, 1_000_000]),
)
def test_window_counts_matches_brute_force(start_us, delivered, win_us):
    assert window_counts(start_us, delivered, win_us) == brute_counts(start_us, delivered, win_us)


@given(st.integers(min_value=0, max_value=10_000_000), st.integers(min_value=0, max_value=266))
def test_window_counts_conserves_packets(start_us, delivered):
    got = window_counts(start_us, delivered, 1_000_000)
    assert sum(c for _, c in got) == delivered


def test_estimator_hand_value():
    # 50 packets inside the first 1 Hz window: 50 x 1952 bits / 1 s = 97.6 kbps
    est = ThroughputEstimator(1.0)
    est.record_event(0, 50)
    assert est.estimate_kbps(1_000_000) == pytest.approx(97.6)


def test_estimator_reports_only_closed_windows():
    est = ThroughputEstimator(1.0)
    est.record_event(0, 50)
    assert est.estimate_kbps(999_999) is None  # first window still open
    est.record_event(1_000_000, 10)
    # at 1.5 s the reportable window is still window 0
    assert est.estimate_kbps(1_500_000) == pytest.approx(97.6)
    assert est.estimate_kbps(2_000_000) == pytest.approx(10 * PAYLOAD_BITS / 1000.0)


def test_estimator_zero_traffic_window():
    est = ThroughputEstimator(1.0)
    est.record_event(0, 4)
    assert est.estimate_kbps(3_000_000) == 0.0  # window 2 closed empty


def test_estimator_event_straddles_windows():
    # event starting at 999 ms puts all its packets into window 1
    est = ThroughputEstimator(1.0)
    est.record_event(999_000, 3)
    assert est.estimate_kbps(1_000_000) == 0.0
    assert est.estimate_kbps(2_000_000) == pytest.approx(3 * PAYLOAD_BITS / 1000.0)


def test_record_delivery_equivalent_to_record_event():
    a = ThroughputEstimator(10.0)
    b = ThroughputEstimator(10.0)
    a.record_event(123_000, 40)
    for t in packet_timestamps_us(123_000, 40):
        b.record_delivery(PAYLOAD_BITS, t)
    assert a.window_series_kbps(1_000_000) == b.window_series_kbps(1_000_000)


def test_window_series_length():
    est = ThroughputEstimator(2.0)
    assert len(est.window_series_kbps(3_000_000)) == 6


def test_pkt_cycle_is_exact_microseconds():
    assert PKT_CYCLE_US == 1500
