"""Throughput estimation over tumbling windows.

All timestamps are integer microseconds so window membership is exact
arithmetic, never float comparison. A window w covers [w*win, (w+1)*win) and
closes at (w+1)*win; the estimator always reports the most recently closed
window, including zero-traffic ones.
"""

from .channel import PAYLOAD_BITS
from .radio import PKT_CYCLE_S

PKT_CYCLE_US = int(PKT_CYCLE_S * 1_000_000)


def window_us(calc_hz: float) -> int:
    """Tumbling window length for a calculation frequency."""
    if calc_hz <= 0.0:
        raise ValueError("calc_hz must be positive")
    win = round(1_000_000 / calc_hz)
    if win <= 0:
        raise ValueError("calc_hz too high for microsecond resolution")
    return win


def packet_timestamps_us(event_start_us: int, delivered: int):
    """Delivery instants for an event's packets (1.5 ms cycle each)."""
    return [event_start_us + PKT_CYCLE_US * (j + 1) for j in range(delivered)]


def window_counts(event_start_us: int, delivered: int, win_us: int):
    """Packets of one event grouped by window: list of (window, count).

    Closed form over the touched windows only, so a multi-second window
    costs O(1) instead of one dict update per packet.
    """
    if delivered <= 0:
        return []

    def before(boundary_us: int) -> int:
        # packets are at start + c*m for m = 1..delivered; count those < boundary
        n = (boundary_us - event_start_us - 1) // PKT_CYCLE_US
        return min(max(n, 0), delivered)

    first = (event_start_us + PKT_CYCLE_US) // win_us
    last = (event_start_us + PKT_CYCLE_US * delivered) // win_us
    out = []
    for w in range(first, last + 1):
        c = before((w + 1) * win_us) - before(w * win_us)
        if c:
            out.append((w, c))
    return out


class ThroughputEstimator:
    """Tumbling-window throughput estimate in kbps.

    Deliveries may arrive stamped slightly in the future (an event spans most
    of a connection interval); accumulation is by timestamp so the read side
    only ever exposes fully closed windows.
    """

    def __init__(self, calc_hz: float):
        self.win_us = window_us(calc_hz)
        self._bits = {}

    def record_delivery(self, bits: int, t_us: int) -> None:
        if bits <= 0:
            return
        w = t_us // self.win_us
        self._bits[w] = self._bits.get(w, 0) + bits

    def record_event(self, event_start_us: int, delivered: int) -> None:
        for w, count in window_counts(event_start_us, delivered, self.win_us):
            self._bits[w] = self._bits.get(w, 0) + PAYLOAD_BITS * count

    def estimate_kbps(self, now_us: int):
        """Estimate from the last closed window, or None before the first one."""
        last_closed = now_us // self.win_us - 1
        if last_closed < 0:
            return None
        return self._bits.get(last_closed, 0) * 1000.0 / self.win_us

    def window_series_kbps(self, duration_us: int):
        """Estimates of every window fully inside [0, duration_us)."""
        n = duration_us // self.win_us
        return [self._bits.get(w, 0) * 1000.0 / self.win_us for w in range(n)]
