"""Radio front end: chip TXP grid, FEM behavior, the connection-event engine
and supervision bookkeeping."""

import bisect
import math
from dataclasses import dataclass, field

from .channel import (
    CONN_INTERVAL_S,
    MAX_PACKETS_PER_EVENT,
    PAYLOAD_BITS,
    Environment,
    per,
)

PKT_CYCLE_S = 0.0015
SENSITIVITY_DBM = -90.0
# 8 connection intervals without a delivered packet drops the link.
SUPERVISION_TIMEOUT_S = 8 * CONN_INTERVAL_S

FEM_TX_SHIFT_DB = 12.0
FEM_RX_GAIN_DB = 13.0
CHIP_MAX_TX_DBM = 8.0

# System grid with the FEM in line: 1 dB steps at the top, 2 dB through the
# mid range, then the chip's coarse 6/12/6 dB tail down to the floor.
DEFAULT_TXP_LEVELS = (
    (-36.0, -34.0, -28.0, -16.0)
    + tuple(float(v) for v in range(-10, 1, 2))
    + tuple(float(v) for v in range(2, 21))
)


class TxPowerTable:
    """Supported commanded-TXP levels with nearest-level quantization."""

    def __init__(self, levels=DEFAULT_TXP_LEVELS):
        self.levels = tuple(sorted(float(v) for v in levels))
        if not self.levels:
            raise ValueError("power table needs at least one level")

    @property
    def min_dbm(self) -> float:
        return self.levels[0]

    @property
    def max_dbm(self) -> float:
        return self.levels[-1]

    def quantize(self, txp_dbm: float) -> float:
        """Clamp into range, then snap to the nearest level (ties go lower)."""
        if txp_dbm <= self.levels[0]:
            return self.levels[0]
        if txp_dbm >= self.levels[-1]:
            return self.levels[-1]
        i = bisect.bisect_left(self.levels, txp_dbm)
        lo, hi = self.levels[i - 1], self.levels[i]
        return lo if txp_dbm - lo <= hi - txp_dbm else hi

    def gap_below(self, level: float) -> float:
        """Distance to the next level down (0 at the bottom of the table)."""
        i = self.levels.index(level)
        return 0.0 if i == 0 else level - self.levels[i - 1]


def effective_tx_power_dbm(commanded_dbm: float, fem_present: bool) -> float:
    """Actual radiated power for a commanded setting.

    With the FEM present the command is realized as requested. Without it the
    12 dB external gain is gone and the bare chip also cannot exceed its own
    +8 dBm ceiling.
    """
    if fem_present:
        return commanded_dbm
    return min(commanded_dbm - FEM_TX_SHIFT_DB, CHIP_MAX_TX_DBM)


def rx_gain_db(fem_present: bool) -> float:
    return FEM_RX_GAIN_DB if fem_present else 0.0


@dataclass
class EventResult:
    delivered: int
    first_failure: bool
    event_rssi_dbm: float
    radio_active_s: float

    @property
    def bits(self) -> int:
        return self.delivered * PAYLOAD_BITS


def run_connection_event(env: Environment, event_rssi: float, u: float) -> EventResult:
    """Simulate one connection event at a fixed event RSSI.

    Packets go out back to back; the first failed packet ends the event.
    u is a uniform [0,1) draw that is inverted into the geometric count of
    successes before the first failure.
    """
    p = per(env, event_rssi)
    if event_rssi <= SENSITIVITY_DBM:
        p = 1.0  # hard receiver floor overrides the logistic curve
    if p <= 0.0:
        delivered, first_failure = MAX_PACKETS_PER_EVENT, False
    elif p >= 1.0:
        delivered, first_failure = 0, True
    else:
        # P(K >= k) = (1-p)^k, so K = floor(log U / log(1-p)).
        k = MAX_PACKETS_PER_EVENT if u <= 0.0 else int(math.log(u) / math.log1p(-p))
        if k >= MAX_PACKETS_PER_EVENT:
            delivered, first_failure = MAX_PACKETS_PER_EVENT, False
        else:
            delivered, first_failure = k, True
    active = (delivered + (1 if first_failure else 0)) * PKT_CYCLE_S
    return EventResult(delivered, first_failure, event_rssi, active)


def radio_duty_cycle(result: EventResult) -> float:
    """Fraction of the connection interval the radio was actually on."""
    return result.radio_active_s / CONN_INTERVAL_S


@dataclass
class LinkState:
    connected: bool = True
    supervision_deadline_s: float = SUPERVISION_TIMEOUT_S
    last_delivery_s: float = 0.0
    disconnect_time_s: float = field(default=math.nan)


def update_supervision(link: LinkState, delivered: int, now_s: float) -> LinkState:
    """Refresh or expire the supervision deadline.

    Only events that delivered at least one packet refresh the deadline; call
    with delivered=0 to run a pure expiry check. There is no reconnection.
    """
    if not link.connected:
        return link
    if delivered > 0:
        link.last_delivery_s = now_s
        link.supervision_deadline_s = now_s + SUPERVISION_TIMEOUT_S
    elif now_s >= link.supervision_deadline_s:
        link.connected = False
        link.disconnect_time_s = now_s
    return link
