"""Peripheral power model and controller-overhead tables.

The peripheral draw splits into an idle floor, a per-kbps data handling cost
and the radio itself, which scales exponentially with transmit power (linear
in mW) weighted by its duty cycle. The FEM roughly doubles the radio term.
"""

import math
from dataclasses import dataclass


@dataclass
class PowerModel:
    idle_mw: float = 0.604
    data_mw_per_kbps: float = 0.004
    radio_base_mw: float = 21.24
    radio_scale_mw: float = 0.5196
    fem_multiplier: float = 2.0


DEFAULT_POWER_MODEL = PowerModel()


def radio_power_mw(model: PowerModel, eff_txp_dbm: float) -> float:
    """Radio draw at 100% duty for a given effective TX power."""
    return model.radio_base_mw + model.radio_scale_mw * 10.0 ** (eff_txp_dbm / 10.0)


def peripheral_power_mw(
    model: PowerModel,
    eff_txp_dbm: float,
    duty: float,
    throughput_kbps: float,
    fem_present: bool,
) -> float:
    """Average peripheral system power over a connection interval."""
    radio = radio_power_mw(model, eff_txp_dbm) * duty
    if fem_present:
        radio *= model.fem_multiplier
    return model.idle_mw + model.data_mw_per_kbps * throughput_kbps + radio


# Controller overhead vs update frequency, mW. Values between the measured
# frequencies interpolate linearly in log10(f); outside they clamp.
PERIPHERAL_OVERHEAD_MW = {
    0.01: 0.001,
    0.1: 0.003,
    1.0: 0.01,
    10.0: 0.02,
    100.0: 0.18,
    1000.0: 0.34,
}

CENTRAL_RSSI_OVERHEAD_MW = {
    0.01: 0.30,
    0.1: 0.48,
    1.0: 0.67,
    10.0: 0.85,
    100.0: 1.05,
    1000.0: 2.2,
}

# Throughput bookkeeping costs the central twice the RSSI pipeline.
CENTRAL_THROUGHPUT_OVERHEAD_MW = {f: 2.0 * v for f, v in CENTRAL_RSSI_OVERHEAD_MW.items()}


def _interp_log_f(table: dict, update_hz: float) -> float:
    if update_hz <= 0.0:
        raise ValueError("update_hz must be positive")
    freqs = sorted(table)
    if update_hz <= freqs[0]:
        return table[freqs[0]]
    if update_hz >= freqs[-1]:
        return table[freqs[-1]]
    x = math.log10(update_hz)
    for lo, hi in zip(freqs, freqs[1:]):
        if update_hz <= hi:
            xlo, xhi = math.log10(lo), math.log10(hi)
            t = (x - xlo) / (xhi - xlo)
            return table[lo] + t * (table[hi] - table[lo])
    raise AssertionError("unreachable")


def control_overhead_mw(
    role: str,
    strategy: str,
    update_hz: float,
    outer_update_hz: float = 1.0,
) -> float:
    """Extra draw of running a control strategy at the given update rate(s).

    The hybrid pays for both of its loops: the inner RSSI loop at update_hz
    and the outer throughput loop at outer_update_hz.
    """
    if role not in ("peripheral", "central"):
        raise ValueError(f"unknown role {role!r}")
    if strategy == "fixed":
        return 0.0
    if role == "peripheral":
        # Applying a TXP register write costs the same whichever signal drove it.
        if strategy in ("rssi", "throughput"):
            return _interp_log_f(PERIPHERAL_OVERHEAD_MW, update_hz)
        if strategy == "hybrid":
            return _interp_log_f(PERIPHERAL_OVERHEAD_MW, update_hz) + _interp_log_f(
                PERIPHERAL_OVERHEAD_MW, outer_update_hz
            )
    else:
        if strategy == "rssi":
            return _interp_log_f(CENTRAL_RSSI_OVERHEAD_MW, update_hz)
        if strategy == "throughput":
            return _interp_log_f(CENTRAL_THROUGHPUT_OVERHEAD_MW, update_hz)
        if strategy == "hybrid":
            return _interp_log_f(CENTRAL_RSSI_OVERHEAD_MW, update_hz) + _interp_log_f(
                CENTRAL_THROUGHPUT_OVERHEAD_MW, outer_update_hz
            )
    raise ValueError(f"unknown strategy {strategy!r}")
